//! Parsed program representation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sig::{EntityKind, OpKind};

/// Start position of a token or statement in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

/// A 2-D point expression in argument position.
#[derive(Debug, Clone, PartialEq)]
pub enum PointExpr {
    /// The reserved `initial_point` identifier, meaning (0, 0).
    Initial,
    Uv(f64, f64),
}

/// Reference to a bound entity, possibly indexing into a split result.
#[derive(Debug, Clone, PartialEq)]
pub struct RefExpr {
    pub name: String,
    pub index: Option<usize>,
}

impl RefExpr {
    pub fn render(&self) -> String {
        match self.index {
            Some(i) => format!("{}[{i}]", self.name),
            None => self.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArgValue {
    Text(String),
    Number(f64),
    Bool(bool),
    Point(PointExpr),
    Ref(RefExpr),
    RefList(Vec<RefExpr>),
    NumberList(Vec<f64>),
}

impl ArgValue {
    pub fn describe(&self) -> &'static str {
        match self {
            ArgValue::Text(_) => "text",
            ArgValue::Number(_) => "number",
            ArgValue::Bool(_) => "boolean",
            ArgValue::Point(_) => "point",
            ArgValue::Ref(_) => "reference",
            ArgValue::RefList(_) => "module list",
            ArgValue::NumberList(_) => "number list",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: Option<String>,
    pub value: ArgValue,
    pub span: Span,
}

/// Declared result type on the left of `=`.
#[derive(Debug, Clone, PartialEq)]
pub enum DeclType {
    Module,
    Unit,
    Room,
    ModuleList,
    Other(String),
}

impl DeclType {
    pub fn render(&self) -> String {
        match self {
            DeclType::Module => "Module".to_string(),
            DeclType::Unit => "Unit".to_string(),
            DeclType::Room => "Room".to_string(),
            DeclType::ModuleList => "List<Module>".to_string(),
            DeclType::Other(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingDecl {
    pub decl_type: DeclType,
    pub name: String,
}

/// One resolved action call.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionStatement {
    pub op: OpKind,
    /// Index into [`super::sig::SIGNATURES`].
    pub sig: usize,
    pub binding: Option<BindingDecl>,
    /// Arguments in source order.
    pub args: Vec<Arg>,
    pub named_style: bool,
    pub span: Span,
}

impl ActionStatement {
    /// The provided argument for a canonical parameter name, resolving
    /// positional arguments through the signature.
    pub fn arg(&self, param: &str) -> Option<&ArgValue> {
        let sig = super::sig::signature(self.sig);
        if self.named_style {
            self.args
                .iter()
                .find(|a| a.name.as_deref() == Some(param))
                .map(|a| &a.value)
        } else {
            sig.params
                .iter()
                .position(|p| p.name == param)
                .and_then(|i| self.args.get(i))
                .map(|a| &a.value)
        }
    }
}

/// Alias binding one piece of a split result: `Module m = pieces[0];`.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceBinding {
    pub decl_type: DeclType,
    pub name: String,
    pub list: String,
    pub index: usize,
    pub span: Span,
}

/// A structurally parsed call whose callee is not in the signature table.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownStmt {
    pub callee: String,
    /// Verbatim source slice, without the statement terminator.
    pub raw: String,
    pub binding_name: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Action(ActionStatement),
    Piece(PieceBinding),
    Unknown(UnknownStmt),
}

impl Statement {
    pub fn span(&self) -> Span {
        match self {
            Statement::Action(a) => a.span,
            Statement::Piece(p) => p.span,
            Statement::Unknown(u) => u.span,
        }
    }
}

/// What a bound name denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Module,
    Unit,
    Room,
    SplitList,
    /// Bound by a statement whose operation is unknown.
    Opaque,
}

impl SymbolKind {
    pub fn matches_entity(self, kind: EntityKind) -> bool {
        matches!(
            (self, kind),
            (SymbolKind::Module, EntityKind::Module)
                | (SymbolKind::Unit, EntityKind::Unit)
                | (SymbolKind::Room, EntityKind::Room)
                | (SymbolKind::Opaque, _)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Index of the declaring statement (first declaration wins).
    pub statement: usize,
}

/// A parsed program: ordered statements plus the symbol table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub statements: Vec<Statement>,
    pub symbols: BTreeMap<String, Symbol>,
}
