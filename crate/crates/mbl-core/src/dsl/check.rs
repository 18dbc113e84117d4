//! Static checks over parsed programs.
//!
//! `static_check` walks a program once, carrying a position-aware symbol
//! table, and reports everything wrong with it as a flat diagnostic list.
//! A program that parses and checks clean is guaranteed to resolve every
//! reference, satisfy every signature, and stay inside every enum domain;
//! the executor can then assume a well-formed call stream.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::ParseError;
use super::parser::parse_program;
use super::sig::{self, EntityKind, EnumClass, OpKind, Param, ParamKind, ResultKind};
use crate::geom::Direction;

/// What kind of defect a diagnostic reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagCategory {
    Syntax,
    UnknownOp,
    Arity,
    Type,
    EnumValue,
    UndefinedName,
    Redefinition,
    WrongArgOrder,
}

impl DiagCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCategory::Syntax => "syntax",
            DiagCategory::UnknownOp => "unknown-op",
            DiagCategory::Arity => "arity",
            DiagCategory::Type => "type",
            DiagCategory::EnumValue => "enum-value",
            DiagCategory::UndefinedName => "undefined-name",
            DiagCategory::Redefinition => "redefinition",
            DiagCategory::WrongArgOrder => "wrong-arg-order",
        }
    }
}

impl std::fmt::Display for DiagCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Index of the offending statement; `None` for parse failures.
    pub statement: Option<usize>,
    pub span: Span,
    pub category: DiagCategory,
    pub message: String,
}

impl Diagnostic {
    pub fn from_parse_error(err: &ParseError) -> Diagnostic {
        Diagnostic {
            statement: None,
            span: Span {
                line: err.line,
                col: err.col,
            },
            category: DiagCategory::Syntax,
            message: err.message.clone(),
        }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "line {}, col {}: {}: {}",
            self.span.line, self.span.col, self.category, self.message
        )
    }
}

/// Parses and checks in one step. On a parse failure the program is
/// `None` and the diagnostics hold a single syntax entry.
pub fn parse_and_check(src: &str) -> (Option<Program>, Vec<Diagnostic>) {
    match parse_program(src) {
        Ok(program) => {
            let diags = static_check(&program);
            (Some(program), diags)
        }
        Err(e) => (None, vec![Diagnostic::from_parse_error(&e)]),
    }
}

struct Scope {
    names: BTreeMap<String, SymbolKind>,
}

impl Scope {
    fn new() -> Scope {
        Scope {
            names: BTreeMap::new(),
        }
    }

    fn get(&self, name: &str) -> Option<SymbolKind> {
        self.names.get(name).copied()
    }

    fn declare(
        &mut self,
        name: &str,
        kind: SymbolKind,
        statement: usize,
        span: Span,
        diags: &mut Vec<Diagnostic>,
    ) {
        if self.names.contains_key(name) {
            diags.push(Diagnostic {
                statement: Some(statement),
                span,
                category: DiagCategory::Redefinition,
                message: format!("`{name}` is defined more than once"),
            });
        } else {
            self.names.insert(name.to_string(), kind);
        }
    }
}

fn entity_str(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Module => "module",
        EntityKind::Unit => "unit",
        EntityKind::Room => "room",
    }
}

fn symbol_str(kind: SymbolKind) -> &'static str {
    match kind {
        SymbolKind::Module => "module",
        SymbolKind::Unit => "unit",
        SymbolKind::Room => "room",
        SymbolKind::SplitList => "module list",
        SymbolKind::Opaque => "value",
    }
}

fn kind_str(kind: ParamKind) -> &'static str {
    match kind {
        ParamKind::Name => "text",
        ParamKind::Enum(c) => c.describe(),
        ParamKind::Number => "number",
        ParamKind::Bool => "boolean",
        ParamKind::Point => "point",
        ParamKind::Ref(EntityKind::Module) => "module reference",
        ParamKind::Ref(EntityKind::Unit) => "unit reference",
        ParamKind::Ref(EntityKind::Room) => "room reference",
        ParamKind::ModuleList => "module list",
        ParamKind::NumberList => "number list",
    }
}

/// Shallow shape match plus enum-domain membership. This is the test
/// the positional swap heuristic relies on, so it must stay cheap and
/// scope-free.
pub(crate) fn plausible(kind: ParamKind, value: &ArgValue) -> bool {
    match (kind, value) {
        (ParamKind::Enum(c), ArgValue::Text(t)) => c.contains(t),
        (ParamKind::Name, ArgValue::Text(_)) => true,
        (ParamKind::Number, ArgValue::Number(_)) => true,
        (ParamKind::Bool, ArgValue::Bool(_)) => true,
        (ParamKind::Point, ArgValue::Point(_)) => true,
        (ParamKind::Ref(_), ArgValue::Ref(_)) => true,
        (ParamKind::ModuleList, ArgValue::RefList(_)) => true,
        (ParamKind::NumberList, ArgValue::NumberList(_)) => true,
        _ => false,
    }
}

struct Checker {
    scope: Scope,
    diags: Vec<Diagnostic>,
}

/// Checks a parsed program and returns its diagnostics, empty when the
/// program is clean.
pub fn static_check(program: &Program) -> Vec<Diagnostic> {
    let mut checker = Checker {
        scope: Scope::new(),
        diags: Vec::new(),
    };
    for (si, stmt) in program.statements.iter().enumerate() {
        match stmt {
            Statement::Action(a) => checker.check_action(si, a),
            Statement::Piece(p) => checker.check_piece(si, p),
            Statement::Unknown(u) => checker.check_unknown(si, u),
        }
    }
    checker.diags
}

impl Checker {
    fn push(&mut self, si: usize, span: Span, category: DiagCategory, message: String) {
        self.diags.push(Diagnostic {
            statement: Some(si),
            span,
            category,
            message,
        });
    }

    fn check_unknown(&mut self, si: usize, u: &UnknownStmt) {
        self.push(
            si,
            u.span,
            DiagCategory::UnknownOp,
            format!("unknown operation `{}`", u.callee),
        );
        if let Some(name) = &u.binding_name {
            let span = u.span;
            self.declare(name.clone(), SymbolKind::Opaque, si, span);
        }
    }

    fn check_piece(&mut self, si: usize, p: &PieceBinding) {
        match self.scope.get(&p.list) {
            None => self.push(
                si,
                p.span,
                DiagCategory::UndefinedName,
                format!("undefined name `{}`", p.list),
            ),
            Some(SymbolKind::SplitList) | Some(SymbolKind::Opaque) => {}
            Some(other) => self.push(
                si,
                p.span,
                DiagCategory::Type,
                format!("`{}` is a {} and cannot be indexed", p.list, symbol_str(other)),
            ),
        }
        if p.index > 1 {
            self.push(
                si,
                p.span,
                DiagCategory::Type,
                format!(
                    "piece index {} is out of range; a split yields pieces 0 and 1",
                    p.index
                ),
            );
        }
        if p.decl_type != DeclType::Module {
            self.push(
                si,
                p.span,
                DiagCategory::Type,
                format!(
                    "a split piece is a Module, not `{}`",
                    p.decl_type.render()
                ),
            );
        }
        self.declare(p.name.clone(), SymbolKind::Module, si, p.span);
    }

    fn declare(&mut self, name: String, kind: SymbolKind, si: usize, span: Span) {
        self.scope.declare(&name, kind, si, span, &mut self.diags);
    }

    fn check_action(&mut self, si: usize, a: &ActionStatement) {
        let sig = sig::signature(a.sig);
        if a.named_style {
            self.check_named_args(si, a, sig.params, &sig.callee.render());
        } else {
            self.check_positional_args(si, a, sig.params, &sig.callee.render());
        }
        self.check_alignment_axis(si, a, sig.params);
        self.check_list_arities(si, a);
        self.check_binding(si, a, sig.result, &sig.callee.render());
    }

    fn check_named_args(
        &mut self,
        si: usize,
        a: &ActionStatement,
        params: &'static [Param],
        callee: &str,
    ) {
        let mut seen: Vec<&str> = Vec::new();
        for arg in &a.args {
            let name = arg.name.as_deref().unwrap_or_default();
            match params.iter().find(|p| p.name == name) {
                None => self.push(
                    si,
                    arg.span,
                    DiagCategory::Arity,
                    format!("{callee} has no parameter named `{name}`"),
                ),
                Some(p) => {
                    if seen.contains(&p.name) {
                        self.push(
                            si,
                            arg.span,
                            DiagCategory::Arity,
                            format!("argument `{name}` is given more than once"),
                        );
                    } else {
                        seen.push(p.name);
                        self.check_value(si, p, arg);
                    }
                }
            }
        }
        let missing: Vec<&str> = params
            .iter()
            .filter(|p| p.required() && !seen.contains(&p.name))
            .map(|p| p.name)
            .collect();
        if !missing.is_empty() {
            self.push(
                si,
                a.span,
                DiagCategory::Arity,
                format!("missing required argument(s): {}", missing.join(", ")),
            );
        }
    }

    fn check_positional_args(
        &mut self,
        si: usize,
        a: &ActionStatement,
        params: &'static [Param],
        callee: &str,
    ) {
        if a.args.len() > params.len() {
            let span = a.args[params.len()].span;
            self.push(
                si,
                span,
                DiagCategory::Arity,
                format!(
                    "{callee} takes at most {} arguments, got {}",
                    params.len(),
                    a.args.len()
                ),
            );
        }
        let n = a.args.len().min(params.len());
        let missing: Vec<&str> = params[n..]
            .iter()
            .filter(|p| p.required())
            .map(|p| p.name)
            .collect();
        if !missing.is_empty() {
            self.push(
                si,
                a.span,
                DiagCategory::Arity,
                format!("missing required argument(s): {}", missing.join(", ")),
            );
        }
        let mut i = 0;
        while i < n {
            let p = &params[i];
            let arg = &a.args[i];
            if plausible(p.kind, &arg.value) {
                self.check_value(si, p, arg);
                i += 1;
                continue;
            }
            let swap_fixes = i + 1 < n
                && !plausible(params[i + 1].kind, &a.args[i + 1].value)
                && plausible(p.kind, &a.args[i + 1].value)
                && plausible(params[i + 1].kind, &arg.value);
            if swap_fixes {
                self.push(
                    si,
                    arg.span,
                    DiagCategory::WrongArgOrder,
                    format!(
                        "arguments {} and {} appear swapped: expected `{}` then `{}`",
                        i + 1,
                        i + 2,
                        p.name,
                        params[i + 1].name
                    ),
                );
                i += 2;
                continue;
            }
            self.push_mismatch(si, p, arg);
            i += 1;
        }
    }

    fn push_mismatch(&mut self, si: usize, p: &Param, arg: &Arg) {
        if let (ParamKind::Enum(class), ArgValue::Text(t)) = (p.kind, &arg.value) {
            self.push(
                si,
                arg.span,
                DiagCategory::EnumValue,
                format!(
                    "`{}` is not a valid {} (expected one of: {})",
                    t,
                    class.describe(),
                    class.domain().join(", ")
                ),
            );
        } else {
            self.push(
                si,
                arg.span,
                DiagCategory::Type,
                format!(
                    "argument `{}` expects a {}, got a {}",
                    p.name,
                    kind_str(p.kind),
                    arg.value.describe()
                ),
            );
        }
    }

    /// Deep per-argument check, run only when the shallow shape matches.
    fn check_value(&mut self, si: usize, p: &Param, arg: &Arg) {
        if !plausible(p.kind, &arg.value) {
            self.push_mismatch(si, p, arg);
            return;
        }
        match (&p.kind, &arg.value) {
            (ParamKind::Number, ArgValue::Number(v)) => {
                self.check_number(si, p.name, *v, arg.span);
            }
            (ParamKind::NumberList, ArgValue::NumberList(items)) => {
                for v in items {
                    self.check_number(si, p.name, *v, arg.span);
                }
            }
            (ParamKind::Ref(expected), ArgValue::Ref(r)) => {
                self.check_ref(si, r, *expected, arg.span);
            }
            (ParamKind::ModuleList, ArgValue::RefList(items)) => {
                for r in items {
                    self.check_ref(si, r, EntityKind::Module, arg.span);
                }
            }
            _ => {}
        }
    }

    fn check_number(&mut self, si: usize, param: &str, v: f64, span: Span) {
        if !v.is_finite() {
            self.push(
                si,
                span,
                DiagCategory::Type,
                format!("argument `{param}` must be a finite number"),
            );
            return;
        }
        match param {
            "ratio" => {
                if v <= 0.0 || v >= 1.0 {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!("split ratio must lie strictly between 0 and 1, got {v}"),
                    );
                }
            }
            "length" | "width" | "dimension" | "dimensions" => {
                if v <= 0.0 {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!("argument `{param}` must be positive, got {v}"),
                    );
                }
            }
            _ => {}
        }
    }

    fn check_ref(&mut self, si: usize, r: &RefExpr, expected: EntityKind, span: Span) {
        let Some(kind) = self.scope.get(&r.name) else {
            self.push(
                si,
                span,
                DiagCategory::UndefinedName,
                format!("undefined name `{}`", r.name),
            );
            return;
        };
        match r.index {
            Some(idx) => {
                if !matches!(kind, SymbolKind::SplitList | SymbolKind::Opaque) {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!("`{}` is a {} and cannot be indexed", r.name, symbol_str(kind)),
                    );
                    return;
                }
                if idx > 1 {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!(
                            "piece index {idx} is out of range; a split yields pieces 0 and 1"
                        ),
                    );
                }
                if expected != EntityKind::Module {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!(
                            "a split piece is a module, but a {} is required here",
                            entity_str(expected)
                        ),
                    );
                }
            }
            None => {
                if kind == SymbolKind::SplitList {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!(
                            "`{}` is a module list; index a piece like `{}[0]`",
                            r.name, r.name
                        ),
                    );
                } else if !kind.matches_entity(expected) {
                    self.push(
                        si,
                        span,
                        DiagCategory::Type,
                        format!(
                            "`{}` is a {}, but a {} is required here",
                            r.name,
                            symbol_str(kind),
                            entity_str(expected)
                        ),
                    );
                }
            }
        }
    }

    /// An alignment picks one of the two edges running along the
    /// approach axis, so it must name a side perpendicular to the
    /// direction (or "none").
    fn check_alignment_axis(&mut self, si: usize, a: &ActionStatement, params: &'static [Param]) {
        let has_direction = params
            .iter()
            .any(|p| p.name == "direction" && p.kind == ParamKind::Enum(EnumClass::Direction));
        let has_alignment = params.iter().any(|p| p.name == "alignment");
        if !has_direction || !has_alignment {
            return;
        }
        let (Some(ArgValue::Text(d)), Some(ArgValue::Text(al))) =
            (a.arg("direction"), a.arg("alignment"))
        else {
            return;
        };
        if al == "none" {
            return;
        }
        let (Some(dir), Some(align)) = (Direction::from_str(d), Direction::from_str(al)) else {
            return;
        };
        if !dir.is_perpendicular(align) {
            self.push(
                si,
                a.span,
                DiagCategory::EnumValue,
                format!("alignment `{al}` must be perpendicular to direction `{d}`"),
            );
        }
    }

    fn check_list_arities(&mut self, si: usize, a: &ActionStatement) {
        if a.op == OpKind::Merge {
            if let Some(ArgValue::RefList(items)) = a.arg("modules") {
                if items.len() < 2 {
                    self.push(
                        si,
                        a.span,
                        DiagCategory::Arity,
                        format!("merging needs at least two modules, got {}", items.len()),
                    );
                }
            }
        }
        if a.op == OpKind::UnitDirectional {
            if let (Some(ArgValue::RefList(modules)), Some(ArgValue::NumberList(dims))) =
                (a.arg("modules"), a.arg("dimensions"))
            {
                if modules.len() != dims.len() {
                    self.push(
                        si,
                        a.span,
                        DiagCategory::Arity,
                        format!(
                            "expected one dimension per module: {} modules, {} dimensions",
                            modules.len(),
                            dims.len()
                        ),
                    );
                }
            }
        }
    }

    fn check_binding(
        &mut self,
        si: usize,
        a: &ActionStatement,
        result: ResultKind,
        callee: &str,
    ) {
        let Some(binding) = &a.binding else {
            return;
        };
        if result == ResultKind::NoResult {
            self.push(
                si,
                a.span,
                DiagCategory::Type,
                format!("{callee} produces no result to bind"),
            );
            return;
        }
        let (expected_decl, symbol_kind) = match result {
            ResultKind::Module => (DeclType::Module, SymbolKind::Module),
            ResultKind::Unit => (DeclType::Unit, SymbolKind::Unit),
            ResultKind::Room => (DeclType::Room, SymbolKind::Room),
            ResultKind::ModuleList => (DeclType::ModuleList, SymbolKind::SplitList),
            ResultKind::NoResult => unreachable!(),
        };
        if binding.decl_type != expected_decl {
            self.push(
                si,
                a.span,
                DiagCategory::Type,
                format!(
                    "declared as `{}`, but {} yields a `{}`",
                    binding.decl_type.render(),
                    callee,
                    expected_decl.render()
                ),
            );
        }
        self.declare(binding.name.clone(), symbol_kind, si, a.span);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(src: &str) -> Vec<Diagnostic> {
        let (_, diags) = parse_and_check(src);
        diags
    }

    fn categories(src: &str) -> Vec<DiagCategory> {
        check(src).into_iter().map(|d| d.category).collect()
    }

    #[test]
    fn clean_program_has_no_diagnostics() {
        let src = r#"
Module module_1 = new Module(name: "Module 1", point: initial_point, length: 2800, width: 6880);
Module module_2 = new Module(name: "Module 2", module: module_1, direction: "east", length: 2800, width: 6880);
List<Module> pieces = Utils.SplitModule(module: module_2, direction: "west-east", ratio: 0.4);
Module module_3 = pieces[0];
Module module_4 = pieces[1];
Module module_5 = Utils.MergeModules(modules: new List<Module> { module_1, module_4 });
Unit unit_1 = new Unit(name: "Unit 1", modules: new List<Module> { module_5, module_3 });
Room living_room = new Room(name: "Living Room", unit: unit_1, regular: true);
Room bedroom = new Room(name: "Bedroom 1", module: module_3, unit: unit_1, direction: "north", dimension: 1500);
Room bathroom = new Room(name: "Bathroom 1", unit: unit_1, room: bedroom, direction: "south", length: 1200, width: 1600, alignment: "west");
Utils.CreateDoorForRoom(room: bedroom, direction: "south", alignment: "east", offset: 100);
Utils.CreateDoorOnMidpointForModule(module: module_3, direction: "west");
Utils.CreateHole(module: module_5, direction: "east", dimension: 1200);
"#;
        assert_eq!(check(src), Vec::new());
    }

    #[test]
    fn unknown_callee_is_reported_once() {
        let src = "Utils.CreateWindow(module: m, direction: \"north\");";
        assert_eq!(categories(src), vec![DiagCategory::UnknownOp]);
    }

    #[test]
    fn missing_required_named_argument() {
        let src = r#"Module m = new Module(name: "M", point: initial_point, length: 2800);"#;
        assert_eq!(categories(src), vec![DiagCategory::Arity]);
    }

    #[test]
    fn hallucinated_named_argument() {
        let src = r#"Module m = new Module(name: "M", point: initial_point, length: 2800, width: 6880, height: 3000);"#;
        assert_eq!(categories(src), vec![DiagCategory::Arity]);
    }

    #[test]
    fn surplus_positional_argument() {
        let src = r#"Module m = new Module("M", initial_point, 2800, 6880, 42);"#;
        let cats = categories(src);
        assert!(cats.contains(&DiagCategory::Arity), "{cats:?}");
    }

    #[test]
    fn merge_of_one_module_is_an_arity_error() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module b = Utils.MergeModules(modules: new List<Module> { a });
"#;
        assert_eq!(categories(src), vec![DiagCategory::Arity]);
    }

    #[test]
    fn dimensions_must_pair_with_modules() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module b = new Module(name: "B", module: a, direction: "east", length: 2800, width: 6880);
Unit u = new Unit(name: "U", modules: new List<Module> { a, b }, direction: "north", dimensions: new List<double> { 2000 });
"#;
        assert_eq!(categories(src), vec![DiagCategory::Arity]);
    }

    #[test]
    fn bad_enum_member_is_enum_value() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module b = new Module(name: "B", module: a, direction: "up", length: 2800, width: 6880);
"#;
        assert_eq!(categories(src), vec![DiagCategory::EnumValue]);
    }

    #[test]
    fn parallel_alignment_is_enum_value() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module b = new Module(name: "B", module: a, direction: "south", length: 2240, width: 1620, alignment: "north");
"#;
        assert_eq!(categories(src), vec![DiagCategory::EnumValue]);
    }

    #[test]
    fn ratio_out_of_range_is_a_type_error() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
List<Module> p = Utils.SplitModule(module: a, direction: "west-east", ratio: 1.5);
"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn negative_length_is_a_type_error() {
        let src = r#"Module a = new Module(name: "A", point: initial_point, length: -2800, width: 6880);"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn wrong_entity_kind_is_a_type_error() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Unit u = new Unit(name: "U", modules: new List<Module> { a });
Room r = new Room(name: "R", unit: u, regular: true);
Utils.CreateDoorForModule(module: r, direction: "north");
"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn undefined_reference() {
        let src = r#"Utils.CreateDoorForRoom(room: ghost, direction: "north");"#;
        assert_eq!(categories(src), vec![DiagCategory::UndefinedName]);
    }

    #[test]
    fn use_before_declaration() {
        let src = r#"
Utils.CreateDoorForModule(module: a, direction: "north");
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
"#;
        assert_eq!(categories(src), vec![DiagCategory::UndefinedName]);
    }

    #[test]
    fn duplicate_binding_name() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module a = new Module(name: "B", module: a, direction: "east", length: 2800, width: 6880);
"#;
        assert_eq!(categories(src), vec![DiagCategory::Redefinition]);
    }

    #[test]
    fn swapped_positional_pair_is_wrong_arg_order() {
        let src = r#"
Module a = new Module("A", initial_point, 2800, 6880);
List<Module> p = Utils.SplitModule(a, 0.4, "west-east");
"#;
        assert_eq!(categories(src), vec![DiagCategory::WrongArgOrder]);
    }

    #[test]
    fn swapped_leading_pair_in_constructor() {
        let src = r#"Module a = new Module(initial_point, "A", 2800, 6880);"#;
        assert_eq!(categories(src), vec![DiagCategory::WrongArgOrder]);
    }

    #[test]
    fn binding_a_resultless_call_is_a_type_error() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
Module d = Utils.CreateDoorForModule(module: a, direction: "north");
"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn declared_type_must_match_result() {
        let src = r#"Unit a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn bare_split_list_where_module_expected() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
List<Module> p = Utils.SplitModule(module: a, direction: "west-east", ratio: 0.5);
Utils.CreateDoorForModule(module: p, direction: "north");
"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn piece_index_out_of_range() {
        let src = r#"
Module a = new Module(name: "A", point: initial_point, length: 2800, width: 6880);
List<Module> p = Utils.SplitModule(module: a, direction: "west-east", ratio: 0.5);
Module b = p[2];
"#;
        assert_eq!(categories(src), vec![DiagCategory::Type]);
    }

    #[test]
    fn syntax_error_produces_a_single_syntax_diagnostic() {
        let (program, diags) = parse_and_check("Module m = new Module(name: ;");
        assert!(program.is_none());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].category, DiagCategory::Syntax);
    }

    #[test]
    fn unknown_op_binding_still_defines_the_name() {
        let src = r#"
Module a = Utils.CloneModule(name: "A");
Utils.CreateDoorForModule(module: a, direction: "north");
"#;
        assert_eq!(categories(src), vec![DiagCategory::UnknownOp]);
    }
}
