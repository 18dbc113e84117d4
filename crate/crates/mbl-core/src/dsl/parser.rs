//! Recursive-descent parser for the action language.
//!
//! Grammar sketch (statements end at `;`, a newline, or end of input):
//!
//! ```text
//! stmt   := [type name "="] call | type name "=" ident "[" int "]"
//! call   := "new" Ctor "(" args ")" | "Utils" "." Fn "(" args ")"
//! arg    := [ident ":"] value
//! value  := string | number | bool | point | list | ident ["[" int "]"]
//! point  := "initial_point" | "new" "UV" "(" num "," num ")"
//! list   := "new" "List" "<" elem ">" "{" items "}"
//! ```
//!
//! A statement is either all-named or all-positional; mixing styles is a
//! syntax error. Calls to callees outside the signature table parse into
//! [`Statement::Unknown`] so the checker can flag them and repair can drop
//! them.

use std::collections::BTreeMap;

use super::ast::*;
use super::lexer::{lex, ParseError, Tok, Token};
use super::sig::{self, ResultKind};

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        symbols: BTreeMap::new(),
        statements: Vec::new(),
    };
    p.run()?;
    Ok(Program {
        statements: p.statements,
        symbols: p.symbols,
    })
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    symbols: BTreeMap<String, Symbol>,
    statements: Vec<Statement>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(ParseError::at(
                self.here(),
                format!("expected {what}, found {:?}", self.peek()),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let t = self.bump();
                Ok((s, t))
            }
            other => Err(ParseError::at(
                self.here(),
                format!("expected {what}, found {other:?}"),
            )),
        }
    }

    fn run(&mut self) -> Result<(), ParseError> {
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Semi) {
                self.bump();
            }
            if *self.peek() == Tok::Eof {
                return Ok(());
            }
            let stmt = self.parse_statement()?;
            self.finish_statement(stmt)?;
        }
    }

    fn finish_statement(&mut self, stmt: Statement) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Semi | Tok::Newline => {
                self.bump();
            }
            Tok::Eof => {}
            other => {
                return Err(ParseError::at(
                    self.here(),
                    format!("expected end of statement, found {other:?}"),
                ))
            }
        }
        self.statements.push(stmt);
        Ok(())
    }

    fn parse_statement(&mut self) -> Result<Statement, ParseError> {
        let start_tok = self.toks[self.pos].clone();
        match self.peek().clone() {
            Tok::Ident(head) if head == "new" => self.parse_call_statement(None, start_tok.start),
            Tok::Ident(head) if head == "Utils" && *self.peek_at(1) == Tok::Dot => {
                self.parse_call_statement(None, start_tok.start)
            }
            Tok::Ident(_) => self.parse_declaration(start_tok.start),
            other => Err(ParseError::at(
                self.here(),
                format!("expected a statement, found {other:?}"),
            )),
        }
    }

    fn parse_declaration(&mut self, start: usize) -> Result<Statement, ParseError> {
        let span = self.here();
        let (type_word, _) = self.expect_ident("a type name")?;
        let decl_type = if type_word == "List" {
            self.expect(Tok::Lt, "`<`")?;
            let (elem, _) = self.expect_ident("a list element type")?;
            self.expect(Tok::Gt, "`>`")?;
            if elem == "Module" {
                DeclType::ModuleList
            } else {
                DeclType::Other(format!("List<{elem}>"))
            }
        } else {
            match type_word.as_str() {
                "Module" => DeclType::Module,
                "Unit" => DeclType::Unit,
                "Room" => DeclType::Room,
                other => DeclType::Other(other.to_string()),
            }
        };
        let (name, _) = self.expect_ident("a variable name")?;
        self.expect(Tok::Eq, "`=`")?;

        match self.peek().clone() {
            Tok::Ident(head) if head == "new" => {
                let binding = BindingDecl {
                    decl_type,
                    name,
                    };
                let mut stmt = self.parse_call_statement(Some(binding), start)?;
                if let Statement::Action(a) = &mut stmt {
                    a.span = span;
                }
                Ok(stmt)
            }
            Tok::Ident(head) if head == "Utils" => {
                let binding = BindingDecl { decl_type, name };
                let mut stmt = self.parse_call_statement(Some(binding), start)?;
                if let Statement::Action(a) = &mut stmt {
                    a.span = span;
                }
                Ok(stmt)
            }
            Tok::Ident(_) => {
                let (list, _) = self.expect_ident("a split-list name")?;
                self.expect(Tok::LBracket, "`[`")?;
                let idx_span = self.here();
                let index = match self.bump().tok {
                    Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => v as usize,
                    _ => {
                        return Err(ParseError::at(
                            idx_span,
                            "expected a non-negative integer index",
                        ))
                    }
                };
                self.expect(Tok::RBracket, "`]`")?;
                self.declare(name.clone(), SymbolKind::Module);
                Ok(Statement::Piece(PieceBinding {
                    decl_type,
                    name,
                    list,
                    index,
                    span,
                }))
            }
            other => Err(ParseError::at(
                self.here(),
                format!("expected a constructor, Utils call, or index expression, found {other:?}"),
            )),
        }
    }

    /// Parses `new Ctor(...)` or `Utils.Fn(...)`, resolves the signature,
    /// and falls back to an unknown statement for unlisted callees.
    fn parse_call_statement(
        &mut self,
        binding: Option<BindingDecl>,
        start: usize,
    ) -> Result<Statement, ParseError> {
        let span = self.here();
        let (head, _) = self.expect_ident("`new` or `Utils`")?;
        let (callee_label, sigs) = if head == "new" {
            let (ctor, _) = self.expect_ident("a constructor name")?;
            (format!("new {ctor}"), sig::ctor_signatures(&ctor))
        } else {
            self.expect(Tok::Dot, "`.`")?;
            let (func, _) = self.expect_ident("a Utils function name")?;
            (format!("Utils.{func}"), sig::utils_signatures(&func))
        };
        self.expect(Tok::LParen, "`(`")?;
        let args = self.parse_args()?;
        let end_tok = self.expect(Tok::RParen, "`)`")?;

        let named_count = args.iter().filter(|a| a.name.is_some()).count();
        if named_count != 0 && named_count != args.len() {
            return Err(ParseError::at(
                span,
                "mixed named and positional arguments in one call",
            ));
        }
        let named_style = named_count == args.len() && !args.is_empty() || args.is_empty();

        if sigs.is_empty() {
            if let Some(b) = &binding {
                self.declare(b.name.clone(), SymbolKind::Opaque);
            }
            let raw = self.src[start..end_tok.end].trim().to_string();
            return Ok(Statement::Unknown(UnknownStmt {
                callee: callee_label,
                raw,
                binding_name: binding.map(|b| b.name),
                span,
            }));
        }

        let sig_idx = self.resolve_signature(&sigs, &args, named_count > 0);
        if let Some(b) = &binding {
            let kind = match sig::signature(sig_idx).result {
                ResultKind::Module => SymbolKind::Module,
                ResultKind::Unit => SymbolKind::Unit,
                ResultKind::Room => SymbolKind::Room,
                ResultKind::ModuleList => SymbolKind::SplitList,
                ResultKind::NoResult => SymbolKind::Opaque,
            };
            self.declare(b.name.clone(), kind);
        }
        Ok(Statement::Action(ActionStatement {
            op: sig::signature(sig_idx).op,
            sig: sig_idx,
            binding,
            args,
            named_style,
            span,
        }))
    }

    fn declare(&mut self, name: String, kind: SymbolKind) {
        let statement = self.statements.len();
        self.symbols
            .entry(name)
            .or_insert(Symbol { kind, statement });
    }

    fn parse_args(&mut self) -> Result<Vec<Arg>, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(args);
        }
        loop {
            let span = self.here();
            let name = if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon {
                let (n, _) = self.expect_ident("an argument name")?;
                self.bump();
                Some(n)
            } else {
                None
            };
            let value = self.parse_value()?;
            args.push(Arg { name, value, span });
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(args)
    }

    fn parse_value(&mut self) -> Result<ArgValue, ParseError> {
        let span = self.here();
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(ArgValue::Text(s))
            }
            Tok::Num(v) => {
                self.bump();
                Ok(ArgValue::Number(v))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.bump();
                Ok(ArgValue::Bool(w == "true"))
            }
            Tok::Ident(w) if w == "initial_point" => {
                self.bump();
                Ok(ArgValue::Point(PointExpr::Initial))
            }
            Tok::Ident(w) if w == "new" => {
                self.bump();
                let (what, _) = self.expect_ident("`List`, `UV`, or `XYZ`")?;
                match what.as_str() {
                    "UV" | "XYZ" => {
                        self.expect(Tok::LParen, "`(`")?;
                        let x = self.expect_number()?;
                        self.expect(Tok::Comma, "`,`")?;
                        let y = self.expect_number()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(ArgValue::Point(PointExpr::Uv(x, y)))
                    }
                    "List" => {
                        self.expect(Tok::Lt, "`<`")?;
                        let (elem, _) = self.expect_ident("a list element type")?;
                        self.expect(Tok::Gt, "`>`")?;
                        self.expect(Tok::LBrace, "`{`")?;
                        let value = match elem.as_str() {
                            "Module" => {
                                let mut items = Vec::new();
                                while *self.peek() != Tok::RBrace {
                                    items.push(self.parse_ref()?);
                                    if *self.peek() == Tok::Comma {
                                        self.bump();
                                    } else {
                                        break;
                                    }
                                }
                                ArgValue::RefList(items)
                            }
                            "double" | "Double" | "int" | "float" => {
                                let mut items = Vec::new();
                                while *self.peek() != Tok::RBrace {
                                    items.push(self.expect_number()?);
                                    if *self.peek() == Tok::Comma {
                                        self.bump();
                                    } else {
                                        break;
                                    }
                                }
                                ArgValue::NumberList(items)
                            }
                            other => {
                                return Err(ParseError::at(
                                    span,
                                    format!("unsupported list element type `{other}`"),
                                ))
                            }
                        };
                        self.expect(Tok::RBrace, "`}`")?;
                        Ok(value)
                    }
                    other => Err(ParseError::at(
                        span,
                        format!("`new {other}` is not a valid argument value"),
                    )),
                }
            }
            Tok::Ident(_) => Ok(ArgValue::Ref(self.parse_ref()?)),
            other => Err(ParseError::at(
                span,
                format!("expected an argument value, found {other:?}"),
            )),
        }
    }

    fn parse_ref(&mut self) -> Result<RefExpr, ParseError> {
        let (name, _) = self.expect_ident("a reference")?;
        let index = if *self.peek() == Tok::LBracket {
            self.bump();
            let span = self.here();
            let idx = match self.bump().tok {
                Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => v as usize,
                _ => {
                    return Err(ParseError::at(
                        span,
                        "expected a non-negative integer index",
                    ))
                }
            };
            self.expect(Tok::RBracket, "`]`")?;
            Some(idx)
        } else {
            None
        };
        Ok(RefExpr { name, index })
    }

    fn expect_number(&mut self) -> Result<f64, ParseError> {
        let span = self.here();
        match self.bump().tok {
            Tok::Num(v) => Ok(v),
            other => Err(ParseError::at(span, format!("expected a number, found {other:?}"))),
        }
    }

    /// Picks the best signature for the provided arguments.
    fn resolve_signature(&self, sigs: &[usize], args: &[Arg], named: bool) -> usize {
        if named {
            let mut best = sigs[0];
            let mut best_score = (isize::MIN, isize::MIN, isize::MIN);
            for &si in sigs {
                let s = sig::signature(si);
                let known: Vec<&str> = s.params.iter().map(|p| p.name).collect();
                let matched = args
                    .iter()
                    .filter(|a| known.contains(&a.name.as_deref().unwrap_or("")))
                    .count() as isize;
                let unknown = args.len() as isize - matched;
                let missing = s
                    .params
                    .iter()
                    .filter(|p| {
                        p.required()
                            && !args.iter().any(|a| a.name.as_deref() == Some(p.name))
                    })
                    .count() as isize;
                let score = (matched, -unknown, -missing);
                if score > best_score {
                    best_score = score;
                    best = si;
                }
            }
            best
        } else {
            let mut fallback = None;
            for &si in sigs {
                let s = sig::signature(si);
                if args.len() > s.params.len() {
                    continue;
                }
                let shape_ok = args
                    .iter()
                    .zip(s.params)
                    .all(|(a, p)| self.value_compatible(&a.value, p.kind));
                let tail_ok = s.params[args.len()..].iter().all(|p| !p.required());
                if shape_ok && tail_ok {
                    if args.len() == s.params.len() {
                        return si;
                    }
                    fallback.get_or_insert(si);
                }
            }
            fallback.unwrap_or(sigs[0])
        }
    }

    fn value_compatible(&self, v: &ArgValue, kind: sig::ParamKind) -> bool {
        use sig::ParamKind as P;
        match (v, kind) {
            (ArgValue::Text(_), P::Name) => true,
            (ArgValue::Text(s), P::Enum(c)) => c.contains(s),
            (ArgValue::Number(_), P::Number) => true,
            (ArgValue::Bool(_), P::Bool) => true,
            (ArgValue::Point(_), P::Point) => true,
            (ArgValue::Ref(r), P::Ref(k)) => match self.symbols.get(&r.name) {
                Some(sym) if r.index.is_some() => {
                    sym.kind == SymbolKind::SplitList && k == sig::EntityKind::Module
                }
                Some(sym) => sym.kind.matches_entity(k),
                None => true,
            },
            (ArgValue::RefList(_), P::ModuleList) => true,
            (ArgValue::NumberList(_), P::NumberList) => true,
            _ => false,
        }
    }
}
