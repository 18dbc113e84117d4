//! The action language: lexer, parser, signatures, static checks,
//! canonical emission, and repair.

pub mod ast;
pub mod canon;
pub mod check;
pub mod lexer;
pub mod parser;
pub mod repair;
pub mod sig;

pub use ast::{
    ActionStatement, Arg, ArgValue, BindingDecl, DeclType, PieceBinding, PointExpr, Program,
    RefExpr, Span, Statement, Symbol, SymbolKind, UnknownStmt,
};
pub use canon::{canonicalize, format_mm, to_positional};
pub use check::{parse_and_check, static_check, DiagCategory, Diagnostic};
pub use lexer::ParseError;
pub use parser::parse_program;
pub use repair::{repair_program, repair_source, RepairReport, Unrepairable};
pub use sig::{
    ctor_signatures, signature, utils_signatures, Callee, DefaultVal, EntityKind, EnumClass,
    OpKind, Param, ParamKind, ResultKind, Signature,
};
