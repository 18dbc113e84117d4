//! Tokenizer for the action language.

use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, col {col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub fn at(span: Span, message: impl Into<String>) -> ParseError {
        ParseError {
            line: span.line,
            col: span.col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Newline,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Colon,
    Semi,
    Dot,
    Eq,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    pub start: usize,
    pub end: usize,
}

/// Tokenizes the whole input. Newline tokens are emitted only outside
/// brackets, so multi-line argument lists stay inside one statement.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut depth: i32 = 0;

    let push = |tok: Tok, span: Span, start: usize, end: usize, toks: &mut Vec<Token>| {
        toks.push(Token {
            tok,
            span,
            start,
            end,
        });
    };

    while i < bytes.len() {
        let c = bytes[i] as char;
        let span = Span { line, col };
        match c {
            '\n' => {
                if depth == 0 {
                    push(Tok::Newline, span, i, i + 1, &mut toks);
                }
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '/' if i + 1 < bytes.len() && bytes[i + 1] == b'/' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                    col += 1;
                }
            }
            '"' => {
                let start = i;
                i += 1;
                col += 1;
                let mut s = String::new();
                let mut closed = false;
                while i < bytes.len() {
                    let ch = bytes[i] as char;
                    if ch == '\\' && i + 1 < bytes.len() {
                        let esc = bytes[i + 1] as char;
                        s.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                        i += 2;
                        col += 2;
                    } else if ch == '"' {
                        i += 1;
                        col += 1;
                        closed = true;
                        break;
                    } else if ch == '\n' {
                        break;
                    } else {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
                if !closed {
                    return Err(ParseError::at(span, "unterminated string literal"));
                }
                push(Tok::Str(s), span, start, i, &mut toks);
            }
            c if c.is_ascii_digit()
                || (c == '-' && i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_digit()) =>
            {
                let start = i;
                i += 1;
                col += 1;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.')
                {
                    i += 1;
                    col += 1;
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| {
                    ParseError::at(span, format!("malformed number `{text}`"))
                })?;
                push(Tok::Num(value), span, start, i, &mut toks);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                    col += 1;
                }
                push(Tok::Ident(src[start..i].to_string()), span, start, i, &mut toks);
            }
            _ => {
                let tok = match c {
                    '(' => {
                        depth += 1;
                        Tok::LParen
                    }
                    ')' => {
                        depth -= 1;
                        Tok::RParen
                    }
                    '{' => {
                        depth += 1;
                        Tok::LBrace
                    }
                    '}' => {
                        depth -= 1;
                        Tok::RBrace
                    }
                    '[' => {
                        depth += 1;
                        Tok::LBracket
                    }
                    ']' => {
                        depth -= 1;
                        Tok::RBracket
                    }
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '=' => Tok::Eq,
                    other => {
                        return Err(ParseError::at(
                            span,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
                push(tok, span, i, i + 1, &mut toks);
                i += 1;
                col += 1;
            }
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
        start: bytes.len(),
        end: bytes.len(),
    });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_a_constructor_call() {
        let toks = lex("Module m = new Module(name: \"Module 1\", length: 2800);").unwrap();
        let idents: Vec<&str> = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Ident(s) => Some(s.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(idents, vec!["Module", "m", "new", "Module", "name", "length"]);
    }

    #[test]
    fn newlines_inside_parens_are_swallowed() {
        let toks = lex("Utils.CreateHole(\n  module: m\n);\n").unwrap();
        let newlines = toks.iter().filter(|t| t.tok == Tok::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn negative_numbers_and_decimals() {
        let toks = lex("-1440 0.5").unwrap();
        assert_eq!(toks[0].tok, Tok::Num(-1440.0));
        assert_eq!(toks[1].tok, Tok::Num(0.5));
    }

    #[test]
    fn rejects_unterminated_string() {
        assert!(lex("\"abc").is_err());
    }
}
