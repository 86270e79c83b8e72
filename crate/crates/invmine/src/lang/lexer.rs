//! Hand-rolled lexer for `.mpl` sources.

use crate::diag::{Diagnostic, Loc};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Bool,
    Byte,
    Int_,
    Enum,
    Proc,
    Replicate,
    Guard,
    Goto,
    Assert,
    True,
    False,
    Pid,
    // punctuation and operators
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    DotDot,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Not,
    Plus,
    Minus,
    Star,
    Implies,
    Iff,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.glyph()),
        }
    }

    fn glyph(&self) -> &'static str {
        match self {
            Tok::Bool => "bool",
            Tok::Byte => "byte",
            Tok::Int_ => "int",
            Tok::Enum => "enum",
            Tok::Proc => "proc",
            Tok::Replicate => "replicate",
            Tok::Guard => "guard",
            Tok::Goto => "goto",
            Tok::Assert => "assert",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Pid => "_pid",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::DotDot => "..",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Not => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

pub fn tokenize(src: &str, file: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! push {
        ($tok:expr, $loc:expr) => {
            out.push(Token { tok: $tok, loc: $loc })
        };
    }

    while i < bytes.len() {
        let c = bytes[i] as char;
        let loc = Loc::new(line, col);
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            '/' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'/' {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                } else {
                    return Err(Diagnostic::new(file, loc, "unexpected character `/`"));
                }
            }
            '{' => {
                push!(Tok::LBrace, loc);
                i += 1;
                col += 1;
            }
            '}' => {
                push!(Tok::RBrace, loc);
                i += 1;
                col += 1;
            }
            '[' => {
                push!(Tok::LBracket, loc);
                i += 1;
                col += 1;
            }
            ']' => {
                push!(Tok::RBracket, loc);
                i += 1;
                col += 1;
            }
            '(' => {
                push!(Tok::LParen, loc);
                i += 1;
                col += 1;
            }
            ')' => {
                push!(Tok::RParen, loc);
                i += 1;
                col += 1;
            }
            ';' => {
                push!(Tok::Semi, loc);
                i += 1;
                col += 1;
            }
            ':' => {
                push!(Tok::Colon, loc);
                i += 1;
                col += 1;
            }
            ',' => {
                push!(Tok::Comma, loc);
                i += 1;
                col += 1;
            }
            '+' => {
                push!(Tok::Plus, loc);
                i += 1;
                col += 1;
            }
            '-' => {
                push!(Tok::Minus, loc);
                i += 1;
                col += 1;
            }
            '*' => {
                push!(Tok::Star, loc);
                i += 1;
                col += 1;
            }
            '.' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'.' {
                    push!(Tok::DotDot, loc);
                    i += 2;
                    col += 2;
                } else {
                    return Err(Diagnostic::new(file, loc, "unexpected character `.`"));
                }
            }
            '=' => {
                if src[i..].starts_with("==") {
                    push!(Tok::EqEq, loc);
                    i += 2;
                    col += 2;
                } else if src[i..].starts_with("=>") {
                    push!(Tok::Implies, loc);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Assign, loc);
                    i += 1;
                    col += 1;
                }
            }
            '!' => {
                if src[i..].starts_with("!=") {
                    push!(Tok::NotEq, loc);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Not, loc);
                    i += 1;
                    col += 1;
                }
            }
            '<' => {
                if src[i..].starts_with("<=>") {
                    push!(Tok::Iff, loc);
                    i += 3;
                    col += 3;
                } else if src[i..].starts_with("<=") {
                    push!(Tok::Le, loc);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Lt, loc);
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                if src[i..].starts_with(">=") {
                    push!(Tok::Ge, loc);
                    i += 2;
                    col += 2;
                } else {
                    push!(Tok::Gt, loc);
                    i += 1;
                    col += 1;
                }
            }
            '&' => {
                if src[i..].starts_with("&&") {
                    push!(Tok::AndAnd, loc);
                    i += 2;
                    col += 2;
                } else {
                    return Err(Diagnostic::new(file, loc, "unexpected character `&`"));
                }
            }
            '|' => {
                if src[i..].starts_with("||") {
                    push!(Tok::OrOr, loc);
                    i += 2;
                    col += 2;
                } else {
                    return Err(Diagnostic::new(file, loc, "unexpected character `|`"));
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: i64 = text.parse().map_err(|_| {
                    Diagnostic::new(file, loc, format!("integer literal `{text}` out of range"))
                })?;
                col += (i - start) as u32;
                push!(Tok::Int(n), loc);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &src[start..i];
                col += (i - start) as u32;
                let tok = match word {
                    "bool" => Tok::Bool,
                    "byte" => Tok::Byte,
                    "int" => Tok::Int_,
                    "enum" => Tok::Enum,
                    "proc" => Tok::Proc,
                    "replicate" => Tok::Replicate,
                    "guard" => Tok::Guard,
                    "goto" => Tok::Goto,
                    "assert" => Tok::Assert,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "_pid" => Tok::Pid,
                    _ => Tok::Ident(word.to_string()),
                };
                push!(tok, loc);
            }
            other => {
                return Err(Diagnostic::new(
                    file,
                    loc,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        loc: Loc::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_longest_first() {
        let toks = tokenize("<=> <= < => == = != !", "t").unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|t| t.tok).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Iff,
                Tok::Le,
                Tok::Lt,
                Tok::Implies,
                Tok::EqEq,
                Tok::Assign,
                Tok::NotEq,
                Tok::Not,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn tracks_line_and_column() {
        let toks = tokenize("a\n  b", "t").unwrap();
        assert_eq!(toks[0].loc, Loc::new(1, 1));
        assert_eq!(toks[1].loc, Loc::new(2, 3));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a # b", "m.mpl").unwrap_err();
        assert_eq!(err.to_string(), "m.mpl:1:3: unexpected character `#`");
    }

    #[test]
    fn skips_comments() {
        let toks = tokenize("a // comment with = and ..\nb", "t").unwrap();
        assert_eq!(toks.len(), 3);
    }
}
