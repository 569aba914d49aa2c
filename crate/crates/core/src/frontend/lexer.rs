//! Hand-written lexer for the textual IR subset.

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// `%name`
    Local(String),
    /// `@name`
    Global(String),
    /// `#0`
    AttrRef(u32),
    /// `name:` at the start of a block
    LabelDef(String),
    Word(String),
    Int(i64),
    Float(f64),
    Str(String),
    /// `c"..."`
    CStr(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Star,
    Bang,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
    pub text: String,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '$' | '.' | '_')
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '_' | '$' | '.')
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '$' | '.')
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    for (line_idx, line) in src.lines().enumerate() {
        lex_line(line, line_idx + 1, &mut tokens)?;
    }
    Ok(tokens)
}

fn lex_line(line: &str, line_no: usize, out: &mut Vec<Token>) -> Result<(), ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let column = i + 1;
        let push = |kind: TokenKind, end: usize, out: &mut Vec<Token>| {
            out.push(Token {
                kind,
                line: line_no,
                column,
                text: chars[start..end].iter().collect(),
            });
        };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == ';' {
            break;
        }
        let single = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ',' => Some(TokenKind::Comma),
            '=' => Some(TokenKind::Equals),
            '*' => Some(TokenKind::Star),
            '!' => Some(TokenKind::Bang),
            _ => None,
        };
        if let Some(kind) = single {
            push(kind, i + 1, out);
            i += 1;
            continue;
        }
        match c {
            '%' | '@' => {
                i += 1;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[start + 1..i].iter().collect();
                if name.is_empty() {
                    return Err(ParseError::new(line_no, column, c.to_string(), "expected a name"));
                }
                let kind = if c == '%' { TokenKind::Local(name) } else { TokenKind::Global(name) };
                push(kind, i, out);
            }
            '#' => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start + 1..i].iter().collect();
                let id = digits.parse().map_err(|_| {
                    ParseError::new(line_no, column, "#", "expected an attribute group number")
                })?;
                push(TokenKind::AttrRef(id), i, out);
            }
            '"' => {
                let (body, end) = lex_string(&chars, i, line_no, column)?;
                i = end;
                push(TokenKind::Str(body), i, out);
            }
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_float = false;
                if i < chars.len() && chars[i] == '.' {
                    is_float = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        is_float = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                if i < chars.len() && is_word_char(chars[i]) {
                    let mut j = i;
                    while j < chars.len() && is_word_char(chars[j]) {
                        j += 1;
                    }
                    let bad: String = chars[start..j].iter().collect();
                    return Err(ParseError::new(line_no, column, bad, "malformed number"));
                }
                let kind = if is_float {
                    TokenKind::Float(text.parse().map_err(|_| {
                        ParseError::new(line_no, column, text.clone(), "malformed floating literal")
                    })?)
                } else {
                    TokenKind::Int(text.parse().map_err(|_| {
                        ParseError::new(line_no, column, text.clone(), "integer literal out of range")
                    })?)
                };
                push(kind, i, out);
            }
            c if is_word_start(c) => {
                if c == 'c' && chars.get(i + 1) == Some(&'"') {
                    let (body, end) = lex_string(&chars, i + 1, line_no, column)?;
                    i = end;
                    push(TokenKind::CStr(body), i, out);
                    continue;
                }
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == ':' {
                    i += 1;
                    push(TokenKind::LabelDef(word), i, out);
                } else {
                    push(TokenKind::Word(word), i, out);
                }
            }
            other => {
                return Err(ParseError::new(line_no, column, other.to_string(), "unexpected character"));
            }
        }
    }
    Ok(())
}

fn lex_string(chars: &[char], open: usize, line: usize, column: usize) -> Result<(String, usize), ParseError> {
    let mut i = open + 1;
    while i < chars.len() && chars[i] != '"' {
        i += 1;
    }
    if i >= chars.len() {
        let text: String = chars[open..].iter().collect();
        return Err(ParseError::new(line, column, text, "unterminated string"));
    }
    Ok((chars[open + 1..i].iter().collect(), i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn lexes_call_with_constant_expression() {
        let k = kinds("call void @__quantum__qis__h__body(ptr inttoptr (i64 1 to ptr)) ; hi");
        assert_eq!(k[0], TokenKind::Word("call".into()));
        assert_eq!(k[2], TokenKind::Global("__quantum__qis__h__body".into()));
        assert!(k.contains(&TokenKind::Int(1)));
        assert_eq!(*k.last().unwrap(), TokenKind::RParen);
    }

    #[test]
    fn lexes_labels_and_locals() {
        let k = kinds("for.header:\n  %0 = load i32, ptr %i");
        assert_eq!(k[0], TokenKind::LabelDef("for.header".into()));
        assert_eq!(k[1], TokenKind::Local("0".into()));
    }

    #[test]
    fn lexes_numbers() {
        assert_eq!(kinds("-5 0.5 1e-3 2.0E+2"), vec![
            TokenKind::Int(-5),
            TokenKind::Float(0.5),
            TokenKind::Float(1e-3),
            TokenKind::Float(200.0)
        ]);
    }

    #[test]
    fn records_positions() {
        let t = tokenize("\n  ret void").unwrap();
        assert_eq!((t[0].line, t[0].column), (2, 3));
        assert_eq!((t[1].line, t[1].column), (2, 7));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("ret void\n  ^").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn c_strings() {
        assert_eq!(kinds(r#"c"r0\00""#), vec![TokenKind::CStr(r"r0\00".into())]);
    }
}
