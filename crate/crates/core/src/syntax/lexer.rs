use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Identifiers and keywords. May contain inner hyphens (`user-goal`).
    Ident(String),
    /// Anything starting with a digit: integers, decimals, step labels.
    Num(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    ColonColon,
    Comma,
    Dot,
    DotDot,
    Arrow,
    Minus,
    Star,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Num(s) => write!(f, "`{s}`"),
            TokenKind::Str(_) => f.write_str("string"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::LBracket => f.write_str("`[`"),
            TokenKind::RBracket => f.write_str("`]`"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::ColonColon => f.write_str("`::`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::DotDot => f.write_str("`..`"),
            TokenKind::Arrow => f.write_str("`->`"),
            TokenKind::Minus => f.write_str("`-`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub start: usize,
    pub end: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |kind| Token {
            kind,
            start,
            end: start + 1,
        };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => {
                tokens.push(single(TokenKind::LBrace));
                i += 1;
            }
            b'}' => {
                tokens.push(single(TokenKind::RBrace));
                i += 1;
            }
            b'[' => {
                tokens.push(single(TokenKind::LBracket));
                i += 1;
            }
            b']' => {
                tokens.push(single(TokenKind::RBracket));
                i += 1;
            }
            b',' => {
                tokens.push(single(TokenKind::Comma));
                i += 1;
            }
            b'*' => {
                tokens.push(single(TokenKind::Star));
                i += 1;
            }
            b':' => {
                if bytes.get(i + 1) == Some(&b':') {
                    tokens.push(Token {
                        kind: TokenKind::ColonColon,
                        start,
                        end: i + 2,
                    });
                    i += 2;
                } else {
                    tokens.push(single(TokenKind::Colon));
                    i += 1;
                }
            }
            b'.' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    tokens.push(Token {
                        kind: TokenKind::DotDot,
                        start,
                        end: i + 2,
                    });
                    i += 2;
                } else {
                    tokens.push(single(TokenKind::Dot));
                    i += 1;
                }
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push(Token {
                        kind: TokenKind::Arrow,
                        start,
                        end: i + 2,
                    });
                    i += 2;
                } else {
                    tokens.push(single(TokenKind::Minus));
                    i += 1;
                }
            }
            b'"' => {
                i += 1;
                let mut text = String::new();
                loop {
                    let Some(ch) = src[i..].chars().next() else {
                        return Err(LexError {
                            message: "unterminated string literal".into(),
                            start,
                            end: i,
                        });
                    };
                    match ch {
                        '"' => {
                            i += 1;
                            break;
                        }
                        '\n' => {
                            return Err(LexError {
                                message: "unterminated string literal".into(),
                                start,
                                end: i,
                            })
                        }
                        '\\' => {
                            let esc = src[i + 1..].chars().next();
                            match esc {
                                Some('"') => text.push('"'),
                                Some('\\') => text.push('\\'),
                                Some('n') => text.push('\n'),
                                _ => {
                                    return Err(LexError {
                                        message: "invalid escape sequence".into(),
                                        start: i,
                                        end: i + 1 + esc.map_or(0, char::len_utf8),
                                    })
                                }
                            }
                            i += 2;
                        }
                        other => {
                            text.push(other);
                            i += other.len_utf8();
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(text),
                    start,
                    end: i,
                });
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let all_digits = bytes[start..i].iter().all(u8::is_ascii_digit);
                if all_digits
                    && bytes.get(i) == Some(&b'.')
                    && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
                {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Num(src[start..i].to_string()),
                    start,
                    end: i,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() {
                    let b = bytes[i];
                    let inner_hyphen =
                        b == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_alphabetic);
                    if b.is_ascii_alphanumeric() || b == b'_' || inner_hyphen {
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(src[start..i].to_string()),
                    start,
                    end: i,
                });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(LexError {
                    message: format!("unexpected character `{ch}`"),
                    start,
                    end: start + ch.len_utf8(),
                });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        start: src.len(),
        end: src.len(),
    });
    Ok(tokens)
}
