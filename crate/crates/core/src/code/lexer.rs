//! Tokenizer for the supported ECMAScript subset.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    /// Template literal; kept as a token so lenient mode can skip it.
    Template,
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug)]
pub(crate) struct LexError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

const PUNCTS: &[&str] = &[
    "===", "!==", "...", "=>", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]",
    ";", ",", ".", ":", "=", "<", ">", "+", "-", "!", "*", "/", "%", "?", "&", "|",
];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    // open delimiters with their position, for balance checking
    let mut stack: Vec<(u8, u32, u32)> = Vec::new();

    while i < bytes.len() {
        let c = bytes[i];
        let column = (i - line_start) as u32 + 1;
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let Some(close) = src[i + 2..].find("*/") else {
                return Err(LexError {
                    line,
                    column,
                    message: "unterminated block comment".into(),
                });
            };
            let end = i + 2 + close + 2;
            for (k, b) in bytes[i..end].iter().enumerate() {
                if *b == b'\n' {
                    line += 1;
                    line_start = i + k + 1;
                }
            }
            i = end;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'.') {
                if bytes[i] == b'.' && !bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                    break;
                }
                i += 1;
            }
            Tok::Num(src[start..i].to_string())
        } else if c == b'\'' || c == b'"' {
            i += 1;
            let mut value = String::new();
            loop {
                let Some(&b) = bytes.get(i) else {
                    return Err(LexError {
                        line,
                        column,
                        message: "unterminated string literal".into(),
                    });
                };
                if b == b'\n' {
                    return Err(LexError {
                        line,
                        column,
                        message: "unterminated string literal".into(),
                    });
                }
                if b == c {
                    i += 1;
                    break;
                }
                if b == b'\\' {
                    let esc = bytes.get(i + 1).copied().unwrap_or(b'\\');
                    match esc {
                        b'n' => value.push('\n'),
                        b't' => value.push('\t'),
                        b'r' => value.push('\r'),
                        b'0' => value.push('\0'),
                        _ => {
                            let ch = src[i + 1..].chars().next().unwrap_or('\\');
                            value.push(ch);
                            i += ch.len_utf8() - 1;
                        }
                    }
                    i += 2;
                    continue;
                }
                let ch = src[i..].chars().next().unwrap();
                value.push(ch);
                i += ch.len_utf8();
            }
            Tok::Str(value)
        } else if c == b'`' {
            i += 1;
            loop {
                let Some(&b) = bytes.get(i) else {
                    return Err(LexError {
                        line,
                        column,
                        message: "unterminated template literal".into(),
                    });
                };
                i += 1;
                if b == b'\\' {
                    i += 1;
                } else if b == b'`' {
                    break;
                } else if b == b'\n' {
                    line += 1;
                    line_start = i;
                }
            }
            Tok::Template
        } else if let Some(p) = PUNCTS.iter().find(|p| src[i..].starts_with(**p)) {
            i += p.len();
            Tok::Punct(p)
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(LexError {
                line,
                column,
                message: format!("unexpected character `{ch}`"),
            });
        };

        if let Tok::Punct(p) = &tok {
            match *p {
                "(" | "[" | "{" => stack.push((p.as_bytes()[0], line, column)),
                ")" | "]" | "}" => {
                    let want = match *p {
                        ")" => b'(',
                        "]" => b'[',
                        _ => b'{',
                    };
                    match stack.pop() {
                        Some((open, _, _)) if open == want => {}
                        _ => {
                            return Err(LexError {
                                line,
                                column,
                                message: format!("unbalanced delimiter `{p}`"),
                            })
                        }
                    }
                }
                _ => {}
            }
        }
        out.push(Token {
            tok,
            start,
            end: i,
            line,
            column,
        });
    }
    if let Some((open, l, c)) = stack.pop() {
        return Err(LexError {
            line: l,
            column: c,
            message: format!("unclosed delimiter `{}`", open as char),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        start: src.len(),
        end: src.len(),
        line,
        column: (src.len() - line_start) as u32 + 1,
    });
    Ok(out)
}
