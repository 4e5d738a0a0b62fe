use crate::diagnostic::{codes, Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Eq,
    /// `->`
    Arrow,
    /// `-->`
    TriggerArrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::TriggerArrow => "`-->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> (usize, usize) {
        (self.line, self.col)
    }
}

/// Splits `text` into tokens. Bad characters and unterminated strings are
/// reported and skipped so that parsing can continue.
pub fn lex(text: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();

    // End column is inclusive of the last character.
    let span = |start: (usize, usize), end: (usize, usize)| {
        let end = (end.0, end.1.saturating_sub(1).max(1));
        SourceSpan::new(file, start, end.max(start))
    };

    while let Some(c) = cur.peek() {
        let start = cur.pos();
        match c {
            c if c.is_whitespace() => {
                cur.bump();
            }
            '/' => {
                cur.bump();
                if cur.peek() == Some('/') {
                    while cur.peek().is_some_and(|c| c != '\n') {
                        cur.bump();
                    }
                } else {
                    diagnostics.push(
                        Diagnostic::error(codes::LEX_ERROR, "unexpected `/` (comments start with `//`)")
                            .with_span(span(start, cur.pos())),
                    );
                }
            }
            '-' => {
                cur.bump();
                let tok = if cur.peek() == Some('-') {
                    cur.bump();
                    if cur.peek() == Some('>') {
                        cur.bump();
                        Some(Tok::TriggerArrow)
                    } else {
                        None
                    }
                } else if cur.peek() == Some('>') {
                    cur.bump();
                    Some(Tok::Arrow)
                } else {
                    None
                };
                match tok {
                    Some(tok) => tokens.push(Token {
                        tok,
                        span: span(start, cur.pos()),
                    }),
                    None => diagnostics.push(
                        Diagnostic::error(codes::LEX_ERROR, "expected `->` or `-->`").with_span(span(start, cur.pos())),
                    ),
                }
            }
            '"' => {
                cur.bump();
                let mut value = String::new();
                let mut closed = false;
                while let Some(c) = cur.bump() {
                    match c {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match cur.bump() {
                            Some('n') => value.push('\n'),
                            Some('t') => value.push('\t'),
                            Some(c @ ('"' | '\\')) => value.push(c),
                            Some(other) => {
                                diagnostics.push(
                                    Diagnostic::error(codes::LEX_ERROR, format!("unknown escape `\\{other}`"))
                                        .with_span(span(start, cur.pos())),
                                );
                            }
                            None => break,
                        },
                        '\n' => break,
                        c => value.push(c),
                    }
                }
                if closed {
                    tokens.push(Token {
                        tok: Tok::Str(value),
                        span: span(start, cur.pos()),
                    });
                } else {
                    diagnostics.push(
                        Diagnostic::error(codes::LEX_ERROR, "unterminated string").with_span(span(start, cur.pos())),
                    );
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(c) = cur.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    word.push(c);
                    cur.bump();
                }
                tokens.push(Token {
                    tok: Tok::Ident(word),
                    span: span(start, cur.pos()),
                });
            }
            _ => {
                cur.bump();
                let tok = match c {
                    '{' => Some(Tok::LBrace),
                    '}' => Some(Tok::RBrace),
                    '[' => Some(Tok::LBracket),
                    ']' => Some(Tok::RBracket),
                    ';' => Some(Tok::Semi),
                    ',' => Some(Tok::Comma),
                    '.' => Some(Tok::Dot),
                    '=' => Some(Tok::Eq),
                    _ => None,
                };
                match tok {
                    Some(tok) => tokens.push(Token {
                        tok,
                        span: span(start, cur.pos()),
                    }),
                    None => diagnostics.push(
                        Diagnostic::error(codes::LEX_ERROR, format!("unexpected character `{c}`"))
                            .with_span(span(start, cur.pos())),
                    ),
                }
            }
        }
    }
    let end = cur.pos();
    tokens.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(file, end, end),
    });
    (tokens, diagnostics)
}
