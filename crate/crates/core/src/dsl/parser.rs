//! Recursive-descent parser producing an unresolved syntax tree. Paths stay
//! textual here; resolution happens once the whole tree is known, because a
//! flow may name an action declared further down.

use super::lexer::{Tok, Token};
use crate::diagnostic::{codes, Diagnostic, SourceSpan};
use crate::metamodel::{ActionKind, ThingTag};

pub const KEYWORDS: &[&str] = &[
    "model",
    "thimac",
    "material",
    "immaterial",
    "create",
    "process",
    "release",
    "transfer",
    "receive",
    "storage",
    "flow",
    "trigger",
    "event",
    "region",
    "desc",
    "scenario",
    "choose",
    "inject",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

#[derive(Debug, Clone)]
pub struct Path {
    pub segments: Vec<String>,
    pub span: SourceSpan,
}

impl Path {
    pub fn text(&self) -> String {
        self.segments.join(".")
    }
}

#[derive(Debug)]
pub struct Document {
    pub name: String,
    pub name_span: SourceSpan,
    pub thimacs: Vec<ThimacDecl>,
    pub events: Vec<EventDecl>,
    pub scenarios: Vec<ScenarioDecl>,
}

#[derive(Debug)]
pub struct ThimacDecl {
    pub name: String,
    pub tag: Option<ThingTag>,
    pub span: SourceSpan,
    pub members: Vec<Member>,
}

#[derive(Debug)]
pub enum Member {
    Thimac(ThimacDecl),
    Action {
        kind: ActionKind,
        label: Option<String>,
        storage: bool,
        span: SourceSpan,
    },
    Flow {
        from: Path,
        to: Path,
        span: SourceSpan,
    },
    Trigger {
        from: Path,
        to: Path,
        span: SourceSpan,
    },
}

#[derive(Debug)]
pub struct EventDecl {
    pub name: String,
    pub paths: Vec<Path>,
    pub desc: Option<String>,
    pub span: SourceSpan,
}

#[derive(Debug)]
pub enum Directive {
    Choose { decision: Path, successor: String, span: SourceSpan },
    Inject { head: Path, span: SourceSpan },
}

#[derive(Debug)]
pub struct ScenarioDecl {
    pub name: String,
    pub directives: Vec<Directive>,
    pub span: SourceSpan,
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

/// Parses a token stream (ending in `Eof`). Returns the tree when the
/// document header could be read, along with every syntax error found.
pub fn parse_tokens(tokens: &[Token]) -> (Option<Document>, Vec<Diagnostic>) {
    let mut p = Parser {
        tokens,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let doc = p.document().ok();
    (doc, p.diagnostics)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span.clone()
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span.clone()
    }

    fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&mut self, message: impl Into<String>) {
        let span = self.span();
        self.diagnostics
            .push(Diagnostic::error(codes::PARSE_ERROR, message).with_span(span));
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.advance().span.clone())
        } else {
            let found = self.peek().describe();
            self.error(format!("expected {}, found {found}", tok.describe()));
            Err(())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<SourceSpan> {
        if self.at_keyword(kw) {
            Ok(self.advance().span.clone())
        } else {
            let found = self.peek().describe();
            self.error(format!("expected `{kw}`, found {found}"));
            Err(())
        }
    }

    /// A user identifier: any IDENT that is not reserved.
    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(w) if !is_keyword(&w) => {
                let span = self.advance().span.clone();
                Ok((w, span))
            }
            Tok::Ident(w) => {
                self.error(format!("`{w}` is a keyword and cannot be used as {what}"));
                Err(())
            }
            other => {
                self.error(format!("expected {what}, found {}", other.describe()));
                Err(())
            }
        }
    }

    fn path(&mut self) -> PResult<Path> {
        let (first, start) = self.ident("a path")?;
        let mut segments = vec![first];
        let mut end = start.clone();
        while *self.peek() == Tok::Dot {
            self.advance();
            let (seg, span) = self.ident("a path segment")?;
            segments.push(seg);
            end = span;
        }
        Ok(Path {
            segments,
            span: start.join(&end),
        })
    }

    /// Skips to just after the next `;` or to the next `}` at the current
    /// nesting depth, whichever comes first.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.advance();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace if depth == 0 => return,
                Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        self.advance();
                        return;
                    }
                }
                _ => {}
            }
            self.advance();
        }
    }

    fn document(&mut self) -> PResult<Document> {
        self.expect_keyword("model")?;
        let (name, name_span) = self.ident("a model name")?;
        self.expect(Tok::LBrace)?;
        let mut doc = Document {
            name,
            name_span,
            thimacs: Vec::new(),
            events: Vec::new(),
            scenarios: Vec::new(),
        };
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Eof => {
                    self.error("expected `}` closing the model");
                    return Ok(doc);
                }
                Tok::Ident(w) if w == "thimac" => {
                    if let Ok(t) = self.thimac() {
                        doc.thimacs.push(t);
                    }
                }
                Tok::Ident(w) if w == "event" => match self.event() {
                    Ok(e) => doc.events.push(e),
                    Err(()) => self.recover(),
                },
                Tok::Ident(w) if w == "scenario" => {
                    if let Ok(s) = self.scenario() {
                        doc.scenarios.push(s);
                    }
                }
                other => {
                    self.error(format!(
                        "expected `thimac`, `event` or `scenario`, found {}",
                        other.describe()
                    ));
                    self.advance();
                    self.recover();
                }
            }
        }
        if *self.peek() != Tok::Eof {
            let found = self.peek().describe();
            self.error(format!("unexpected {found} after the model"));
        }
        Ok(doc)
    }

    fn thimac(&mut self) -> PResult<ThimacDecl> {
        let start = self.expect_keyword("thimac")?;
        let header = (|| {
            let (name, _) = self.ident("a thimac name")?;
            let mut tag = None;
            if *self.peek() == Tok::LBracket {
                self.advance();
                tag = match self.peek() {
                    Tok::Ident(w) if w == "material" => Some(ThingTag::Material),
                    Tok::Ident(w) if w == "immaterial" => Some(ThingTag::Immaterial),
                    _ => None,
                };
                if tag.is_none() {
                    let found = self.peek().describe();
                    self.error(format!("expected `material` or `immaterial`, found {found}"));
                    return Err(());
                }
                self.advance();
                self.expect(Tok::RBracket)?;
            }
            self.expect(Tok::LBrace)?;
            Ok((name, tag))
        })();
        let Ok((name, tag)) = header else {
            self.recover();
            return Err(());
        };
        let mut members = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Eof => {
                    self.error(format!("expected `}}` closing thimac `{name}`"));
                    break;
                }
                _ => match self.member() {
                    Ok(m) => members.push(m),
                    Err(()) => self.recover(),
                },
            }
        }
        Ok(ThimacDecl {
            name,
            tag,
            span: start.join(&self.prev_span()),
            members,
        })
    }

    fn member(&mut self) -> PResult<Member> {
        let word = match self.peek().clone() {
            Tok::Ident(w) => w,
            other => {
                self.error(format!("expected a thimac member, found {}", other.describe()));
                return Err(());
            }
        };
        if word == "thimac" {
            // Nested thimacs recover on their own.
            return self.thimac().map(Member::Thimac);
        }
        if let Some(kind) = ActionKind::from_keyword(&word) {
            let start = self.advance().span.clone();
            let label = match self.peek() {
                Tok::Ident(w) if !is_keyword(w) => Some(self.ident("a label")?.0),
                _ => None,
            };
            let storage = self.at_keyword("storage");
            if storage {
                self.advance();
            }
            let end = self.expect(Tok::Semi)?;
            return Ok(Member::Action {
                kind,
                label,
                storage,
                span: start.join(&end),
            });
        }
        let trigger = match word.as_str() {
            "flow" => false,
            "trigger" => true,
            _ if is_keyword(&word) => {
                self.error(format!("`{word}` is not allowed inside a thimac"));
                return Err(());
            }
            _ => {
                self.error(format!("unknown keyword `{word}`"));
                return Err(());
            }
        };
        let start = self.advance().span.clone();
        let from = self.path()?;
        self.expect(if trigger { Tok::TriggerArrow } else { Tok::Arrow })?;
        let to = self.path()?;
        let end = self.expect(Tok::Semi)?;
        let span = start.join(&end);
        Ok(if trigger {
            Member::Trigger { from, to, span }
        } else {
            Member::Flow { from, to, span }
        })
    }

    fn event(&mut self) -> PResult<EventDecl> {
        let start = self.expect_keyword("event")?;
        let (name, _) = self.ident("an event name")?;
        self.expect(Tok::LBrace)?;
        self.expect_keyword("region")?;
        self.expect(Tok::LBrace)?;
        let mut paths = vec![self.path()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            if *self.peek() == Tok::RBrace {
                break;
            }
            paths.push(self.path()?);
        }
        self.expect(Tok::RBrace)?;
        let mut desc = None;
        if self.at_keyword("desc") {
            self.advance();
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.advance();
                    desc = Some(s);
                }
                other => {
                    self.error(format!("expected a string, found {}", other.describe()));
                    return Err(());
                }
            }
            self.expect(Tok::Semi)?;
        }
        let end = self.expect(Tok::RBrace)?;
        Ok(EventDecl {
            name,
            paths,
            desc,
            span: start.join(&end),
        })
    }

    fn scenario(&mut self) -> PResult<ScenarioDecl> {
        let start = self.expect_keyword("scenario")?;
        let header = self.ident("a scenario name").and_then(|(name, _)| {
            self.expect(Tok::LBrace)?;
            Ok(name)
        });
        let Ok(name) = header else {
            self.recover();
            return Err(());
        };
        let mut directives = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Eof => {
                    self.error(format!("expected `}}` closing scenario `{name}`"));
                    break;
                }
                _ => match self.directive() {
                    Ok(d) => directives.push(d),
                    Err(()) => self.recover(),
                },
            }
        }
        Ok(ScenarioDecl {
            name,
            directives,
            span: start.join(&self.prev_span()),
        })
    }

    fn directive(&mut self) -> PResult<Directive> {
        if self.at_keyword("choose") {
            let start = self.advance().span.clone();
            let decision = self.path()?;
            self.expect(Tok::Eq)?;
            let (successor, _) = self.ident("a successor label")?;
            let end = self.expect(Tok::Semi)?;
            return Ok(Directive::Choose {
                decision,
                successor,
                span: start.join(&end),
            });
        }
        if self.at_keyword("inject") {
            let start = self.advance().span.clone();
            let head = self.path()?;
            let end = self.expect(Tok::Semi)?;
            return Ok(Directive::Inject {
                head,
                span: start.join(&end),
            });
        }
        let found = self.peek().describe();
        match self.peek() {
            Tok::Ident(w) if !is_keyword(w) => self.error(format!("unknown keyword {found}")),
            _ => self.error(format!("expected `choose` or `inject`, found {found}")),
        }
        Err(())
    }
}
