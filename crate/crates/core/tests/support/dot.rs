//! A checker for the DOT language grammar, used as the syntax oracle for
//! exported documents (no Graphviz binary is assumed to be installed).
//!
//! Covers the full statement grammar: graph header, node, edge, attribute
//! and assignment statements, nested and anonymous subgraphs, ports, and
//! the four ID forms (identifiers, numerals, quoted strings, HTML strings).

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Eq,
    Colon,
    Arrow,
    Line,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                    i += 1;
                }
                if i + 1 >= chars.len() {
                    return Err("unterminated comment".into());
                }
                i += 2;
            }
            '#' if i == 0 || chars[i - 1] == '\n' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' | '}' | '[' | ']' | ';' | ',' | '=' | ':' => {
                out.push(match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    _ => Tok::Colon,
                });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Arrow);
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                out.push(Tok::Line);
                i += 2;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') => {
                            if let Some(n) = chars.get(i + 1) {
                                s.push('\\');
                                s.push(*n);
                            }
                            i += 2;
                        }
                        Some(ch) => {
                            s.push(*ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Tok::Id(s));
            }
            '<' => {
                let mut depth = 0;
                let start = i;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated HTML string".into()),
                        Some('<') => depth += 1,
                        Some('>') => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
                i += 1;
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            _ if c.is_ascii_alphabetic() || c == '_' || !c.is_ascii() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || !chars[i].is_ascii()) {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            _ if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                if num.matches('.').count() > 1 || num == "-" || num == "." {
                    return Err(format!("bad numeral `{num}`"));
                }
                out.push(Tok::Id(num));
            }
            _ => return Err(format!("unexpected character `{c}`")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    directed: bool,
}

fn is_kw(t: Option<&Tok>, kw: &str) -> bool {
    matches!(t, Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), String> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            other => Err(format!("expected {want:?}, found {other:?} at token {}", self.pos - 1)),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.bump() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected an ID, found {other:?} at token {}", self.pos - 1)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if is_kw(self.peek(), "strict") {
            self.pos += 1;
        }
        if is_kw(self.peek(), "digraph") {
            self.directed = true;
        } else if !is_kw(self.peek(), "graph") {
            return Err("missing graph or digraph keyword".into());
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)?;
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("trailing input {t:?}")),
        }
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt()?;
            if self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let head = self.peek();
        if ["graph", "node", "edge"].iter().any(|k| is_kw(head, k)) && self.peek2() == Some(&Tok::LBracket) {
            self.pos += 1;
            return self.attr_list();
        }
        if matches!(head, Some(Tok::Id(_))) && self.peek2() == Some(&Tok::Eq) && !is_kw(head, "subgraph") {
            self.pos += 2;
            self.id()?;
            return Ok(());
        }
        self.operand()?;
        while matches!(self.peek(), Some(Tok::Arrow | Tok::Line)) {
            let op = self.bump().unwrap();
            if (op == Tok::Arrow) != self.directed {
                return Err(format!("edge operator {op:?} does not match the graph kind"));
            }
            self.operand()?;
        }
        if self.peek() == Some(&Tok::LBracket) {
            self.attr_list()?;
        }
        Ok(())
    }

    /// A node id (with optional port) or a subgraph.
    fn operand(&mut self) -> Result<(), String> {
        if is_kw(self.peek(), "subgraph") || self.peek() == Some(&Tok::LBrace) {
            return self.subgraph();
        }
        let name = self.id()?;
        if ["node", "edge", "graph", "digraph", "strict"].iter().any(|k| name.eq_ignore_ascii_case(k)) {
            return Err(format!("keyword `{name}` used as a node id"));
        }
        if self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            self.id()?;
            if self.peek() == Some(&Tok::Colon) {
                self.pos += 1;
                self.id()?;
            }
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if is_kw(self.peek(), "subgraph") {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
        }
        self.expect(Tok::LBrace)?;
        self.stmt_list()?;
        self.expect(Tok::RBrace)
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            while self.peek() != Some(&Tok::RBracket) {
                self.id()?;
                self.expect(Tok::Eq)?;
                self.id()?;
                if matches!(self.peek(), Some(Tok::Semi | Tok::Comma)) {
                    self.pos += 1;
                }
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(())
    }
}

/// Checks that `text` is one syntactically valid DOT graph.
pub fn check(text: &str) -> Result<(), String> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        directed: false,
    };
    p.graph()
}
