//! GraphViz export of the slot-referrer tree at one matrix level, plus a
//! small DOT grammar checker used to validate emitted text.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use matrix_core::{Address, ContractState, Level, MatrixKind};

/// Render the slot-referrer tree at `(matrix, level)` as a DOT digraph.
///
/// Users holding the slot appear as boxes annotated with their reinvest
/// count (and `blocked` when set), linked from their slot referrer. Users
/// who have not opened the slot appear as dotted placeholders labeled with
/// the level number, linked from their upline. With `focus` given, only the
/// subtree below the focus user is rendered.
pub fn export_dot(
    state: &ContractState,
    focus: Option<&Address>,
    matrix: MatrixKind,
    level: Level,
) -> Result<String, matrix_core::Error> {
    if let Some(focus) = focus {
        state.user(focus)?;
    }
    let root = focus.unwrap_or_else(|| state.owner());

    // parent -> children, deterministic by address
    let mut children: BTreeMap<Address, BTreeSet<Address>> = BTreeMap::new();
    for user in state.users() {
        if user.address == *root {
            continue;
        }
        let parent = match matrix {
            MatrixKind::X3 => {
                let slot = user.x3(level);
                if slot.active {
                    slot.slot_referrer.clone()
                } else {
                    Some(user.upline.clone())
                }
            }
            MatrixKind::X4 => {
                let slot = user.x4(level);
                if slot.active {
                    slot.slot_referrer.clone()
                } else {
                    Some(user.upline.clone())
                }
            }
        };
        if let Some(parent) = parent {
            if parent != user.address {
                children.entry(parent).or_default().insert(user.address.clone());
            }
        }
    }

    // collect the subtree below the root
    let mut in_scope: BTreeSet<Address> = BTreeSet::new();
    let mut queue: VecDeque<Address> = VecDeque::new();
    in_scope.insert(root.clone());
    queue.push_back(root.clone());
    while let Some(current) = queue.pop_front() {
        if let Some(kids) = children.get(&current) {
            for kid in kids {
                if in_scope.insert(kid.clone()) {
                    queue.push_back(kid.clone());
                }
            }
        }
    }

    let mut out = format!("digraph {}_level_{} {{\n", matrix.as_str(), level.get());
    out.push_str("  rankdir=TB;\n");
    for addr in &in_scope {
        let user = state.user(addr)?;
        let (active, blocked, reinvest) = match matrix {
            MatrixKind::X3 => {
                let s = user.x3(level);
                (s.active, s.blocked, s.reinvest_count)
            }
            MatrixKind::X4 => {
                let s = user.x4(level);
                (s.active, s.blocked, s.reinvest_count)
            }
        };
        if active {
            let mut label = format!("{}\\n{} L{}\\nreinvest={}", addr, matrix.as_str(), level, reinvest);
            if blocked {
                label.push_str("\\nblocked");
            }
            let style = if blocked { ", style=filled" } else { "" };
            out.push_str(&format!("  \"{addr}\" [shape=box{style}, label=\"{label}\"];\n"));
        } else {
            // unopened slots render as a numbered dot
            out.push_str(&format!(
                "  \"{addr}\" [shape=circle, style=dotted, label=\"{}\"];\n",
                level.get()
            ));
        }
    }
    for (parent, kids) in &children {
        if !in_scope.contains(parent) {
            continue;
        }
        for kid in kids {
            out.push_str(&format!("  \"{parent}\" -> \"{kid}\";\n"));
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Validate text against the DOT grammar (the graph/digraph statement
/// language: node, edge and attribute statements, quoted and plain
/// identifiers, subgraphs). Independent of the exporter; parses any DOT in
/// the supported subset, not just what [`export_dot`] produces.
pub fn validate_dot(text: &str) -> Result<(), String> {
    let tokens = tokenize(text)?;
    Parser { tokens, pos: 0 }.parse_graph()
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Id(String),
    Symbol(char), // { } [ ] ; , = :
    EdgeOp,       // -> or --
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated block comment".into());
            }
            i += 2;
        } else if c == '"' {
            let mut value = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated quoted identifier".into()),
                    Some('\\') => {
                        match chars.get(i + 1) {
                            None => return Err("dangling escape".into()),
                            Some(&next) => value.push(next),
                        }
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&other) => {
                        value.push(other);
                        i += 1;
                    }
                }
            }
            tokens.push(Token::Id(value));
        } else if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            tokens.push(Token::EdgeOp);
            i += 2;
        } else if "{}[];,=:".contains(c) {
            tokens.push(Token::Symbol(c));
            i += 1;
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let mut value = String::new();
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.' || chars[i] == '-')
            {
                value.push(chars[i]);
                i += 1;
            }
            tokens.push(Token::Id(value));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn expect_symbol(&mut self, want: char) -> Result<(), String> {
        match self.next() {
            Some(Token::Symbol(c)) if c == want => Ok(()),
            other => Err(format!("expected {want:?}, found {other:?}")),
        }
    }

    fn keyword(token: &Token) -> Option<String> {
        match token {
            Token::Id(word) => Some(word.to_ascii_lowercase()),
            _ => None,
        }
    }

    fn parse_graph(&mut self) -> Result<(), String> {
        let mut token = self.next().ok_or("empty input")?;
        if Self::keyword(&token).as_deref() == Some("strict") {
            token = self.next().ok_or("missing graph keyword")?;
        }
        match Self::keyword(&token).as_deref() {
            Some("graph") | Some("digraph") => {}
            _ => return Err(format!("expected graph or digraph, found {token:?}")),
        }
        if matches!(self.peek(), Some(Token::Id(_))) {
            self.next();
        }
        self.expect_symbol('{')?;
        self.parse_stmt_list()?;
        self.expect_symbol('}')?;
        match self.peek() {
            None => Ok(()),
            Some(token) => Err(format!("trailing content after graph: {token:?}")),
        }
    }

    fn parse_stmt_list(&mut self) -> Result<(), String> {
        loop {
            match self.peek() {
                Some(Token::Symbol('}')) | None => return Ok(()),
                Some(Token::Symbol(';')) => {
                    self.next();
                }
                _ => self.parse_stmt()?,
            }
        }
    }

    fn parse_stmt(&mut self) -> Result<(), String> {
        if let Some(token) = self.peek() {
            if let Some(word) = Self::keyword(token) {
                if matches!(word.as_str(), "graph" | "node" | "edge") {
                    // attr_stmt, unless this is an id followed by '='
                    if !matches!(self.tokens.get(self.pos + 1), Some(Token::Symbol('='))) {
                        self.next();
                        return self.parse_attr_list(true);
                    }
                }
            }
        }

        self.parse_endpoint()?;
        if matches!(self.peek(), Some(Token::Symbol('='))) {
            // id '=' id
            self.next();
            match self.next() {
                Some(Token::Id(_)) => return Ok(()),
                other => return Err(format!("expected value after '=', found {other:?}")),
            }
        }
        while matches!(self.peek(), Some(Token::EdgeOp)) {
            self.next();
            self.parse_endpoint()?;
        }
        self.parse_attr_list(false)?;
        Ok(())
    }

    fn parse_endpoint(&mut self) -> Result<(), String> {
        match self.peek() {
            Some(Token::Symbol('{')) => {
                self.next();
                self.parse_stmt_list()?;
                self.expect_symbol('}')
            }
            Some(Token::Id(word)) if word.eq_ignore_ascii_case("subgraph") => {
                self.next();
                if matches!(self.peek(), Some(Token::Id(_))) {
                    self.next();
                }
                self.expect_symbol('{')?;
                self.parse_stmt_list()?;
                self.expect_symbol('}')
            }
            Some(Token::Id(_)) => {
                self.next();
                // optional port: ':' id [':' id]
                while matches!(self.peek(), Some(Token::Symbol(':'))) {
                    self.next();
                    match self.next() {
                        Some(Token::Id(_)) => {}
                        other => return Err(format!("expected port after ':', found {other:?}")),
                    }
                }
                Ok(())
            }
            other => Err(format!("expected node id or subgraph, found {other:?}")),
        }
    }

    /// One or more '[' a_list ']' groups; `required` demands at least one.
    fn parse_attr_list(&mut self, required: bool) -> Result<(), String> {
        let mut seen = false;
        while matches!(self.peek(), Some(Token::Symbol('['))) {
            seen = true;
            self.next();
            loop {
                match self.peek() {
                    Some(Token::Symbol(']')) => {
                        self.next();
                        break;
                    }
                    Some(Token::Symbol(',')) | Some(Token::Symbol(';')) => {
                        self.next();
                    }
                    Some(Token::Id(_)) => {
                        self.next();
                        self.expect_symbol('=')?;
                        match self.next() {
                            Some(Token::Id(_)) => {}
                            other => {
                                return Err(format!("expected attribute value, found {other:?}"))
                            }
                        }
                    }
                    other => return Err(format!("unexpected token in attribute list: {other:?}")),
                }
            }
        }
        if required && !seen {
            return Err("expected attribute list".into());
        }
        Ok(())
    }
}
