//! A reader for the subset of the Graphviz DOT language used to store AUGs
//! and correction rules, plus the matching writer.
//!
//! Node statements carry `label`, `type` and optionally `api`; edge
//! statements carry `label`. Rule files additionally tag every node with
//! `part` (`misuse` or `fix`) and encode the node mapping as edges labeled
//! `transform` between the two parts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{Aug, CorrectionRule, Edge, Mapping, Node, ParseError, EMPTY_NODE_TYPE};

const TRANSFORM_LABEL: &str = "transform";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id { text: String, quoted: bool },
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Equals,
    Semi,
    Comma,
    Colon,
    Arrow,
    DashDash,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    at_line_start: bool,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().peekable(), line: 1, column: 1, at_line_start: true }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.at_line_start = true;
        } else {
            self.column += 1;
            if !c.is_whitespace() {
                self.at_line_start = false;
            }
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, column: self.column, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.chars.peek().copied() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                // preprocessor-style line
                Some('#') if self.at_line_start => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') => {
                    let mut look = self.chars.clone();
                    look.next();
                    match look.peek() {
                        Some('/') => {
                            while let Some(c) = self.bump() {
                                if c == '\n' {
                                    break;
                                }
                            }
                        }
                        Some('*') => {
                            self.bump();
                            self.bump();
                            let mut prev = '\0';
                            loop {
                                match self.bump() {
                                    Some('/') if prev == '*' => break,
                                    Some(c) => prev = c,
                                    None => return Err(self.error("unterminated block comment")),
                                }
                            }
                        }
                        _ => return Ok(()),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    // line continuation
                    Some('\n') => {}
                    Some(c) => {
                        out.push('\\');
                        out.push(c);
                    }
                    None => return Err(self.error("unterminated string")),
                },
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated string")),
            }
        }
    }

    fn html(&mut self) -> Result<String, ParseError> {
        let mut depth = 1usize;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('<') => {
                    depth += 1;
                    out.push('<');
                }
                Some('>') => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(out);
                    }
                    out.push('>');
                }
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated HTML string")),
            }
        }
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (line, column) = (self.line, self.column);
            let Some(c) = self.chars.peek().copied() else {
                return Ok(out);
            };
            let tok = match c {
                '{' => {
                    self.bump();
                    Tok::LBrace
                }
                '}' => {
                    self.bump();
                    Tok::RBrace
                }
                '[' => {
                    self.bump();
                    Tok::LBracket
                }
                ']' => {
                    self.bump();
                    Tok::RBracket
                }
                '=' => {
                    self.bump();
                    Tok::Equals
                }
                ';' => {
                    self.bump();
                    Tok::Semi
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                ':' => {
                    self.bump();
                    Tok::Colon
                }
                '"' => {
                    self.bump();
                    let mut text = self.quoted()?;
                    // "a" + "b" concatenation
                    loop {
                        self.skip_trivia()?;
                        if self.chars.peek() != Some(&'+') {
                            break;
                        }
                        self.bump();
                        self.skip_trivia()?;
                        if self.bump() != Some('"') {
                            return Err(self.error("expected string after `+`"));
                        }
                        text.push_str(&self.quoted()?);
                    }
                    Tok::Id { text, quoted: true }
                }
                '<' => {
                    self.bump();
                    Tok::Id { text: self.html()?, quoted: true }
                }
                '-' => {
                    let mut look = self.chars.clone();
                    look.next();
                    match look.peek() {
                        Some('>') => {
                            self.bump();
                            self.bump();
                            Tok::Arrow
                        }
                        Some('-') => {
                            self.bump();
                            self.bump();
                            Tok::DashDash
                        }
                        _ => self.numeral()?,
                    }
                }
                c if c == '.' || c.is_ascii_digit() => self.numeral()?,
                c if c == '_' || c.is_alphabetic() || !c.is_ascii() => {
                    let mut text = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c == '_' || c.is_alphanumeric() || !c.is_ascii() {
                            text.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Id { text, quoted: false }
                }
                other => return Err(self.error(format!("unexpected character `{other}`"))),
            };
            out.push(Token { tok, line, column });
        }
    }

    fn numeral(&mut self) -> Result<Tok, ParseError> {
        let mut text = String::new();
        if self.chars.peek() == Some(&'-') {
            text.push('-');
            self.bump();
        }
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() || c == '.' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if text.is_empty() || text == "-" || text.matches('.').count() > 1 {
            return Err(self.error(format!("malformed numeral `{text}`")));
        }
        Ok(Tok::Id { text, quoted: false })
    }
}

type Attrs = BTreeMap<String, String>;

/// Flat view of a parsed digraph: nodes in order of first appearance and
/// edges in statement order.
#[derive(Debug, Default)]
struct DotGraph {
    name: String,
    node_order: Vec<String>,
    node_attrs: HashMap<String, Attrs>,
    edges: Vec<(String, String, Attrs)>,
}

impl DotGraph {
    fn touch_node(&mut self, id: &str, defaults: &Attrs) {
        if !self.node_attrs.contains_key(id) {
            self.node_order.push(id.to_string());
            self.node_attrs.insert(id.to_string(), defaults.clone());
        }
    }
}

#[derive(Clone, Default)]
struct Scope {
    node_defaults: Attrs,
    edge_defaults: Attrs,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    graph: DotGraph,
}

fn is_keyword(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Id { text, quoted: false } if text.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = match self.tokens.get(self.pos).or(self.tokens.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        };
        ParseError::Syntax { line, column, message: message.into() }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn id(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Id { text, .. }) => {
                let text = text.clone();
                self.pos += 1;
                Ok(text)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn graph(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some_and(|t| is_keyword(t, "strict")) {
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if is_keyword(t, "digraph") => self.pos += 1,
            Some(t) if is_keyword(t, "graph") => {
                return Err(self.error("undirected graphs are not supported, expected `digraph`"))
            }
            _ => return Err(self.error("expected `digraph`")),
        }
        if let Some(Tok::Id { .. }) = self.peek() {
            self.graph.name = self.id("graph name")?;
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut scope = Scope::default();
        self.stmt_list(&mut scope)?;
        self.expect(Tok::RBrace, "`}`")?;
        if self.pos < self.tokens.len() {
            return Err(self.error("trailing content after graph"));
        }
        Ok(())
    }

    fn stmt_list(&mut self, scope: &mut Scope) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                None | Some(Tok::RBrace) => return Ok(()),
                Some(Tok::Semi) => {
                    self.pos += 1;
                }
                _ => self.stmt(scope)?,
            }
        }
    }

    fn attr_lists(&mut self) -> Result<Attrs, ParseError> {
        let mut attrs = Attrs::new();
        while self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            loop {
                match self.peek() {
                    Some(Tok::RBracket) => {
                        self.pos += 1;
                        break;
                    }
                    Some(Tok::Comma) | Some(Tok::Semi) => {
                        self.pos += 1;
                    }
                    Some(Tok::Id { .. }) => {
                        let key = self.id("attribute name")?;
                        self.expect(Tok::Equals, "`=` in attribute")?;
                        let value = self.id("attribute value")?;
                        attrs.insert(key, value);
                    }
                    _ => return Err(self.error("expected attribute or `]`")),
                }
            }
        }
        Ok(attrs)
    }

    fn node_id(&mut self) -> Result<String, ParseError> {
        let id = self.id("node id")?;
        // ports are irrelevant here
        for _ in 0..2 {
            if self.peek() == Some(&Tok::Colon) {
                self.pos += 1;
                self.id("port")?;
            }
        }
        Ok(id)
    }

    fn stmt(&mut self, scope: &mut Scope) -> Result<(), ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        if is_keyword(&tok, "node") {
            self.pos += 1;
            let attrs = self.attr_lists()?;
            scope.node_defaults.extend(attrs);
            return Ok(());
        }
        if is_keyword(&tok, "edge") {
            self.pos += 1;
            let attrs = self.attr_lists()?;
            scope.edge_defaults.extend(attrs);
            return Ok(());
        }
        if is_keyword(&tok, "graph") {
            self.pos += 1;
            self.attr_lists()?;
            return Ok(());
        }
        if is_keyword(&tok, "subgraph") || tok == Tok::LBrace {
            if is_keyword(&tok, "subgraph") {
                self.pos += 1;
                if let Some(Tok::Id { .. }) = self.peek() {
                    self.pos += 1;
                }
            }
            self.expect(Tok::LBrace, "`{` after subgraph")?;
            let mut inner = scope.clone();
            self.stmt_list(&mut inner)?;
            self.expect(Tok::RBrace, "`}` closing subgraph")?;
            if matches!(self.peek(), Some(Tok::Arrow) | Some(Tok::DashDash)) {
                return Err(self.error("subgraphs as edge endpoints are not supported"));
            }
            return Ok(());
        }

        let first = self.node_id()?;
        match self.peek() {
            Some(Tok::Equals) => {
                // graph attribute assignment `ID = ID`
                self.pos += 1;
                self.id("attribute value")?;
                Ok(())
            }
            Some(Tok::Arrow) | Some(Tok::DashDash) => {
                let mut chain = vec![first];
                loop {
                    match self.peek() {
                        Some(Tok::Arrow) => {
                            self.pos += 1;
                            if matches!(self.peek(), Some(Tok::LBrace))
                                || self.peek().is_some_and(|t| is_keyword(t, "subgraph"))
                            {
                                return Err(self.error("subgraphs as edge endpoints are not supported"));
                            }
                            chain.push(self.node_id()?);
                        }
                        Some(Tok::DashDash) => return Err(self.error("undirected edge `--` in a digraph")),
                        _ => break,
                    }
                }
                let mut attrs = scope.edge_defaults.clone();
                attrs.extend(self.attr_lists()?);
                for id in &chain {
                    self.graph.touch_node(id, &scope.node_defaults);
                }
                for pair in chain.windows(2) {
                    self.graph.edges.push((pair[0].clone(), pair[1].clone(), attrs.clone()));
                }
                Ok(())
            }
            _ => {
                let attrs = self.attr_lists()?;
                self.graph.touch_node(&first, &scope.node_defaults);
                self.graph.node_attrs.get_mut(&first).expect("node just touched").extend(attrs);
                Ok(())
            }
        }
    }
}

fn parse_dot(text: &str) -> Result<DotGraph, ParseError> {
    let tokens = Lexer::new(text).tokens()?;
    if tokens.is_empty() {
        return Err(ParseError::Syntax { line: 1, column: 1, message: "empty input".into() });
    }
    let mut parser = Parser { tokens, pos: 0, graph: DotGraph::default() };
    parser.graph()?;
    Ok(parser.graph)
}

fn require<'a>(attrs: &'a Attrs, key: &str, node: &str) -> Result<&'a str, ParseError> {
    attrs
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| ParseError::Schema(format!("node `{node}` has no `{key}` attribute")))
}

fn build_node(id: &str, attrs: &Attrs, allow_empty: bool) -> Result<Node, ParseError> {
    let node_type = require(attrs, "type", id)?;
    let label = if allow_empty && node_type == EMPTY_NODE_TYPE {
        attrs.get("label").map(String::as_str).unwrap_or("ε")
    } else {
        require(attrs, "label", id)?
    };
    let api = attrs.get("api").map(String::as_str).unwrap_or("");
    Ok(Node::new(id, label, node_type, api))
}

fn edge_label<'a>(attrs: &'a Attrs, source: &str, target: &str) -> Result<&'a str, ParseError> {
    attrs
        .get("label")
        .map(String::as_str)
        .ok_or_else(|| ParseError::Schema(format!("edge `{source}` -> `{target}` has no `label` attribute")))
}

/// Parses one AUG from DOT text.
pub fn parse_aug(dot_text: &str) -> Result<Aug, ParseError> {
    let g = parse_dot(dot_text)?;
    let mut nodes = Vec::with_capacity(g.node_order.len());
    let mut index = HashMap::with_capacity(g.node_order.len());
    for id in &g.node_order {
        let node = build_node(id, &g.node_attrs[id], false)?;
        index.insert(id.as_str(), nodes.len());
        nodes.push(node);
    }
    let mut edges = Vec::with_capacity(g.edges.len());
    for (s, t, attrs) in &g.edges {
        let label = edge_label(attrs, s, t)?;
        edges.push(Edge::new(index[s.as_str()], index[t.as_str()], label));
    }
    Aug::new(g.name.clone(), nodes, edges)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Part {
    Misuse,
    Fix,
}

/// Parses a correction rule: both member AUGs plus the `transform` mapping.
pub fn parse_rule(dot_text: &str) -> Result<CorrectionRule, ParseError> {
    let g = parse_dot(dot_text)?;
    let mut parts: HashMap<&str, (Part, Node)> = HashMap::new();
    let mut misuse_nodes = Vec::new();
    let mut fix_nodes = Vec::new();
    for id in &g.node_order {
        let attrs = &g.node_attrs[id];
        let part = match attrs.get("part").map(String::as_str) {
            Some("misuse") => Part::Misuse,
            Some("fix") => Part::Fix,
            Some(other) => return Err(ParseError::Schema(format!("node `{id}` has unknown part `{other}`"))),
            None => return Err(ParseError::Schema(format!("node `{id}` has no `part` attribute"))),
        };
        let node = build_node(id, attrs, true)?;
        if !node.is_empty_node() {
            match part {
                Part::Misuse => misuse_nodes.push(node.clone()),
                Part::Fix => fix_nodes.push(node.clone()),
            }
        }
        parts.insert(id.as_str(), (part, node));
    }

    let local_index = |nodes: &[Node]| -> HashMap<String, usize> {
        nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect()
    };
    let misuse_index = local_index(&misuse_nodes);
    let fix_index = local_index(&fix_nodes);

    let mut misuse_edges = Vec::new();
    let mut fix_edges = Vec::new();
    let mut mapping = Vec::new();
    for (s, t, attrs) in &g.edges {
        let label = edge_label(attrs, s, t)?;
        let (sp, sn) = &parts[s.as_str()];
        let (tp, tn) = &parts[t.as_str()];
        if label == TRANSFORM_LABEL {
            if sp == tp {
                return Err(ParseError::Schema(format!("transform edge `{s}` -> `{t}` within one part")));
            }
            let (m, f) = if *sp == Part::Misuse { (sn, tn) } else { (tn, sn) };
            let side = |n: &Node| (!n.is_empty_node()).then(|| n.id.clone());
            mapping.push(Mapping { misuse: side(m), fix: side(f) });
            continue;
        }
        if sp != tp {
            return Err(ParseError::Schema(format!("`{label}` edge `{s}` -> `{t}` crosses rule parts")));
        }
        if sn.is_empty_node() || tn.is_empty_node() {
            return Err(ParseError::Schema(format!("`{label}` edge `{s}` -> `{t}` touches an empty node")));
        }
        match sp {
            Part::Misuse => misuse_edges.push(Edge::new(misuse_index[s.as_str()], misuse_index[t.as_str()], label)),
            Part::Fix => fix_edges.push(Edge::new(fix_index[s.as_str()], fix_index[t.as_str()], label)),
        }
    }

    // ε-node ids may be reused by the mapping only once
    let mut empty_uses: HashMap<&str, usize> = HashMap::new();
    for (s, t, attrs) in &g.edges {
        if attrs.get("label").map(String::as_str) == Some(TRANSFORM_LABEL) {
            for id in [s, t] {
                if parts[id.as_str()].1.is_empty_node() {
                    let uses = empty_uses.entry(id.as_str()).or_insert(0);
                    *uses += 1;
                    if *uses > 1 {
                        return Err(ParseError::Schema(format!("empty node `{id}` mapped twice")));
                    }
                }
            }
        }
    }

    let name = g.name.clone();
    let misuse = Aug::new(format!("{name}.misuse"), misuse_nodes, misuse_edges)?;
    let fix = Aug::new(format!("{name}.fix"), fix_nodes, fix_edges)?;
    CorrectionRule::new(name, misuse, fix, mapping)
}

fn is_plain_id(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let keyword = ["node", "edge", "graph", "digraph", "subgraph", "strict"].iter().any(|k| k.eq_ignore_ascii_case(s));
    (first == '_' || first.is_ascii_alphabetic()) && chars.all(|c| c == '_' || c.is_ascii_alphanumeric()) && !keyword
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_header(out: &mut String, name: &str) {
    out.push_str("digraph ");
    if !name.is_empty() {
        if is_plain_id(name) {
            out.push_str(name);
        } else {
            out.push_str(&quote(name));
        }
        out.push(' ');
    }
    out.push('{');
}

fn write_node(out: &mut String, node: &Node, part: Option<&str>) {
    let _ = write!(
        out,
        "  {} [label={}, type={}, api={}",
        quote(&node.id),
        quote(&node.label),
        quote(&node.node_type),
        quote(&node.api)
    );
    if let Some(part) = part {
        let _ = write!(out, ", part={}", quote(part));
    }
    out.push_str("];\n");
}

fn write_edge(out: &mut String, source: &str, target: &str, label: &str) {
    let _ = writeln!(out, "  {} -> {} [label={}];", quote(source), quote(target), quote(label));
}

/// Writes an AUG in the canonical DOT form read by [`parse_aug`].
pub fn serialize_aug(g: &Aug) -> String {
    let mut out = String::new();
    write_header(&mut out, g.name());
    if g.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push('\n');
    for node in g.nodes() {
        write_node(&mut out, node, None);
    }
    for edge in g.edges() {
        write_edge(&mut out, &g.nodes()[edge.source].id, &g.nodes()[edge.target].id, &edge.label);
    }
    out.push_str("}\n");
    out
}

/// Writes a correction rule in the form read by [`parse_rule`]. Misuse and
/// fix node ids must be disjoint; ε-nodes get generated ids.
pub fn serialize_rule(rule: &CorrectionRule) -> String {
    let mut out = String::new();
    write_header(&mut out, &rule.id);
    out.push('\n');
    for node in rule.misuse.nodes() {
        write_node(&mut out, node, Some("misuse"));
    }
    for node in rule.fix.nodes() {
        write_node(&mut out, node, Some("fix"));
    }
    let mut transforms = Vec::new();
    for (i, m) in rule.mapping.iter().enumerate() {
        let misuse_id = match &m.misuse {
            Some(id) => id.clone(),
            None => {
                let id = format!("eps_misuse_{i}");
                write_node(&mut out, &Node::new(&id, "ε", EMPTY_NODE_TYPE, ""), Some("misuse"));
                id
            }
        };
        let fix_id = match &m.fix {
            Some(id) => id.clone(),
            None => {
                let id = format!("eps_fix_{i}");
                write_node(&mut out, &Node::new(&id, "ε", EMPTY_NODE_TYPE, ""), Some("fix"));
                id
            }
        };
        transforms.push((misuse_id, fix_id));
    }
    for g in [&rule.misuse, &rule.fix] {
        for edge in g.edges() {
            write_edge(&mut out, &g.nodes()[edge.source].id, &g.nodes()[edge.target].id, &edge.label);
        }
    }
    for (m, f) in transforms {
        write_edge(&mut out, &m, &f, TRANSFORM_LABEL);
    }
    out.push_str("}\n");
    out
}
