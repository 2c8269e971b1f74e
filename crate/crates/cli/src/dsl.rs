//! Text format for causal graphs.
//!
//! ```text
//! # frontdoor
//! graph fd {
//!     x -> z;
//!     z -> y;
//!     x <-> y;
//!     node w;
//! }
//! ```

use std::fmt;

use causal_id::graph::{CausalGraph, GraphError, NodeId, NodeSet};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: invalid graph: {source}")]
    Validation {
        pos: Pos,
        #[source]
        source: GraphError,
    },
}

/// A parsed graph and the name it was declared with.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedGraph {
    pub name: String,
    pub graph: CausalGraph,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Arrow,
    BiArrow,
    LBrace,
    RBrace,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::BiArrow => f.write_str("`<->`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let pos = Pos { line: ln + 1, col: i + 1 };
            let c = chars[i];
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            } else if rest.starts_with("<->") {
                out.push((Tok::BiArrow, pos));
                i += 3;
            } else if rest.starts_with("->") {
                out.push((Tok::Arrow, pos));
                i += 2;
            } else {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ';' => Tok::Semi,
                    _ => return Err(DslError::Syntax { pos, msg: format!("unexpected character {c:?}") }),
                };
                out.push((tok, pos));
                i += 1;
            }
        }
    }
    let end = Pos { line: src.lines().count().max(1), col: src.lines().last().map_or(0, |l| l.chars().count()) + 1 };
    out.push((Tok::Eof, end));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, DslError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(pos)
        } else {
            Err(DslError::Syntax { pos, msg: format!("expected {want}, found {tok}") })
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), DslError> {
        match self.next() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (tok, pos) => Err(DslError::Syntax { pos, msg: format!("expected {what}, found {tok}") }),
        }
    }
}

/// Parses one `graph <name> { ... }` block.
pub fn parse_graph_named(src: &str) -> Result<NamedGraph, DslError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let (kw, pos) = p.ident("`graph`")?;
    if kw != "graph" {
        return Err(DslError::Syntax { pos, msg: format!("expected `graph`, found `{kw}`") });
    }
    let (name, _) = p.ident("graph name")?;
    p.expect(Tok::LBrace)?;

    let mut nodes = NodeSet::new();
    let mut directed: Vec<((NodeId, NodeId), Pos)> = Vec::new();
    let mut arcs: Vec<((NodeId, NodeId), Pos)> = Vec::new();
    let node = |s: String, pos: Pos| NodeId::new(&s).map_err(|source| DslError::Validation { pos, source });
    loop {
        match p.peek().0.clone() {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::Ident(kw) if kw == "node" && matches!(p.peek2(), Tok::Ident(_)) => {
                p.next();
                let (n, pos) = p.ident("node name")?;
                nodes.insert(node(n, pos)?);
                p.expect(Tok::Semi)?;
            }
            Tok::Ident(_) => {
                let (a, pos) = p.ident("node name")?;
                let (op, op_pos) = p.next();
                let (b, bpos) = p.ident("node name")?;
                let (a, b) = (node(a, pos)?, node(b, bpos)?);
                match op {
                    Tok::Arrow => {
                        if directed.iter().any(|(e, _)| *e == (a.clone(), b.clone())) {
                            return Err(DslError::Validation {
                                pos,
                                source: GraphError::DuplicateEdge(format!("{a} -> {b}")),
                            });
                        }
                        directed.push(((a, b), pos));
                    }
                    Tok::BiArrow => {
                        if a == b {
                            return Err(DslError::Validation { pos, source: GraphError::SelfArc(a) });
                        }
                        let key = if a < b { (a, b) } else { (b, a) };
                        if arcs.iter().any(|(e, _)| *e == key) {
                            return Err(DslError::Validation {
                                pos,
                                source: GraphError::DuplicateEdge(format!("{} <-> {}", key.0, key.1)),
                            });
                        }
                        arcs.push((key, pos));
                    }
                    tok => {
                        return Err(DslError::Syntax { pos: op_pos, msg: format!("expected `->` or `<->`, found {tok}") })
                    }
                }
                p.expect(Tok::Semi)?;
            }
            _ => {
                let (tok, pos) = p.next();
                return Err(DslError::Syntax { pos, msg: format!("expected a statement or `}}`, found {tok}") });
            }
        }
    }
    p.expect(Tok::Eof)?;

    for ((a, b), _) in directed.iter().chain(&arcs) {
        nodes.insert(a.clone());
        nodes.insert(b.clone());
    }
    let edge_pos = |a: &NodeId, b: &NodeId| directed.iter().find(|(e, _)| e.0 == *a && e.1 == *b).map(|(_, p)| *p);
    let graph = CausalGraph::new(
        nodes,
        directed.iter().map(|(e, _)| e.clone()).collect(),
        arcs.iter().map(|(e, _)| e.clone()).collect(),
    )
    .map_err(|source| {
        let pos = match &source {
            GraphError::CycleDetected(c) if c.len() >= 2 => edge_pos(&c[0], &c[1]),
            _ => None,
        };
        DslError::Validation { pos: pos.unwrap_or(Pos { line: 1, col: 1 }), source }
    })?;
    Ok(NamedGraph { name, graph })
}

pub fn parse_graph(src: &str) -> Result<CausalGraph, DslError> {
    parse_graph_named(src).map(|n| n.graph)
}

/// Prints `graph` so that [`parse_graph`] rebuilds it exactly: edges and
/// arcs keep their order, `node` lines cover isolated nodes.
pub fn print_graph(name: &str, graph: &CausalGraph) -> String {
    let mut out = format!("graph {name} {{\n");
    let mut touched = NodeSet::new();
    for (a, b) in graph.directed_edges().iter().chain(graph.bidirected_arcs()) {
        touched.insert(a.clone());
        touched.insert(b.clone());
    }
    for n in graph.visible().difference(&touched).iter() {
        out.push_str(&format!("    node {n};\n"));
    }
    for (a, b) in graph.directed_edges() {
        out.push_str(&format!("    {a} -> {b};\n"));
    }
    for (a, b) in graph.bidirected_arcs() {
        out.push_str(&format!("    {a} <-> {b};\n"));
    }
    out.push_str("}\n");
    out
}
