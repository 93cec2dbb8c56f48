//! Line-oriented game documents.
//!
//! ```text
//! game <reachability|buchi|parity>
//! alphabet1 <sym> <sym> ...
//! alphabet2 <sym> <sym> ...
//! vertex <name> owner=<1|2> color=<uint>
//! init <name>
//! edge <src> <action> <dst>
//! ```
//!
//! `#` starts a comment. Directives may appear in any order; edges are
//! resolved once every vertex is known. Partial graphs are accepted.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Action, GameError, GameGraph, Objective, Player};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing `game` line")]
    MissingHeader,
    #[error("missing `{0}` line")]
    MissingAlphabet(&'static str),
    #[error("duplicate `{0}` line")]
    DuplicateDirective(&'static str),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown action symbol `{0}`")]
    UnknownSymbol(String),
    #[error("action `{action}` is not in the alphabet of the owner of `{vertex}`")]
    OwnerMismatch { vertex: String, action: String },
    #[error("duplicate edge for `{vertex}` `{action}`")]
    DuplicateEdge { vertex: String, action: String },
    #[error("missing `init` line")]
    MissingInitial,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, token: usize, kind: ParseErrorKind) -> ParseError {
        let column = self.tokens.get(token).map_or(1, |t| t.column);
        ParseError { line: self.number, column, kind }
    }

    fn arity(&self, n: usize) -> Result<(), ParseError> {
        if self.tokens.len() != n {
            let at = self.tokens.len().min(n);
            return Err(self.err(
                at,
                ParseErrorKind::Syntax(format!(
                    "`{}` expects {} argument(s)",
                    self.tokens[0].text,
                    n - 1
                )),
            ));
        }
        Ok(())
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (true, Some(s)) => {
                    tokens.push(Token { text: &content[s..pos], column: content[..s].chars().count() + 1 });
                    start = None;
                }
                (false, None) => start = Some(pos),
                _ => {}
            }
        }
        if !tokens.is_empty() {
            lines.push(Line { number: i + 1, tokens });
        }
    }
    lines
}

fn parse_attr<'a>(line: &Line<'a>, idx: usize, key: &str) -> Result<&'a str, ParseError> {
    let tok = line.tokens[idx].text;
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| line.err(idx, ParseErrorKind::Syntax(format!("expected `{key}=<value>`"))))
}

pub fn parse_game(text: &str) -> Result<GameGraph, ParseError> {
    let lines = tokenize(text);
    let mut objective = None;
    let mut alphabet1: Option<Vec<String>> = None;
    let mut alphabet2: Option<Vec<String>> = None;
    let mut vertex_lines = Vec::new();
    let mut edge_lines = Vec::new();
    let mut init_line = None;

    for line in &lines {
        match line.tokens[0].text {
            "game" => {
                line.arity(2)?;
                if objective.is_some() {
                    return Err(line.err(0, ParseErrorKind::DuplicateDirective("game")));
                }
                objective = Some(Objective::from_keyword(line.tokens[1].text).ok_or_else(|| {
                    line.err(1, ParseErrorKind::Syntax("expected reachability, buchi or parity".into()))
                })?);
            }
            kw @ ("alphabet1" | "alphabet2") => {
                let slot = if kw == "alphabet1" { &mut alphabet1 } else { &mut alphabet2 };
                if slot.is_some() {
                    let name = if kw == "alphabet1" { "alphabet1" } else { "alphabet2" };
                    return Err(line.err(0, ParseErrorKind::DuplicateDirective(name)));
                }
                for (i, t) in line.tokens.iter().enumerate().skip(1) {
                    if !super::is_valid_symbol(t.text) {
                        return Err(line.err(i, ParseErrorKind::Game(GameError::InvalidSymbol(t.text.into()))));
                    }
                }
                *slot = Some(line.tokens[1..].iter().map(|t| t.text.to_string()).collect());
            }
            "vertex" => {
                line.arity(4)?;
                vertex_lines.push(line);
            }
            "init" => {
                line.arity(2)?;
                if init_line.is_some() {
                    return Err(line.err(0, ParseErrorKind::DuplicateDirective("init")));
                }
                init_line = Some(line);
            }
            "edge" => {
                line.arity(4)?;
                edge_lines.push(line);
            }
            other => {
                return Err(line.err(0, ParseErrorKind::Syntax(format!("unknown directive `{other}`"))));
            }
        }
    }

    let at_start = |kind| ParseError { line: 1, column: 1, kind };
    let objective = objective.ok_or_else(|| at_start(ParseErrorKind::MissingHeader))?;
    let alphabet1 = alphabet1.ok_or_else(|| at_start(ParseErrorKind::MissingAlphabet("alphabet1")))?;
    let alphabet2 = alphabet2.ok_or_else(|| at_start(ParseErrorKind::MissingAlphabet("alphabet2")))?;
    let mut g = GameGraph::new(objective, alphabet1, alphabet2).map_err(|e| at_start(e.into()))?;

    for line in vertex_lines {
        let name = line.tokens[1].text;
        let owner = match parse_attr(line, 2, "owner")? {
            "1" => Player::One,
            "2" => Player::Two,
            _ => return Err(line.err(2, ParseErrorKind::Syntax("owner must be 1 or 2".into()))),
        };
        let color: u32 = parse_attr(line, 3, "color")?
            .parse()
            .map_err(|_| line.err(3, ParseErrorKind::Syntax("color must be a non-negative integer".into())))?;
        g.add_vertex(name, owner, color).map_err(|e| match e {
            GameError::DuplicateVertex(n) => line.err(1, ParseErrorKind::DuplicateVertex(n)),
            other => line.err(1, other.into()),
        })?;
    }

    let init_line = init_line.ok_or_else(|| at_start(ParseErrorKind::MissingInitial))?;
    let init = g
        .vertex_id(init_line.tokens[1].text)
        .ok_or_else(|| init_line.err(1, ParseErrorKind::UnknownVertex(init_line.tokens[1].text.into())))?;
    g.set_initial(init);

    for line in edge_lines {
        let lookup = |i: usize| {
            g.vertex_id(line.tokens[i].text)
                .ok_or_else(|| line.err(i, ParseErrorKind::UnknownVertex(line.tokens[i].text.into())))
        };
        let src = lookup(1)?;
        let dst = lookup(3)?;
        let sym = line.tokens[2].text;
        let owner = g.owner(src);
        let symbol = match g.symbol_index(owner, sym) {
            Some(s) => s,
            None if g.symbol_index(owner.opponent(), sym).is_some() => {
                return Err(line.err(
                    2,
                    ParseErrorKind::OwnerMismatch { vertex: g.name(src).into(), action: sym.into() },
                ))
            }
            None => return Err(line.err(2, ParseErrorKind::UnknownSymbol(sym.into()))),
        };
        if g.set_edge(src, Action { player: owner, symbol }, dst).is_some() {
            return Err(line.err(
                2,
                ParseErrorKind::DuplicateEdge { vertex: g.name(src).into(), action: sym.into() },
            ));
        }
    }
    Ok(g)
}

/// Canonical text: header, alphabets, vertices in declaration order, the
/// initial vertex, then edges grouped by source in declaration order.
pub fn serialize_game(g: &GameGraph) -> String {
    let mut out = String::new();
    writeln!(out, "game {}", g.objective()).unwrap();
    writeln!(out, "alphabet1 {}", g.alphabet1().join(" ")).unwrap();
    writeln!(out, "alphabet2 {}", g.alphabet2().join(" ")).unwrap();
    for v in g.vertices() {
        writeln!(out, "vertex {} owner={} color={}", v.name, v.owner.number(), v.color).unwrap();
    }
    if !g.is_empty() {
        writeln!(out, "init {}", g.name(g.initial())).unwrap();
    }
    for v in 0..g.len() {
        for (action, dst) in g.edges(v) {
            writeln!(out, "edge {} {} {}", g.name(v), g.symbol_name(action), g.name(dst)).unwrap();
        }
    }
    out
}
