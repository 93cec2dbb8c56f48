//! Two-player game arenas with reachability, Büchi and parity objectives.
//!
//! Player 1 (the environment) owns the initial vertex and moves with symbols
//! of `alphabet1`; Player 2 (the system) answers with symbols of `alphabet2`.
//! Plays alternate strictly between the two. Words are stored as plain slices
//! of symbol indices: entry `i` of a word played from a Player-1 vertex is a
//! Player-1 symbol for even `i` and a Player-2 symbol for odd `i`.
//!
//! Player 2 wins a play iff the largest color seen infinitely often is even
//! (parity), a color-2 vertex recurs (Büchi), or a color-2 vertex is visited at
//! all (reachability). Every other play is won by Player 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

mod solve;
mod text;

pub use solve::{
    one_player_arena, solve_one_player, solve_parity, solve_parity_arena, Arena, ArenaLasso, GameSolution,
    OnePlayerSolution, ParitySolution, SolveError,
};
pub use text::{parse_game, serialize_game, ParseError, ParseErrorKind};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    /// The player who wins when `color` is the dominating color of a play.
    pub fn of_color(color: u32) -> Player {
        if color % 2 == 0 {
            Player::Two
        } else {
            Player::One
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    Reachability,
    Buchi,
    Parity,
}

impl Objective {
    pub fn keyword(self) -> &'static str {
        match self {
            Objective::Reachability => "reachability",
            Objective::Buchi => "buchi",
            Objective::Parity => "parity",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Objective> {
        match word {
            "reachability" => Some(Objective::Reachability),
            "buchi" => Some(Objective::Buchi),
            "parity" => Some(Objective::Parity),
            _ => None,
        }
    }

    /// Reachability and Büchi arenas may only use colors 1 and 2.
    pub fn allows_color(self, color: u32) -> bool {
        match self {
            Objective::Parity => true,
            Objective::Reachability | Objective::Buchi => color == 1 || color == 2,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A move label: a symbol index into the alphabet of `player`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub player: Player,
    pub symbol: usize,
}

impl Action {
    pub fn p1(symbol: usize) -> Action {
        Action { player: Player::One, symbol }
    }

    pub fn p2(symbol: usize) -> Action {
        Action { player: Player::Two, symbol }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub owner: Player,
    pub color: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("alphabet{0} is empty")]
    EmptyAlphabet(u8),
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("invalid vertex name `{0}`")]
    InvalidName(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertex(String),
}

/// Symbols are restricted to `[A-Za-z0-9_~!]+`.
pub fn is_valid_symbol(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '~' || c == '!')
}

/// Vertex names are any non-empty token without whitespace, `#` or `=`.
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#' || c == '=')
}

/// A game arena. Edges are kept per source vertex, ordered by action, so
/// iteration order is deterministic. Partial and ill-typed edge sets can be
/// represented; [`validate`] reports them and [`complete`] repairs totality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameGraph {
    objective: Objective,
    alphabet1: Vec<String>,
    alphabet2: Vec<String>,
    vertices: Vec<Vertex>,
    names: HashMap<String, VertexId>,
    edges: Vec<BTreeMap<Action, VertexId>>,
    initial: VertexId,
}

impl GameGraph {
    pub fn new(
        objective: Objective,
        alphabet1: Vec<String>,
        alphabet2: Vec<String>,
    ) -> Result<Self, GameError> {
        if alphabet1.is_empty() {
            return Err(GameError::EmptyAlphabet(1));
        }
        if alphabet2.is_empty() {
            return Err(GameError::EmptyAlphabet(2));
        }
        let mut seen = std::collections::HashSet::new();
        for s in alphabet1.iter().chain(alphabet2.iter()) {
            if !is_valid_symbol(s) {
                return Err(GameError::InvalidSymbol(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(GameError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(GameGraph {
            objective,
            alphabet1,
            alphabet2,
            vertices: Vec::new(),
            names: HashMap::new(),
            edges: Vec::new(),
            initial: 0,
        })
    }

    /// Convenience constructor from string slices.
    pub fn with_symbols(
        objective: Objective,
        alphabet1: &[&str],
        alphabet2: &[&str],
    ) -> Result<Self, GameError> {
        GameGraph::new(
            objective,
            alphabet1.iter().map(|s| s.to_string()).collect(),
            alphabet2.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub fn add_vertex(
        &mut self,
        name: impl Into<String>,
        owner: Player,
        color: u32,
    ) -> Result<VertexId, GameError> {
        let name = name.into();
        if !is_valid_name(&name) {
            return Err(GameError::InvalidName(name));
        }
        if self.names.contains_key(&name) {
            return Err(GameError::DuplicateVertex(name));
        }
        let id = self.vertices.len();
        self.names.insert(name.clone(), id);
        self.vertices.push(Vertex { name, owner, color });
        self.edges.push(BTreeMap::new());
        Ok(id)
    }

    /// Inserts or replaces the edge for `(src, action)`, returning the old target.
    pub fn set_edge(&mut self, src: VertexId, action: Action, dst: VertexId) -> Option<VertexId> {
        self.edges[src].insert(action, dst)
    }

    pub fn set_initial(&mut self, v: VertexId) {
        self.initial = v;
    }

    pub fn set_color(&mut self, v: VertexId, color: u32) {
        self.vertices[v].color = color;
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn alphabet1(&self) -> &[String] {
        &self.alphabet1
    }

    pub fn alphabet2(&self) -> &[String] {
        &self.alphabet2
    }

    pub fn alphabet(&self, player: Player) -> &[String] {
        match player {
            Player::One => &self.alphabet1,
            Player::Two => &self.alphabet2,
        }
    }

    pub fn symbol_index(&self, player: Player, symbol: &str) -> Option<usize> {
        self.alphabet(player).iter().position(|s| s == symbol)
    }

    pub fn symbol_name(&self, action: Action) -> &str {
        &self.alphabet(action.player)[action.symbol]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.vertices[v].owner
    }

    pub fn color(&self, v: VertexId) -> u32 {
        self.vertices[v].color
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v].name
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.names.get(name).copied()
    }

    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn edges(&self, v: VertexId) -> impl Iterator<Item = (Action, VertexId)> + '_ {
        self.edges[v].iter().map(|(a, d)| (*a, *d))
    }

    pub fn edge(&self, v: VertexId, action: Action) -> Option<VertexId> {
        self.edges[v].get(&action).copied()
    }

    /// Successor of `v` under the owner's symbol `symbol`.
    pub fn succ(&self, v: VertexId, symbol: usize) -> Option<VertexId> {
        self.edge(v, Action { player: self.owner(v), symbol })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.len()).sum()
    }

    pub fn is_total(&self) -> bool {
        (0..self.len()).all(|v| {
            let owner = self.owner(v);
            (0..self.alphabet(owner).len()).all(|s| self.edge(v, Action { player: owner, symbol: s }).is_some())
        })
    }

    /// Vertex sequence generated by `word` from `start`.
    pub fn play(&self, start: VertexId, word: &[usize]) -> Result<Vec<VertexId>, PlayError> {
        let mut path = Vec::with_capacity(word.len() + 1);
        let mut cur = start;
        path.push(cur);
        for (i, &sym) in word.iter().enumerate() {
            cur = self.step(cur, sym).ok_or(PlayError::IllegalAction { index: i })?;
            path.push(cur);
        }
        Ok(path)
    }

    fn step(&self, v: VertexId, symbol: usize) -> Option<VertexId> {
        let owner = self.owner(v);
        if symbol >= self.alphabet(owner).len() {
            return None;
        }
        self.succ(v, symbol)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayError {
    #[error("illegal action at word index {index}")]
    IllegalAction { index: usize },
    #[error("lasso cycle must be non-empty and of even length")]
    BadCycle,
}

/// An ultimately periodic word `prefix · cycle^ω`. The cycle has even length
/// so the alternation of the two players is preserved across repetitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl LassoWord {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> Self {
        LassoWord { prefix, cycle }
    }
}

/// Decides the winner of a play from the colors of its transient part and
/// its periodic part.
pub fn winner_by_colors(
    objective: Objective,
    prefix: impl IntoIterator<Item = u32>,
    cycle: &[u32],
) -> Player {
    let p2 = match objective {
        Objective::Reachability => prefix.into_iter().any(|c| c == 2) || cycle.contains(&2),
        Objective::Buchi => cycle.contains(&2),
        Objective::Parity => cycle.iter().max().is_some_and(|c| c % 2 == 0),
    };
    if p2 {
        Player::Two
    } else {
        Player::One
    }
}

/// Winner of the play generated by `w` from the initial vertex.
pub fn winner_of_lasso(g: &GameGraph, w: &LassoWord) -> Result<Player, PlayError> {
    winner_of_lasso_from(g, g.initial(), w)
}

/// Winner of the play generated by `w` from `start`; `w` alternates starting
/// with a symbol of the owner of `start`.
pub fn winner_of_lasso_from(
    g: &GameGraph,
    start: VertexId,
    w: &LassoWord,
) -> Result<Player, PlayError> {
    if w.cycle.is_empty() || w.cycle.len() % 2 != 0 {
        return Err(PlayError::BadCycle);
    }
    let mut transient = vec![g.color(start)];
    let mut cur = start;
    for (i, &sym) in w.prefix.iter().enumerate() {
        cur = g.step(cur, sym).ok_or(PlayError::IllegalAction { index: i })?;
        transient.push(g.color(cur));
    }
    // Iterate the cycle until the vertex at a cycle boundary repeats.
    let mut boundary: HashMap<VertexId, usize> = HashMap::new();
    let mut passes: Vec<Vec<u32>> = Vec::new();
    let mut index = w.prefix.len();
    loop {
        if let Some(&first) = boundary.get(&cur) {
            for pass in &passes[..first] {
                transient.extend_from_slice(pass);
            }
            let periodic: Vec<u32> = passes[first..].concat();
            return Ok(winner_by_colors(g.objective(), transient, &periodic));
        }
        boundary.insert(cur, passes.len());
        let mut colors = Vec::with_capacity(w.cycle.len());
        for &sym in &w.cycle {
            cur = g
                .step(cur, sym)
                .ok_or(PlayError::IllegalAction { index })?;
            colors.push(g.color(cur));
            index += 1;
        }
        passes.push(colors);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Empty,
    InitialOwner,
    MissingEdge,
    Typing,
    TargetOwner,
    Color,
}

impl ViolationKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ViolationKind::Empty => "empty",
            ViolationKind::InitialOwner => "initial-owner",
            ViolationKind::MissingEdge => "missing-edge",
            ViolationKind::Typing => "typing",
            ViolationKind::TargetOwner => "target-owner",
            ViolationKind::Color => "color",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertex: Option<String>,
    pub action: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VIOLATION {}", self.kind.keyword())?;
        if let Some(v) = &self.vertex {
            write!(f, " {v}")?;
        }
        if let Some(a) = &self.action {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Checks the arena invariants: the initial vertex belongs to Player 1, edges
/// are labeled from their owner's alphabet and lead to the other player,
/// transitions are total, and colors fit the objective.
pub fn validate(g: &GameGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let violation = |kind, v: Option<VertexId>, a: Option<Action>| Violation {
        kind,
        vertex: v.map(|v| g.name(v).to_string()),
        action: a.map(|a| g.symbol_name(a).to_string()),
    };
    if g.is_empty() {
        out.push(violation(ViolationKind::Empty, None, None));
        return out;
    }
    if g.owner(g.initial()) != Player::One {
        out.push(violation(ViolationKind::InitialOwner, Some(g.initial()), None));
    }
    for v in 0..g.len() {
        let owner = g.owner(v);
        if !g.objective().allows_color(g.color(v)) {
            out.push(violation(ViolationKind::Color, Some(v), None));
        }
        for (action, dst) in g.edges(v) {
            if action.player != owner {
                out.push(violation(ViolationKind::Typing, Some(v), Some(action)));
            } else if g.owner(dst) == owner {
                out.push(violation(ViolationKind::TargetOwner, Some(v), Some(action)));
            }
        }
        for symbol in 0..g.alphabet(owner).len() {
            let action = Action { player: owner, symbol };
            if g.edge(v, action).is_none() {
                out.push(violation(ViolationKind::MissingEdge, Some(v), Some(action)));
            }
        }
    }
    out
}

/// Reserved vertex names of the paradise pairs added by [`complete`].
pub const P1_PARADISE: [&str; 2] = ["~par1_u", "~par1_v"];
pub const P2_PARADISE: [&str; 2] = ["~par2_u", "~par2_v"];

/// Indices of a paradise pair: `entry1` is owned by Player 1, `entry2` by Player 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Paradise {
    pub entry1: VertexId,
    pub entry2: VertexId,
}

/// Finds or creates the paradise of `winner`: a two-vertex cycle alternating
/// owners, colored 2 for Player 2 and 1 for Player 1, closed under every symbol.
pub fn ensure_paradise(g: &mut GameGraph, winner: Player) -> Paradise {
    let (names, color) = match winner {
        Player::One => (P1_PARADISE, 1),
        Player::Two => (P2_PARADISE, 2),
    };
    let entry1 = match g.vertex_id(names[0]) {
        Some(v) => v,
        None => g.add_vertex(names[0], Player::One, color).expect("reserved name"),
    };
    let entry2 = match g.vertex_id(names[1]) {
        Some(v) => v,
        None => g.add_vertex(names[1], Player::Two, color).expect("reserved name"),
    };
    for s in 0..g.alphabet1().len() {
        g.edges[entry1].entry(Action::p1(s)).or_insert(entry2);
    }
    for s in 0..g.alphabet2().len() {
        g.edges[entry2].entry(Action::p2(s)).or_insert(entry1);
    }
    Paradise { entry1, entry2 }
}

/// Makes the transition function total. Both paradise pairs are added if
/// absent and every missing `(vertex, symbol)` edge is routed into the
/// paradise of the acting player's opponent.
pub fn complete(g: &GameGraph) -> GameGraph {
    let mut out = g.clone();
    let p1 = ensure_paradise(&mut out, Player::One);
    let p2 = ensure_paradise(&mut out, Player::Two);
    for v in 0..out.len() {
        let owner = out.owner(v);
        let target = match owner {
            Player::One => p2.entry2,
            Player::Two => p1.entry1,
        };
        for symbol in 0..out.alphabet(owner).len() {
            out.edges[v]
                .entry(Action { player: owner, symbol })
                .or_insert(target);
        }
    }
    out
}
