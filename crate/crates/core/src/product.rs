//! The game in which Player 1 is bound to a fixed transducer.
//!
//! Positions pair a base vertex with a machine state. At `(u, m)` Player 1
//! is expected to play `L(m)`; any other symbol leads to the shared sink
//! pair `⊤`, a Player-2 paradise. Player-2 moves advance both components.
//! Only positions reachable from `(ι, s)` are built unless asked otherwise.

use std::cell::OnceCell;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::game::{
    Action, Arena, ArenaLasso, GameError, GameGraph, LassoWord, OnePlayerSolution, Player, VertexId,
};
use crate::transducer::{distinguishing_word, Agreement, StateId, Transducer, TransducerError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("the transducer emits {machine} symbols but player 1 has {game}")]
    OutputMismatch { machine: usize, game: usize },
    #[error("the transducer reads {machine} symbols but player 2 has {game}")]
    InputMismatch { machine: usize, game: usize },
    #[error("vertex `{0}` has no edge for some action; run `complete` first")]
    NotTotal(String),
    #[error("the initial vertex must belong to player 1")]
    InitialOwner,
    #[error("position {0} is not winning for player 2")]
    NotWinning(String),
    #[error("the word disagrees with transducer {which} at index {index}")]
    Disagrees { which: u8, index: usize },
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error("illegal action at word index {0}")]
    IllegalAction(usize),
}

/// A position of the product game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    Pair(VertexId, StateId),
    /// The Player-2 half of the sink pair, entered by off-policy moves.
    Top,
    /// The Player-1 half of the sink pair.
    TopReturn,
}

/// Color of both sink positions; winning for Player 2 under every objective.
pub const TOP_COLOR: u32 = 2;

pub type PositionId = usize;

#[derive(Clone, Debug)]
pub struct ProductGame<'a> {
    game: &'a GameGraph,
    machine: Transducer,
    positions: Vec<Position>,
    /// Dense `(v, m) -> id` map, `u32::MAX` when absent.
    index: Vec<u32>,
    arena: Arena,
    initial: PositionId,
    top: PositionId,
    top_return: PositionId,
    solution: OnceCell<OnePlayerSolution>,
}

impl<'a> ProductGame<'a> {
    /// Builds the positions reachable from `(ι, s)` and the sink pair.
    pub fn build(game: &'a GameGraph, machine: &Transducer) -> Result<Self, ProductError> {
        Self::build_with(game, machine, false)
    }

    /// With `full`, every pair of `V × M` becomes a position.
    pub fn build_with(game: &'a GameGraph, machine: &Transducer, full: bool) -> Result<Self, ProductError> {
        if machine.outputs() != game.alphabet1().len() {
            return Err(ProductError::OutputMismatch { machine: machine.outputs(), game: game.alphabet1().len() });
        }
        if machine.inputs() != game.alphabet2().len() {
            return Err(ProductError::InputMismatch { machine: machine.inputs(), game: game.alphabet2().len() });
        }
        if game.is_empty() || game.owner(game.initial()) != Player::One {
            return Err(ProductError::InitialOwner);
        }
        if let Some(v) = (0..game.len()).find(|&v| {
            let owner = game.owner(v);
            (0..game.alphabet(owner).len()).any(|s| game.edge(v, Action { player: owner, symbol: s }).is_none())
        }) {
            return Err(ProductError::NotTotal(game.name(v).to_string()));
        }
        let k = machine.states();
        let mut p = ProductGame {
            game,
            machine: machine.clone(),
            positions: Vec::new(),
            index: vec![u32::MAX; game.len() * k],
            arena: Arena::new(),
            initial: 0,
            top: 0,
            top_return: 0,
            solution: OnceCell::new(),
        };
        let start = (game.initial(), machine.initial());
        p.intern(start);
        if full {
            for v in 0..game.len() {
                for m in 0..k {
                    p.intern((v, m));
                }
            }
        }
        // Positions are interned in BFS order; edges are added as we go.
        let mut next = 0;
        while next < p.positions.len() {
            let id = next;
            next += 1;
            let Position::Pair(v, m) = p.positions[id] else { unreachable!() };
            match game.owner(v) {
                Player::One => {
                    let a = machine.label(m);
                    let to = p.intern((game.succ(v, a).unwrap(), m));
                    p.arena.add_edge(id, a, to);
                }
                Player::Two => {
                    for b in 0..game.alphabet2().len() {
                        let to = p.intern((game.succ(v, b).unwrap(), machine.next(m, b)));
                        p.arena.add_edge(id, b, to);
                    }
                }
            }
        }
        p.top = p.positions.len();
        p.positions.push(Position::Top);
        p.arena.add_vertex(Player::Two, TOP_COLOR);
        p.top_return = p.positions.len();
        p.positions.push(Position::TopReturn);
        p.arena.add_vertex(Player::One, TOP_COLOR);
        p.arena.add_edge(p.top, 0, p.top_return);
        p.arena.add_edge(p.top_return, 0, p.top);
        Ok(p)
    }

    fn intern(&mut self, (v, m): (VertexId, StateId)) -> PositionId {
        let slot = v * self.machine.states() + m;
        if self.index[slot] != u32::MAX {
            return self.index[slot] as usize;
        }
        let id = self.positions.len();
        self.index[slot] = id as u32;
        self.positions.push(Position::Pair(v, m));
        self.arena.add_vertex(self.game.owner(v), self.game.color(v));
        id
    }

    pub fn game(&self) -> &GameGraph {
        self.game
    }

    pub fn machine(&self) -> &Transducer {
        &self.machine
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, id: PositionId) -> Position {
        self.positions[id]
    }

    pub fn id_of(&self, pos: Position) -> Option<PositionId> {
        match pos {
            Position::Pair(v, m) => {
                if v >= self.game.len() || m >= self.machine.states() {
                    return None;
                }
                let i = self.index[v * self.machine.states() + m];
                (i != u32::MAX).then_some(i as usize)
            }
            Position::Top => Some(self.top),
            Position::TopReturn => Some(self.top_return),
        }
    }

    pub fn initial(&self) -> PositionId {
        self.initial
    }

    pub fn top(&self) -> PositionId {
        self.top
    }

    pub fn owner(&self, id: PositionId) -> Player {
        self.arena.owner(id)
    }

    pub fn color(&self, id: PositionId) -> u32 {
        self.arena.color(id)
    }

    /// The arena in which Player 1 keeps only its on-policy move.
    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    /// Successor under an arbitrary action of the position's owner,
    /// including off-policy Player-1 moves.
    pub fn successor(&self, id: PositionId, symbol: usize) -> Option<PositionId> {
        let owner = self.owner(id);
        if symbol >= self.game.alphabet(owner).len() {
            return None;
        }
        match self.positions[id] {
            Position::Top => Some(self.top_return),
            Position::TopReturn => Some(self.top),
            Position::Pair(v, m) => match owner {
                Player::One if symbol != self.machine.label(m) => Some(self.top),
                Player::One => Some(self.arena.succ(id)[0].1),
                Player::Two => {
                    let u = self.game.succ(v, symbol)?;
                    self.id_of(Position::Pair(u, self.machine.next(m, symbol)))
                }
            },
        }
    }

    /// Forward closure of the initial position over all product edges.
    pub fn reachable_positions(&self) -> Vec<PositionId> {
        let mut seen = vec![false; self.len()];
        seen[self.initial] = true;
        let mut order = vec![self.initial];
        let mut i = 0;
        while i < order.len() {
            let id = order[i];
            i += 1;
            let owner = self.owner(id);
            for s in 0..self.game.alphabet(owner).len() {
                if let Some(to) = self.successor(id, s) {
                    if !seen[to] {
                        seen[to] = true;
                        order.push(to);
                    }
                }
            }
        }
        order.sort_unstable();
        order
    }

    /// Positions visited by playing `word` from the initial position.
    pub fn replay(&self, word: &[usize]) -> Result<Vec<PositionId>, ProductError> {
        let mut path = vec![self.initial];
        let mut cur = self.initial;
        for (i, &s) in word.iter().enumerate() {
            cur = self.successor(cur, s).ok_or(ProductError::IllegalAction(i))?;
            path.push(cur);
        }
        Ok(path)
    }

    /// Winning positions of Player 2, computed on first use.
    pub fn solution(&self) -> &OnePlayerSolution {
        self.solution.get_or_init(|| {
            OnePlayerSolution::solve(&self.arena, self.game.objective())
                .expect("product arenas have one on-policy move per player-1 position")
        })
    }

    pub fn p2_wins(&self, id: PositionId) -> bool {
        self.solution().p2_wins(id)
    }

    pub fn p2_winning_positions(&self) -> Vec<PositionId> {
        self.solution().winning_region()
    }

    /// The first position reachable along on-policy moves (in breadth-first
    /// order from the initial position) that Player 2 loses.
    pub fn first_losing_reachable(&self) -> Option<PositionId> {
        let solution = self.solution();
        let mut seen = vec![false; self.len()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(id) = queue.pop_front() {
            if !solution.p2_wins(id) {
                return Some(id);
            }
            for &(_, to) in self.arena.succ(id) {
                if !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        None
    }

    /// A lasso from `id` along which Player 2 wins, following the machine
    /// at Player-1 positions.
    pub fn winning_lasso(&self, id: PositionId) -> Result<ProductLasso, ProductError> {
        let lasso: ArenaLasso = self
            .solution()
            .witness(&self.arena, id)
            .ok_or_else(|| ProductError::NotWinning(self.position_name(id)))?;
        let arena = &self.arena;
        let label = |steps: Vec<(usize, usize)>| steps.into_iter().map(|(v, e)| (v, arena.succ(v)[e].0)).collect();
        Ok(ProductLasso { stem: label(lasso.stem), cycle: label(lasso.cycle) })
    }

    /// Shortest word leading from the initial position to `target` along
    /// on-policy moves; Player-2 symbols are tried in alphabet order.
    pub fn access_word(&self, target: PositionId) -> Option<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<Option<(PositionId, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(id) = queue.pop_front() {
            if id == target {
                let mut word = Vec::new();
                let mut cur = id;
                while let Some((p, s)) = parent[cur] {
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for &(label, to) in self.arena.succ(id) {
                if !seen[to] {
                    seen[to] = true;
                    parent[to] = Some((id, label));
                    queue.push_back(to);
                }
            }
        }
        None
    }

    pub fn position_name(&self, id: PositionId) -> String {
        match self.positions[id] {
            Position::Pair(v, m) => format!("({},{})", self.game.name(v), m),
            Position::Top => "(top)".to_string(),
            Position::TopReturn => "(top')".to_string(),
        }
    }

    /// The product as a game graph with every Player-1 action present.
    pub fn to_game_graph(&self) -> Result<GameGraph, GameError> {
        let mut out = GameGraph::new(
            self.game.objective(),
            self.game.alphabet1().to_vec(),
            self.game.alphabet2().to_vec(),
        )?;
        for id in 0..self.len() {
            out.add_vertex(self.position_name(id), self.owner(id), self.color(id))?;
        }
        for id in 0..self.len() {
            let owner = self.owner(id);
            for s in 0..self.game.alphabet(owner).len() {
                if let Some(to) = self.successor(id, s) {
                    out.set_edge(id, Action { player: owner, symbol: s }, to);
                }
            }
        }
        out.set_initial(self.initial);
        Ok(out)
    }
}

/// A winning lasso in the product; each step is a position and the symbol
/// played there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductLasso {
    pub stem: Vec<(PositionId, usize)>,
    pub cycle: Vec<(PositionId, usize)>,
}

impl ProductLasso {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The symbols played, as a lasso word. A cycle of odd length is
    /// doubled so the word keeps strict alternation.
    pub fn word(&self) -> LassoWord {
        let stem = self.stem.iter().map(|s| s.1).collect();
        let mut cycle: Vec<usize> = self.cycle.iter().map(|s| s.1).collect();
        if cycle.len() % 2 == 1 {
            let again = cycle.clone();
            cycle.extend(again);
        }
        LassoWord::new(stem, cycle)
    }

    pub fn display(&self, p: &ProductGame<'_>) -> String {
        let show = |steps: &[(PositionId, usize)]| {
            steps
                .iter()
                .map(|&(id, s)| format!("{} {}", p.position_name(id), p.game.symbol_name(Action { player: p.owner(id), symbol: s })))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!("LASSO prefix: {} cycle: {}", show(&self.stem), show(&self.cycle))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Pair(v, m) => write!(f, "({v},{m})"),
            Position::Top => f.write_str("(top)"),
            Position::TopReturn => f.write_str("(top')"),
        }
    }
}

/// Shortest Player-2 continuation after `alpha` on which `t1` and `t2` emit
/// different symbols. Both machines must agree with `alpha`.
pub fn distinguish_extension(
    alpha: &[usize],
    t1: &Transducer,
    t2: &Transducer,
) -> Result<Option<Vec<usize>>, ProductError> {
    for (which, t) in [(1u8, t1), (2u8, t2)] {
        if let Agreement::DisagreesAt(index) = t.agrees(alpha)? {
            return Err(ProductError::Disagrees { which, index });
        }
    }
    let inputs: Vec<usize> = alpha.iter().skip(1).step_by(2).copied().collect();
    let m1 = t1.state_after(&inputs)?;
    let m2 = t2.state_after(&inputs)?;
    Ok(distinguishing_word(t1, m1, t2, m2))
}
