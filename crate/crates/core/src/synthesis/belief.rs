//! Bounded synthesis by the knowledge construction: positions pair a game
//! vertex with the set of (machine, state) configurations consistent with
//! the history so far.

use std::collections::HashMap;

use crate::game::{solve_parity_arena, Arena, GameGraph, Objective, ParitySolution, Player, VertexId};
use crate::transducer::{StateId, Transducer};

use super::{hypotheses, SynthesisError};

/// Default limit on the number of belief positions.
pub const DEFAULT_POSITION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedOptions {
    pub dedupe: bool,
    pub machine_cap: u64,
    pub position_cap: usize,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        BoundedOptions {
            dedupe: false,
            machine_cap: crate::liveness::DEFAULT_CAP,
            position_cap: DEFAULT_POSITION_CAP,
        }
    }
}

/// Outcome of [`solve_bounded`].
#[derive(Debug)]
pub enum Bounded<'a> {
    Decided(BeliefGame<'a>),
    Undecided(String),
}

impl<'a> Bounded<'a> {
    pub fn p2_wins(&self) -> Option<bool> {
        match self {
            Bounded::Decided(b) => Some(b.p2_wins()),
            Bounded::Undecided(_) => None,
        }
    }
}

pub type BeliefId = usize;

/// The solved belief arena. A belief is a sorted list of codes
/// `machine * k + state`; every machine occurs at most once.
#[derive(Debug)]
pub struct BeliefGame<'a> {
    game: &'a GameGraph,
    machines: Vec<Transducer>,
    k: usize,
    positions: Vec<(VertexId, Box<[u32]>)>,
    arena: Arena,
    solution: ParitySolution,
}

/// Decides whether Player 2 wins `g` against every environment with at
/// most `k` states.
pub fn solve_bounded<'a>(g: &'a GameGraph, k: usize, opts: &BoundedOptions) -> Result<Bounded<'a>, SynthesisError> {
    let machines = match hypotheses(g, k, opts.dedupe, opts.machine_cap) {
        Ok(list) => list.into_iter().map(|(_, t)| t).collect(),
        Err(e @ SynthesisError::Cap { .. }) => return Ok(Bounded::Undecided(e.to_string())),
        Err(e) => return Err(e),
    };
    match BeliefGame::build(g, k, machines, opts.position_cap)? {
        Some(b) => Ok(Bounded::Decided(b)),
        None => Ok(Bounded::Undecided(format!("more than {} belief positions", opts.position_cap))),
    }
}

impl<'a> BeliefGame<'a> {
    fn build(
        game: &'a GameGraph,
        k: usize,
        machines: Vec<Transducer>,
        cap: usize,
    ) -> Result<Option<Self>, SynthesisError> {
        if !game.is_total() {
            return Err(SynthesisError::NotTotal);
        }
        if game.owner(game.initial()) != Player::One {
            return Err(SynthesisError::InitialOwner);
        }
        let sigma = game.alphabet1().len();
        let gamma = game.alphabet2().len();
        let mut positions: Vec<(VertexId, Box<[u32]>)> = Vec::new();
        let mut index: HashMap<(VertexId, Box<[u32]>), BeliefId> = HashMap::new();
        let mut arena = Arena::new();
        let mut intern = |v: VertexId, belief: Vec<u32>, positions: &mut Vec<_>, arena: &mut Arena| {
            let key = (v, belief.into_boxed_slice());
            if let Some(&id) = index.get(&key) {
                return id;
            }
            let id = positions.len();
            index.insert(key.clone(), id);
            positions.push(key);
            arena.add_vertex(game.owner(v), game.color(v));
            id
        };
        let start: Vec<u32> = machines
            .iter()
            .enumerate()
            .map(|(i, t)| (i * k + t.initial()) as u32)
            .collect();
        intern(game.initial(), start, &mut positions, &mut arena);
        let mut next = 0;
        while next < positions.len() {
            if positions.len() > cap {
                return Ok(None);
            }
            let id = next;
            next += 1;
            let (v, belief) = positions[id].clone();
            let decode = |c: u32| ((c as usize) / k, (c as usize) % k);
            match game.owner(v) {
                Player::One => {
                    for a in 0..sigma {
                        let split: Vec<u32> = belief
                            .iter()
                            .copied()
                            .filter(|&c| {
                                let (t, m) = decode(c);
                                machines[t].label(m) == a
                            })
                            .collect();
                        if split.is_empty() {
                            continue;
                        }
                        let to = intern(game.succ(v, a).unwrap(), split, &mut positions, &mut arena);
                        arena.add_edge(id, a, to);
                    }
                }
                Player::Two => {
                    for b in 0..gamma {
                        let moved: Vec<u32> = belief
                            .iter()
                            .map(|&c| {
                                let (t, m) = decode(c);
                                (t * k + machines[t].next(m, b)) as u32
                            })
                            .collect();
                        let to = intern(game.succ(v, b).unwrap(), moved, &mut positions, &mut arena);
                        arena.add_edge(id, b, to);
                    }
                }
            }
        }
        let solved_arena = match game.objective() {
            Objective::Reachability => arena.reachability_as_parity(),
            Objective::Buchi | Objective::Parity => arena.clone(),
        };
        let solution = solve_parity_arena(&solved_arena);
        Ok(Some(BeliefGame { game, machines, k, positions, arena, solution }))
    }

    pub fn game(&self) -> &GameGraph {
        self.game
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn initial(&self) -> BeliefId {
        0
    }

    pub fn p2_wins(&self) -> bool {
        self.solution.winner[0] == Player::Two
    }

    pub fn winner(&self, id: BeliefId) -> Player {
        self.solution.winner[id]
    }

    pub fn vertex(&self, id: BeliefId) -> VertexId {
        self.positions[id].0
    }

    /// The consistent configurations at a belief position.
    pub fn belief(&self, id: BeliefId) -> Vec<(&Transducer, StateId)> {
        self.positions[id]
            .1
            .iter()
            .map(|&c| (&self.machines[c as usize / self.k], c as usize % self.k))
            .collect()
    }

    /// Successor under the owner's symbol, if the move is possible.
    pub fn step(&self, id: BeliefId, symbol: usize) -> Option<BeliefId> {
        self.arena.succ(id).iter().find(|&&(l, _)| l == symbol).map(|&(_, to)| to)
    }

    /// The positional strategy's choice at a Player-2 position.
    pub fn p2_action(&self, id: BeliefId) -> usize {
        debug_assert_eq!(self.arena.owner(id), Player::Two);
        self.arena.succ(id)[self.solution.strategy[id]].0
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }
}

/// The consistent-configuration set along a single play, maintained
/// incrementally over a fixed list of machines.
#[derive(Clone, Debug)]
pub struct BeliefTracker<'m> {
    machines: &'m [Transducer],
    belief: Vec<(usize, StateId)>,
}

impl<'m> BeliefTracker<'m> {
    pub fn new(machines: &'m [Transducer]) -> Self {
        BeliefTracker { machines, belief: machines.iter().enumerate().map(|(i, t)| (i, t.initial())).collect() }
    }

    /// Recomputes the set for an alternating history from scratch.
    pub fn from_history(machines: &'m [Transducer], history: &[usize]) -> Self {
        let mut t = BeliefTracker::new(machines);
        for (i, &s) in history.iter().enumerate() {
            if i % 2 == 0 {
                t.observe(s);
            } else {
                t.advance(s);
            }
        }
        t
    }

    /// Keeps the configurations whose output is `a`.
    pub fn observe(&mut self, a: usize) {
        let machines = self.machines;
        self.belief.retain(|&(i, m)| machines[i].label(m) == a);
    }

    pub fn advance(&mut self, b: usize) {
        for (i, m) in &mut self.belief {
            *m = self.machines[*i].next(*m, b);
        }
    }

    pub fn belief(&self) -> &[(usize, StateId)] {
        &self.belief
    }
}
