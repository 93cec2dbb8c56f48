//! The adaptive probing strategy for Player 2.
//!
//! The controller walks through the k-state machines in enumeration order.
//! For the current hypothesis it keeps the set `M'` of states the
//! environment may be in, conjectures the least one, and plays a winning
//! lasso of the product from there. An observed Player-1 action that the
//! conjectured state would not have produced removes that state; once `M'`
//! is empty the next machine is tried, wrapping around after the last one.

use std::collections::HashMap;

use crate::game::{GameGraph, Player, VertexId};
use crate::product::{Position, PositionId, ProductGame, ProductLasso};
use crate::transducer::{is_canonical, Enumeration, StateId, Transducer};

use super::{enumeration, SynthesisError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControllerOptions {
    /// Only try behavioral representatives.
    pub dedupe: bool,
    /// Seed `M'` from product reachability instead of replaying a history
    /// log; no history is kept.
    pub strict_space: bool,
    /// Upper limit on the number of machines in the enumeration.
    pub cap: u64,
}

impl Default for ControllerOptions {
    fn default() -> Self {
        ControllerOptions { dedupe: false, strict_space: false, cap: crate::liveness::DEFAULT_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Scanning,
    Tracking,
}

/// A hypothesis adopted after `step` Player-2 actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypothesisRecord {
    pub step: u64,
    pub ordinal: u64,
    pub candidates: usize,
}

/// Everything that determines the controller's behavior until the next
/// change of hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub vertex: VertexId,
    pub ordinal: Option<u64>,
    pub candidates: Vec<StateId>,
    pub conjecture: Option<StateId>,
    pub lasso_start: Option<PositionId>,
    pub cursor: usize,
}

#[derive(Clone, Debug)]
struct Tracking {
    candidates: Vec<StateId>,
    conjecture: StateId,
    lasso: ProductLasso,
    start: PositionId,
    cursor: usize,
}

pub struct Controller<'a> {
    game: &'a GameGraph,
    enumeration: Enumeration,
    opts: ControllerOptions,
    products: HashMap<u64, ProductGame<'a>>,
    vertex: VertexId,
    /// Ordinal of the current (or last) hypothesis.
    ordinal: Option<u64>,
    tracking: Option<Tracking>,
    history: Vec<usize>,
    steps: u64,
    log: Vec<HypothesisRecord>,
}

impl<'a> Controller<'a> {
    pub fn new(game: &'a GameGraph, k: usize, opts: ControllerOptions) -> Result<Self, SynthesisError> {
        if !game.is_total() {
            return Err(SynthesisError::NotTotal);
        }
        if game.owner(game.initial()) != Player::One {
            return Err(SynthesisError::InitialOwner);
        }
        let enumeration = enumeration(game, k, opts.cap)?;
        Ok(Controller {
            game,
            enumeration,
            opts,
            products: HashMap::new(),
            vertex: game.initial(),
            ordinal: None,
            tracking: None,
            history: Vec::new(),
            steps: 0,
            log: Vec::new(),
        })
    }

    /// Back to the start of a play; solved products are kept.
    pub fn reset(&mut self) {
        self.vertex = self.game.initial();
        self.ordinal = None;
        self.tracking = None;
        self.history.clear();
        self.steps = 0;
        self.log.clear();
    }

    pub fn game(&self) -> &GameGraph {
        self.game
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn phase(&self) -> Phase {
        if self.tracking.is_some() {
            Phase::Tracking
        } else {
            Phase::Scanning
        }
    }

    pub fn ordinal(&self) -> Option<u64> {
        self.ordinal
    }

    pub fn candidates(&self) -> &[StateId] {
        self.tracking.as_ref().map_or(&[], |t| &t.candidates)
    }

    pub fn conjecture(&self) -> Option<StateId> {
        self.tracking.as_ref().map(|t| t.conjecture)
    }

    pub fn lasso(&self) -> Option<&ProductLasso> {
        self.tracking.as_ref().map(|t| &t.lasso)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn hypothesis_log(&self) -> &[HypothesisRecord] {
        &self.log
    }

    /// Length of the stored history; always 0 in strict-space mode.
    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let t = self.tracking.as_ref();
        Fingerprint {
            vertex: self.vertex,
            ordinal: self.ordinal,
            candidates: t.map_or_else(Vec::new, |t| t.candidates.clone()),
            conjecture: t.map(|t| t.conjecture),
            lasso_start: t.map(|t| t.start),
            cursor: t.map_or(0, |t| t.cursor),
        }
    }

    /// Player 1 has played `a` at the current vertex; returns Player 2's
    /// answer at the vertex reached.
    pub fn next_action(&mut self, a: usize) -> usize {
        debug_assert_eq!(self.game.owner(self.vertex), Player::One);
        if !self.opts.strict_space {
            self.history.push(a);
        }
        if let Some(t) = self.tracking.as_mut() {
            let machine = self.products[&self.ordinal.unwrap()].machine();
            t.candidates.retain(|&m| machine.label(m) == a);
            if machine.label(t.conjecture) == a {
                t.cursor = next_cursor(&t.lasso, t.cursor);
            }
        }
        self.vertex = self.game.succ(self.vertex, a).expect("total game");

        self.settle();
        let b = match &self.tracking {
            Some(t) => {
                let (id, b) = step_at(&t.lasso, t.cursor);
                debug_assert_eq!(
                    self.products[&self.ordinal.unwrap()].position(id),
                    Position::Pair(self.vertex, t.conjecture)
                );
                b
            }
            None => 0,
        };

        if !self.opts.strict_space {
            self.history.push(b);
        }
        self.steps += 1;
        if let Some(t) = self.tracking.as_mut() {
            let machine = self.products[&self.ordinal.unwrap()].machine();
            for m in &mut t.candidates {
                *m = machine.next(*m, b);
            }
            t.candidates.sort_unstable();
            t.candidates.dedup();
            t.conjecture = machine.next(t.conjecture, b);
            t.cursor = next_cursor(&t.lasso, t.cursor);
        }
        self.vertex = self.game.succ(self.vertex, b).expect("total game");
        b
    }

    /// Ensures a lasso is being followed from the current Player-2 vertex,
    /// switching conjectures or hypotheses as needed.
    fn settle(&mut self) {
        if let Some(mut t) = self.tracking.take() {
            let ordinal = self.ordinal.unwrap();
            if t.candidates.contains(&t.conjecture) {
                self.tracking = Some(t);
                return;
            }
            if let Some(next) = self.conjecture_from(ordinal, &mut t.candidates) {
                self.tracking = Some(next);
                return;
            }
        }
        self.scan();
    }

    /// Picks the least winning candidate at the current vertex, dropping
    /// losing ones.
    fn conjecture_from(&self, ordinal: u64, candidates: &mut Vec<StateId>) -> Option<Tracking> {
        let v = self.vertex;
        let product = &self.products[&ordinal];
        candidates.retain(|&m| product.id_of(Position::Pair(v, m)).is_some_and(|id| product.p2_wins(id)));
        let m = *candidates.first()?;
        let start = product.id_of(Position::Pair(v, m)).unwrap();
        let lasso = product.winning_lasso(start).expect("winning position has a lasso");
        Some(Tracking { candidates: candidates.clone(), conjecture: m, lasso, start, cursor: 0 })
    }

    /// Tries hypotheses after the current one, wrapping around once.
    fn scan(&mut self) {
        let n = self.enumeration.len();
        let first = self.ordinal.map_or(0, |o| (o + 1) % n);
        for i in 0..n {
            let ordinal = (first + i) % n;
            let machine = self.enumeration.decode(ordinal).expect("ordinal in range");
            if self.opts.dedupe && !is_canonical(&machine) {
                continue;
            }
            let Some(mut candidates) = self.seed(ordinal, &machine) else { continue };
            self.products
                .entry(ordinal)
                .or_insert_with(|| ProductGame::build(self.game, &machine).expect("shapes checked"));
            if let Some(t) = self.conjecture_from(ordinal, &mut candidates) {
                self.log.push(HypothesisRecord { step: self.steps, ordinal, candidates: t.candidates.len() });
                self.ordinal = Some(ordinal);
                self.tracking = Some(t);
                return;
            }
        }
        self.tracking = None;
    }

    /// The states `machine` may be in at the current vertex.
    fn seed(&mut self, ordinal: u64, machine: &Transducer) -> Option<Vec<StateId>> {
        if self.opts.strict_space {
            let v = self.vertex;
            let product = self
                .products
                .entry(ordinal)
                .or_insert_with(|| ProductGame::build(self.game, machine).expect("shapes checked"));
            let states: Vec<StateId> =
                (0..machine.states()).filter(|&m| product.id_of(Position::Pair(v, m)).is_some()).collect();
            (!states.is_empty()).then_some(states)
        } else {
            if !machine.agrees(&self.history).ok()?.holds() {
                return None;
            }
            let inputs: Vec<usize> = self.history.iter().skip(1).step_by(2).copied().collect();
            Some(vec![machine.state_after(&inputs).ok()?])
        }
    }
}

fn step_at(lasso: &ProductLasso, cursor: usize) -> (PositionId, usize) {
    if cursor < lasso.stem.len() {
        lasso.stem[cursor]
    } else {
        lasso.cycle[cursor - lasso.stem.len()]
    }
}

fn next_cursor(lasso: &ProductLasso, cursor: usize) -> usize {
    if cursor + 1 < lasso.len() {
        cursor + 1
    } else {
        lasso.stem.len()
    }
}
