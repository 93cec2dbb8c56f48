//! Playing a Player-2 strategy against a hidden environment machine.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use num_bigint::BigUint;

use crate::game::{winner_of_lasso, Action, GameGraph, LassoWord, Objective, Player, VertexId};
use crate::transducer::{count, StateId, Transducer};

use super::controller::{Controller, Fingerprint, HypothesisRecord};
use super::SynthesisError;

/// A Player-2 strategy driven by observed Player-1 actions.
pub trait Responder {
    type Fingerprint: Clone + Eq + Hash;

    /// Player 1 played `a`; returns the answer at the vertex reached.
    fn respond(&mut self, a: usize) -> usize;

    /// Internal state that, together with the game vertex, fixes all
    /// future answers until [`Responder::epoch`] changes.
    fn fingerprint(&self) -> Self::Fingerprint;

    /// Changes whenever state outside the fingerprint may have changed.
    fn epoch(&self) -> usize {
        0
    }

    /// `(ordinal, |M'|)` shown on Player-2 trace lines.
    fn status(&self) -> Option<(u64, usize)> {
        None
    }

    fn hypothesis_log(&self) -> Vec<HypothesisRecord> {
        Vec::new()
    }
}

impl Responder for Controller<'_> {
    type Fingerprint = Fingerprint;

    fn respond(&mut self, a: usize) -> usize {
        self.next_action(a)
    }

    fn fingerprint(&self) -> Fingerprint {
        Controller::fingerprint(self)
    }

    fn epoch(&self) -> usize {
        Controller::hypothesis_log(self).len()
    }

    fn status(&self) -> Option<(u64, usize)> {
        self.ordinal().map(|o| (o, self.candidates().len()))
    }

    fn hypothesis_log(&self) -> Vec<HypothesisRecord> {
        Controller::hypothesis_log(self).to_vec()
    }
}

/// One half-step: the mover, its symbol and the vertex it moved from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub player: Player,
    pub symbol: usize,
    pub vertex: VertexId,
    pub status: Option<(u64, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub actions: Vec<TraceStep>,
    /// `None` when `max_steps` ran out first.
    pub winner: Option<Player>,
    /// Number of Player-2 actions.
    pub steps: u64,
    pub hypothesis_log: Vec<HypothesisRecord>,
    /// The closing cycle, as an index into `actions`, when a configuration
    /// repeated.
    pub cycle_start: Option<usize>,
}

impl Trace {
    pub fn word(&self) -> Vec<usize> {
        self.actions.iter().map(|s| s.symbol).collect()
    }

    /// `STEP <i> P<1|2> <action> <vertex> [ordinal=<o> |M'|=<c>]` lines.
    pub fn lines(&self, g: &GameGraph) -> String {
        let mut out = String::new();
        for (i, s) in self.actions.iter().enumerate() {
            let action = g.symbol_name(Action { player: s.player, symbol: s.symbol });
            write!(out, "STEP {i} P{} {action} {}", s.player.number(), g.name(s.vertex)).unwrap();
            if let Some((o, c)) = s.status {
                write!(out, " ordinal={o} |M'|={c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Plays `hidden` (as Player 1) against `responder` from the initial
/// vertex. Reachability plays stop when a color-2 vertex is visited; any
/// play stops when the joint configuration at a Player-1 vertex repeats,
/// which closes a lasso, or after `max_steps` Player-2 actions.
pub fn simulate<R: Responder>(
    g: &GameGraph,
    responder: &mut R,
    hidden: &Transducer,
    max_steps: u64,
) -> Result<Trace, SynthesisError> {
    if hidden.outputs() != g.alphabet1().len() || hidden.inputs() != g.alphabet2().len() {
        return Err(SynthesisError::AlphabetMismatch);
    }
    if !g.is_total() {
        return Err(SynthesisError::NotTotal);
    }
    if g.owner(g.initial()) != Player::One {
        return Err(SynthesisError::InitialOwner);
    }
    let reach = g.objective() == Objective::Reachability;
    let mut actions = Vec::new();
    let mut seen: HashMap<(VertexId, StateId, R::Fingerprint), usize> = HashMap::new();
    let mut epoch = responder.epoch();
    let mut v = g.initial();
    let mut m = hidden.initial();
    let mut steps = 0u64;
    let finish = |actions: Vec<TraceStep>, winner, steps, cycle_start, responder: &R| Trace {
        actions,
        winner,
        steps,
        hypothesis_log: responder.hypothesis_log(),
        cycle_start,
    };

    loop {
        if reach && g.color(v) == 2 {
            return Ok(finish(actions, Some(Player::Two), steps, None, responder));
        }
        if responder.epoch() != epoch {
            epoch = responder.epoch();
            seen.clear();
        }
        let key = (v, m, responder.fingerprint());
        if let Some(&start) = seen.get(&key) {
            let word: Vec<usize> = actions.iter().map(|s: &TraceStep| s.symbol).collect();
            let lasso = LassoWord::new(word[..start].to_vec(), word[start..].to_vec());
            let winner = if reach {
                Player::One
            } else {
                winner_of_lasso(g, &lasso).expect("legal play")
            };
            return Ok(finish(actions, Some(winner), steps, Some(start), responder));
        }
        if steps >= max_steps {
            return Ok(finish(actions, None, steps, None, responder));
        }
        seen.insert(key, actions.len());

        let a = hidden.label(m);
        actions.push(TraceStep { player: Player::One, symbol: a, vertex: v, status: None });
        let u = g.succ(v, a).expect("total game");
        if reach && g.color(u) == 2 {
            return Ok(finish(actions, Some(Player::Two), steps, None, responder));
        }
        let b = responder.respond(a);
        steps += 1;
        actions.push(TraceStep { player: Player::Two, symbol: b, vertex: u, status: responder.status() });
        v = g.succ(u, b).expect("total game");
        m = hidden.next(m, b);
    }
}

/// `count(k, Σ, Γ) · k · 4nk`: at most that many Player-2 actions pass
/// before the adaptive controller wins a reachability game it can win.
pub fn steps_bound(n: usize, k: usize, sigma: usize, gamma: usize) -> BigUint {
    count(k, sigma, gamma) * BigUint::from(k) * BigUint::from(4 * n * k)
}
