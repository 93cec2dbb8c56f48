//! End-to-end agreement between the formula games and brute-force oracles.

use crate::game::GameGraph;
use crate::liveness::{check_k_live, losing_position, LiveOptions, LivenessError};
use crate::product::ProductGame;
use crate::synthesis::{solve_bounded, BoundedOptions};

use super::cnf::{assignment_transducer, cnf_to_game};
use super::formula::{qbf_brute_force, sat_brute_force, CnfFormula, QbfFormula};
use super::qbf::{assignment_word, counter_transducer, falsifying_play, qbf_to_game};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfCheck {
    pub valid: bool,
    /// `solve_bounded` at `k + 1`; `None` when a cap was hit.
    pub p2_wins: Option<bool>,
    /// Some counter machine for one fixed assignment makes the initial
    /// product position losing. Player 2 can usually escape such a machine
    /// by answering differently in the assignment phase, so this is
    /// typically `false`. Only computed for invalid formulas.
    pub fixed_counter: Option<bool>,
    /// Every Player-2 assignment strategy is beaten by the counter machine
    /// built from the falsifying play against it. Only for invalid formulas.
    pub per_strategy: Option<bool>,
}

impl QbfCheck {
    pub fn game_agrees(&self) -> Option<bool> {
        self.p2_wins.map(|w| w == self.valid)
    }
}

/// Checks `qbf_to_game(psi)` against [`qbf_brute_force`]. `bounded` controls
/// the belief solve; pass `None` to skip it.
pub fn qbf_check(psi: &QbfFormula, bounded: Option<&BoundedOptions>) -> QbfCheck {
    let valid = qbf_brute_force(psi);
    let g = qbf_to_game(psi);
    let p2_wins = bounded.and_then(|opts| solve_bounded(&g, psi.k() + 1, opts).ok()?.p2_wins());
    let (fixed_counter, per_strategy) = if valid {
        (None, None)
    } else {
        (Some(some_fixed_counter_wins(psi, &g)), Some(every_strategy_beaten(psi, &g)))
    };
    QbfCheck { valid, p2_wins, fixed_counter, per_strategy }
}

fn bits(n: usize, mask: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect()
}

fn some_fixed_counter_wins(psi: &QbfFormula, g: &GameGraph) -> bool {
    let k = psi.k();
    (0..1 << k).any(|xm| {
        (0..1 << k).any(|ym| {
            let t = counter_transducer(psi, &bits(k, xm), &bits(k, ym));
            let p = ProductGame::build(g, &t).expect("alphabets match");
            !p.p2_wins(p.initial())
        })
    })
}

/// Player 2's choice of `y_i` may depend on `x_1 .. x_i`; a strategy is a
/// table with `2^i` entries for each `i`, packed into one integer.
fn every_strategy_beaten(psi: &QbfFormula, g: &GameGraph) -> bool {
    let k = psi.k();
    let table_bits: usize = (1..=k).map(|i| 1 << i).sum();
    assert!(table_bits < 64, "too many strategies to enumerate");
    (0u64..1 << table_bits).all(|strategy| {
        let respond = |i: usize, values: &[bool]| {
            let xs = values.iter().step_by(2).fold(0usize, |acc, &b| acc << 1 | usize::from(b));
            let offset = (1 << i) - 2;
            strategy >> (offset + xs) & 1 == 1
        };
        let (xs, ys) = falsifying_play(psi, respond).expect("formula is invalid");
        let t = counter_transducer(psi, &xs, &ys);
        let p = ProductGame::build(g, &t).expect("alphabets match");
        let path = p.replay(&assignment_word(k, &xs, &ys)).expect("machine agrees with its assignment");
        !p.p2_wins(*path.last().unwrap())
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfCheck {
    pub satisfying: Option<Vec<bool>>,
    /// `check_k_live` at `k`; `None` when the cap was hit.
    pub live: Option<bool>,
    /// For satisfiable formulas: the machine replaying the satisfying
    /// assignment reaches a position Player 2 loses.
    pub witness_ok: Option<bool>,
}

impl CnfCheck {
    pub fn agrees(&self) -> Option<bool> {
        self.live.map(|l| l == self.satisfying.is_none())
    }
}

pub fn cnf_check(phi: &CnfFormula, opts: &LiveOptions) -> Result<CnfCheck, LivenessError> {
    let satisfying = sat_brute_force(phi);
    let g = cnf_to_game(phi);
    let live = check_k_live(&g, phi.k(), opts)?.verdict.is_live();
    let witness_ok = match &satisfying {
        Some(a) => Some(losing_position(&g, &assignment_transducer(a))?.is_some()),
        None => None,
    };
    Ok(CnfCheck { satisfying, live, witness_ok })
}
