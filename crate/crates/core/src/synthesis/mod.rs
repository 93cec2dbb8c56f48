//! Synthesis against bounded environments: the belief-set solver, the
//! adaptive probing controller and a simulation harness.

mod belief;
mod controller;
mod simulate;

pub use belief::{solve_bounded, BeliefGame, BeliefId, BeliefTracker, Bounded, BoundedOptions, DEFAULT_POSITION_CAP};
pub use controller::{Controller, ControllerOptions, Fingerprint, HypothesisRecord, Phase};
pub use simulate::{simulate, steps_bound, Responder, Trace, TraceStep};

use num_bigint::BigUint;
use thiserror::Error;

use crate::game::GameGraph;
use crate::product::ProductError;
use crate::transducer::{count, is_canonical, Enumeration, Transducer};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("the game must be total")]
    NotTotal,
    #[error("k must be positive")]
    ZeroK,
    #[error("the initial vertex must belong to player 1")]
    InitialOwner,
    #[error("{total} machines exceed the cap of {cap}")]
    Cap { cap: u64, total: BigUint },
    #[error("environment alphabets do not match the game")]
    AlphabetMismatch,
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// All k-state machines for `g`'s alphabets in enumeration order, keeping
/// only behavioral representatives when `dedupe` is set.
pub(crate) fn hypotheses(g: &GameGraph, k: usize, dedupe: bool, cap: u64) -> Result<Vec<(u64, Transducer)>, SynthesisError> {
    let e = enumeration(g, k, cap)?;
    Ok(e.iter().filter(|(_, t)| !dedupe || is_canonical(t)).collect())
}

pub(crate) fn enumeration(g: &GameGraph, k: usize, cap: u64) -> Result<Enumeration, SynthesisError> {
    if k == 0 {
        return Err(SynthesisError::ZeroK);
    }
    let (sigma, gamma) = (g.alphabet1().len(), g.alphabet2().len());
    let total = count(k, sigma, gamma);
    if total > BigUint::from(cap) {
        return Err(SynthesisError::Cap { cap, total });
    }
    Ok(Enumeration::new(k, sigma, gamma).expect("count is within the cap"))
}
