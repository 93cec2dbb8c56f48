//! k-transducer liveness: can every finite play that some k-state
//! environment produces still be won by Player 2?
//!
//! The check enumerates every machine, builds its product with the game and
//! looks for a reachable position that Player 2 loses. Such a machine, the
//! position and a word leading there form a counterexample.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::game::{GameGraph, VertexId};
use crate::product::{Position, ProductError, ProductGame};
use crate::transducer::{count, is_canonical, Enumeration, EnumerationError, StateId, Transducer};

/// Default limit on the number of machines examined.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveOptions {
    /// Skip machines that are not the normal form of their behavior class.
    pub dedupe: bool,
    pub jobs: usize,
    /// Machines beyond this ordinal are not examined.
    pub cap: u64,
    /// Report the lowest-ordinal counterexample even with several workers.
    pub deterministic: bool,
}

impl Default for LiveOptions {
    fn default() -> Self {
        LiveOptions { dedupe: false, jobs: 1, cap: DEFAULT_CAP, deterministic: true }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LivenessError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// A machine together with a word it agrees with that leads to a
/// position Player 2 cannot win from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub machine: Transducer,
    pub ordinal: u64,
    /// Alternating word from the initial vertex, ending at `position`.
    pub alpha: Vec<usize>,
    pub position: (VertexId, StateId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Live,
    NotLive(Witness),
    /// No counterexample among the first `cap` machines out of `total`.
    Undecided { cap: u64, total: BigUint },
}

impl Verdict {
    pub fn is_live(&self) -> Option<bool> {
        match self {
            Verdict::Live => Some(true),
            Verdict::NotLive(_) => Some(false),
            Verdict::Undecided { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiveStats {
    /// Ordinals visited, including those skipped by deduplication.
    pub examined: u64,
    pub products: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LivenessReport {
    pub verdict: Verdict,
    pub stats: LiveStats,
}

/// First reachable losing position of `g × t`, with its access word.
pub fn losing_position(g: &GameGraph, t: &Transducer) -> Result<Option<(Vec<usize>, (VertexId, StateId))>, ProductError> {
    let product = ProductGame::build(g, t)?;
    Ok(product.first_losing_reachable().map(|id| {
        let alpha = product.access_word(id).expect("reachable");
        match product.position(id) {
            Position::Pair(v, m) => (alpha, (v, m)),
            _ => unreachable!("sink positions are winning for player 2"),
        }
    }))
}

const CHUNK: u64 = 256;

pub fn check_k_live(g: &GameGraph, k: usize, opts: &LiveOptions) -> Result<LivenessReport, LivenessError> {
    if k == 0 {
        return Err(LivenessError::ZeroK);
    }
    // Validate shapes once so workers can assume success.
    ProductGame::build(g, &Transducer::constant(g.alphabet1().len(), g.alphabet2().len(), 0))?;

    let started = Instant::now();
    let (sigma, gamma) = (g.alphabet1().len(), g.alphabet2().len());
    let total = count(k, sigma, gamma);
    let limit = u64::try_from(&total).map_or(opts.cap, |n| n.min(opts.cap));
    // `Enumeration` needs a 64-bit count; beyond that only the capped
    // prefix is decoded through a truncated enumeration.
    let enumeration = match Enumeration::new(k, sigma, gamma) {
        Ok(e) => Some(e),
        Err(EnumerationError::TooLarge(_)) => None,
        Err(e) => unreachable!("{e}"),
    };

    let best = AtomicU64::new(u64::MAX);
    let next_chunk = AtomicU64::new(0);
    let examined = AtomicU64::new(0);
    let products = AtomicU64::new(0);
    let found: std::sync::Mutex<Option<Witness>> = std::sync::Mutex::new(None);

    let worker = || {
        loop {
            let start = next_chunk.fetch_add(CHUNK, Ordering::Relaxed);
            if start >= limit {
                break;
            }
            let current = best.load(Ordering::Relaxed);
            if current != u64::MAX && (!opts.deterministic || start > current) {
                break;
            }
            let end = (start + CHUNK).min(limit);
            let machines: Box<dyn Iterator<Item = (u64, Transducer)>> = match &enumeration {
                Some(e) => Box::new(e.range(start..end)),
                None => Box::new((start..end).map(|o| (o, decode_big(k, sigma, gamma, o)))),
            };
            for (ord, t) in machines {
                if ord > best.load(Ordering::Relaxed) {
                    break;
                }
                examined.fetch_add(1, Ordering::Relaxed);
                if opts.dedupe && !is_canonical(&t) {
                    continue;
                }
                products.fetch_add(1, Ordering::Relaxed);
                if let Some((alpha, position)) = losing_position(g, &t).expect("shapes checked") {
                    let prev = best.fetch_min(ord, Ordering::Relaxed);
                    if ord < prev {
                        let mut slot = found.lock().unwrap();
                        if slot.as_ref().is_none_or(|w| w.ordinal > ord) {
                            *slot = Some(Witness { machine: t, ordinal: ord, alpha, position });
                        }
                    }
                    break;
                }
            }
        }
    };

    let jobs = opts.jobs.max(1);
    if jobs == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(worker);
            }
        });
    }

    let verdict = match found.into_inner().unwrap() {
        Some(w) => Verdict::NotLive(w),
        None if BigUint::from(limit) < total => Verdict::Undecided { cap: limit, total },
        None => Verdict::Live,
    };
    Ok(LivenessReport {
        verdict,
        stats: LiveStats {
            examined: examined.into_inner(),
            products: products.into_inner(),
            elapsed: started.elapsed(),
        },
    })
}

/// Decodes an ordinal of an enumeration too large for [`Enumeration`].
fn decode_big(k: usize, sigma: usize, gamma: usize, ordinal: u64) -> Transducer {
    let digits = k + k * gamma;
    let mut d = vec![0usize; digits];
    let mut rest = ordinal;
    for p in (0..digits).rev() {
        let r = if p < k { sigma as u64 } else { k as u64 };
        d[p] = (rest % r) as usize;
        rest /= r;
    }
    let trans = d.split_off(k);
    Transducer::new(sigma, gamma, 0, d, trans).expect("digits in range")
}

/// Independently re-checks a counterexample: `alpha` agrees with the
/// machine, replaying it in the product ends at the reported position, and
/// Player 2 loses there.
pub fn verify_witness(g: &GameGraph, k: usize, w: &Witness) -> bool {
    if w.machine.states() > k {
        return false;
    }
    if !matches!(w.machine.agrees(&w.alpha), Ok(a) if a.holds()) {
        return false;
    }
    let Ok(product) = ProductGame::build(g, &w.machine) else {
        return false;
    };
    let Ok(path) = product.replay(&w.alpha) else {
        return false;
    };
    let end = *path.last().unwrap();
    if product.id_of(Position::Pair(w.position.0, w.position.1)) != Some(end) {
        return false;
    }
    !product.p2_wins(end)
}

/// A k-state machine (initial state 0) agreeing with `word`, the first one
/// in enumeration order, or `None` if there is none.
pub fn word_in_ak(word: &[usize], k: usize, sigma: usize, gamma: usize) -> Option<Transducer> {
    words_in_ak(&[word], k, sigma, gamma)
}

/// Like [`word_in_ak`] for a set of words that must all agree with the
/// same machine.
pub fn words_in_ak(words: &[&[usize]], k: usize, sigma: usize, gamma: usize) -> Option<Transducer> {
    if k == 0 || sigma == 0 || gamma == 0 {
        return None;
    }
    let trie = InputTrie::build(words, sigma, gamma)?;
    let mut search = Search::new(&trie, k, sigma, gamma);
    let digits = k + k * gamma;
    // Fix digits most significant first, each to the least feasible value.
    if !search.feasible() {
        return None;
    }
    for p in 0..digits {
        let radix = if p < k { sigma } else { k };
        let mut fixed = false;
        for v in 0..radix {
            let saved = search.digits[p];
            if saved.is_some_and(|s| s != v) {
                continue;
            }
            search.digits[p] = Some(v);
            if search.feasible() {
                fixed = true;
                break;
            }
            search.digits[p] = saved;
        }
        debug_assert!(fixed);
    }
    let d: Vec<usize> = search.digits.iter().map(|d| d.unwrap()).collect();
    let (labels, trans) = d.split_at(k);
    Some(Transducer::new(sigma, gamma, 0, labels.to_vec(), trans.to_vec()).unwrap())
}

/// Prefix tree of the Player-2 input sequences, each node carrying the
/// Player-1 symbol that must be emitted after that input prefix.
struct InputTrie {
    required: Vec<Option<usize>>,
    /// `(parent, input, child)` in breadth-first order.
    edges: Vec<(usize, usize, usize)>,
}

impl InputTrie {
    /// `None` if two words demand different outputs after the same inputs.
    fn build(words: &[&[usize]], sigma: usize, gamma: usize) -> Option<InputTrie> {
        let mut required = vec![None];
        let mut children: Vec<Vec<Option<usize>>> = vec![vec![None; gamma]];
        for word in words {
            let mut node = 0;
            for (i, &s) in word.iter().enumerate() {
                if i % 2 == 0 {
                    if s >= sigma {
                        return None;
                    }
                    match required[node] {
                        Some(r) if r != s => return None,
                        _ => required[node] = Some(s),
                    }
                } else {
                    if s >= gamma {
                        return None;
                    }
                    node = match children[node][s] {
                        Some(c) => c,
                        None => {
                            let c = required.len();
                            required.push(None);
                            children.push(vec![None; gamma]);
                            children[node][s] = Some(c);
                            c
                        }
                    };
                }
            }
        }
        let mut edges = Vec::new();
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(n) = queue.pop_front() {
            for (b, c) in children[n].iter().enumerate() {
                if let Some(c) = *c {
                    edges.push((n, b, c));
                    queue.push_back(c);
                }
            }
        }
        Some(InputTrie { required, edges })
    }
}

/// Backtracking search for a state assignment of the trie nodes
/// consistent with partially fixed machine digits.
struct Search<'t> {
    trie: &'t InputTrie,
    k: usize,
    gamma: usize,
    digits: Vec<Option<usize>>,
}

impl<'t> Search<'t> {
    fn new(trie: &'t InputTrie, k: usize, _sigma: usize, gamma: usize) -> Self {
        Search { trie, k, gamma, digits: vec![None; k + k * gamma] }
    }

    fn feasible(&self) -> bool {
        let mut digits = self.digits.clone();
        let mut state = vec![usize::MAX; self.trie.required.len()];
        state[0] = 0;
        if !Self::label_ok(&mut digits, 0, self.trie.required[0]).0 {
            return false;
        }
        self.extend(0, &mut state, &mut digits)
    }

    /// Checks (and possibly fixes) the label of state `m`. Returns whether
    /// it is consistent and whether it was newly fixed.
    fn label_ok(digits: &mut [Option<usize>], m: usize, req: Option<usize>) -> (bool, bool) {
        match (digits[m], req) {
            (_, None) => (true, false),
            (Some(l), Some(r)) => (l == r, false),
            (None, Some(r)) => {
                digits[m] = Some(r);
                (true, true)
            }
        }
    }

    fn extend(&self, edge: usize, state: &mut [usize], digits: &mut [Option<usize>]) -> bool {
        let Some(&(parent, b, child)) = self.trie.edges.get(edge) else {
            return true;
        };
        let slot = self.k + state[parent] * self.gamma + b;
        let candidates: Vec<usize> = match digits[slot] {
            Some(m) => vec![m],
            None => (0..self.k).collect(),
        };
        let was_free = digits[slot].is_none();
        for m in candidates {
            digits[slot] = Some(m);
            let (ok, fixed) = Self::label_ok(digits, m, self.trie.required[child]);
            if ok {
                state[child] = m;
                if self.extend(edge + 1, state, digits) {
                    return true;
                }
            }
            if fixed {
                digits[m] = None;
            }
        }
        if was_free {
            digits[slot] = None;
        }
        false
    }
}
