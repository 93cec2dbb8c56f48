//! Seeded random total games for sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{Action, GameGraph, Objective, Player};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub sigma: usize,
    pub gamma: usize,
    /// Chance that a vertex gets a Player-2-favorable color.
    pub good_color: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams { min_vertices: 4, max_vertices: 12, sigma: 2, gamma: 2, good_color: 0.4 }
    }
}

/// A random total alternating game. Vertices `p0, p1, ..` belong to
/// Player 1 (`p0` is initial), `q0, q1, ..` to Player 2. The objective
/// cycles through reachability, Büchi and parity with `index % 3`.
pub fn random_game(rng: &mut impl Rng, params: &CorpusParams, index: usize) -> GameGraph {
    let objective = [Objective::Reachability, Objective::Buchi, Objective::Parity][index % 3];
    let n = rng.gen_range(params.min_vertices.max(2)..=params.max_vertices.max(2));
    let n1 = n.div_ceil(2);
    let n2 = n - n1;
    let sigma: Vec<String> = (0..params.sigma).map(|i| format!("a{i}")).collect();
    let gamma: Vec<String> = (0..params.gamma).map(|i| format!("b{i}")).collect();
    let mut g = GameGraph::new(objective, sigma, gamma).expect("valid alphabets");
    let color = |rng: &mut dyn rand::RngCore| -> u32 {
        let good = u32::from(rng.gen_bool(params.good_color));
        match objective {
            Objective::Reachability | Objective::Buchi => 1 + good,
            Objective::Parity => [1u32, 3].choose(rng).unwrap() + good,
        }
    };
    let p1: Vec<_> = (0..n1)
        .map(|i| {
            let c = if i == 0 && objective == Objective::Reachability { 1 } else { color(rng) };
            g.add_vertex(format!("p{i}"), Player::One, c).unwrap()
        })
        .collect();
    let p2: Vec<_> = (0..n2).map(|i| g.add_vertex(format!("q{i}"), Player::Two, color(rng)).unwrap()).collect();
    g.set_initial(p1[0]);
    for &v in &p1 {
        for s in 0..params.sigma {
            g.set_edge(v, Action::p1(s), *p2.choose(rng).unwrap());
        }
    }
    for &v in &p2 {
        for s in 0..params.gamma {
            g.set_edge(v, Action::p2(s), *p1.choose(rng).unwrap());
        }
    }
    g
}

/// `count` games from one seed; game `i` depends only on `(seed, i)`.
pub fn random_corpus(seed: u64, count: usize, params: &CorpusParams) -> Vec<GameGraph> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            random_game(&mut rng, params, i)
        })
        .collect()
}
