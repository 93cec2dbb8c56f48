//! The reachability game of a CNF formula, live against `k`-state Player 1
//! exactly when the formula is unsatisfiable.
//!
//! Player 1 assigns `x_1 .. x_k` once per clause with the actions `T<i>` /
//! `F<i>`; Player 2 only has the dummy move `eps`. Each clause stage
//! carries a satisfied-so-far bit. A clause finished unsatisfied leads to
//! Player 2's paradise, a satisfied last clause to Player 1's.

use std::collections::HashMap;

use crate::game::{complete, ensure_paradise, Action, GameGraph, Objective, Player, VertexId};
use crate::transducer::Transducer;

use super::formula::CnfFormula;

/// Player-1 symbol assigning `value` to `x_i` (1-based).
pub fn assign_symbol(i: usize, value: bool) -> usize {
    2 * (i - 1) + usize::from(!value)
}

fn bit(b: bool) -> &'static str {
    if b {
        "T"
    } else {
        "F"
    }
}

/// Names: Player-2 vertex `x<i>_<j>_<bit>` is reached by assigning `x_i`
/// in clause `j`; the Player-1 vertex after it is `y<i>_<j>_<bit>`. The
/// first clause starts at `iota`, clause `j+1` at `y<k>_<j>_T`.
pub fn cnf_to_game(phi: &CnfFormula) -> GameGraph {
    let k = phi.k();
    let r = phi.clauses().len();
    let mut sigma = Vec::new();
    for i in 1..=k {
        sigma.push(format!("T{i}"));
        sigma.push(format!("F{i}"));
    }
    let mut g = GameGraph::new(Objective::Reachability, sigma, vec!["eps".to_string()]).expect("valid alphabets");
    let green = ensure_paradise(&mut g, Player::Two);
    let orange = ensure_paradise(&mut g, Player::One);
    let iota = g.add_vertex("iota", Player::One, 1).unwrap();
    g.set_initial(iota);

    // Player-1 vertices keyed by (i, j, bit): x_1..x_i of clause j assigned.
    let mut p1: HashMap<(usize, usize, bool), VertexId> = HashMap::new();
    p1.insert((0, 1, false), iota);
    let mut work = vec![(0usize, 1usize, false)];
    while let Some((i, j, sat)) = work.pop() {
        let v = p1[&(i, j, sat)];
        if i == k {
            let target = match (sat, j == r) {
                (false, _) => green.entry2,
                (true, true) => orange.entry2,
                (true, false) => {
                    // This vertex starts the next clause.
                    p1.insert((0, j + 1, false), v);
                    work.push((0, j + 1, false));
                    continue;
                }
            };
            for s in 0..2 * k {
                g.set_edge(v, Action::p1(s), target);
            }
            continue;
        }
        for value in [true, false] {
            let now = sat || phi.clauses()[j - 1].iter().any(|l| l.var == i + 1 && l.holds_with(value));
            let name = format!("x{}_{j}_{}", i + 1, bit(now));
            let x = match g.vertex_id(&name) {
                Some(x) => x,
                None => g.add_vertex(name, Player::Two, 1).unwrap(),
            };
            g.set_edge(v, Action::p1(assign_symbol(i + 1, value)), x);
            let key = (i + 1, j, now);
            if !p1.contains_key(&key) {
                let y = g.add_vertex(format!("y{}_{j}_{}", i + 1, bit(now)), Player::One, 1).unwrap();
                p1.insert(key, y);
                work.push(key);
            }
            g.set_edge(x, Action::p2(0), p1[&key]);
        }
    }
    complete(&g)
}

/// The `k`-state machine that assigns `assignment` forever: state `i`
/// emits the value of `x_{i+1}` and moves to `i+1 mod k`.
pub fn assignment_transducer(assignment: &[bool]) -> Transducer {
    let k = assignment.len();
    let labels = (0..k).map(|i| assign_symbol(i + 1, assignment[i])).collect();
    let trans = (0..k).map(|i| (i + 1) % k).collect();
    Transducer::new(2 * k, 1, 0, labels, trans).expect("well-formed machine")
}
