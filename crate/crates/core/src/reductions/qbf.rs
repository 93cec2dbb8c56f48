//! The reachability game of a QBF `∀x_1 ∃y_1 … ∀x_k ∃y_k: C_1 ∧ … ∧ C_r`.
//!
//! Player 1 (universal) first demonstrates the exit action `e`, then both
//! players build an assignment, and then the assignment is replayed once
//! per clause while a satisfied-so-far bit is carried along. A
//! `(k+1)`-state Player 1 is forced to replay its own values and can punish
//! any change of Player 2's values by exiting to its paradise.

use crate::game::{complete, ensure_paradise, Action, GameGraph, Objective, Player, VertexId};
use crate::transducer::Transducer;

use super::formula::{falsifying_choice, QVar, QbfFormula};

/// Player-1 symbol of `x_i := value` (1-based `i`).
pub fn x_symbol(i: usize, value: bool) -> usize {
    2 * (i - 1) + usize::from(!value)
}

/// Player-2 symbol of `y_i := value`.
pub fn y_symbol(i: usize, value: bool) -> usize {
    2 * (i - 1) + usize::from(!value)
}

/// The exit action.
pub fn exit_symbol(k: usize) -> usize {
    2 * k
}

/// Name of the phase-3 vertex at position `p` (1-based, odd positions
/// belong to Player 1) of the stage for clause `j`.
pub fn stage_vertex_name(p: usize, j: usize, satisfied: bool) -> String {
    format!("v{p}_{j}_{}", if satisfied { "T" } else { "F" })
}

pub fn qbf_to_game(psi: &QbfFormula) -> GameGraph {
    let k = psi.k();
    let r = psi.clauses().len();
    let mut sigma = Vec::new();
    let mut gamma = Vec::new();
    for i in 1..=k {
        sigma.push(format!("x{i}"));
        sigma.push(format!("!x{i}"));
        gamma.push(format!("y{i}"));
        gamma.push(format!("!y{i}"));
    }
    sigma.push("e".to_string());
    let mut g = GameGraph::new(Objective::Reachability, sigma, gamma).expect("valid alphabets");
    let p1_par = ensure_paradise(&mut g, Player::One);
    let p2_par = ensure_paradise(&mut g, Player::Two);
    let e = exit_symbol(k);

    let iota = g.add_vertex("iota", Player::One, 1).unwrap();
    let n = g.add_vertex("n", Player::Two, 1).unwrap();
    g.set_initial(iota);
    g.set_edge(iota, Action::p1(e), n);
    let a: Vec<VertexId> = (1..=2 * k)
        .map(|p| {
            let owner = if p % 2 == 1 { Player::One } else { Player::Two };
            g.add_vertex(format!("a{p}"), owner, 1).unwrap()
        })
        .collect();
    for s in 0..2 * k {
        g.set_edge(n, Action::p2(s), a[0]);
    }
    for i in 1..=k {
        let (x, y) = (a[2 * i - 2], a[2 * i - 1]);
        for value in [true, false] {
            g.set_edge(x, Action::p1(x_symbol(i, value)), y);
        }
        g.set_edge(x, Action::p1(e), p2_par.entry2);
        if i < k {
            for value in [true, false] {
                g.set_edge(y, Action::p2(y_symbol(i, value)), a[2 * i]);
            }
        }
    }

    // Phase 3, created on demand: (position, clause, satisfied) -> vertex.
    let mut stage: std::collections::HashMap<(usize, usize, bool), VertexId> = Default::default();
    let mut get = |g: &mut GameGraph, p: usize, j: usize, sat: bool| -> (VertexId, bool) {
        if let Some(&v) = stage.get(&(p, j, sat)) {
            return (v, false);
        }
        let owner = if p % 2 == 1 { Player::One } else { Player::Two };
        let v = g.add_vertex(stage_vertex_name(p, j, sat), owner, 1).unwrap();
        stage.insert((p, j, sat), v);
        (v, true)
    };
    let fin = g.add_vertex("fin", Player::One, 1).unwrap();
    for value in [true, false] {
        g.set_edge(fin, Action::p1(x_symbol(1, value)), p2_par.entry2);
    }
    g.set_edge(fin, Action::p1(e), p1_par.entry2);

    let (start, _) = get(&mut g, 1, 1, false);
    for value in [true, false] {
        g.set_edge(a[2 * k - 1], Action::p2(y_symbol(k, value)), start);
    }
    let mut work = vec![(1usize, 1usize, false, start)];
    while let Some((p, j, sat, v)) = work.pop() {
        let i = p.div_ceil(2);
        let player1 = p % 2 == 1;
        if player1 && !(p == 1 && j == 1) {
            g.set_edge(v, Action::p1(e), p1_par.entry2);
        }
        for value in [true, false] {
            let lit_sat = psi.clauses()[j - 1].iter().any(|l| {
                let var = if player1 { QVar::X(i) } else { QVar::Y(i) };
                l.var == var && l.holds_with(value)
            });
            let now = sat || lit_sat;
            let action = if player1 { Action::p1(x_symbol(i, value)) } else { Action::p2(y_symbol(i, value)) };
            if p < 2 * k {
                let (to, fresh) = get(&mut g, p + 1, j, now);
                g.set_edge(v, action, to);
                if fresh {
                    work.push((p + 1, j, now, to));
                }
            } else if now {
                if j < r {
                    let (to, fresh) = get(&mut g, 1, j + 1, false);
                    g.set_edge(v, action, to);
                    if fresh {
                        work.push((1, j + 1, false, to));
                    }
                } else {
                    g.set_edge(v, action, fin);
                }
            }
            // An unsatisfied clause at its end has no edge: completion
            // sends it to Player 1's paradise.
        }
    }
    complete(&g)
}

/// The `(k+1)`-state counter-strategy: state 0 emits `e` and moves to
/// state 1 on every input; state `i` emits `x_i := xs[i-1]`, continues to
/// state `i+1` (cyclically back to 1) on `y_i := ys[i-1]` and to state 0 on
/// any other input.
pub fn counter_transducer(psi: &QbfFormula, xs: &[bool], ys: &[bool]) -> Transducer {
    let k = psi.k();
    assert!(xs.len() == k && ys.len() == k);
    let gamma = 2 * k;
    let mut labels = vec![exit_symbol(k)];
    let mut trans = vec![1; gamma];
    for i in 1..=k {
        labels.push(x_symbol(i, xs[i - 1]));
        for b in 0..gamma {
            trans.push(if b == y_symbol(i, ys[i - 1]) { i % k + 1 } else { 0 });
        }
    }
    Transducer::new(2 * k + 1, gamma, 0, labels, trans).expect("well-formed machine")
}

/// The phase-1 and phase-2 word `e, y, x_1, y_1, …, x_k, y_k` for the
/// given values; Player 2's move at `n` is its first symbol.
pub fn assignment_word(k: usize, xs: &[bool], ys: &[bool]) -> Vec<usize> {
    let mut w = vec![exit_symbol(k), 0];
    for i in 1..=k {
        w.push(x_symbol(i, xs[i - 1]));
        w.push(y_symbol(i, ys[i - 1]));
    }
    w
}

/// Plays the phase-2 assignment where Player 1 follows
/// [`falsifying_choice`] and Player 2 answers with
/// `respond(i, values so far)`. Returns `(xs, ys)`, or `None` if the
/// formula is valid (no falsifying choice exists at some point).
pub fn falsifying_play(
    psi: &QbfFormula,
    mut respond: impl FnMut(usize, &[bool]) -> bool,
) -> Option<(Vec<bool>, Vec<bool>)> {
    let mut values = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 1..=psi.k() {
        let x = falsifying_choice(psi, &values)?;
        values.push(x);
        xs.push(x);
        let y = respond(i, &values);
        values.push(y);
        ys.push(y);
    }
    Some((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{parse_game, serialize_game, validate};

    fn fig2() -> QbfFormula {
        QbfFormula::parse_clauses(2, &["!x1 y1 !x2", "!y1 x2", "x1 !y1 y2"]).unwrap()
    }

    fn edge(g: &GameGraph, from: &str, player: Player, sym: &str) -> String {
        let v = g.vertex_id(from).unwrap();
        let s = g.symbol_index(player, sym).unwrap();
        g.name(g.edge(v, Action { player, symbol: s }).unwrap()).to_string()
    }

    #[test]
    fn figure_edges() {
        let g = qbf_to_game(&fig2());
        assert!(validate(&g).is_empty());
        assert_eq!(edge(&g, "v1_1_F", Player::One, "x1"), "v2_1_F");
        assert_eq!(edge(&g, "v1_1_F", Player::One, "!x1"), "v2_1_T");
        assert_eq!(edge(&g, "v1_1_F", Player::One, "e"), "~par2_v");
        assert_eq!(edge(&g, "v2_1_F", Player::Two, "y1"), "v3_1_T");
        assert_eq!(edge(&g, "v2_1_F", Player::Two, "!y1"), "v3_1_F");
        assert_eq!(edge(&g, "v3_1_F", Player::One, "e"), "~par1_v");
        assert_eq!(edge(&g, "v2_2_F", Player::Two, "!y1"), "v3_2_T");
        assert_eq!(edge(&g, "v4_3_F", Player::Two, "y2"), "fin");
        assert_eq!(edge(&g, "v4_3_F", Player::Two, "!y2"), "~par1_u");
        assert_eq!(edge(&g, "a1", Player::One, "e"), "~par2_v");
        assert_eq!(edge(&g, "a2", Player::Two, "!y1"), "a3");
        assert_eq!(edge(&g, "a3", Player::One, "!x2"), "a4");
        assert_eq!(edge(&g, "a2", Player::Two, "y2"), "~par1_u");
        assert_eq!(edge(&g, "a4", Player::Two, "!y2"), "v1_1_F");
        assert_eq!(edge(&g, "fin", Player::One, "x1"), "~par2_v");
        assert_eq!(edge(&g, "fin", Player::One, "e"), "~par1_v");
    }

    #[test]
    fn serialization_round_trips() {
        let g = qbf_to_game(&fig2());
        assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
    }

    #[test]
    fn counter_transducer_shape() {
        let psi = QbfFormula::parse_clauses(1, &["x1", "!x1"]).unwrap();
        let t = counter_transducer(&psi, &[true], &[false]);
        assert_eq!(t.states(), 2);
        assert_eq!(t.label(0), exit_symbol(1));
        assert_eq!(t.next(1, y_symbol(1, false)), 1);
        assert_eq!(t.next(1, y_symbol(1, true)), 0);
    }
}
