//! Solvers over a plain labeled arena: Zielonka's recursive algorithm for
//! two-player parity games and a polynomial solver for arenas in which
//! every Player-1 vertex has a single successor.

use std::collections::VecDeque;

use thiserror::Error;

use super::{Action, GameGraph, LassoWord, Objective, Player, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("vertex `{0}` has no edge for some action; run `complete` first")]
    NotTotal(String),
    #[error("player-1 vertex `{0}` must have exactly one successor")]
    NotOnePlayer(String),
    #[error("vertex `{0}` has no successor")]
    DeadEnd(String),
    #[error("the arena is empty")]
    Empty,
}

/// A game arena stripped to what the solvers need. Edges carry an opaque
/// label, usually a symbol index. Every vertex must have a successor; the
/// two-player alternation is not required.
#[derive(Clone, Debug, Default)]
pub struct Arena {
    owner: Vec<Player>,
    color: Vec<u32>,
    succ: Vec<Vec<(usize, VertexId)>>,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Arena {
            owner: Vec::with_capacity(n),
            color: Vec::with_capacity(n),
            succ: Vec::with_capacity(n),
        }
    }

    pub fn add_vertex(&mut self, owner: Player, color: u32) -> VertexId {
        self.owner.push(owner);
        self.color.push(color);
        self.succ.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_edge(&mut self, src: VertexId, label: usize, dst: VertexId) {
        self.succ[src].push((label, dst));
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn owner(&self, v: VertexId) -> Player {
        self.owner[v]
    }

    pub fn color(&self, v: VertexId) -> u32 {
        self.color[v]
    }

    pub fn succ(&self, v: VertexId) -> &[(usize, VertexId)] {
        &self.succ[v]
    }

    /// Predecessor lists as `(source, edge index at source)`.
    pub fn predecessors(&self) -> Vec<Vec<(VertexId, usize)>> {
        let mut preds = vec![Vec::new(); self.len()];
        for (v, edges) in self.succ.iter().enumerate() {
            for (i, &(_, w)) in edges.iter().enumerate() {
                preds[w].push((v, i));
            }
        }
        preds
    }

    /// The arena of a total game graph; vertex ids and symbol labels carry over.
    pub fn from_game(g: &GameGraph) -> Result<Arena, SolveError> {
        if g.is_empty() {
            return Err(SolveError::Empty);
        }
        let mut arena = Arena::with_capacity(g.len());
        for v in g.vertices() {
            arena.add_vertex(v.owner, v.color);
        }
        for v in 0..g.len() {
            let owner = g.owner(v);
            for symbol in 0..g.alphabet(owner).len() {
                let dst = g
                    .edge(v, Action { player: owner, symbol })
                    .ok_or_else(|| SolveError::NotTotal(g.name(v).to_string()))?;
                arena.add_edge(v, symbol, dst);
            }
        }
        Ok(arena)
    }

    /// Rewrites a reachability arena into an equivalent parity arena:
    /// color-2 vertices become absorbing and everything else gets color 1.
    pub fn reachability_as_parity(&self) -> Arena {
        let mut out = self.clone();
        for v in 0..out.len() {
            if out.color[v] == 2 {
                out.succ[v] = vec![(0, v)];
            } else {
                out.color[v] = 1;
            }
        }
        out
    }

    fn check_no_dead_ends(&self) -> Result<(), usize> {
        match self.succ.iter().position(|s| s.is_empty()) {
            Some(v) => Err(v),
            None => Ok(()),
        }
    }
}

/// Winner per vertex together with a positional strategy: `strategy[v]` is
/// an index into `arena.succ(v)` chosen by the owner of `v`. The strategy is
/// winning for the owner on the owner's region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySolution {
    pub winner: Vec<Player>,
    pub strategy: Vec<usize>,
}

impl ParitySolution {
    pub fn region(&self, player: Player) -> Vec<VertexId> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }
}

struct Zielonka<'a> {
    arena: &'a Arena,
    preds: Vec<Vec<(VertexId, usize)>>,
    /// A vertex belongs to the subgame at depth `d` iff `level[v] >= d`.
    level: Vec<u32>,
    in_attr: Vec<bool>,
    count: Vec<u32>,
    touched: Vec<VertexId>,
    winner: Vec<Player>,
    strategy: Vec<usize>,
}

const UNSET: u32 = u32::MAX;

impl<'a> Zielonka<'a> {
    fn new(arena: &'a Arena) -> Self {
        let n = arena.len();
        Zielonka {
            arena,
            preds: arena.predecessors(),
            level: vec![1; n],
            in_attr: vec![false; n],
            count: vec![UNSET; n],
            touched: Vec::new(),
            winner: vec![Player::One; n],
            strategy: vec![0; n],
        }
    }

    /// Attractor of `seeds` for `player` inside the depth-`d` subgame. Marks
    /// members in `in_attr` and records attracting edges for `player`.
    fn attract(&mut self, player: Player, d: u32, seeds: &[VertexId]) -> Vec<VertexId> {
        let mut members = Vec::with_capacity(seeds.len());
        let mut queue = VecDeque::new();
        for &s in seeds {
            if !self.in_attr[s] {
                self.in_attr[s] = true;
                members.push(s);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for i in 0..self.preds[v].len() {
                let (u, edge) = self.preds[v][i];
                if self.level[u] < d || self.in_attr[u] {
                    continue;
                }
                let attracted = if self.arena.owner(u) == player {
                    self.strategy[u] = edge;
                    true
                } else {
                    if self.count[u] == UNSET {
                        let level = &self.level;
                        self.count[u] = self.arena.succ(u).iter().filter(|&&(_, w)| level[w] >= d).count() as u32;
                        self.touched.push(u);
                    }
                    self.count[u] -= 1;
                    self.count[u] == 0
                };
                if attracted {
                    self.in_attr[u] = true;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        for u in self.touched.drain(..) {
            self.count[u] = UNSET;
        }
        members
    }

    fn clear_attr(&mut self, set: &[VertexId]) {
        for &v in set {
            self.in_attr[v] = false;
        }
    }

    /// Any edge of `v` staying inside the depth-`d` subgame.
    fn stay_inside(&self, v: VertexId, d: u32) -> usize {
        self.arena
            .succ(v)
            .iter()
            .position(|&(_, w)| self.level[w] >= d)
            .expect("subgame is a trap for both players")
    }

    fn solve(&mut self, d: u32, mut members: Vec<VertexId>) {
        while !members.is_empty() {
            let top = members.iter().map(|&v| self.arena.color(v)).max().unwrap();
            let p = Player::of_color(top);
            let o = p.opponent();
            let seeds: Vec<VertexId> =
                members.iter().copied().filter(|&v| self.arena.color(v) == top).collect();
            let attr = self.attract(p, d, &seeds);
            let rest: Vec<VertexId> = members.iter().copied().filter(|&v| !self.in_attr[v]).collect();
            self.clear_attr(&attr);
            for &v in &rest {
                self.level[v] = d + 1;
            }
            self.solve(d + 1, rest.clone());
            for &v in &rest {
                self.level[v] = d;
            }
            let lost: Vec<VertexId> = rest.iter().copied().filter(|&v| self.winner[v] == o).collect();
            if lost.is_empty() {
                for &v in &members {
                    self.winner[v] = p;
                }
                for &v in &seeds {
                    if self.arena.owner(v) == p {
                        self.strategy[v] = self.stay_inside(v, d);
                    }
                }
                return;
            }
            let won_by_o = self.attract(o, d, &lost);
            self.clear_attr(&won_by_o);
            for &v in &won_by_o {
                self.winner[v] = o;
                self.level[v] = d - 1;
            }
            members.retain(|&v| self.level[v] >= d);
        }
    }
}

/// Solves a parity game on an arena without dead ends.
pub fn solve_parity_arena(arena: &Arena) -> ParitySolution {
    assert!(arena.check_no_dead_ends().is_ok(), "arena has a dead end");
    let mut z = Zielonka::new(arena);
    z.solve(1, (0..arena.len()).collect());
    ParitySolution { winner: z.winner, strategy: z.strategy }
}

/// Solution of a game graph: winner per vertex and a positional strategy
/// given as the owner's symbol index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSolution {
    pub winner: Vec<Player>,
    pub strategy: Vec<usize>,
}

impl GameSolution {
    pub fn region(&self, player: Player) -> Vec<VertexId> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }
}

/// Solves a total game graph under its own objective.
pub fn solve_parity(g: &GameGraph) -> Result<GameSolution, SolveError> {
    let arena = Arena::from_game(g)?;
    let arena = match g.objective() {
        Objective::Reachability => arena.reachability_as_parity(),
        Objective::Buchi | Objective::Parity => arena,
    };
    let sol = solve_parity_arena(&arena);
    let strategy = (0..g.len())
        .map(|v| arena.succ(v)[sol.strategy[v]].0)
        .collect();
    Ok(GameSolution { winner: sol.winner, strategy })
}

/// A lasso through an arena: each step is a vertex and the index of the
/// edge taken there. The last cycle edge returns to the first cycle vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArenaLasso {
    pub stem: Vec<(VertexId, usize)>,
    pub cycle: Vec<(VertexId, usize)>,
}

impl ArenaLasso {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> VertexId {
        self.stem.first().or(self.cycle.first()).map(|s| s.0).unwrap()
    }

    /// Edge labels along the stem and along the cycle.
    pub fn labels(&self, arena: &Arena) -> (Vec<usize>, Vec<usize>) {
        let lab = |steps: &[(VertexId, usize)]| steps.iter().map(|&(v, e)| arena.succ(v)[e].0).collect();
        (lab(&self.stem), lab(&self.cycle))
    }

    /// Checks that consecutive steps follow edges and that the cycle closes.
    pub fn is_well_formed(&self, arena: &Arena) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let steps: Vec<_> = self.stem.iter().chain(self.cycle.iter()).collect();
        for w in steps.windows(2) {
            let (v, e) = *w[0];
            if arena.succ(v).get(e).map(|s| s.1) != Some(w[1].0) {
                return false;
            }
        }
        let (last, e) = *self.cycle.last().unwrap();
        arena.succ(last).get(e).map(|s| s.1) == Some(self.cycle[0].0)
    }

    /// Winner of the play, read off the colors of the stem and the cycle.
    pub fn winner(&self, arena: &Arena, objective: Objective) -> Player {
        let cycle: Vec<u32> = self.cycle.iter().map(|&(v, _)| arena.color(v)).collect();
        super::winner_by_colors(objective, self.stem.iter().map(|&(v, _)| arena.color(v)), &cycle)
    }
}

/// Solution of an arena in which Player 1 has no choices.
#[derive(Clone, Debug)]
pub struct OnePlayerSolution {
    objective: Objective,
    winning: Vec<bool>,
    /// Vertices a witness may head for: color-2 vertices for reachability,
    /// otherwise even-colored vertices lying on a cycle that never exceeds
    /// their own color.
    goal: Vec<bool>,
}

impl OnePlayerSolution {
    pub fn solve(arena: &Arena, objective: Objective) -> Result<OnePlayerSolution, SolveError> {
        if let Err(v) = arena.check_no_dead_ends() {
            return Err(SolveError::DeadEnd(v.to_string()));
        }
        if let Some(v) = (0..arena.len()).find(|&v| arena.owner(v) == Player::One && arena.succ(v).len() != 1) {
            return Err(SolveError::NotOnePlayer(v.to_string()));
        }
        Ok(Self::solve_unchecked(arena, objective))
    }

    pub(crate) fn solve_unchecked(arena: &Arena, objective: Objective) -> OnePlayerSolution {
        let n = arena.len();
        let mut goal = vec![false; n];
        match objective {
            Objective::Reachability => {
                for v in 0..n {
                    goal[v] = arena.color(v) == 2;
                }
            }
            Objective::Buchi | Objective::Parity => {
                let mut evens: Vec<u32> = (0..n).map(|v| arena.color(v)).filter(|c| c % 2 == 0).collect();
                evens.sort_unstable();
                evens.dedup();
                for &c in &evens {
                    for scc in strongly_connected(arena, &|v| arena.color(v) <= c) {
                        let nontrivial = scc.len() > 1 || {
                            let v = scc[0];
                            arena.succ(v).iter().any(|&(_, w)| w == v)
                        };
                        if nontrivial {
                            for &v in &scc {
                                if arena.color(v) == c {
                                    goal[v] = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut winning = goal.clone();
        let preds = arena.predecessors();
        let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| goal[v]).collect();
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &preds[v] {
                if !winning[u] {
                    winning[u] = true;
                    queue.push_back(u);
                }
            }
        }
        OnePlayerSolution { objective, winning, goal }
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn p2_wins(&self, v: VertexId) -> bool {
        self.winning[v]
    }

    pub fn winning_region(&self) -> Vec<VertexId> {
        (0..self.winning.len()).filter(|&v| self.winning[v]).collect()
    }

    /// A winning lasso from `v`, or `None` if Player 2 loses there. The stem
    /// is a shortest path to the nearest goal vertex and the lasso visits
    /// every vertex at most once.
    pub fn witness(&self, arena: &Arena, v: VertexId) -> Option<ArenaLasso> {
        if !self.winning[v] {
            return None;
        }
        let (mut steps, target) = bfs_path(arena, v, |u| self.goal[u], |_| true)?;
        match self.objective {
            Objective::Reachability => {
                // Past the target any continuation wins; take first edges.
                let mut cur = target;
                let mut seen: Vec<VertexId> = steps.iter().map(|s| s.0).collect();
                loop {
                    if let Some(pos) = seen.iter().position(|&x| x == cur) {
                        let cycle = steps.split_off(pos);
                        return Some(ArenaLasso { stem: steps, cycle });
                    }
                    seen.push(cur);
                    steps.push((cur, 0));
                    cur = arena.succ(cur)[0].1;
                }
            }
            Objective::Buchi | Objective::Parity => {
                let c = arena.color(target);
                let cycle = shortest_cycle(arena, target, |u| arena.color(u) <= c)?;
                // Cut the stem at its first vertex on the cycle.
                let on_cycle = |u: VertexId| cycle.iter().position(|s| s.0 == u);
                match steps.iter().position(|s| on_cycle(s.0).is_some()) {
                    Some(cut) => {
                        let head = on_cycle(steps[cut].0).unwrap();
                        steps.truncate(cut);
                        let mut rotated = cycle[head..].to_vec();
                        rotated.extend_from_slice(&cycle[..head]);
                        Some(ArenaLasso { stem: steps, cycle: rotated })
                    }
                    None => Some(ArenaLasso { stem: steps, cycle }),
                }
            }
        }
    }
}

/// Shortest path (as steps) from `start` to the first vertex satisfying
/// `is_target`, moving only through vertices accepted by `allowed`.
/// Ties are broken by edge order. Returns the steps and the target.
fn bfs_path(
    arena: &Arena,
    start: VertexId,
    is_target: impl Fn(VertexId) -> bool,
    allowed: impl Fn(VertexId) -> bool,
) -> Option<(Vec<(VertexId, usize)>, VertexId)> {
    let n = arena.len();
    let mut parent: Vec<Option<(VertexId, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        if is_target(v) {
            let mut steps = Vec::new();
            let mut cur = v;
            while let Some((p, e)) = parent[cur] {
                steps.push((p, e));
                cur = p;
            }
            steps.reverse();
            return Some((steps, v));
        }
        for (i, &(_, w)) in arena.succ(v).iter().enumerate() {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                parent[w] = Some((v, i));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Shortest cycle through `head` using only vertices accepted by `inside`.
fn shortest_cycle(
    arena: &Arena,
    head: VertexId,
    inside: impl Fn(VertexId) -> bool,
) -> Option<Vec<(VertexId, usize)>> {
    if let Some(i) = arena.succ(head).iter().position(|&(_, w)| w == head) {
        return Some(vec![(head, i)]);
    }
    let n = arena.len();
    let mut parent: Vec<Option<(VertexId, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for (i, &(_, w)) in arena.succ(head).iter().enumerate() {
        if inside(w) && !seen[w] {
            seen[w] = true;
            parent[w] = Some((head, i));
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        for (i, &(_, w)) in arena.succ(v).iter().enumerate() {
            if w == head {
                let mut steps = vec![(v, i)];
                let mut cur = v;
                while let Some((p, e)) = parent[cur] {
                    steps.push((p, e));
                    cur = p;
                    if cur == head {
                        break;
                    }
                }
                steps.reverse();
                return Some(steps);
            }
            if inside(w) && !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, i));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Strongly connected components of the subgraph induced by `inside`,
/// by an iterative version of Tarjan's algorithm.
fn strongly_connected(arena: &Arena, inside: &impl Fn(VertexId) -> bool) -> Vec<Vec<VertexId>> {
    let n = arena.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    let mut call: Vec<(VertexId, usize)> = Vec::new();
    for root in 0..n {
        if !inside(root) || index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let succ = arena.succ(v);
            if *i < succ.len() {
                let w = succ[*i].1;
                *i += 1;
                if !inside(w) {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(scc);
                }
            }
        }
    }
    out
}

/// Solves a total game graph in which every Player-1 vertex has exactly one
/// outgoing edge, i.e. all Player-1 symbols lead to the same vertex.
pub fn solve_one_player(g: &GameGraph) -> Result<OnePlayerSolution, SolveError> {
    let arena = one_player_arena(g)?;
    Ok(OnePlayerSolution::solve_unchecked(&arena, g.objective()))
}

/// The arena used by [`solve_one_player`]: Player-1 vertices keep a single
/// edge labeled with their first symbol.
pub fn one_player_arena(g: &GameGraph) -> Result<Arena, SolveError> {
    let full = Arena::from_game(g)?;
    let mut arena = Arena::with_capacity(g.len());
    for v in 0..g.len() {
        arena.add_vertex(g.owner(v), g.color(v));
    }
    for v in 0..g.len() {
        let succ = full.succ(v);
        if g.owner(v) == Player::One {
            if succ.iter().any(|&(_, w)| w != succ[0].1) {
                return Err(SolveError::NotOnePlayer(g.name(v).to_string()));
            }
            arena.add_edge(v, succ[0].0, succ[0].1);
        } else {
            for &(l, w) in succ {
                arena.add_edge(v, l, w);
            }
        }
    }
    Ok(arena)
}

impl OnePlayerSolution {
    /// The witness from `v` as a word over the game's symbols. Player-1
    /// vertices contribute their (unique) first symbol.
    pub fn witness_word(&self, g: &GameGraph, v: VertexId) -> Option<LassoWord> {
        let arena = one_player_arena(g).ok()?;
        let lasso = self.witness(&arena, v)?;
        let (stem, mut cycle) = lasso.labels(&arena);
        if cycle.len() % 2 == 1 {
            let again = cycle.clone();
            cycle.extend(again);
        }
        Some(LassoWord::new(stem, cycle))
    }
}
