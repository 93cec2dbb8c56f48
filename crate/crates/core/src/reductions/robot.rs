//! A charging-station scenario: a robot (Player 2) must charge infinitely
//! often while a human (Player 1) walks around trying to be in the way.
//!
//! Cells: robot start `R`, lane entries `L<i>`, stations `S<i>`, human-side
//! lane cells `E<i>` and human start `H`, connected as
//! `R - L<i> - S<i> - E<i> - H`. Action `r<i>` / `h<i>` means "towards lane
//! `i`": from a start cell it enters the lane, on lane `i` it moves one cell
//! towards the station (staying there once arrived), on another lane it
//! backs off one cell towards its own start.
//!
//! A robot move onto the human's station is blocked. A human move onto the
//! robot's station pushes the robot back to its lane entry. A charge is
//! completed when the robot stays on a station for a second consecutive
//! turn; the Player-1 vertex reached by that move has color 2.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::game::{complete, Action, GameGraph, Objective, Player, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RobotError {
    #[error("need at least 2 lanes, got {0}")]
    TooFewLanes(usize),
}

/// Only stations are shared; `Start` and `Lane` are on the walker's own side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Start,
    Lane(usize),
    Station(usize),
}

/// Robot cell, human cell, and whether the robot ended its last turn on a
/// station (so that staying completes a charge).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct State {
    robot: Cell,
    human: Cell,
    armed: bool,
}

struct Named<'a>(Cell, &'a str, &'a str);

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Cell::Start => write!(f, "{}", self.1),
            Cell::Lane(i) => write!(f, "{}{}", self.2, i + 1),
            Cell::Station(i) => write!(f, "S{}", i + 1),
        }
    }
}

fn vertex_name(owner: Player, s: State, charged: bool) -> String {
    let turn = if owner == Player::One { "h" } else { "r" };
    let mut name = format!("{turn}.{}.{}", Named(s.robot, "R", "L"), Named(s.human, "H", "E"));
    if s.armed {
        name.push_str(".a");
    }
    if charged {
        name.push_str(".c");
    }
    name
}

/// Where a walker in `cell` ends up after choosing lane `i`.
pub fn walk(cell: Cell, i: usize) -> Cell {
    match cell {
        Cell::Start => Cell::Lane(i),
        Cell::Lane(j) if j == i => Cell::Station(i),
        Cell::Lane(_) => Cell::Start,
        Cell::Station(j) if j == i => Cell::Station(j),
        Cell::Station(j) => Cell::Lane(j),
    }
}

pub fn robot_scenario(lanes: usize) -> Result<GameGraph, RobotError> {
    if lanes < 2 {
        return Err(RobotError::TooFewLanes(lanes));
    }
    let sigma = (1..=lanes).map(|i| format!("h{i}")).collect();
    let gamma = (1..=lanes).map(|i| format!("r{i}")).collect();
    let mut g = GameGraph::new(Objective::Buchi, sigma, gamma).expect("valid alphabets");

    let mut ids: HashMap<(Player, State, bool), VertexId> = HashMap::new();
    let mut work = Vec::new();
    let mut get = |g: &mut GameGraph, work: &mut Vec<_>, owner: Player, s: State, charged: bool| {
        *ids.entry((owner, s, charged)).or_insert_with(|| {
            let color = if charged { 2 } else { 1 };
            let v = g.add_vertex(vertex_name(owner, s, charged), owner, color).unwrap();
            work.push((owner, s, v));
            v
        })
    };
    let init = State { robot: Cell::Start, human: Cell::Start, armed: false };
    let iota = get(&mut g, &mut work, Player::One, init, false);
    g.set_initial(iota);

    while let Some((owner, s, v)) = work.pop() {
        for i in 0..lanes {
            let (next, charged) = match owner {
                Player::One => {
                    let human = walk(s.human, i);
                    if human == s.robot && matches!(human, Cell::Station(_)) && human != s.human {
                        let Cell::Station(j) = human else { unreachable!("cells only meet at stations") };
                        (State { robot: Cell::Lane(j), human, armed: false }, false)
                    } else {
                        (State { human, ..s }, false)
                    }
                }
                Player::Two => {
                    let target = walk(s.robot, i);
                    let blocked = target == s.human && matches!(target, Cell::Station(_)) && target != s.robot;
                    let robot = if blocked { s.robot } else { target };
                    let on_station = matches!(robot, Cell::Station(_));
                    let stayed = on_station && robot == s.robot;
                    (State { robot, armed: on_station, ..s }, stayed && s.armed)
                }
            };
            let w = get(&mut g, &mut work, owner.opponent(), next, charged);
            g.set_edge(v, Action { player: owner, symbol: i }, w);
        }
    }
    Ok(complete(&g))
}
