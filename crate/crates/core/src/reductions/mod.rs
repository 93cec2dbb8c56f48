//! Game families built from formulas and a small robotics scenario.

mod checks;
mod cnf;
mod formula;
mod qbf;
mod robot;

pub use checks::{cnf_check, qbf_check, CnfCheck, QbfCheck};
pub use cnf::{assign_symbol, assignment_transducer, cnf_to_game};
pub use formula::{
    falsifying_choice, parse_dimacs, parse_qdimacs, qbf_brute_force, sat_brute_force, serialize_dimacs,
    serialize_qdimacs, CnfFormula, FormulaError, Literal, QLiteral, QVar, QbfFormula,
};
pub use qbf::{
    assignment_word, counter_transducer, exit_symbol, falsifying_play, qbf_to_game, stage_vertex_name, x_symbol,
    y_symbol,
};
pub use robot::{robot_scenario, walk, Cell, RobotError};
