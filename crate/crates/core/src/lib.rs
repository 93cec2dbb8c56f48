//! Games against environments restricted to small finite-state transducers.

pub mod game;
pub mod transducer;
pub mod product;
pub mod liveness;
pub mod synthesis;
pub mod reductions;
pub mod corpus;
