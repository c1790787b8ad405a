pub mod arith;
pub mod cli;
pub mod constructions;
pub mod curves;
pub mod presentation;
pub mod reductions;
pub mod schedules;
