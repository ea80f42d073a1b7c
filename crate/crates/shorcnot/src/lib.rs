//! Command-line front end, JSON reports and a text circuit format for
//! `shorcnot-core`.

pub mod cli;
pub mod qasm;
pub mod registry;
pub mod report;
