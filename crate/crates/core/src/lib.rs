//! Biquandle counting invariants, biquandle brackets and colored trace
//! diagrams.

pub mod algebra;
pub mod biquandle;
pub mod bracket;
pub mod cli;
pub mod coloring;
pub mod diagram;
pub mod parallel;
pub mod search;
pub mod trace;
pub mod text;
