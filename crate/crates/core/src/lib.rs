//! Root-count bounds for log-power function systems and invertibility checks
//! for their alternant matrices.

pub mod alternant;
pub mod cli;
pub mod compatibility;
pub mod harness;
pub mod rootcount;
pub mod symexpr;
pub mod systems;
