//! Mixed-integer planning models for reconfigurable production cells.
//!
//! The crate carries its own solver stack: a bounded-variable dense simplex
//! ([`lp`]) under a deterministic branch-and-bound with SOS1/SOS2 branching
//! ([`mip`]). On top sit five formulations (knapsack machine-time selection,
//! MTZ transport tours, time-indexed RCPSP, disjunctive job-shop and plant
//! location with SOS2-linearized build costs), brute-force [`oracles`] to
//! cross-check them, and SVG [`render`]ing of the resulting plans.

pub mod batch;
pub mod error;
pub mod facility;
pub mod generate;
pub mod knapsack;
pub mod lp;
pub mod mip;
pub mod oracles;
pub mod render;
pub mod scheduling;
pub mod tsp;

pub use error::{Error, Result};
pub use lp::{solve_lp, LpOutcome, LpProblem, LpStatus, Relation, Sense};
pub use mip::{solve_mip, Model, SolveParams, SolveStatus, Solution, SosKind, VarKind};
