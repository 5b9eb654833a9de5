//! Bipartite polarization of user debate graphs.
//!
//! The crate covers the whole pipeline: building a user debate graph from a
//! labelled comment tree ([`debate`]), evaluating the polarization of a
//! bipartition ([`model`]), maximizing it exactly or heuristically
//! ([`solvers`]), generating random instances with tunable polarization
//! ([`generator`]), the maxcut reduction used as a correctness harness
//! ([`reduction`]), and the experiment driver ([`bench`]).

pub mod bench;
pub mod debate;
pub mod generator;
pub mod model;
pub mod reduction;
pub mod seed;
pub mod solvers;

pub use model::{
    evaluate, load_instance, move_delta, save_instance, Bipartition, EvalCache,
    PolarizationBreakdown, Side, UDebG,
};
