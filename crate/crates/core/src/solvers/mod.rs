//! Exact and heuristic maximizers of the bipartite polarization.
//!
//! - [`solve_exhaustive`] enumerates every assignment (small graphs only).
//! - [`solve_bnb`] is a depth-first branch-and-bound, exact on any graph.
//! - [`solve_ls`] is steepest-ascent hill climbing over single-node flips,
//!   with random restarts.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::model::Bipartition;

mod bnb;
mod exhaustive;
mod local_search;

pub use bnb::{solve_bnb, solve_bnb_with, upper_bound, BnbOptions};
pub use exhaustive::{solve_exhaustive, solve_exhaustive_capped, DEFAULT_EXHAUSTIVE_CAP};
pub use local_search::{solve_ls, solve_ls_with, LsOptions, DEFAULT_RESTARTS};

/// A flip counts as improving only if it gains more than this.
pub const IMPROVEMENT_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error(
        "exhaustive search over {m} nodes exceeds the cap of {cap}; use branch-and-bound instead"
    )]
    TooLarge { m: usize, cap: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    /// Assignments enumerated (exhaustive) or search-tree nodes expanded (B&B).
    pub search_nodes: u64,
    /// Improving flips applied, summed over restarts (local search).
    pub ls_steps: u64,
    pub restarts: u32,
    pub time_ms: f64,
    /// Set only by exact solvers that ran to completion.
    pub optimal: bool,
    pub timed_out: bool,
    /// Local search: whether the returned assignment admits no improving flip.
    /// False means the per-restart step cap was hit first.
    pub local_optimum: bool,
    /// B&B only, when requested: incumbent value after each improvement.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub incumbent_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub bipartition: Bipartition,
    pub bippol: f64,
    pub stats: SolveStats,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
