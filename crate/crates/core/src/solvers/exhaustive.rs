use std::time::Instant;

use super::{elapsed_ms, SolveError, SolveResult, SolveStats};
use crate::model::{evaluate, Bipartition, EvalCache, Side, UDebG};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// Tolerance under which two enumerated values count as tied.
const TIE_EPS: f64 = 1e-12;

pub fn solve_exhaustive(g: &UDebG) -> Result<SolveResult, SolveError> {
    solve_exhaustive_capped(g, DEFAULT_EXHAUSTIVE_CAP)
}

/// Enumerate all `2^m` assignments in Gray-code order, one flip at a time.
///
/// Ties go to the lexicographically smallest assignment, reading nodes in
/// index order with `L < R`.
pub fn solve_exhaustive_capped(g: &UDebG, cap: usize) -> Result<SolveResult, SolveError> {
    let m = g.node_count();
    if m > cap || m >= 64 {
        return Err(SolveError::TooLarge { m, cap });
    }
    let start = Instant::now();

    // Bit i of a mask is node i in R; reversing the bits orders masks
    // lexicographically by node 0 first.
    let lex_key = |mask: u64| if m == 0 { 0 } else { mask.reverse_bits() >> (64 - m) };

    let mut p = Bipartition::uniform(m, Side::L);
    let mut cache = EvalCache::new(g, &p).expect("sized to graph");
    let mut mask = 0u64;
    let mut best_mask = 0u64;
    let mut best = cache.bippol(g);

    let total = 1u64 << m;
    for i in 1..total {
        let v = i.trailing_zeros() as usize;
        cache.apply_flip(g, &mut p, v);
        mask ^= 1 << v;
        let value = cache.bippol(g);
        if value > best + TIE_EPS
            || (value >= best - TIE_EPS && lex_key(mask) < lex_key(best_mask))
        {
            best = value.max(best);
            best_mask = mask;
        }
    }

    let bipartition = Bipartition::from_mask(best_mask, m);
    let bippol = evaluate(g, &bipartition).expect("sized to graph").bippol;
    Ok(SolveResult {
        bipartition,
        bippol,
        stats: SolveStats {
            search_nodes: total,
            time_ms: elapsed_ms(start),
            optimal: true,
            ..SolveStats::default()
        },
    })
}
