use std::time::Instant;

use rand::Rng;

use super::{elapsed_ms, SolveResult, SolveStats, IMPROVEMENT_EPS};
use crate::model::{evaluate, move_delta, Bipartition, EvalCache, Side, UDebG};
use crate::seed;

pub const DEFAULT_RESTARTS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsOptions {
    pub seed: u64,
    pub restarts: u32,
    /// Flips allowed per restart; `None` means the node count.
    pub max_steps: Option<usize>,
}

impl LsOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            restarts: DEFAULT_RESTARTS,
            max_steps: None,
        }
    }
}

pub fn solve_ls(g: &UDebG, seed: u64) -> SolveResult {
    solve_ls_with(g, &LsOptions::new(seed))
}

/// Best flip from `p`: `(node, delta)` with the largest delta, lowest index on ties.
fn best_flip(g: &UDebG, p: &Bipartition, cache: &EvalCache) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for v in 0..g.node_count() {
        let d = move_delta(g, p, cache, v);
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((v, d));
        }
    }
    best
}

/// Steepest-ascent hill climbing with random restarts.
///
/// Restart `r` starts from a uniform random assignment drawn from
/// `seed::stream([TAG_RESTART, seed, r])` and applies the best improving
/// single-node flip until none improves or the step cap is reached.
pub fn solve_ls_with(g: &UDebG, opts: &LsOptions) -> SolveResult {
    let start = Instant::now();
    let m = g.node_count();
    let max_steps = opts.max_steps.unwrap_or(m);

    let mut best: Option<(Bipartition, f64, bool)> = None;
    let mut steps = 0u64;
    for r in 0..opts.restarts.max(1) {
        let mut rng = seed::stream(&[seed::TAG_RESTART, opts.seed, u64::from(r)]);
        let mut p = Bipartition::new(
            (0..m)
                .map(|_| if rng.random_bool(0.5) { Side::R } else { Side::L })
                .collect(),
        );
        let mut cache = EvalCache::new(g, &p).expect("sized to graph");

        let mut local_optimum = false;
        for _ in 0..max_steps {
            match best_flip(g, &p, &cache) {
                Some((v, d)) if d > IMPROVEMENT_EPS => {
                    cache.apply_flip(g, &mut p, v);
                    steps += 1;
                }
                _ => {
                    local_optimum = true;
                    break;
                }
            }
        }
        if !local_optimum {
            local_optimum = best_flip(g, &p, &cache).is_none_or(|(_, d)| d <= IMPROVEMENT_EPS);
        }

        let value = cache.bippol(g);
        if best.as_ref().is_none_or(|(_, b, _)| value > *b) {
            best = Some((p, value, local_optimum));
        }
    }

    let (bipartition, _, local_optimum) = best.expect("at least one restart");
    let bippol = evaluate(g, &bipartition).expect("sized to graph").bippol;
    SolveResult {
        bipartition,
        bippol,
        stats: SolveStats {
            ls_steps: steps,
            restarts: opts.restarts.max(1),
            time_ms: elapsed_ms(start),
            local_optimum,
            ..SolveStats::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Interaction, UserNode};

    #[test]
    fn two_node_example_reaches_optimum() {
        let g = UDebG::new(
            vec![
                UserNode { id: "A".into(), s: -1.0 },
                UserNode { id: "B".into(), s: 1.0 },
            ],
            vec![Interaction { src: 0, dst: 1, w: -2.0 }],
        )
        .unwrap();
        for seed in 0..20 {
            let r = solve_ls(&g, seed);
            assert!((r.bippol - 1.0).abs() < 1e-12);
            assert!(r.stats.local_optimum);
        }
    }

    #[test]
    fn flat_objective_returns_zero() {
        let g = UDebG::new(
            (0..6).map(|i| UserNode { id: format!("{i}"), s: 0.0 }).collect(),
            vec![Interaction { src: 0, dst: 1, w: -2.0 }],
        )
        .unwrap();
        let r = solve_ls(&g, 1);
        assert_eq!(r.bippol, 0.0);
        assert_eq!(r.stats.ls_steps, 0);
        assert_eq!(r.stats.restarts, DEFAULT_RESTARTS);
    }

    #[test]
    fn seed_determines_result() {
        let g = crate::generator::generate(&crate::generator::GenConfig::new(30, 0.1, 4).unwrap())
            .unwrap();
        assert_eq!(solve_ls(&g, 8).bipartition, solve_ls(&g, 8).bipartition);
    }
}
