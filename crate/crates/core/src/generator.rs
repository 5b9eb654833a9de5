//! Random user debate graphs whose expected polarization is steered by `α`.
//!
//! Side weights come from an equal-weight mixture of `TN(-α, 0, -α, σ)` and
//! `TN(0, α, α, σ)` with `σ = 1 / (1 + 20α)`. Every node then picks
//! `k ∈ [1, ⌈log10 m⌉]` distinct targets, and each edge sentiment is drawn from
//! `TN(-2, 2, μ, 2 / (3 + 10|μ|))`, where `μ` is non-positive across sides and
//! usually positive within a side (it turns negative when the target's
//! opinion is more than three times stronger than the source's).
//!
//! `TN(a, b, μ, σ)` is the normal distribution with parent parameters `μ, σ`
//! conditioned on `[a, b]`.
//!
//! Draw order (frozen): node `i` uses the stream `seed::stream([TAG_SIDE_WEIGHT,
//! seed, i])` for one mixture coin and one truncated-normal draw, and
//! `seed::stream([TAG_EDGES, seed, i])` for `k`, then the target set (sampled
//! by index, then sorted ascending), then one sentiment per target in
//! ascending target order.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::model::{Interaction, UDebG, UserNode};
use crate::seed;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("node count must be at least 2, got {0}")]
    TooFewNodes(usize),
    #[error("alpha must lie in (0, 1], got {0}")]
    AlphaOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub m: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(m: usize, alpha: f64, seed: u64) -> Result<Self, GenError> {
        let cfg = Self { m, alpha, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.m < 2 {
            return Err(GenError::TooFewNodes(self.m));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(GenError::AlphaOutOfRange(self.alpha));
        }
        Ok(())
    }
}

/// Below this acceptance probability, rejection sampling is skipped.
const MIN_ACCEPTANCE: f64 = 0.05;
const MAX_REJECTIONS: usize = 256;

/// One draw from `N(mu, sigma²)` conditioned on `[a, b]`.
///
/// Uses rejection from the parent normal when the interval holds enough mass,
/// and inverse-CDF sampling otherwise (or after too many rejections).
pub fn sample_truncnorm<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64, mu: f64, sigma: f64) -> f64 {
    debug_assert!(a < b && sigma > 0.0);
    let lo = (a - mu) / sigma;
    let hi = (b - mu) / sigma;
    let std = Normal::new(0.0, 1.0).expect("standard normal");

    // Work in the lower tail, where the CDF keeps its relative precision.
    let mirrored = lo > 0.0;
    let (lo, hi) = if mirrored { (-hi, -lo) } else { (lo, hi) };
    let (p_lo, p_hi) = (std.cdf(lo), std.cdf(hi));
    let mass = p_hi - p_lo;

    let z = 'draw: {
        if mass >= MIN_ACCEPTANCE {
            for _ in 0..MAX_REJECTIONS {
                let z: f64 = rng.sample(StandardNormal);
                if (lo..=hi).contains(&z) {
                    break 'draw z;
                }
            }
        }
        if mass > 0.0 {
            let u: f64 = rng.random();
            std.inverse_cdf(p_lo + u * mass).clamp(lo, hi)
        } else {
            // Interval lies beyond f64 resolution of the CDF; all mass sits at the near end.
            hi
        }
    };
    let z = if mirrored { -z } else { z };
    (mu + sigma * z).clamp(a, b)
}

/// Standard deviation of both side-weight mixture components.
pub fn side_sigma(alpha: f64) -> f64 {
    1.0 / (1.0 + 20.0 * alpha)
}

/// Parent mean of the sentiment of an edge from a user with side weight
/// `si` to one with side weight `sj`.
pub fn edge_mean(si: f64, sj: f64) -> f64 {
    let same_side = (si > 0.0) == (sj > 0.0);
    if same_side {
        2.0 * si.abs() - (si - sj).abs()
    } else {
        -si.abs() * (si - sj).abs()
    }
}

pub fn edge_sigma(mu: f64) -> f64 {
    2.0 / (3.0 + 10.0 * mu.abs())
}

/// `⌈log10 m⌉`, at least 1.
pub fn max_out_degree(m: usize) -> usize {
    let mut d = 0;
    let mut p: usize = 1;
    while p < m {
        p = p.saturating_mul(10);
        d += 1;
    }
    d.max(1)
}

pub fn sample_side_weight<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    let sigma = side_sigma(alpha);
    if rng.random_bool(0.5) {
        sample_truncnorm(rng, -alpha, 0.0, -alpha, sigma)
    } else {
        sample_truncnorm(rng, 0.0, alpha, alpha, sigma)
    }
}

pub fn generate(cfg: &GenConfig) -> Result<UDebG, GenError> {
    cfg.validate()?;
    let m = cfg.m;

    let nodes: Vec<UserNode> = (0..m)
        .map(|i| {
            let mut rng = seed::stream(&[seed::TAG_SIDE_WEIGHT, cfg.seed, i as u64]);
            UserNode {
                id: format!("u{i}"),
                s: sample_side_weight(&mut rng, cfg.alpha),
            }
        })
        .collect();

    let k_max = max_out_degree(m).min(m - 1);
    let mut edges = Vec::new();
    for i in 0..m {
        let mut rng = seed::stream(&[seed::TAG_EDGES, cfg.seed, i as u64]);
        let k = rng.random_range(1..=k_max);
        let mut targets: Vec<usize> = index::sample(&mut rng, m - 1, k)
            .into_iter()
            .map(|j| if j >= i { j + 1 } else { j })
            .collect();
        targets.sort_unstable();
        let si = nodes[i].s;
        for j in targets {
            let mu = edge_mean(si, nodes[j].s);
            let w = sample_truncnorm(&mut rng, -2.0, 2.0, mu, edge_sigma(mu));
            edges.push(Interaction { src: i, dst: j, w });
        }
    }

    let g = UDebG::new(nodes, edges).expect("generated instance satisfies graph invariants");
    Ok(g.with_meta(serde_json::json!({
        "generator": { "m": cfg.m, "alpha": cfg.alpha, "seed": cfg.seed }
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameter_examples() {
        assert!((side_sigma(1.0) - 1.0 / 21.0).abs() < 1e-15);
        assert_eq!(edge_mean(1.0, 1.0), 2.0);
        assert_eq!(edge_mean(1.0, -1.0), -2.0);
        assert!((edge_sigma(0.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((edge_sigma(2.0) - 2.0 / 23.0).abs() < 1e-15);
        assert_eq!(max_out_degree(1000), 3);
        assert_eq!(max_out_degree(40), 2);
        assert_eq!(max_out_degree(25), 2);
        assert_eq!(max_out_degree(10), 1);
        assert_eq!(max_out_degree(11), 2);
        assert_eq!(max_out_degree(2), 1);
        assert_eq!(max_out_degree(1), 1);
    }

    #[test]
    fn zero_side_weight_is_left_side() {
        assert_eq!(edge_mean(0.0, -0.5), -0.5);
        assert_eq!(edge_mean(-0.5, 0.0), 0.5);
        assert_eq!(edge_mean(0.0, 0.5), 0.0);
        assert_eq!(edge_mean(0.5, 0.0), -0.25);
    }

    #[test]
    fn mean_sign_follows_sides() {
        // Across sides both directions are non-positive. On the same side the
        // mean is non-negative unless the target's opinion is more than three
        // times stronger than the source's.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let si: f64 = rng.random_range(-1.0..=1.0);
            let sj: f64 = rng.random_range(-1.0..=1.0);
            let (a, b) = (edge_mean(si, sj), edge_mean(sj, si));
            if (si > 0.0) != (sj > 0.0) {
                assert!(a <= 0.0 && b <= 0.0, "si={si} sj={sj}");
            } else {
                assert_eq!(a >= 0.0, sj.abs() <= 3.0 * si.abs(), "si={si} sj={sj}");
                if sj.abs() <= 3.0 * si.abs() && si.abs() <= 3.0 * sj.abs() {
                    assert!(a >= 0.0 && b >= 0.0);
                }
            }
        }
    }

    #[test]
    fn degenerate_sigma_concentrates_at_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| sample_truncnorm(&mut rng, -1.0, 1.0, 0.0, 1e-6))
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.01);
    }

    #[test]
    fn far_tail_interval_uses_fallback_and_stays_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(a, b, mu, sigma) in &[
            (0.0, 0.05, -2.0, 0.1),
            (1.9, 2.0, -2.0, 2.0 / 23.0),
            (-2.0, -1.99, 2.0, 0.05),
            (5.0, 6.0, 0.0, 1e-3),
        ] {
            for _ in 0..1000 {
                let x = sample_truncnorm(&mut rng, a, b, mu, sigma);
                assert!((a..=b).contains(&x), "{x} outside [{a}, {b}]");
            }
        }
    }

    #[test]
    fn config_errors() {
        assert_eq!(GenConfig::new(1, 0.5, 0), Err(GenError::TooFewNodes(1)));
        assert_eq!(GenConfig::new(5, 0.0, 0), Err(GenError::AlphaOutOfRange(0.0)));
        assert_eq!(GenConfig::new(5, 1.5, 0), Err(GenError::AlphaOutOfRange(1.5)));
        assert!(GenConfig::new(5, f64::NAN, 0).is_err());
        assert!(GenConfig::new(2, 1.0, 0).is_ok());
    }

    #[test]
    fn generated_instances_respect_supports_and_degrees() {
        for (m, alpha) in [(2, 1.0), (9, 0.3), (25, 0.05), (120, 0.7)] {
            let g = generate(&GenConfig::new(m, alpha, 42).unwrap()).unwrap();
            assert_eq!(g.node_count(), m);
            assert!(g.nodes().iter().all(|n| n.s.abs() <= alpha));
            let mut out = vec![0usize; m];
            for e in g.edges() {
                assert!(e.w.abs() <= 2.0);
                out[e.src] += 1;
            }
            let k_max = max_out_degree(m);
            assert!(out.iter().all(|&k| (1..=k_max).contains(&k)));
        }
    }

    #[test]
    fn same_config_same_instance() {
        let cfg = GenConfig::new(30, 0.4, 9).unwrap();
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = GenConfig::new(30, 0.4, 10).unwrap();
        assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
    }
}
