#![allow(dead_code)]

use polarize_core::model::{Interaction, UDebG, UserNode};
use polarize_core::{Bipartition, Side};
use rand::Rng;

/// Direct evaluation over explicit L/R sets, kept independent of the library.
pub fn oracle_bippol(g: &UDebG, sides: &[Side]) -> f64 {
    let n = g.node_count() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let left: Vec<usize> = (0..sides.len()).filter(|&v| sides[v] == Side::L).collect();
    let right: Vec<usize> = (0..sides.len()).filter(|&v| sides[v] == Side::R).collect();
    let lc: f64 = left.iter().map(|&v| g.s(v)).filter(|&s| s <= 0.0).map(|s| -s / n).sum();
    let rc: f64 = right.iter().map(|&v| g.s(v)).filter(|&s| s > 0.0).map(|s| s / n).sum();
    let sweight = if g.edge_count() == 0 {
        2.0
    } else {
        let crossing: f64 = g
            .edges()
            .iter()
            .filter(|e| {
                (left.contains(&e.src) && right.contains(&e.dst))
                    || (right.contains(&e.src) && left.contains(&e.dst))
            })
            .map(|e| -e.w / g.edge_count() as f64)
            .sum();
        crossing + 2.0
    };
    lc * rc * sweight
}

/// Best value over all 2^m assignments, enumerated by plain counting.
pub fn oracle_optimum(g: &UDebG) -> f64 {
    let m = g.node_count();
    (0u64..1 << m)
        .map(|mask| {
            let sides: Vec<Side> = (0..m)
                .map(|v| if mask >> v & 1 == 1 { Side::R } else { Side::L })
                .collect();
            oracle_bippol(g, &sides)
        })
        .fold(0.0, f64::max)
}

/// Random instance with arbitrary weights (not the generator's distribution).
pub fn random_graph<R: Rng>(rng: &mut R, m: usize, edge_prob: f64) -> UDebG {
    let nodes = (0..m)
        .map(|i| UserNode {
            id: format!("n{i}"),
            s: rng.random_range(-1.0..=1.0),
        })
        .collect();
    let mut edges = Vec::new();
    for src in 0..m {
        for dst in 0..m {
            if src != dst && rng.random_bool(edge_prob) {
                edges.push(Interaction {
                    src,
                    dst,
                    w: rng.random_range(-2.0..=2.0),
                });
            }
        }
    }
    UDebG::new(nodes, edges).unwrap()
}

pub fn random_bipartition<R: Rng>(rng: &mut R, m: usize) -> Bipartition {
    Bipartition::new(
        (0..m)
            .map(|_| if rng.random_bool(0.5) { Side::R } else { Side::L })
            .collect(),
    )
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
