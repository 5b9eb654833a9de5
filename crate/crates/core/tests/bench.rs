mod common;

use common::fixture;
use polarize_core::bench::{
    emit_csv, records_to_csv, render_svg, run_matrix, summarize, ExperimentRecord, Grid, RunOptions, SolverKind,
    Spread, CSV_HEADER,
};
use polarize_core::generator::{generate, GenConfig};
use polarize_core::solvers::{solve_bnb, solve_ls};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn record(alpha: f64, m: usize, rep: usize, seed: u64, solver: SolverKind) -> ExperimentRecord {
    ExperimentRecord {
        alpha,
        m,
        rep,
        seed,
        solver,
        bippol: 0.0,
        ls_ratio: None,
        time_ms: 0.0,
        search_nodes: 0,
        timeout: false,
    }
}

fn golden_records() -> Vec<ExperimentRecord> {
    vec![
        ExperimentRecord {
            bippol: 0.000312,
            time_ms: 1234.5678,
            search_nodes: 98765,
            ..record(0.05, 25, 0, 17, SolverKind::Bnb)
        },
        ExperimentRecord {
            bippol: 0.0003115,
            ls_ratio: Some(0.9983974358974359),
            time_ms: 0.25,
            search_nodes: 14,
            ..record(0.05, 25, 0, 17, SolverKind::Ls)
        },
        ExperimentRecord {
            bippol: 0.6631,
            time_ms: 60000.0,
            search_nodes: 1 << 32,
            timeout: true,
            ..record(1.0, 40, 3, 9001, SolverKind::Bnb)
        },
        ExperimentRecord {
            bippol: 0.6631,
            ls_ratio: Some(1.0),
            ..record(1.0, 40, 3, 9001, SolverKind::Ls)
        },
    ]
}

#[test]
fn golden_csv_is_byte_identical() {
    let want = std::fs::read_to_string(fixture("bench_golden.csv")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&golden_records(), &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), want);
}

#[test]
fn empty_csv_has_only_header() {
    assert_eq!(records_to_csv(&[]), format!("{CSV_HEADER}\n"));
}

#[test]
fn unwritable_csv_path_is_an_error() {
    assert!(emit_csv(&golden_records(), "/nonexistent/dir/out.csv").is_err());
}

#[test]
fn summary_matches_resort_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let values: Vec<f64> = (0..50).map(|_| rng.random_range(0.0001..0.7)).collect();
    let records: Vec<ExperimentRecord> = values
        .iter()
        .enumerate()
        .map(|(rep, &bippol)| ExperimentRecord {
            bippol,
            ..record(0.4, 25, rep, rep as u64, SolverKind::Bnb)
        })
        .collect();
    let summary = summarize(&records);
    assert_eq!(summary.len(), 1);

    // Oracle: insertion sort, then pick positions directly.
    let mut sorted: Vec<f64> = Vec::new();
    for &v in &values {
        let at = sorted.iter().position(|&x| x > v).unwrap_or(sorted.len());
        sorted.insert(at, v);
    }
    let want = Spread {
        min: sorted[0],
        median: sorted[24],
        max: sorted[49],
    };
    assert_eq!(summary[0].bippol, want);
    assert_eq!(summary[0].count, 50);
}

#[test]
fn medians_use_lower_middle() {
    assert_eq!(Spread::of(&[3.0, 1.0, 2.0]).unwrap().median, 2.0);
    assert_eq!(Spread::of(&[4.0, 1.0, 3.0, 2.0]).unwrap().median, 2.0);
    assert!(Spread::of(&[]).is_none());
}

#[test]
fn single_cell_svg_has_one_point_per_series() {
    let recs = golden_records();
    let summary = summarize(&recs[..2]);
    assert_eq!(summary.len(), 2);
    let svg = render_svg(&summary);
    assert!(svg.starts_with("<svg"));
    for series in ["bnb m=25", "ls m=25"] {
        let points = svg
            .matches(&format!(r#"<circle class="point" data-series="{series}""#))
            .count();
        // One point in each of the two panels.
        assert_eq!(points, 2, "series {series}");
    }
}

#[test]
fn rows_reproduce_from_their_seed() {
    let grid = Grid {
        alphas: vec![0.1, 0.7],
        sizes: vec![12, 18],
        replicates: 3,
        seed: 77,
    };
    let opts = RunOptions {
        record_time: false,
        ..RunOptions::default()
    };
    let records = run_matrix(&grid, &[SolverKind::Bnb, SolverKind::Ls], &opts).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3 * 2);
    for r in &records {
        let g = generate(&GenConfig::new(r.m, r.alpha, r.seed).unwrap()).unwrap();
        let again = match r.solver {
            SolverKind::Bnb => solve_bnb(&g).bippol,
            _ => solve_ls(&g, r.seed).bippol,
        };
        assert_eq!(again, r.bippol);
        assert_eq!(r.time_ms, 0.0);
    }
}
