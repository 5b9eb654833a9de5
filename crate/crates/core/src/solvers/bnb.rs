//! Depth-first branch-and-bound.
//!
//! Nodes are assigned in order of decreasing `|s|`, each first to the side
//! where it counts towards `SC`. For a partial assignment the bound takes
//! every unassigned node on its natural side for `LC` and `RC` at once, and
//! every edge with an unassigned endpoint as cut when that would help:
//!
//! ```text
//! LC* = LC_assigned + Σ_{unassigned, s ≤ 0} -s / |C|
//! RC* = RC_assigned + Σ_{unassigned, s > 0}  s / |C|
//! SW* = (Σ_{assigned crossing} -w + Σ_{edges with an unassigned endpoint} max(-w, 0)) / |E| + 2
//! ```
//!
//! A subtree is pruned when `LC* · RC* · SW*` does not exceed the incumbent.

use std::time::{Duration, Instant};

use super::{elapsed_ms, solve_ls, SolveResult, SolveStats};
use crate::model::{evaluate, Bipartition, Side, UDebG};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbOptions {
    /// Wall-clock budget; the best incumbent is returned when it runs out.
    pub timeout: Option<Duration>,
    /// Seed the incumbent with a local-search run.
    pub warm_start: bool,
    pub ls_seed: u64,
    /// Record the incumbent value after every improvement.
    pub trace: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        Self {
            timeout: None,
            warm_start: true,
            ls_seed: 0,
            trace: false,
        }
    }
}

pub fn solve_bnb(g: &UDebG) -> SolveResult {
    solve_bnb_with(g, &BnbOptions::default())
}

/// Upper bound on the polarization of any completion of `partial`
/// (`None` marks an unassigned node).
pub fn upper_bound(g: &UDebG, partial: &[Option<Side>]) -> f64 {
    assert_eq!(partial.len(), g.node_count(), "partial assignment size");
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let (mut lc, mut rc) = (0.0, 0.0);
    for (v, side) in partial.iter().enumerate() {
        let s = g.s(v);
        match (side, s <= 0.0) {
            (Some(Side::L) | None, true) => lc -= s,
            (Some(Side::R) | None, false) => rc += s,
            _ => {}
        }
    }
    let mut cross = 0.0;
    for e in g.edges() {
        match (partial[e.src], partial[e.dst]) {
            (Some(a), Some(b)) if a != b => cross -= e.w,
            (Some(_), Some(_)) => {}
            _ => cross += (-e.w).max(0.0),
        }
    }
    let sweight = if g.edge_count() == 0 {
        2.0
    } else {
        cross / g.edge_count() as f64 + 2.0
    };
    (lc / n as f64) * (rc / n as f64) * sweight
}

/// Objective numerators of the assigned prefix.
#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    lc: f64,
    rc: f64,
    cross: f64,
}

struct Search<'g> {
    g: &'g UDebG,
    order: Vec<usize>,
    /// Edges closed when `order[d]` is assigned: `(other endpoint, w)`.
    back: Vec<Vec<(usize, f64)>>,
    /// Suffix sums over depths `>= d`.
    lc_rest: Vec<f64>,
    rc_rest: Vec<f64>,
    open_gain: Vec<f64>,
    inv_edges: f64,
    inv_n2: f64,
    sides: Vec<Side>,
    incumbent: f64,
    best: Option<Vec<Side>>,
    expanded: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    trace: Option<Vec<f64>>,
}

impl<'g> Search<'g> {
    fn new(g: &'g UDebG) -> Self {
        let n = g.node_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| g.s(b).abs().total_cmp(&g.s(a).abs()).then(a.cmp(&b)));
        let mut position = vec![0; n];
        for (d, &v) in order.iter().enumerate() {
            position[v] = d;
        }

        let back: Vec<Vec<(usize, f64)>> = order
            .iter()
            .enumerate()
            .map(|(d, &v)| {
                g.incident(v)
                    .iter()
                    .filter(|inc| position[inc.other] < d)
                    .map(|inc| (inc.other, inc.w))
                    .collect()
            })
            .collect();

        let mut lc_rest = vec![0.0; n + 1];
        let mut rc_rest = vec![0.0; n + 1];
        let mut open_gain = vec![0.0; n + 1];
        for d in (0..n).rev() {
            let s = g.s(order[d]);
            lc_rest[d] = lc_rest[d + 1] + if s <= 0.0 { -s } else { 0.0 };
            rc_rest[d] = rc_rest[d + 1] + if s > 0.0 { s } else { 0.0 };
            open_gain[d] = open_gain[d + 1] + back[d].iter().map(|&(_, w)| (-w).max(0.0)).sum::<f64>();
        }

        Self {
            g,
            order,
            back,
            lc_rest,
            rc_rest,
            open_gain,
            inv_edges: if g.edge_count() == 0 {
                0.0
            } else {
                1.0 / g.edge_count() as f64
            },
            inv_n2: if n == 0 { 0.0 } else { 1.0 / (n * n) as f64 },
            sides: vec![Side::L; n],
            incumbent: f64::NEG_INFINITY,
            best: None,
            expanded: 0,
            deadline: None,
            timed_out: false,
            trace: None,
        }
    }

    #[inline]
    fn value(&self, lc: f64, rc: f64, cross: f64) -> f64 {
        lc * rc * (cross * self.inv_edges + 2.0) * self.inv_n2
    }

    #[inline]
    fn bound(&self, d: usize, st: &Partial) -> f64 {
        self.value(
            st.lc + self.lc_rest[d],
            st.rc + self.rc_rest[d],
            st.cross + self.open_gain[d],
        )
    }

    /// State after putting `order[d]` on `side`; earlier nodes must be set in `self.sides`.
    #[inline]
    fn child(&self, d: usize, side: Side, st: &Partial) -> Partial {
        let s = self.g.s(self.order[d]);
        let mut next = *st;
        match (side, s <= 0.0) {
            (Side::L, true) => next.lc -= s,
            (Side::R, false) => next.rc += s,
            _ => {}
        }
        for &(u, w) in &self.back[d] {
            if self.sides[u] != side {
                next.cross -= w;
            }
        }
        next
    }

    fn offer(&mut self, value: f64) {
        self.incumbent = value;
        self.best = Some(self.sides.clone());
        if let Some(trace) = &mut self.trace {
            trace.push(value);
        }
    }

    fn dfs(&mut self, d: usize, st: Partial) {
        self.expanded += 1;
        if self.expanded & 0x3fff == 1 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        if self.timed_out {
            return;
        }
        if d == self.order.len() {
            let value = self.value(st.lc, st.rc, st.cross);
            if value > self.incumbent {
                self.offer(value);
            }
            return;
        }
        if self.bound(d, &st) <= self.incumbent {
            return;
        }
        let v = self.order[d];
        let natural = Side::natural(self.g.s(v));
        for side in [natural, natural.flip()] {
            let next = self.child(d, side, &st);
            self.sides[v] = side;
            self.dfs(d + 1, next);
            if self.timed_out {
                return;
            }
        }
    }
}

pub fn solve_bnb_with(g: &UDebG, opts: &BnbOptions) -> SolveResult {
    let start = Instant::now();
    let mut search = Search::new(g);
    search.deadline = opts.timeout.map(|t| start + t);
    if opts.trace {
        search.trace = Some(Vec::new());
    }

    let mut warm = None;
    if opts.warm_start && g.node_count() > 0 {
        let ls = solve_ls(g, opts.ls_seed);
        search.incumbent = ls.bippol;
        if let Some(trace) = &mut search.trace {
            trace.push(ls.bippol);
        }
        warm = Some(ls.bipartition);
    }

    search.dfs(0, Partial::default());

    let bipartition = match (search.best.take(), warm) {
        (Some(sides), _) => Bipartition::new(sides),
        (None, Some(p)) => p,
        (None, None) => Bipartition::natural(g),
    };
    let bippol = evaluate(g, &bipartition).expect("sized to graph").bippol;
    SolveResult {
        bipartition,
        bippol,
        stats: SolveStats {
            search_nodes: search.expanded,
            time_ms: elapsed_ms(start),
            optimal: !search.timed_out,
            timed_out: search.timed_out,
            incumbent_trace: search.trace.unwrap_or_default(),
            ..SolveStats::default()
        },
    }
}
