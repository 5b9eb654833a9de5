//! Reduction from simple maxcut to bipartite polarization.
//!
//! Every maxcut vertex becomes a neutral user (`s = 0`), every undirected edge
//! becomes two directed edges with sentiment `-1/2`, and two isolated anchors
//! `u-` (`s = -1`) and `u+` (`s = +1`) are appended. With the anchors on
//! their natural sides `SC = 1/|C|²` is fixed, so maximizing the polarization
//! maximizes the number of cut edges.

use thiserror::Error;

use crate::model::{Interaction, Side, UDebG, UserNode};
use crate::solvers::SolveResult;

pub const MAXCUT_BRUTEFORCE_CAP: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header announces {expected} edges but {found} were listed")]
    EdgeCount { expected: usize, found: usize },
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) is listed twice")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) references a vertex >= {n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("brute-force maxcut over {n} vertices exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Simple undirected graph; vertices are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxcutGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl MaxcutGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, ReductionError> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(ReductionError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(ReductionError::SelfLoop(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ReductionError::DuplicateEdge(u, v));
            }
        }
        Ok(Self { n, edges })
    }

    /// Parse `n m` followed by `m` lines of `u v` (0-indexed). Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let pair = |line: usize, l: &str| -> Result<(usize, usize), ReductionError> {
            let nums: Vec<&str> = l.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| ReductionError::Parse {
                    line,
                    msg: format!("`{s}` is not a non-negative integer"),
                })
            };
            match nums.as_slice() {
                [a, b] => Ok((parse(a)?, parse(b)?)),
                _ => Err(ReductionError::Parse {
                    line,
                    msg: format!("expected two integers, got `{l}`"),
                }),
            }
        };

        let (line, header) = lines.next().ok_or(ReductionError::Parse {
            line: 1,
            msg: "missing `n m` header".into(),
        })?;
        let (n, m) = pair(line, header)?;
        let edges = lines
            .map(|(line, l)| pair(line, l))
            .collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(ReductionError::EdgeCount {
                expected: m,
                found: edges.len(),
            });
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Number of edges whose endpoints lie on different sides.
    pub fn cut_value(&self, sides: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| sides[u] != sides[v]).count()
    }
}

/// Index of `u-` in the reduced graph; `u+` follows it.
pub fn anchor_index(gc: &MaxcutGraph) -> usize {
    gc.n
}

pub fn reduce(gc: &MaxcutGraph) -> UDebG {
    let mut nodes: Vec<UserNode> = (0..gc.n)
        .map(|v| UserNode {
            id: format!("v{v}"),
            s: 0.0,
        })
        .collect();
    nodes.push(UserNode {
        id: "u-".into(),
        s: -1.0,
    });
    nodes.push(UserNode {
        id: "u+".into(),
        s: 1.0,
    });
    let edges = gc
        .edges
        .iter()
        .flat_map(|&(u, v)| {
            [
                Interaction { src: u, dst: v, w: -0.5 },
                Interaction { src: v, dst: u, w: -0.5 },
            ]
        })
        .collect();
    UDebG::new(nodes, edges).expect("reduction output satisfies graph invariants")
}

/// Maximum cut by enumeration, with vertex 0 fixed on the `false` side.
pub fn maxcut_bruteforce(gc: &MaxcutGraph) -> Result<(usize, Vec<bool>), ReductionError> {
    if gc.n > MAXCUT_BRUTEFORCE_CAP {
        return Err(ReductionError::TooLarge {
            n: gc.n,
            cap: MAXCUT_BRUTEFORCE_CAP,
        });
    }
    if gc.n == 0 {
        return Ok((0, Vec::new()));
    }
    let mut best = (0, 0u32);
    for mask in 0..(1u32 << (gc.n - 1)) {
        let side = |v: usize| v > 0 && mask >> (v - 1) & 1 == 1;
        let cut = gc.edges.iter().filter(|&&(u, v)| side(u) != side(v)).count();
        if cut > best.0 {
            best = (cut, mask);
        }
    }
    let sides = (0..gc.n)
        .map(|v| v > 0 && best.1 >> (v - 1) & 1 == 1)
        .collect();
    Ok((best.0, sides))
}

/// Cut value encoded by an optimal solution of `reduce(gc)`.
///
/// The anchors are forced onto their natural sides (`u-` in `L`, `u+` in `R`)
/// and dropped; vertices in `R` form the `true` side of the cut.
pub fn recover_cut(gc: &MaxcutGraph, solved: &SolveResult) -> usize {
    let mut p = solved.bipartition.clone();
    let a = anchor_index(gc);
    p.set(a, Side::L);
    p.set(a + 1, Side::R);
    let sides: Vec<bool> = (0..gc.n).map(|v| p.side(v) == Side::R).collect();
    gc.cut_value(&sides)
}
