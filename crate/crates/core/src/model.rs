//! User debate graphs and the bipartite polarization objective.
//!
//! A [`UDebG`] holds one node per user, carrying the user's side weight
//! `s ∈ [-1, 1]`, and one directed edge per ordered pair of interacting users,
//! carrying the mean reply sentiment `w ∈ [-2, 2]`. For a bipartition `(L, R)`:
//!
//! ```text
//! LC      = Σ_{i ∈ L, s_i ≤ 0} -s_i / |C|
//! RC      = Σ_{i ∈ R, s_i > 0}  s_i / |C|
//! SWeight = Σ_{(i,j) crossing} -w_ij / |E| + 2      (2 when |E| = 0)
//! BipPol  = LC · RC · SWeight
//! ```
//!
//! [`EvalCache`] keeps the three raw numerators so that the effect of flipping
//! a single node can be computed in `O(degree)` by [`move_delta`].

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used when comparing objective values.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("node `{id}` has side weight {s}, outside [-1, 1]")]
    SideWeightOutOfRange { id: String, s: f64 },
    #[error("edge ({src}, {dst}) has sentiment {w}, outside [-2, 2]")]
    SentimentOutOfRange { src: usize, dst: usize, w: f64 },
    #[error("edge ({src}, {dst}) references a node index >= {node_count}")]
    EndpointOutOfRange { src: usize, dst: usize, node_count: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: usize, dst: usize },
    #[error("duplicate node id `{id}`")]
    DuplicateNodeId { id: String },
    #[error("assignment has {got} entries but the graph has {expected} nodes")]
    AssignmentLength { expected: usize, got: usize },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserNode {
    pub id: String,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub src: usize,
    pub dst: usize,
    pub w: f64,
}

/// One edge as seen from one of its endpoints. Both `(i, j)` and `(j, i)`
/// appear separately when both exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub other: usize,
    pub w: f64,
}

/// A validated user debate graph. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct UDebG {
    nodes: Vec<UserNode>,
    edges: Vec<Interaction>,
    incident: Vec<Vec<Incidence>>,
    meta: Option<serde_json::Value>,
}

impl UDebG {
    pub fn new(nodes: Vec<UserNode>, edges: Vec<Interaction>) -> Result<Self, ModelError> {
        let mut ids = HashSet::with_capacity(nodes.len());
        for node in &nodes {
            if !(-1.0..=1.0).contains(&node.s) {
                return Err(ModelError::SideWeightOutOfRange {
                    id: node.id.clone(),
                    s: node.s,
                });
            }
            if !ids.insert(node.id.as_str()) {
                return Err(ModelError::DuplicateNodeId {
                    id: node.id.clone(),
                });
            }
        }

        let n = nodes.len();
        let mut seen = HashSet::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); n];
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(ModelError::EndpointOutOfRange {
                    src: e.src,
                    dst: e.dst,
                    node_count: n,
                });
            }
            if e.src == e.dst {
                return Err(ModelError::SelfLoop { node: e.src });
            }
            if !(-2.0..=2.0).contains(&e.w) {
                return Err(ModelError::SentimentOutOfRange {
                    src: e.src,
                    dst: e.dst,
                    w: e.w,
                });
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(ModelError::DuplicateEdge {
                    src: e.src,
                    dst: e.dst,
                });
            }
            incident[e.src].push(Incidence { other: e.dst, w: e.w });
            incident[e.dst].push(Incidence { other: e.src, w: e.w });
        }

        Ok(Self {
            nodes,
            edges,
            incident,
            meta: None,
        })
    }

    /// Attach free-form metadata, written under `"meta"` when saved.
    pub fn with_meta(mut self, meta: serde_json::Value) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn meta(&self) -> Option<&serde_json::Value> {
        self.meta.as_ref()
    }

    pub fn nodes(&self) -> &[UserNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Interaction] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn s(&self, v: usize) -> f64 {
        self.nodes[v].s
    }

    #[inline]
    pub fn incident(&self, v: usize) -> &[Incidence] {
        &self.incident[v]
    }

    /// Index of the node with the given id.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }
}

/// Side of a bipartition. `L` is scored on users with `s ≤ 0`, `R` on users
/// with `s > 0`, so the two are not interchangeable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    #[inline]
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    /// The side on which a node with side weight `s` counts towards `SC`.
    #[inline]
    pub fn natural(s: f64) -> Side {
        if s <= 0.0 {
            Side::L
        } else {
            Side::R
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// A total assignment of nodes to sides, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bipartition(Vec<Side>);

impl Bipartition {
    pub fn new(sides: Vec<Side>) -> Self {
        Self(sides)
    }

    pub fn uniform(n: usize, side: Side) -> Self {
        Self(vec![side; n])
    }

    /// Every node on the side where it counts towards `SC`.
    pub fn natural(g: &UDebG) -> Self {
        Self(g.nodes().iter().map(|n| Side::natural(n.s)).collect())
    }

    /// Decode the low `n` bits of `mask`; bit `i` set puts node `i` in `R`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self(
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { Side::R } else { Side::L })
                .collect(),
        )
    }

    #[inline]
    pub fn side(&self, v: usize) -> Side {
        self.0[v]
    }

    #[inline]
    pub fn set(&mut self, v: usize, side: Side) {
        self.0[v] = side;
    }

    #[inline]
    pub fn flip(&mut self, v: usize) {
        self.0[v] = self.0[v].flip();
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Side> {
        self.0
    }

    fn check(&self, g: &UDebG) -> Result<(), ModelError> {
        if self.len() != g.node_count() {
            return Err(ModelError::AssignmentLength {
                expected: g.node_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationBreakdown {
    pub lc: f64,
    pub rc: f64,
    pub sc: f64,
    pub sweight: f64,
    pub bippol: f64,
}

impl PolarizationBreakdown {
    fn from_numerators(g: &UDebG, lc_num: f64, rc_num: f64, cross_sum: f64) -> Self {
        let n = g.node_count() as f64;
        let lc = lc_num / n;
        let rc = rc_num / n;
        let sc = lc * rc;
        let sweight = sweight(g, cross_sum);
        Self {
            lc,
            rc,
            sc,
            sweight,
            bippol: sc * sweight,
        }
    }
}

#[inline]
fn sweight(g: &UDebG, cross_sum: f64) -> f64 {
    if g.edge_count() == 0 {
        2.0
    } else {
        cross_sum / g.edge_count() as f64 + 2.0
    }
}

#[inline]
fn bippol_from(g: &UDebG, lc_num: f64, rc_num: f64, cross_sum: f64) -> f64 {
    let n = g.node_count() as f64;
    (lc_num / n) * (rc_num / n) * sweight(g, cross_sum)
}

/// Evaluate the polarization of `p` on `g` from scratch.
pub fn evaluate(g: &UDebG, p: &Bipartition) -> Result<PolarizationBreakdown, ModelError> {
    p.check(g)?;
    if g.node_count() == 0 {
        return Ok(PolarizationBreakdown {
            lc: 0.0,
            rc: 0.0,
            sc: 0.0,
            sweight: 2.0,
            bippol: 0.0,
        });
    }
    let (lc_num, rc_num, cross_sum) = numerators(g, p);
    Ok(PolarizationBreakdown::from_numerators(
        g, lc_num, rc_num, cross_sum,
    ))
}

fn numerators(g: &UDebG, p: &Bipartition) -> (f64, f64, f64) {
    let mut lc_num = 0.0;
    let mut rc_num = 0.0;
    for (v, node) in g.nodes().iter().enumerate() {
        match (p.side(v), node.s <= 0.0) {
            (Side::L, true) => lc_num -= node.s,
            (Side::R, false) => rc_num += node.s,
            _ => {}
        }
    }
    let cross_sum = g
        .edges()
        .iter()
        .filter(|e| p.side(e.src) != p.side(e.dst))
        .map(|e| -e.w)
        .sum();
    (lc_num, rc_num, cross_sum)
}

/// Raw objective numerators for one bipartition: `Σ -s` over `L ∩ {s ≤ 0}`,
/// `Σ s` over `R ∩ {s > 0}`, and `Σ -w` over crossing edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalCache {
    pub lc_num: f64,
    pub rc_num: f64,
    pub cross_sum: f64,
}

impl EvalCache {
    pub fn new(g: &UDebG, p: &Bipartition) -> Result<Self, ModelError> {
        p.check(g)?;
        let (lc_num, rc_num, cross_sum) = numerators(g, p);
        Ok(Self {
            lc_num,
            rc_num,
            cross_sum,
        })
    }

    pub fn bippol(&self, g: &UDebG) -> f64 {
        if g.node_count() == 0 {
            return 0.0;
        }
        bippol_from(g, self.lc_num, self.rc_num, self.cross_sum)
    }

    pub fn breakdown(&self, g: &UDebG) -> PolarizationBreakdown {
        PolarizationBreakdown::from_numerators(g, self.lc_num, self.rc_num, self.cross_sum)
    }

    /// True when the cached numerators match a fresh evaluation of `p`.
    pub fn matches(&self, g: &UDebG, p: &Bipartition) -> bool {
        if p.len() != g.node_count() {
            return false;
        }
        let (lc, rc, cross) = numerators(g, p);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        close(lc, self.lc_num) && close(rc, self.rc_num) && close(cross, self.cross_sum)
    }

    /// Numerators after flipping `v`, without touching `p`.
    #[inline]
    fn flipped(&self, g: &UDebG, p: &Bipartition, v: usize) -> EvalCache {
        let s = g.s(v);
        let from = p.side(v);
        let mut next = *self;
        match (from, s <= 0.0) {
            (Side::L, true) => next.lc_num += s,
            (Side::R, true) => next.lc_num -= s,
            (Side::R, false) => next.rc_num -= s,
            (Side::L, false) => next.rc_num += s,
        }
        for inc in g.incident(v) {
            if p.side(inc.other) == from {
                next.cross_sum -= inc.w;
            } else {
                next.cross_sum += inc.w;
            }
        }
        next
    }

    /// Flip `v` in `p` and update the numerators to match.
    pub fn apply_flip(&mut self, g: &UDebG, p: &mut Bipartition, v: usize) {
        *self = self.flipped(g, p, v);
        p.flip(v);
    }
}

/// `BipPol(p with v flipped) - BipPol(p)`, touching only edges incident to `v`.
pub fn move_delta(g: &UDebG, p: &Bipartition, cached: &EvalCache, v: usize) -> f64 {
    debug_assert!(cached.matches(g, p), "stale evaluation cache");
    cached.flipped(g, p, v).bippol(g) - cached.bippol(g)
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    nodes: Vec<UserNode>,
    edges: Vec<Interaction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<serde_json::Value>,
}

/// Parse and validate an instance from its JSON text.
pub fn parse_instance(text: &str) -> Result<UDebG, ModelError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let g = UDebG::new(file.nodes, file.edges)?;
    Ok(match file.meta {
        Some(meta) => g.with_meta(meta),
        None => g,
    })
}

/// Serialize an instance to its canonical JSON text (pretty, trailing newline).
pub fn instance_to_json(g: &UDebG) -> String {
    let file = InstanceFile {
        nodes: g.nodes.clone(),
        edges: g.edges.clone(),
        meta: g.meta.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance is always serializable");
    text.push('\n');
    text
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<UDebG, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instance(&text)
}

pub fn save_instance(g: &UDebG, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(g)).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}
