//! Debate trees: side propagation and aggregation into a user debate graph.
//!
//! A comment agrees with the root (`+1`) when it answers an agreeing comment
//! with positive sentiment, or a disagreeing comment with non-positive
//! sentiment. Otherwise it disagrees (`-1`). The root itself agrees.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Interaction, ModelError, UDebG, UserNode};

#[derive(Debug, Error)]
pub enum DebateError {
    #[error("comment `{0}` appears more than once")]
    DuplicateComment(String),
    #[error("comment `{id}` answers unknown comment `{parent}`")]
    UnknownParent { id: String, parent: String },
    #[error("comment `{0}` has no parent but is not the root")]
    MultipleRoots(String),
    #[error("the root comment `{0}` must not have a parent")]
    RootHasParent(String),
    #[error("comment `{0}` is not reachable from the root (cycle)")]
    Cycle(String),
    #[error("comment `{0}` has no author")]
    MissingAuthor(String),
    #[error("comment `{0}` has no sentiment towards its parent")]
    MissingSentiment(String),
    #[error("comment `{id}` has sentiment {w}, outside [-2, 2]")]
    SentimentOutOfRange { id: String, w: f64 },
    #[error("malformed debate JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

/// Raw debate tree as read from JSON. The root may be listed among
/// `comments` (without parent) or left implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebateTree {
    pub root: String,
    pub comments: Vec<Comment>,
}

impl DebateTree {
    pub fn from_json(text: &str) -> Result<Self, DebateError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A reply edge of the tree: `child` answers `parent` with sentiment `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub child: usize,
    pub parent: usize,
    pub w: f64,
}

/// A debate tree with every comment labelled `+1` or `-1`. Index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct SidedTree {
    pub ids: Vec<String>,
    pub authors: Vec<Option<String>>,
    pub replies: Vec<Reply>,
    pub sides: Vec<i8>,
}

impl SidedTree {
    /// Re-check the side recurrence over every reply.
    pub fn is_consistent(&self) -> bool {
        self.sides[0] == 1
            && self.replies.iter().all(|r| {
                let expected = side_of_reply(self.sides[r.parent], r.w);
                self.sides[r.child] == expected
            })
    }
}

#[inline]
fn side_of_reply(parent_side: i8, w: f64) -> i8 {
    if (parent_side == 1 && w > 0.0) || (parent_side == -1 && w <= 0.0) {
        1
    } else {
        -1
    }
}

/// Validate the tree structure and label every comment top-down.
pub fn propagate_sides(tree: &DebateTree) -> Result<SidedTree, DebateError> {
    let mut ids = vec![tree.root.clone()];
    let mut authors = vec![None];
    let mut index: HashMap<&str, usize> = HashMap::new();
    index.insert(tree.root.as_str(), 0);
    let mut root_listed = false;

    for c in &tree.comments {
        if c.id == tree.root {
            if c.parent.is_some() {
                return Err(DebateError::RootHasParent(c.id.clone()));
            }
            if root_listed {
                return Err(DebateError::DuplicateComment(c.id.clone()));
            }
            root_listed = true;
            authors[0] = c.author.clone();
            continue;
        }
        if index.insert(c.id.as_str(), ids.len()).is_some() {
            return Err(DebateError::DuplicateComment(c.id.clone()));
        }
        if c.author.is_none() {
            return Err(DebateError::MissingAuthor(c.id.clone()));
        }
        ids.push(c.id.clone());
        authors.push(c.author.clone());
    }

    let mut replies = Vec::with_capacity(ids.len().saturating_sub(1));
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for c in tree.comments.iter().filter(|c| c.id != tree.root) {
        let parent = c
            .parent
            .as_deref()
            .ok_or_else(|| DebateError::MultipleRoots(c.id.clone()))?;
        let parent = *index.get(parent).ok_or_else(|| DebateError::UnknownParent {
            id: c.id.clone(),
            parent: parent.to_string(),
        })?;
        let w = c
            .w
            .ok_or_else(|| DebateError::MissingSentiment(c.id.clone()))?;
        if !(-2.0..=2.0).contains(&w) {
            return Err(DebateError::SentimentOutOfRange {
                id: c.id.clone(),
                w,
            });
        }
        let child = index[c.id.as_str()];
        children[parent].push(replies.len());
        replies.push(Reply { child, parent, w });
    }

    let mut sides = vec![0i8; ids.len()];
    sides[0] = 1;
    let mut stack = vec![0usize];
    while let Some(c) = stack.pop() {
        for &r in &children[c] {
            let reply = &replies[r];
            sides[reply.child] = side_of_reply(sides[c], reply.w);
            stack.push(reply.child);
        }
    }
    if let Some(orphan) = sides.iter().position(|&s| s == 0) {
        return Err(DebateError::Cycle(ids[orphan].clone()));
    }

    Ok(SidedTree {
        ids,
        authors,
        replies,
        sides,
    })
}

/// Collapse comments by author into a user debate graph.
///
/// Nodes are ordered by author id and edges by `(src, dst)`, so the result
/// does not depend on the order comments were listed in.
pub fn aggregate(tree: &SidedTree) -> Result<UDebG, DebateError> {
    // author -> sum of sides, comment count
    let mut users: BTreeMap<&str, (i64, i64)> = BTreeMap::new();
    for c in 1..tree.ids.len() {
        let author = tree.authors[c].as_deref().unwrap_or("");
        let entry = users.entry(author).or_default();
        entry.0 += i64::from(tree.sides[c]);
        entry.1 += 1;
    }
    let node_index: HashMap<&str, usize> =
        users.keys().enumerate().map(|(i, &a)| (a, i)).collect();

    // (src, dst) -> sentiments keyed by replying comment id
    let mut pairs: BTreeMap<(usize, usize), Vec<(&str, f64)>> = BTreeMap::new();
    for r in tree.replies.iter().filter(|r| r.parent != 0) {
        let src = node_index[tree.authors[r.child].as_deref().unwrap_or("")];
        let dst = node_index[tree.authors[r.parent].as_deref().unwrap_or("")];
        if src != dst {
            pairs
                .entry((src, dst))
                .or_default()
                .push((tree.ids[r.child].as_str(), r.w));
        }
    }

    let nodes = users
        .iter()
        .map(|(&author, &(sum, count))| UserNode {
            id: author.to_string(),
            s: sum as f64 / count as f64,
        })
        .collect();
    let edges = pairs
        .into_iter()
        .map(|((src, dst), mut ws)| {
            ws.sort_by(|a, b| a.0.cmp(b.0));
            let total: f64 = ws.iter().map(|&(_, w)| w).sum();
            Interaction {
                src,
                dst,
                w: (total / ws.len() as f64).clamp(-2.0, 2.0),
            }
        })
        .collect();
    Ok(UDebG::new(nodes, edges)?)
}

/// Parse, label and aggregate a debate tree in one step.
pub fn debate_to_graph(text: &str) -> Result<UDebG, DebateError> {
    let tree = DebateTree::from_json(text)?;
    aggregate(&propagate_sides(&tree)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reply(id: &str, author: &str, parent: &str, w: f64) -> Comment {
        Comment {
            id: id.into(),
            author: Some(author.into()),
            parent: Some(parent.into()),
            w: Some(w),
        }
    }

    fn tree(comments: Vec<Comment>) -> DebateTree {
        DebateTree {
            root: "r".into(),
            comments,
        }
    }

    fn side(t: &SidedTree, id: &str) -> i8 {
        t.sides[t.ids.iter().position(|x| x == id).unwrap()]
    }

    #[test]
    fn side_rule_examples() {
        let t = propagate_sides(&tree(vec![
            reply("c1", "u1", "r", -1.5),
            reply("c2", "u2", "c1", -0.5),
            reply("c3", "u3", "c1", 0.0),
            reply("c4", "u4", "r", 0.0),
            reply("c5", "u5", "r", 0.1),
        ]))
        .unwrap();
        assert_eq!(side(&t, "r"), 1);
        assert_eq!(side(&t, "c1"), -1);
        assert_eq!(side(&t, "c2"), 1);
        assert_eq!(side(&t, "c3"), 1);
        assert_eq!(side(&t, "c4"), -1);
        assert_eq!(side(&t, "c5"), 1);
        assert!(t.is_consistent());
    }

    #[test]
    fn mixed_sides_average_to_zero() {
        let t = propagate_sides(&tree(vec![
            reply("c1", "u1", "r", 1.0),
            reply("c2", "u1", "r", -1.0),
        ]))
        .unwrap();
        let g = aggregate(&t).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.nodes()[0].s, 0.0);
    }

    #[test]
    fn repeated_replies_are_averaged() {
        let t = propagate_sides(&tree(vec![
            reply("a", "u2", "r", 1.0),
            reply("b", "u2", "r", 1.0),
            reply("x", "u1", "a", -2.0),
            reply("y", "u1", "b", -1.0),
        ]))
        .unwrap();
        let g = aggregate(&t).unwrap();
        assert_eq!(g.edge_count(), 1);
        let e = g.edges()[0];
        assert_eq!((g.nodes()[e.src].id.as_str(), g.nodes()[e.dst].id.as_str()), ("u1", "u2"));
        assert!((e.w + 1.5).abs() < 1e-12);
    }

    #[test]
    fn root_replies_produce_no_edges() {
        let t = propagate_sides(&tree(vec![
            reply("a", "u1", "r", 1.0),
            reply("b", "u2", "r", -1.0),
            reply("c", "u3", "r", 0.5),
        ]))
        .unwrap();
        let g = aggregate(&t).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn self_replies_count_for_side_but_not_edges() {
        let t = propagate_sides(&tree(vec![
            reply("a", "u1", "r", 1.0),
            reply("b", "u1", "a", -1.0),
        ]))
        .unwrap();
        let g = aggregate(&t).unwrap();
        assert_eq!(g.edge_count(), 0);
        // a agrees (+1), b disagrees with an agreeing comment (-1).
        assert_eq!(g.nodes()[0].s, 0.0);
    }

    #[test]
    fn root_author_needs_non_root_comments() {
        let mut comments = vec![
            Comment {
                id: "r".into(),
                author: Some("op".into()),
                parent: None,
                w: None,
            },
            reply("a", "u1", "r", -1.0),
        ];
        let g = aggregate(&propagate_sides(&tree(comments.clone())).unwrap()).unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.index_of("op").is_none());

        comments.push(reply("b", "op", "a", -1.0));
        let g = aggregate(&propagate_sides(&tree(comments)).unwrap()).unwrap();
        assert_eq!(g.node_count(), 2);
        let op = g.index_of("op").unwrap();
        let u1 = g.index_of("u1").unwrap();
        // op's reply to u1 is an edge, u1's reply to the root is not.
        assert_eq!(g.edges(), &[Interaction { src: op, dst: u1, w: -1.0 }]);
    }

    #[test]
    fn structural_errors() {
        let e = propagate_sides(&tree(vec![reply("a", "u", "zz", 0.0)])).unwrap_err();
        assert!(matches!(e, DebateError::UnknownParent { .. }));

        let e = propagate_sides(&tree(vec![
            reply("a", "u", "b", 0.0),
            reply("b", "u", "a", 0.0),
        ]))
        .unwrap_err();
        assert!(matches!(e, DebateError::Cycle(_)));

        let orphan = Comment {
            id: "x".into(),
            author: Some("u".into()),
            parent: None,
            w: None,
        };
        let e = propagate_sides(&tree(vec![orphan])).unwrap_err();
        assert!(matches!(e, DebateError::MultipleRoots(_)));

        let e = propagate_sides(&tree(vec![reply("a", "u", "r", 3.0)])).unwrap_err();
        assert!(matches!(e, DebateError::SentimentOutOfRange { .. }));

        let e = propagate_sides(&tree(vec![
            reply("a", "u", "r", 0.0),
            reply("a", "v", "r", 0.0),
        ]))
        .unwrap_err();
        assert!(matches!(e, DebateError::DuplicateComment(_)));
    }

    #[test]
    fn parses_documented_format() {
        let g = debate_to_graph(
            r#"{"root":"c0","comments":[
                {"id":"c1","author":"u7","parent":"c0","w":-1.5},
                {"id":"c2","author":"u8","parent":"c1","w":-0.5}]}"#,
        )
        .unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.nodes()[0].id, "u7");
        assert_eq!(g.nodes()[0].s, -1.0);
        assert_eq!(g.nodes()[1].s, 1.0);
        assert_eq!(g.edges(), &[Interaction { src: 1, dst: 0, w: -0.5 }]);
    }
}
