//! Metric trees with marked points on nodes or edge interiors.
//!
//! Balls in a metric tree are subtrees, so a ball family meets iff it meets
//! pairwise. The weighted 1-center therefore sits on the geodesic between
//! the pair maximizing `d(x_i, x_j) / (w_i + w_j)`.

use std::collections::{HashMap, VecDeque};

use super::descriptor::{NodeId, TreeMark};
use crate::error::{Error, Result};

/// A location in a tree: a node, or a point at `offset` from the first
/// endpoint of an edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreePoint {
    Node(usize),
    Edge { edge: usize, offset: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct TreeSpace {
    labels: Vec<NodeId>,
    edges: Vec<TreeEdge>,
    // (neighbor, edge index)
    adjacency: Vec<Vec<(usize, usize)>>,
    node_dist: Vec<f64>,
    marks: Vec<TreePoint>,
}

impl TreeSpace {
    pub fn new(nodes: &[NodeId], edges: &[(NodeId, NodeId, f64)], marks: &[TreeMark]) -> Result<Self> {
        let bad = |msg: String| Error::InvalidDescriptor(msg);
        if nodes.is_empty() {
            return Err(bad("tree has no nodes".into()));
        }
        let mut index = HashMap::new();
        for (i, id) in nodes.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(bad(format!("duplicate tree node {id}")));
            }
        }
        let lookup = |id: &NodeId| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| bad(format!("unknown tree node {id}")))
        };
        let n = nodes.len();
        if edges.len() + 1 != n {
            return Err(bad(format!(
                "a tree on {n} nodes needs {} edges, found {}",
                n - 1,
                edges.len()
            )));
        }
        let mut tree_edges = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for (a, b, len) in edges {
            let (a, b) = (lookup(a)?, lookup(b)?);
            if a == b || !(len.is_finite() && *len > 0.0) {
                return Err(bad(format!("invalid tree edge ({a},{b},{len})")));
            }
            adjacency[a].push((b, tree_edges.len()));
            adjacency[b].push((a, tree_edges.len()));
            tree_edges.push(TreeEdge { a, b, length: *len });
        }
        let mut node_dist = vec![f64::NAN; n * n];
        for root in 0..n {
            let row = &mut node_dist[root * n..(root + 1) * n];
            row[root] = 0.0;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                for &(v, e) in &adjacency[u] {
                    if row[v].is_nan() {
                        row[v] = row[u] + tree_edges[e].length;
                        queue.push_back(v);
                    }
                }
            }
            if row.iter().any(|d| d.is_nan()) {
                return Err(bad("tree edges do not connect every node".into()));
            }
        }
        let mut space = TreeSpace {
            labels: nodes.to_vec(),
            edges: tree_edges,
            adjacency,
            node_dist,
            marks: Vec::new(),
        };
        let mut resolved = Vec::with_capacity(marks.len());
        for mark in marks {
            let p = match mark {
                TreeMark::Node { node } => TreePoint::Node(lookup(node)?),
                TreeMark::Edge { edge: (a, b), offset } => {
                    let (a, b) = (lookup(a)?, lookup(b)?);
                    let e = space
                        .edge_between(a, b)
                        .ok_or_else(|| bad(format!("no edge between {a} and {b}")))?;
                    let len = space.edges[e].length;
                    if !(0.0..=len).contains(offset) {
                        return Err(bad(format!("offset {offset} outside [0, {len}]")));
                    }
                    let offset = if space.edges[e].a == a { *offset } else { len - offset };
                    space.normalize(TreePoint::Edge { edge: e, offset })
                }
            };
            resolved.push(p);
        }
        space.marks = resolved;
        Ok(space)
    }

    fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(v, _)| v == b).map(|&(_, e)| e)
    }

    pub fn marks(&self) -> &[TreePoint] {
        &self.marks
    }

    pub fn label(&self, node: usize) -> &NodeId {
        &self.labels[node]
    }

    pub fn edge(&self, e: usize) -> TreeEdge {
        self.edges[e]
    }

    fn node_distance(&self, u: usize, v: usize) -> f64 {
        self.node_dist[u * self.labels.len() + v]
    }

    fn normalize(&self, p: TreePoint) -> TreePoint {
        match p {
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                if offset <= 0.0 {
                    TreePoint::Node(e.a)
                } else if offset >= e.length {
                    TreePoint::Node(e.b)
                } else {
                    p
                }
            }
            node => node,
        }
    }

    // (node, distance from p to node) for the nodes through which p exits
    fn exits(&self, p: TreePoint) -> ([(usize, f64); 2], usize) {
        match p {
            TreePoint::Node(n) => ([(n, 0.0), (n, 0.0)], 1),
            TreePoint::Edge { edge, offset } => {
                let e = self.edges[edge];
                ([(e.a, offset), (e.b, e.length - offset)], 2)
            }
        }
    }

    pub fn distance(&self, p: TreePoint, q: TreePoint) -> f64 {
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (p, q) {
            if e1 == e2 {
                return (o1 - o2).abs();
            }
        }
        let (pe, pn) = self.exits(p);
        let (qe, qn) = self.exits(q);
        let mut best = f64::INFINITY;
        for &(u, du) in &pe[..pn] {
            for &(v, dv) in &qe[..qn] {
                best = best.min(du + self.node_distance(u, v) + dv);
            }
        }
        best
    }

    /// Point on the geodesic from `p` to `q` at distance `s` from `p`
    /// (clamped to the segment).
    pub fn point_along(&self, p: TreePoint, q: TreePoint, s: f64) -> TreePoint {
        let total = self.distance(p, q);
        let s = s.clamp(0.0, total);
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (p, q) {
            if e1 == e2 {
                let offset = if o2 >= o1 { o1 + s } else { o1 - s };
                return self.normalize(TreePoint::Edge { edge: e1, offset });
            }
        }
        // pick the exit/entry nodes realizing the distance
        let (pe, pn) = self.exits(p);
        let (qe, qn) = self.exits(q);
        let mut choice = (pe[0], qe[0]);
        let mut best = f64::INFINITY;
        for &(u, du) in &pe[..pn] {
            for &(v, dv) in &qe[..qn] {
                let d = du + self.node_distance(u, v) + dv;
                if d < best {
                    best = d;
                    choice = ((u, du), (v, dv));
                }
            }
        }
        let ((start, d_start), (end, d_end)) = choice;
        if s <= d_start {
            return match p {
                TreePoint::Edge { edge, offset } => {
                    let e = self.edges[edge];
                    let offset = if start == e.a { offset - s } else { offset + s };
                    self.normalize(TreePoint::Edge { edge, offset })
                }
                node => node,
            };
        }
        let mut remaining = s - d_start;
        let path = self.node_path(start, end);
        for w in path.windows(2) {
            let e = self.edge_between(w[0], w[1]).expect("path follows edges");
            let len = self.edges[e].length;
            if remaining <= len {
                let offset = if self.edges[e].a == w[0] {
                    remaining
                } else {
                    len - remaining
                };
                return self.normalize(TreePoint::Edge { edge: e, offset });
            }
            remaining -= len;
        }
        // inside q's own edge, walking from `end` toward q
        match q {
            TreePoint::Edge { edge, .. } => {
                let e = self.edges[edge];
                let step = remaining.min(d_end);
                let offset = if end == e.a { step } else { e.length - step };
                self.normalize(TreePoint::Edge { edge, offset })
            }
            node => node,
        }
    }

    fn node_path(&self, from: usize, to: usize) -> Vec<usize> {
        let n = self.labels.len();
        let mut parent = vec![usize::MAX; n];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &(v, _) in &self.adjacency[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}
