//! JSON space descriptors.
//!
//! ```json
//! {"type":"finite","matrix":[[0,1],[1,0]]}
//! {"type":"euclidean","dim":2,"points":[[0,0],[1,0]]}
//! {"type":"linf","dim":2,"points":[[0,0],[1,0]]}
//! {"type":"circle","circumference":1,"points":[0,0.25]}
//! {"type":"sphere","radius":1,"points":[[1,0,0],[0,1,0]]}
//! {"type":"hyperbolic-disk","points":[[0,0],[0.5,0]]}
//! {"type":"tree","nodes":["a","b"],"edges":[["a","b",2.0]],
//!  "points":[{"node":"a"},{"edge":["a","b"],"offset":0.5}]}
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node label in a tree descriptor; integers and strings are both accepted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Int(i64),
    Str(String),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Int(i) => write!(f, "{i}"),
            NodeId::Str(s) => f.write_str(s),
        }
    }
}

/// Marked point of a tree descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeMark {
    Node { node: NodeId },
    Edge { edge: (NodeId, NodeId), offset: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SpaceDescriptor {
    Finite {
        matrix: Vec<Vec<f64>>,
    },
    Euclidean {
        dim: usize,
        points: Vec<Vec<f64>>,
    },
    Linf {
        dim: usize,
        points: Vec<Vec<f64>>,
    },
    Circle {
        circumference: f64,
        points: Vec<f64>,
    },
    Sphere {
        radius: f64,
        points: Vec<Vec<f64>>,
    },
    HyperbolicDisk {
        points: Vec<Vec<f64>>,
    },
    Tree {
        nodes: Vec<NodeId>,
        edges: Vec<(NodeId, NodeId, f64)>,
        points: Vec<TreeMark>,
    },
}

impl SpaceDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let cases = [
            r#"{"type":"finite","matrix":[[0,1],[1,0]]}"#,
            r#"{"type":"euclidean","dim":2,"points":[[0,0],[1,0]]}"#,
            r#"{"type":"linf","dim":1,"points":[[0],[1]]}"#,
            r#"{"type":"circle","circumference":1,"points":[0,0.25]}"#,
            r#"{"type":"sphere","radius":2,"points":[[1,0,0],[0,1,0]]}"#,
            r#"{"type":"hyperbolic-disk","points":[[0,0],[0.5,0]]}"#,
            r#"{"type":"tree","nodes":["a",1],"edges":[["a",1,2.0]],"points":[{"node":"a"},{"edge":[1,"a"],"offset":0.5}]}"#,
        ];
        for c in cases {
            let d = SpaceDescriptor::from_json(c).unwrap();
            let again = SpaceDescriptor::from_json(&d.to_json()).unwrap();
            assert_eq!(d, again);
        }
    }

    #[test]
    fn tree_marks_distinguish_nodes_and_edges() {
        let d = SpaceDescriptor::from_json(
            r#"{"type":"tree","nodes":[0,1],"edges":[[0,1,1]],"points":[{"node":0},{"edge":[0,1],"offset":0.25}]}"#,
        )
        .unwrap();
        let SpaceDescriptor::Tree { points, .. } = d else {
            panic!()
        };
        assert_eq!(points[0], TreeMark::Node { node: NodeId::Int(0) });
        assert!(matches!(points[1], TreeMark::Edge { offset, .. } if offset == 0.25));
    }

    #[test]
    fn unknown_type_is_rejected() {
        assert!(SpaceDescriptor::from_json(r#"{"type":"torus","points":[]}"#).is_err());
    }
}
