//! Tree operations and offset embeddings as explicit node maps between
//! finite shapes.

mod apply;
mod build;

pub use apply::{apply_intersect, apply_tuplewise, TupleLabeledTree};
pub use build::{
    binary_restriction, build, comb_embedding, comb_node, elongation, elongation_tilde,
    fattening, identity, required_source_shape, restriction, spread_embedding,
    spread_embedding_at, spread_node, spread_node_at, stretching, widening,
};

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::treeidx::{Node, TreeShape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("source shape {given} is too small, {required} is required")]
    ShapeInsufficient {
        required: TreeShape,
        given: TreeShape,
    },
    #[error("node {node} is not in shape {shape}")]
    OutOfShape { node: Node, shape: TreeShape },
    #[error("restriction to {levels:?} is not an order isomorphism at {a} / {b}")]
    NotIsomorphic { levels: Vec<usize>, a: Node, b: Node },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: TreeShape, got: TreeShape },
    #[error("cannot compose: inner target {inner} differs from outer source {outer}")]
    Compose { outer: TreeShape, inner: TreeShape },
}

/// Which operation a [`NodeMap`] realizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "params", rename_all = "snake_case")]
pub enum OpDesc {
    Identity,
    Widening { k: u32, n: usize },
    Stretching { k: usize, n: usize },
    Fattening { k: usize },
    Restriction { levels: Vec<usize> },
    Elongation { k: usize },
    Comb,
    Spread,
    SpreadAt { n: usize },
    BinaryRestriction,
    /// `first` is applied to target nodes, `then` to the resulting nodes.
    Compose { first: Box<OpDesc>, then: Box<OpDesc> },
}

/// Map from target nodes to nonempty tuples of source nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMap {
    pub op: OpDesc,
    pub source: TreeShape,
    pub target: TreeShape,
    /// Indexed by the canonical index of the target node.
    image: Vec<Vec<Node>>,
}

impl NodeMap {
    pub(crate) fn from_parts(
        op: OpDesc,
        source: TreeShape,
        target: TreeShape,
        image: Vec<Vec<Node>>,
    ) -> Result<Self, OpError> {
        debug_assert_eq!(image.len(), target.node_count());
        for tuple in &image {
            if tuple.is_empty() {
                return Err(OpError::InvalidParam("empty image tuple".into()));
            }
            for n in tuple {
                if !source.contains(n) {
                    return Err(OpError::OutOfShape {
                        node: n.clone(),
                        shape: source,
                    });
                }
            }
        }
        Ok(NodeMap {
            op,
            source,
            target,
            image,
        })
    }

    pub fn image(&self, node: &Node) -> Result<&[Node], OpError> {
        self.target
            .index_of(node)
            .map(|i| self.image[i].as_slice())
            .ok_or_else(|| OpError::OutOfShape {
                node: node.clone(),
                shape: self.target,
            })
    }

    /// Image tuples in canonical target order.
    pub fn images(&self) -> &[Vec<Node>] {
        &self.image
    }

    /// Concatenation of the images of `t`, in order.
    pub fn map_tuple(&self, t: &[Node]) -> Result<Vec<Node>, OpError> {
        let mut out = Vec::new();
        for n in t {
            out.extend_from_slice(self.image(n)?);
        }
        Ok(out)
    }

    /// `self` sends target nodes into `then.target`; the result sends them
    /// into `then.source` by mapping every node of each image through `then`.
    pub fn then(&self, then: &NodeMap) -> Result<NodeMap, OpError> {
        if self.source != then.target {
            return Err(OpError::Compose {
                outer: self.source,
                inner: then.target,
            });
        }
        let image = self
            .image
            .iter()
            .map(|t| then.map_tuple(t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NodeMap {
            op: OpDesc::Compose {
                first: Box::new(self.op.clone()),
                then: Box::new(then.op.clone()),
            },
            source: then.source,
            target: self.target,
            image,
        })
    }

    /// Same map, viewed into a larger source shape.
    pub fn with_source(mut self, source: TreeShape) -> Result<NodeMap, OpError> {
        for tuple in &self.image {
            for n in tuple {
                if !source.contains(n) {
                    return Err(OpError::ShapeInsufficient {
                        required: self.source,
                        given: source,
                    });
                }
            }
        }
        self.source = source;
        Ok(self)
    }

    /// Short reference used in provenance records.
    pub fn reference(&self) -> NodeMapRef {
        NodeMapRef {
            op: self.op.clone(),
            source: self.source,
            target: self.target,
        }
    }
}

/// A node map without its image table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMapRef {
    #[serde(flatten)]
    pub op: OpDesc,
    pub source: TreeShape,
    pub target: TreeShape,
}

struct ImageTable<'a>(&'a TreeShape, &'a [Vec<Node>]);

impl Serialize for ImageTable<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let nodes = self.0.nodes();
        let mut m = s.serialize_map(Some(nodes.len()))?;
        for (n, img) in nodes.iter().zip(self.1) {
            m.serialize_entry(&n.to_string(), img)?;
        }
        m.end()
    }
}

impl Serialize for NodeMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            #[serde(flatten)]
            op: &'a OpDesc,
            source: &'a TreeShape,
            target: &'a TreeShape,
            image: ImageTable<'a>,
        }
        Repr {
            op: &self.op,
            source: &self.source,
            target: &self.target,
            image: ImageTable(&self.target, &self.image),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NodeMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Repr {
            #[serde(flatten)]
            op: OpDesc,
            source: TreeShape,
            target: TreeShape,
            image: BTreeMap<Node, Vec<Node>>,
        }
        let r = Repr::deserialize(d)?;
        let mut image = Vec::with_capacity(r.target.node_count());
        for n in r.target.nodes() {
            let img = r
                .image
                .get(&n)
                .ok_or_else(|| D::Error::custom(format!("image missing for {n}")))?;
            image.push(img.clone());
        }
        if image.len() != r.image.len() {
            return Err(D::Error::custom("image has nodes outside the target shape"));
        }
        NodeMap::from_parts(r.op, r.source, r.target, image).map_err(D::Error::custom)
    }
}
