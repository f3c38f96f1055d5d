use serde::{Deserialize, Serialize};

use super::{Node, TreeError};

/// The finite tree of sequences over `{0..b-1}` of length `< depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeShape {
    #[serde(rename = "b")]
    pub branching: u32,
    #[serde(rename = "d")]
    pub depth: usize,
}

impl TreeShape {
    pub fn new(branching: u32, depth: usize) -> Result<Self, TreeError> {
        if branching == 0 {
            return Err(TreeError::ZeroBranching);
        }
        Ok(TreeShape { branching, depth })
    }

    pub fn contains(&self, node: &Node) -> bool {
        node.level() < self.depth && node.entries().iter().all(|&x| x < self.branching)
    }

    pub fn check(&self, node: &Node) -> Result<(), TreeError> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(TreeError::OutOfShape {
                node: node.clone(),
                shape: *self,
            })
        }
    }

    /// Number of nodes at a given level, saturating.
    pub fn level_size(&self, level: usize) -> usize {
        if level >= self.depth {
            return 0;
        }
        (self.branching as usize).saturating_pow(level as u32)
    }

    /// Total node count `Σ_{i<depth} b^i`, saturating at `usize::MAX`.
    pub fn node_count(&self) -> usize {
        (0..self.depth).fold(0usize, |acc, l| acc.saturating_add(self.level_size(l)))
    }

    /// Position of `node` in the canonical (level, lex) enumeration.
    pub fn index_of(&self, node: &Node) -> Option<usize> {
        if !self.contains(node) {
            return None;
        }
        let below: usize = (0..node.level()).map(|l| self.level_size(l)).sum();
        let b = self.branching as usize;
        let rank = node
            .entries()
            .iter()
            .fold(0usize, |acc, &x| acc * b + x as usize);
        Some(below + rank)
    }

    /// Inverse of [`TreeShape::index_of`].
    pub fn node_at(&self, mut index: usize) -> Option<Node> {
        let b = self.branching as usize;
        for l in 0..self.depth {
            let sz = self.level_size(l);
            if index < sz {
                let mut v = vec![0u32; l];
                for slot in v.iter_mut().rev() {
                    *slot = (index % b) as u32;
                    index /= b;
                }
                return Some(Node::new(v));
            }
            index -= sz;
        }
        None
    }

    /// Nodes of one level in lex order.
    pub fn level_nodes(&self, level: usize) -> Vec<Node> {
        if level >= self.depth {
            return Vec::new();
        }
        let mut out = vec![Node::root()];
        for _ in 0..level {
            out = out
                .iter()
                .flat_map(|n| (0..self.branching).map(move |i| n.child(i)))
                .collect();
        }
        out
    }

    /// All nodes in canonical order.
    pub fn nodes(&self) -> Vec<Node> {
        (0..self.depth).flat_map(|l| self.level_nodes(l)).collect()
    }

    /// Maximal nodes (level `depth - 1`), read as the paths of the shape.
    pub fn maximal_paths(&self) -> Vec<Node> {
        match self.depth {
            0 => Vec::new(),
            d => self.level_nodes(d - 1),
        }
    }

    /// Children of `node`, defined when `level(node) < depth - 1`.
    pub fn children(&self, node: &Node) -> Option<Vec<Node>> {
        if !self.contains(node) || node.level() + 1 >= self.depth {
            return None;
        }
        Some((0..self.branching).map(|i| node.child(i)).collect())
    }

    /// Labeled levels `1..depth`.
    pub fn labeled_levels(&self) -> std::ops::Range<usize> {
        1..self.depth.max(1)
    }
}

impl std::fmt::Display for TreeShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.branching, self.depth)
    }
}

impl std::str::FromStr for TreeShape {
    type Err = TreeError;

    /// Parses `"BxD"`, e.g. `"2x3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TreeError::ParseShape(s.to_string());
        let (b, d) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let b = b.trim().parse().map_err(|_| bad())?;
        let d = d.trim().parse().map_err(|_| bad())?;
        TreeShape::new(b, d)
    }
}

/// Canonical enumeration of a shape.
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub shape: TreeShape,
    pub nodes: Vec<Node>,
    pub maximal_paths: Vec<Node>,
}

impl Enumeration {
    pub fn children(&self, node: &Node) -> Option<Vec<Node>> {
        self.shape.children(node)
    }
}

pub fn enumerate(shape: TreeShape) -> Enumeration {
    Enumeration {
        shape,
        nodes: shape.nodes(),
        maximal_paths: shape.maximal_paths(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let e = enumerate(TreeShape::new(2, 3).unwrap());
        assert_eq!(e.nodes.len(), 7);
        assert_eq!(e.maximal_paths.len(), 4);
        let e = enumerate(TreeShape::new(5, 1).unwrap());
        assert_eq!(e.nodes, vec![Node::root()]);
        assert_eq!(e.maximal_paths, vec![Node::root()]);
        assert!(e.children(&Node::root()).is_none());
        assert_eq!(TreeShape::new(3, 3).unwrap().node_count(), 13);
        assert_eq!(TreeShape::new(3, 0).unwrap().nodes().len(), 0);
    }

    #[test]
    fn index_round_trip() {
        let s = TreeShape::new(3, 4).unwrap();
        for (i, n) in s.nodes().iter().enumerate() {
            assert_eq!(s.index_of(n), Some(i));
            assert_eq!(s.node_at(i).as_ref(), Some(n));
        }
        assert_eq!(s.node_at(s.node_count()), None);
        assert_eq!(s.index_of(&Node::from([3])), None);
    }

    #[test]
    fn canonical_order_sorted() {
        let s = TreeShape::new(3, 4).unwrap();
        let nodes = s.nodes();
        assert!(nodes.windows(2).all(|w| w[0].canonical_cmp(&w[1]).is_lt()));
    }

    #[test]
    fn parse_shape() {
        assert_eq!("2x3".parse::<TreeShape>().unwrap(), TreeShape::new(2, 3).unwrap());
        assert!("0x3".parse::<TreeShape>().is_err());
        assert!("2-3".parse::<TreeShape>().is_err());
    }
}
