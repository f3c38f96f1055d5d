use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::TreeError;

/// A finite sequence of naturals, read as a node of the tree ω^{<ω}.
///
/// The derived `Ord` is the lexicographic order `<_lex` used throughout the
/// crate: a proper prefix precedes its extensions, otherwise the entries at
/// the first difference decide.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(Vec<u32>);

impl Node {
    pub fn root() -> Self {
        Node(Vec::new())
    }

    pub fn new(entries: Vec<u32>) -> Self {
        Node(entries)
    }

    /// `0^n`
    pub fn zeros(n: usize) -> Self {
        Node(vec![0; n])
    }

    /// `1^n`
    pub fn ones(n: usize) -> Self {
        Node(vec![1; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> Node {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(i);
        Node(v)
    }

    pub fn concat(&self, tail: &[u32]) -> Node {
        let mut v = Vec::with_capacity(self.0.len() + tail.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(tail);
        Node(v)
    }

    pub fn parent(&self) -> Option<Node> {
        if self.0.is_empty() {
            None
        } else {
            Some(Node(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// `η↾l`; saturates at the full node when `l` exceeds the level.
    pub fn prefix(&self, l: usize) -> Node {
        Node(self.0[..l.min(self.0.len())].to_vec())
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Non-strict tree order: `self ⊴ other`.
    pub fn is_prefix_of(&self, other: &Node) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_comparable(&self, other: &Node) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn meet(&self, other: &Node) -> Node {
        let d = common_prefix_len(&self.0, &other.0);
        Node(self.0[..d].to_vec())
    }

    /// Canonical enumeration order: by level, then lexicographically.
    pub fn canonical_cmp(&self, other: &Node) -> Ordering {
        self.level()
            .cmp(&other.level())
            .then_with(|| self.0.cmp(&other.0))
    }

    pub fn max_entry(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }
}

pub(crate) fn common_prefix_len(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl From<Vec<u32>> for Node {
    fn from(v: Vec<u32>) -> Self {
        Node(v)
    }
}

impl<const N: usize> From<[u32; N]> for Node {
    fn from(v: [u32; N]) -> Self {
        Node(v.to_vec())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

impl FromStr for Node {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" {
            return Ok(Node::root());
        }
        s.split('.')
            .map(|p| {
                p.parse::<u32>()
                    .map_err(|_| TreeError::ParseNode(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Node)
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
