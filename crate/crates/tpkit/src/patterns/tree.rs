use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sets::Subset;
use super::PatternError;
use crate::treeidx::{Node, TreeShape};

/// Subsets of a finite domain attached to the nodes of a shape.
///
/// The root is unlabeled and stands for the full domain; every node of
/// level `>= 1` carries a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTree {
    pub shape: TreeShape,
    pub domain_size: usize,
    /// Canonical node order; slot 0 (the root) holds the full domain.
    labels: Vec<Subset>,
}

impl LabeledTree {
    pub fn from_fn(shape: TreeShape, domain_size: usize, mut f: impl FnMut(&Node) -> Subset) -> Self {
        let labels = shape
            .nodes()
            .iter()
            .map(|n| {
                if n.is_root() {
                    Subset::full(domain_size)
                } else {
                    let mut s = f(n);
                    s.resize(domain_size);
                    s
                }
            })
            .collect();
        LabeledTree {
            shape,
            domain_size,
            labels,
        }
    }

    pub fn from_map(
        shape: TreeShape,
        domain_size: usize,
        map: &BTreeMap<Node, Subset>,
    ) -> Result<Self, PatternError> {
        for (n, s) in map {
            if !shape.contains(n) || n.is_root() {
                return Err(PatternError::Malformed(format!(
                    "label for {n} is outside the labeled levels of {shape}"
                )));
            }
            if s.domain_size() > domain_size {
                return Err(PatternError::OutsideDomain(n.to_string()));
            }
        }
        let mut missing = None;
        let t = LabeledTree::from_fn(shape, domain_size, |n| match map.get(n) {
            Some(s) => s.clone(),
            None => {
                missing.get_or_insert_with(|| n.clone());
                Subset::empty(domain_size)
            }
        });
        match missing {
            Some(n) => Err(PatternError::Malformed(format!("missing label for {n}"))),
            None => Ok(t),
        }
    }

    pub fn label(&self, n: &Node) -> &Subset {
        let i = self
            .shape
            .index_of(n)
            .unwrap_or_else(|| panic!("{n} not in {}", self.shape));
        &self.labels[i]
    }

    pub fn label_at(&self, index: usize) -> &Subset {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[Subset] {
        &self.labels
    }

    pub fn set_label(&mut self, n: &Node, s: Subset) {
        let i = self.shape.index_of(n).expect("node in shape");
        assert!(i != 0, "the root is unlabeled");
        let mut s = s;
        s.resize(self.domain_size);
        self.labels[i] = s;
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Canonical index of the parent of node `i`; heap numbering.
    pub fn parent_index(&self, i: usize) -> Option<usize> {
        (i > 0).then(|| (i - 1) / self.shape.branching as usize)
    }

    /// Canonical indices of the children of node `i`.
    pub fn child_indices(&self, i: usize) -> std::ops::Range<usize> {
        let b = self.shape.branching as usize;
        let first = i * b + 1;
        if first >= self.labels.len() {
            first..first
        } else {
            first..first + b
        }
    }

    /// Intersection of the labels along the path from the root to each node.
    pub fn path_intersections(&self) -> Vec<Subset> {
        let mut out: Vec<Subset> = Vec::with_capacity(self.labels.len());
        for i in 0..self.labels.len() {
            let s = match self.parent_index(i) {
                None => self.labels[0].clone(),
                Some(p) => out[p].intersection(&self.labels[i]),
            };
            out.push(s);
        }
        out
    }

    /// The same tree with each label replaced by its path intersection.
    pub fn path_intersected(&self) -> LabeledTree {
        LabeledTree {
            shape: self.shape,
            domain_size: self.domain_size,
            labels: self.path_intersections(),
        }
    }

    /// `label(ν) ⊇ label(η)` whenever `ν ⊴ η`.
    pub fn is_path_monotone(&self) -> bool {
        (1..self.labels.len()).all(|i| {
            let p = self.parent_index(i).unwrap();
            self.labels[i].is_subset(&self.labels[p])
        })
    }
}

impl Serialize for LabeledTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Labels<'a>(&'a LabeledTree);
        impl Serialize for Labels<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let t = self.0;
                let nodes = t.shape.nodes();
                let mut m = s.serialize_map(Some(nodes.len().saturating_sub(1)))?;
                for (n, l) in nodes.iter().zip(&t.labels).skip(1) {
                    m.serialize_entry(&n.to_string(), l)?;
                }
                m.end()
            }
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            branching: u32,
            depth: usize,
            domain_size: usize,
            labels: Labels<'a>,
        }
        Repr {
            branching: self.shape.branching,
            depth: self.shape.depth,
            domain_size: self.domain_size,
            labels: Labels(self),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Repr {
            branching: u32,
            depth: usize,
            domain_size: Option<usize>,
            labels: BTreeMap<Node, Subset>,
        }
        let r = Repr::deserialize(d)?;
        let shape = TreeShape::new(r.branching, r.depth).map_err(D::Error::custom)?;
        let inferred = r.labels.values().map(Subset::domain_size).max().unwrap_or(0);
        let domain = r.domain_size.unwrap_or(inferred);
        LabeledTree::from_map(shape, domain, &r.labels).map_err(D::Error::custom)
    }
}

/// A rows × cols array of subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InpArray {
    pub rows: usize,
    pub cols: usize,
    pub domain_size: usize,
    pub cells: Vec<Vec<Subset>>,
}

impl InpArray {
    pub fn from_fn(rows: usize, cols: usize, domain_size: usize, mut f: impl FnMut(usize, usize) -> Subset) -> Self {
        let cells = (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        let mut s = f(i, j);
                        s.resize(domain_size);
                        s
                    })
                    .collect()
            })
            .collect();
        InpArray {
            rows,
            cols,
            domain_size,
            cells,
        }
    }

    pub fn cell(&self, i: usize, j: usize) -> &Subset {
        &self.cells[i][j]
    }

    fn validate(mut self) -> Result<Self, PatternError> {
        if self.cells.len() != self.rows || self.cells.iter().any(|r| r.len() != self.cols) {
            return Err(PatternError::Malformed(format!(
                "array is not {}x{}",
                self.rows, self.cols
            )));
        }
        for (i, row) in self.cells.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                if c.domain_size() > self.domain_size {
                    return Err(PatternError::OutsideDomain(format!("cell ({i},{j})")));
                }
                c.resize(self.domain_size);
            }
        }
        Ok(self)
    }
}

impl<'de> Deserialize<'de> for InpArray {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            domain_size: Option<usize>,
            cells: Vec<Vec<Subset>>,
        }
        let r = Repr::deserialize(d)?;
        let inferred = r.cells.iter().flatten().map(Subset::domain_size).max().unwrap_or(0);
        InpArray {
            rows: r.rows,
            cols: r.cols,
            domain_size: r.domain_size.unwrap_or(inferred),
            cells: r.cells,
        }
        .validate()
        .map_err(D::Error::custom)
    }
}
