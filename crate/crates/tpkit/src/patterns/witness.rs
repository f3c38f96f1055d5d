use super::{Certificate, InpArray, Kind, LabeledTree, PatternError, Subset};
use crate::treeidx::TreeShape;

/// Upper bound on the domain size of generated witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessBudget {
    pub max_domain: usize,
}

impl Default for WitnessBudget {
    fn default() -> Self {
        WitnessBudget { max_domain: 1 << 16 }
    }
}

/// Dimensions of a tree or array payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dims {
    Tree(TreeShape),
    Array { rows: usize, cols: usize },
}

/// A verified witness of `kind` in the free set system.
///
/// Trees use the maximal paths as domain, each node labeled by the paths
/// through it; arrays use all functions `rows -> cols`, cell `(i, j)` being
/// the functions with `f(i) = j`.
pub fn canonical_witness(kind: &Kind, dims: Dims, budget: WitnessBudget) -> Result<Certificate, PatternError> {
    let too_large = |what: String| PatternError::TooLarge(format!("{what} exceeds budget {}", budget.max_domain));
    let cert = match dims {
        Dims::Tree(shape) => {
            if kind.is_array() {
                return Err(PatternError::BadParam(format!("{kind} needs array dimensions")));
            }
            let leaves = if shape.depth == 0 { 0 } else { shape.level_size(shape.depth - 1) };
            if leaves > budget.max_domain {
                return Err(too_large(format!("{leaves} maximal paths")));
            }
            let first = shape.node_count() - leaves;
            let t = LabeledTree::from_fn(shape, leaves, |n| {
                let mut s = Subset::empty(leaves);
                for leaf in first..first + leaves {
                    if n.is_prefix_of(&shape.node_at(leaf).expect("leaf index")) {
                        s.insert(leaf - first);
                    }
                }
                s
            });
            Certificate::tree(kind.clone(), t)
        }
        Dims::Array { rows, cols } => {
            if !kind.is_array() {
                return Err(PatternError::BadParam(format!("{kind} needs a tree shape")));
            }
            let m = u32::try_from(rows)
                .ok()
                .and_then(|r| cols.checked_pow(r))
                .filter(|&m| m <= budget.max_domain)
                .ok_or_else(|| too_large(format!("{cols}^{rows} functions")))?;
            let a = InpArray::from_fn(rows, cols, m, |i, j| {
                let stride = cols.pow((rows - 1 - i) as u32);
                Subset::from_elems(m, (0..m).filter(|f| (f / stride) % cols == j))
            });
            Certificate::array(kind.clone(), a)
        }
    };
    super::verify(&cert)
}

/// Reads an array as a tree of depth `rows`: a node of level `l` gets the
/// cell of row `l-1` picked by its last entry.
pub fn cdt_from_inp(a: &InpArray, n: &[usize]) -> Result<Certificate, PatternError> {
    if n.len() != a.rows {
        return Err(PatternError::BadParam(format!("{} bounds for {} rows", n.len(), a.rows)));
    }
    let cols = u32::try_from(a.cols).map_err(|_| PatternError::TooLarge("column count".into()))?;
    let shape = TreeShape::new(cols, a.rows + 1).map_err(|e| PatternError::BadParam(e.to_string()))?;
    let t = LabeledTree::from_fn(shape, a.domain_size, |node| {
        let l = node.level();
        a.cell(l - 1, node.last().expect("non-root") as usize).clone()
    });
    super::verify(&Certificate::tree(Kind::Cdt { n: n.to_vec() }, t))
}
