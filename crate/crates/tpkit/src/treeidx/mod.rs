//! Tree-index algebra on ω^{<ω}: orders, meets, levels and canonical
//! quantifier-free types.

mod node;
mod qftp;
mod shape;

pub use node::Node;
pub use qftp::{meet_closure, meet_closure_lex, qftp, term_pairs, Lang, QfType};
pub use shape::{enumerate, Enumeration, TreeShape};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("cannot parse node {0:?}")]
    ParseNode(String),
    #[error("cannot parse shape {0:?} (expected BxD)")]
    ParseShape(String),
    #[error("branching must be at least 1")]
    ZeroBranching,
    #[error("node {node} is not in shape {shape}")]
    OutOfShape { node: Node, shape: TreeShape },
    #[error("distant-sibling test needs at least 2 distinct nodes, got {0}")]
    TooFewNodes(usize),
}

pub fn meet(a: &Node, b: &Node) -> Node {
    a.meet(b)
}

/// `a ⊴ b`
pub fn tree_le(a: &Node, b: &Node) -> bool {
    a.is_prefix_of(b)
}

/// `a <_lex b`
pub fn lex_lt(a: &Node, b: &Node) -> bool {
    a < b
}

/// True iff the nodes are pairwise incomparable and all pairwise meets of
/// distinct members coincide. Duplicates are ignored.
pub fn is_distant_siblings(s: &[Node]) -> Result<bool, TreeError> {
    let mut set = s.to_vec();
    set.sort();
    set.dedup();
    if set.len() < 2 {
        return Err(TreeError::TooFewNodes(set.len()));
    }
    let m = set[0].meet(&set[1]);
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            if set[i].is_comparable(&set[j]) || set[i].meet(&set[j]) != m {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: &[u32]) -> Node {
        Node::new(v.to_vec())
    }

    #[test]
    fn distant_siblings_examples() {
        assert!(is_distant_siblings(&[n(&[0]), n(&[1]), n(&[2])]).unwrap());
        assert!(!is_distant_siblings(&[n(&[0, 0]), n(&[0, 1]), n(&[1])]).unwrap());
        assert!(is_distant_siblings(&[n(&[0, 1]), n(&[0, 2])]).unwrap());
        // all meets are the root, yet the root is below the other two
        assert!(!is_distant_siblings(&[n(&[]), n(&[0]), n(&[1])]).unwrap());
        assert!(!is_distant_siblings(&[n(&[0]), n(&[0, 1])]).unwrap());
        assert_eq!(
            is_distant_siblings(&[n(&[0]), n(&[0])]),
            Err(TreeError::TooFewNodes(1))
        );
    }

    #[test]
    fn lex_examples() {
        assert!(lex_lt(&n(&[]), &n(&[0])));
        assert!(lex_lt(&n(&[0, 5]), &n(&[1])));
        assert!(!lex_lt(&n(&[1]), &n(&[0, 9])));
        assert!(tree_le(&n(&[]), &n(&[4, 4])));
        assert_eq!(meet(&n(&[0, 1]), &n(&[0, 2])), n(&[0]));
    }

    #[test]
    fn exhaustive_algebra_on_3x4() {
        let nodes = TreeShape::new(3, 4).unwrap().nodes();
        for a in &nodes {
            assert!(!lex_lt(a, a));
            for b in &nodes {
                let ab = meet(a, b);
                assert_eq!(ab, meet(b, a));
                assert!(tree_le(&ab, a));
                if a != b {
                    assert!(lex_lt(a, b) ^ lex_lt(b, a));
                }
                if tree_le(a, b) && a != b {
                    assert!(lex_lt(a, b));
                }
                for c in &nodes {
                    let abc = meet(&ab, c);
                    assert_eq!(abc, meet(a, &meet(b, c)));
                    let ac = meet(a, c);
                    let shorter = if ab.level() <= ac.level() { &ab } else { &ac };
                    assert_eq!(&abc, shorter);
                    if lex_lt(a, b) && lex_lt(b, c) {
                        assert!(lex_lt(a, c));
                    }
                }
            }
        }
    }
}
