use super::{NodeMap, OpError};
use crate::patterns::{intersect_all, LabeledTree, Subset};
use crate::treeidx::TreeShape;

/// Target nodes labeled by the tuple of source labels of their image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleLabeledTree {
    pub shape: TreeShape,
    pub domain_size: usize,
    /// Canonical target order.
    pub labels: Vec<Vec<Subset>>,
}

fn check_source(m: &NodeMap, t: &LabeledTree) -> Result<(), OpError> {
    if m.source != t.shape {
        return Err(OpError::ShapeMismatch {
            expected: m.source,
            got: t.shape,
        });
    }
    Ok(())
}

/// Pulls labels back along `m`, keeping the whole image tuple.
pub fn apply_tuplewise(m: &NodeMap, t: &LabeledTree) -> Result<TupleLabeledTree, OpError> {
    check_source(m, t)?;
    let labels = m
        .images()
        .iter()
        .map(|img| img.iter().map(|n| t.label(n).clone()).collect())
        .collect();
    Ok(TupleLabeledTree {
        shape: m.target,
        domain_size: t.domain_size,
        labels,
    })
}

/// Pulls labels back along `m`, intersecting over each image tuple.
pub fn apply_intersect(m: &NodeMap, t: &LabeledTree) -> Result<LabeledTree, OpError> {
    check_source(m, t)?;
    let target = m.target;
    let images = m.images();
    Ok(LabeledTree::from_fn(target, t.domain_size, |n| {
        let i = target.index_of(n).expect("target node");
        intersect_all(t.domain_size, images[i].iter().map(|s| t.label(s)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeidx::Node;
    use crate::treeops::{elongation, widening};

    #[test]
    fn intersect_pulls_back() {
        let src = TreeShape::new(2, 3).unwrap();
        let t = LabeledTree::from_fn(src, 8, |n| Subset::from_elems(8, [src.index_of(n).unwrap()]));
        let w = widening(2, 1, TreeShape::new(1, 2).unwrap()).unwrap();
        let w = w.with_source(src).unwrap();
        let out = apply_intersect(&w, &t).unwrap();
        let img = w.image(&Node::from([0])).unwrap().to_vec();
        let expect = intersect_all(8, img.iter().map(|n| t.label(n)));
        assert_eq!(out.label(&Node::from([0])), &expect);
        let tup = apply_tuplewise(&w, &t).unwrap();
        assert_eq!(tup.labels[1].len(), img.len());
        let e = elongation(3, TreeShape::new(2, 2).unwrap()).unwrap();
        assert!(matches!(apply_intersect(&e, &t), Err(OpError::ShapeMismatch { .. })));
    }
}
