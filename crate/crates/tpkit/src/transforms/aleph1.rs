use serde::{Deserialize, Serialize};

use super::{cdt_bounds, checked_output, verified_input, Provenance, TransformError, Transformed};
use crate::patterns::{intersect_all, Certificate, Kind};
use crate::treeidx::{Node, TreeShape};
use crate::treeops::{apply_intersect, stretching, widening};

/// What [`aleph1_stage`] found and checked at the processed level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aleph1Report {
    /// Processed level of the output tree.
    pub level: usize,
    /// Least `k` with the first `2^k` spine branches jointly inconsistent.
    pub minimal_k: u32,
    /// Chain length the branches were stretched by.
    #[serde(rename = "N")]
    pub n: usize,
    /// Sibling pairs on the zero spine at `level`.
    pub pairs: Vec<(Node, Node)>,
    pub all_inconsistent: bool,
}

/// One finite stage at level `n + 1`.
///
/// Labels are first replaced by their path intersections. With `R` the
/// number of levels from `n + 1` down to the leaves, the least `k` with
/// `2^k <= b` is chosen so that the chains `0^n⌢i⌢0^{R-1}` for `i < 2^k`
/// have empty joint intersection, then the least chain length `N` that keeps
/// it empty. The output is the `N`-fold stretch at level `n + 1` followed by
/// the `2^{k-1}`-fold widening there.
pub fn aleph1_stage(c: &Certificate, n: usize) -> Result<(Transformed, Aleph1Report), TransformError> {
    let name = "aleph1_stage";
    let t = c
        .as_tree()
        .ok_or_else(|| TransformError::Precondition("expected a tree payload".into()))?;
    let shape = t.shape;
    let bounds = cdt_bounds(&c.kind, shape.depth).ok_or_else(|| TransformError::WrongKind {
        expected: "cdt".into(),
        got: c.kind.clone(),
    })?;
    if n + 2 > shape.depth {
        return Err(TransformError::Precondition(format!(
            "level {} is not labeled at depth {}",
            n + 1,
            shape.depth
        )));
    }
    verified_input(c)?;
    let p = t.path_intersected();
    let b = shape.branching;
    let reach = shape.depth - 1 - n;
    let chains_meet = |count: u32, len: usize| {
        let nodes: Vec<Node> = (0..count)
            .map(|i| Node::zeros(n).child(i).concat(&vec![0; len - 1]))
            .collect();
        !intersect_all(p.domain_size, nodes.iter().map(|x| p.label(x))).is_empty()
    };
    let k = (1..)
        .take_while(|&k| 1u64 << k <= u64::from(b))
        .find(|&k| !chains_meet(1 << k, reach))
        .ok_or_else(|| {
            TransformError::Precondition(format!(
                "no k with 2^k <= {b} makes the spine branches at level {} inconsistent",
                n + 1
            ))
        })?;
    let big_n = (1..=reach).find(|&l| !chains_meet(1 << k, l)).expect("l = reach works");
    let group = 1u32 << (k - 1);
    let out_shape = TreeShape::new(b / group, shape.depth - big_n + 1).expect("branching >= 2");
    let w = widening(group, n + 1, out_shape)?;
    let s = stretching(big_n, n + 1, w.source)?;
    let map = w.then(&s)?.with_source(shape)?;
    let out = apply_intersect(&map, &p)?;

    let out_bounds: Vec<usize> = (1..out_shape.depth)
        .map(|l| if l <= n + 1 { bounds[l - 1] } else { bounds[l + big_n - 2] })
        .collect();
    let spine: Vec<Node> = (0..b / group).map(|i| Node::zeros(n).child(i)).collect();
    let pairs: Vec<(Node, Node)> = spine
        .iter()
        .enumerate()
        .flat_map(|(i, x)| spine[i + 1..].iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let all_inconsistent = pairs.iter().all(|(x, y)| out.label(x).is_disjoint(out.label(y)));

    let mut prov = Provenance::new(name);
    prov.case_fired = Some(format!("level {}", n + 1));
    prov.minimal_k = Some(k as usize);
    prov.n = Some(big_n);
    prov.ops_applied = vec![w.reference(), s.reference()];
    let cert = checked_output(name, Certificate::tree(Kind::Cdt { n: out_bounds }, out))?;
    let report = Aleph1Report {
        level: n + 1,
        minimal_k: k,
        n: big_n,
        pairs,
        all_inconsistent,
    };
    Ok((
        Transformed {
            certificate: cert,
            provenance: prov,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::allowance_tree;
    use crate::patterns::{canonical_witness, Dims, LabeledTree, Subset};

    fn sh(b: u32, d: usize) -> TreeShape {
        TreeShape::new(b, d).unwrap()
    }

    #[test]
    fn canonical_sop2_is_near_identity() {
        let c = canonical_witness(&Kind::Sop2, Dims::Tree(sh(2, 4)), Default::default()).unwrap();
        let t = c.as_tree().unwrap().clone();
        let c = Certificate::tree(Kind::CdtN { n: 2 }, t.clone());
        for n in 0..3 {
            let (out, rep) = aleph1_stage(&c, n).unwrap();
            assert_eq!((rep.minimal_k, rep.n), (1, 1));
            assert!(rep.all_inconsistent);
            assert_eq!(out.certificate.as_tree().unwrap().labels(), t.labels());
        }
    }

    #[test]
    fn three_wise_overlapping_width_four() {
        // Element x lies in every level-1 label but the x-th.
        let t = LabeledTree::from_fn(sh(4, 2), 4, |nd| {
            let i = nd.entries()[0] as usize;
            Subset::from_elems(4, (0..4).filter(|&x| x != i))
        });
        let c = Certificate::tree(Kind::Cdt { n: vec![4] }, t);
        let (out, rep) = aleph1_stage(&c, 0).unwrap();
        assert_eq!(rep.minimal_k, 2);
        assert_eq!(out.certificate.as_tree().unwrap().shape, sh(2, 2));
        assert_eq!(rep.pairs.len(), 1);
        assert!(rep.all_inconsistent);
    }

    #[test]
    fn allowance_trees_get_k_from_allowance() {
        for (allow, k) in [([1, 2, 1], 1), ([3, 1, 2], 2), ([2, 1, 3], 2)] {
            let t = allowance_tree(sh(4, 4), &allow, 200_000).unwrap();
            let bounds: Vec<usize> = allow.iter().map(|c| c + 1).collect();
            let c = Certificate::tree(Kind::Cdt { n: bounds }, t);
            let (out, rep) = aleph1_stage(&c, 0).unwrap();
            assert_eq!(rep.minimal_k, k, "{allow:?}");
            assert_eq!(rep.n, 1);
            assert!(rep.all_inconsistent);
            assert!(out.certificate.is_verified());
        }
    }

    #[test]
    fn narrow_tree_has_no_k() {
        let t = LabeledTree::from_fn(sh(2, 2), 1, |_| Subset::full(1));
        let c = Certificate::tree(Kind::Cdt { n: vec![3] }, t);
        assert!(matches!(aleph1_stage(&c, 0), Err(TransformError::Precondition(_))));
        assert!(matches!(aleph1_stage(&c, 1), Err(TransformError::Precondition(_))));
    }
}
