use super::{checked_output, verified_input, Provenance, TransformError, Transformed};
use crate::patterns::{Certificate, Kind};
use crate::treeidx::TreeShape;
use crate::treeops::{apply_intersect, binary_restriction, comb_embedding};

/// Pulls a binary sop2-pattern back along the comb embedding onto `target`,
/// giving a tp1-pattern there.
pub fn comb_transport(c: &Certificate, target: TreeShape) -> Result<Transformed, TransformError> {
    let name = "comb_transport";
    let t = c
        .as_tree()
        .ok_or_else(|| TransformError::Precondition("expected a tree payload".into()))?;
    let binary_ok = matches!(c.kind, Kind::Sop2 | Kind::Tp1 | Kind::Sct) && t.shape.branching == 2;
    if !binary_ok {
        return Err(TransformError::WrongKind {
            expected: "sop2 on a binary tree".into(),
            got: c.kind.clone(),
        });
    }
    verified_input(c)?;
    let h = comb_embedding(target)?.with_source(t.shape)?;
    let out = apply_intersect(&h, t)?;
    let mut prov = Provenance::new(name);
    prov.ops_applied = vec![h.reference()];
    let cert = checked_output(name, Certificate::tree(Kind::Tp1, out))?;
    Ok(Transformed {
        certificate: cert,
        provenance: prov,
    })
}

/// Restricts a tp1-pattern to its binary subtree of the same depth.
pub fn tp1_to_sop2(c: &Certificate) -> Result<Transformed, TransformError> {
    let name = "tp1_to_sop2";
    let t = c
        .as_tree()
        .ok_or_else(|| TransformError::Precondition("expected a tree payload".into()))?;
    if !matches!(c.kind, Kind::Tp1 | Kind::Sct | Kind::Sop2) {
        return Err(TransformError::WrongKind {
            expected: "tp1".into(),
            got: c.kind.clone(),
        });
    }
    verified_input(c)?;
    let target = TreeShape::new(2, t.shape.depth).expect("branching 2");
    let r = binary_restriction(target, t.shape)?;
    let out = apply_intersect(&r, t)?;
    let mut prov = Provenance::new(name);
    prov.ops_applied = vec![r.reference()];
    let cert = checked_output(name, Certificate::tree(Kind::Sop2, out))?;
    Ok(Transformed {
        certificate: cert,
        provenance: prov,
    })
}
