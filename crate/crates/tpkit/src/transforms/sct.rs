use super::{cdt_bounds, ceil_half, checked_output, verified_input, Provenance, TransformError, Transformed};
use crate::patterns::{
    check_tree_kind, intersect_all, Certificate, InpArray, Kind, LabeledTree, Violation,
};
use crate::treeidx::{Node, TreeShape};
use crate::treeops::{apply_intersect, elongation, restriction, widening};

fn tree_of(c: &Certificate) -> Result<&LabeledTree, TransformError> {
    c.as_tree()
        .ok_or_else(|| TransformError::Precondition("expected a tree payload".into()))
}

/// Replaces every label by the intersection along its path; a cdt-pattern
/// with 2-inconsistent sibling families becomes an sct-pattern.
pub fn cdt2_to_sct(c: &Certificate) -> Result<Transformed, TransformError> {
    let t = tree_of(c)?;
    match cdt_bounds(&c.kind, t.shape.depth) {
        Some(n) if n.iter().all(|&x| x == 2) => {}
        _ => {
            return Err(TransformError::WrongKind {
                expected: "cdt with all bounds 2".into(),
                got: c.kind.clone(),
            })
        }
    }
    verified_input(c)?;
    let out = checked_output("cdt2_to_sct", Certificate::tree(Kind::Sct, t.path_intersected()))?;
    Ok(Transformed {
        certificate: out,
        provenance: Provenance::new("cdt2_to_sct"),
    })
}

fn sct_bound(kind: &Kind) -> Option<usize> {
    match kind {
        Kind::SctK { k } | Kind::KTp1 { k } => Some(*k),
        Kind::Sct | Kind::Tp1 | Kind::Sop2 => Some(2),
        _ => None,
    }
}

/// One halving step on an sct-pattern of depth `m*m` (shape depth
/// `m*m + 1`), giving a cdt-pattern of depth `m`.
///
/// Block `i` covers levels `i*m+1 ..= i*m+m`. If the two leftmost zero
/// chains of some block intersect, the least such block is cut out of a
/// 2-fold widening (bound `max(2, ceil(k/2))`); otherwise the `m`-fold
/// elongation gives 2-inconsistent siblings.
pub fn sctk_to_cdt2_step(c: &Certificate, m: usize) -> Result<Transformed, TransformError> {
    let name = "sctk_to_cdt2_step";
    let t = tree_of(c)?;
    let k = sct_bound(&c.kind).ok_or_else(|| TransformError::WrongKind {
        expected: "sct_k".into(),
        got: c.kind.clone(),
    })?;
    if m == 0 {
        return Err(TransformError::Precondition("m must be positive".into()));
    }
    let need = m * m + 1;
    if t.shape.depth < need {
        return Err(TransformError::Precondition(format!(
            "depth {} is below {need} = m*m + 1",
            t.shape.depth
        )));
    }
    let b = t.shape.branching;
    if b < 2 {
        return Err(TransformError::Precondition("branching must be at least 2".into()));
    }
    verified_input(c)?;
    let chain = |i: usize, first: u32, l: usize| {
        let mut v = vec![0u32; i * m];
        v.push(first);
        v.extend(std::iter::repeat(0).take(l - 1));
        Node::new(v)
    };
    let gamma = |i: usize| {
        let nodes: Vec<Node> = (1..=m).flat_map(|l| [chain(i, 0, l), chain(i, 1, l)]).collect();
        intersect_all(t.domain_size, nodes.iter().map(|n| t.label(n)))
    };
    let mut prov = Provenance::new(name);
    prov.minimal_k = Some(k);
    let source = t.shape;
    match (0..m).find(|&i| !gamma(i).is_empty()) {
        Some(i) => {
            let half = TreeShape::new(b / 2, need).expect("b >= 2");
            let w = widening(2, i * m + 1, half)?.with_source(source)?;
            let levels: Vec<usize> = (i * m..=i * m + m).collect();
            let r = restriction(&levels, half)?;
            let map = r.then(&w)?;
            let out = apply_intersect(&map, t)?;
            // Singleton sibling families are 2-inconsistent.
            let bound = if half.branching < 2 { 2 } else { ceil_half(k) };
            prov.case_fired = Some(format!("1 (block {i})"));
            prov.ops_applied = vec![r.reference(), w.reference()];
            let cert = checked_output(name, Certificate::tree(Kind::CdtN { n: bound }, out))?;
            Ok(Transformed {
                certificate: cert,
                provenance: prov,
            })
        }
        None => {
            let target = TreeShape::new(b, m + 1).expect("b >= 2");
            let e = elongation(m, target)?;
            let e = e.with_source(source)?;
            let out = apply_intersect(&e, t)?;
            prov.case_fired = Some("2".into());
            prov.ops_applied = vec![e.reference()];
            let cert = checked_output(name, Certificate::tree(Kind::CdtN { n: 2 }, out))?;
            Ok(Transformed {
                certificate: cert,
                provenance: prov,
            })
        }
    }
}

/// Repeats [`sctk_to_cdt2_step`] until the sibling bound reaches 2, using
/// the largest square block count the current depth allows.
pub fn sctk_to_cdt2(c: &Certificate) -> Result<(Transformed, Vec<Provenance>), TransformError> {
    let mut cur = c.clone();
    let mut trail = Vec::new();
    loop {
        let t = tree_of(&cur)?;
        let m = (t.shape.depth.saturating_sub(1) as f64).sqrt().floor() as usize;
        let step = sctk_to_cdt2_step(&cur, m)?;
        trail.push(step.provenance.clone());
        let bound = match step.certificate.kind {
            Kind::CdtN { n } => n,
            _ => unreachable!("step emits cdt_n"),
        };
        if bound <= 2 {
            return Ok((step, trail));
        }
        // Case 1 output is again an sct-pattern with the halved bound.
        let tree = step.certificate.as_tree().expect("tree").clone();
        cur = checked_output("sctk_to_cdt2", Certificate::tree(Kind::SctK { k: bound }, tree))?;
    }
}

/// Result of [`cdt_to_sctk_or_inp`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    Sct(Transformed),
    Inp(Transformed),
}

impl Dichotomy {
    pub fn transformed(&self) -> &Transformed {
        match self {
            Dichotomy::Sct(t) | Dichotomy::Inp(t) => t,
        }
    }
}

/// `ν* = (ν(0), 0, ν(1), 0, ...)`
fn star(nu: &Node) -> Node {
    Node::new(nu.entries().iter().flat_map(|&x| [x, 0]).collect())
}

/// From a cdt-pattern of depth `2m`, builds the candidate sct-pattern of
/// depth `m`: node `ν` gets the intersection of the labels at `(ν↾t)*` for
/// `1 <= t <= l(ν)`. If it is not `k`-sct, each consistent incomparable
/// `k`-set is tried as a source of rows, row `i` being the sibling family of
/// `ν_i*`, until one verifies as an inp-pattern.
pub fn cdt_to_sctk_or_inp(c: &Certificate, k: usize, m: usize) -> Result<Dichotomy, TransformError> {
    let name = "cdt_to_sctk_or_inp";
    let t = tree_of(c)?;
    let bounds = cdt_bounds(&c.kind, t.shape.depth).ok_or_else(|| TransformError::WrongKind {
        expected: "cdt".into(),
        got: c.kind.clone(),
    })?;
    if k < 2 {
        return Err(TransformError::Precondition("k must be at least 2".into()));
    }
    if t.shape.depth < 2 * m + 1 {
        return Err(TransformError::Precondition(format!(
            "depth {} is below {} = 2m + 1",
            t.shape.depth,
            2 * m + 1
        )));
    }
    verified_input(c)?;
    let target = TreeShape::new(t.shape.branching, m + 1).expect("branching >= 1");
    let cand = LabeledTree::from_fn(target, t.domain_size, |nu| {
        let stars: Vec<Node> = (1..=nu.level()).map(|l| star(&nu.prefix(l))).collect();
        intersect_all(t.domain_size, stars.iter().map(|s| t.label(s)))
    });
    let kind = Kind::SctK { k };
    let mut prov = Provenance::new(name);
    prov.minimal_k = Some(k);
    let v = check_tree_kind(&kind, &cand, 64)?;
    if v.ok {
        prov.case_fired = Some("sct".into());
        let cert = checked_output(name, Certificate::tree(kind, cand))?;
        return Ok(Dichotomy::Sct(Transformed {
            certificate: cert,
            provenance: prov,
        }));
    }
    let cols = t.shape.branching as usize;
    let mut tried = 0;
    for viol in &v.violations {
        let Violation::Consistent { nodes } = viol else { continue };
        tried += 1;
        let stars: Vec<Node> = nodes.iter().map(star).collect();
        let row_bounds: Vec<usize> = stars.iter().map(|s| bounds[s.level() - 1]).collect();
        let a = InpArray::from_fn(stars.len(), cols, t.domain_size, |i, j| {
            let parent = stars[i].parent().expect("nonroot");
            t.label(&parent.child(j as u32)).clone()
        });
        let cert = crate::patterns::verify(&Certificate::array(Kind::Inp { n: row_bounds }, a))?;
        if cert.is_verified() {
            prov.case_fired = Some("inp".into());
            return Ok(Dichotomy::Inp(Transformed {
                certificate: cert,
                provenance: prov,
            }));
        }
    }
    Err(TransformError::ExtractionFailed { tried })
}
