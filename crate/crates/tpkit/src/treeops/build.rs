use super::{NodeMap, OpDesc, OpError};
use crate::treeidx::{Node, TreeShape};

fn invalid(msg: impl Into<String>) -> OpError {
    OpError::InvalidParam(msg.into())
}

fn validate(op: &OpDesc, target: TreeShape) -> Result<(), OpError> {
    match op {
        OpDesc::Widening { k, n } => {
            if *k == 0 {
                return Err(invalid("widening needs k >= 1"));
            }
            if *n == 0 {
                return Err(invalid("widening needs level n >= 1"));
            }
        }
        OpDesc::Stretching { k, .. } | OpDesc::Elongation { k } if *k == 0 => {
            return Err(invalid("k must be at least 1"));
        }
        OpDesc::Fattening { .. } | OpDesc::BinaryRestriction if target.branching != 2 => {
            return Err(invalid("target must be binary"));
        }
        OpDesc::Restriction { levels } => {
            if levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("restriction levels must be strictly increasing"));
            }
            if levels.len() != target.depth {
                return Err(invalid(format!(
                    "restriction to {} levels yields depth {}, not {}",
                    levels.len(),
                    levels.len(),
                    target.depth
                )));
            }
        }
        OpDesc::Compose { .. } => {
            return Err(invalid("compose node maps with NodeMap::then"));
        }
        _ => {}
    }
    Ok(())
}

/// `η̃`: entry `η(i/k)` at multiples of `k`, zero elsewhere; the root is kept.
pub fn elongation_tilde(k: usize, eta: &Node) -> Node {
    let l = eta.level();
    if l == 0 {
        return Node::root();
    }
    let len = k * (l - 1) + 1;
    Node::new(
        (0..len)
            .map(|i| if i % k == 0 { eta.entries()[i / k] } else { 0 })
            .collect(),
    )
}

/// `h(β⌢⟨i⟩) = h(β)⌢1^i⌢0`
pub fn comb_node(eta: &Node) -> Node {
    let mut v = Vec::new();
    for &i in eta.entries() {
        v.extend(std::iter::repeat(1).take(i as usize));
        v.push(0);
    }
    Node::new(v)
}

/// `h(η⌢⟨i⟩) = h(η)⌢0⌢⟨i⟩`
pub fn spread_node(eta: &Node) -> Node {
    Node::new(eta.entries().iter().flat_map(|&i| [0, i]).collect())
}

/// `h_n`: spread below level `n`, literal copy of the suffix above it.
pub fn spread_node_at(n: usize, eta: &Node) -> Node {
    if eta.level() <= n {
        return spread_node(eta);
    }
    spread_node(&eta.prefix(n)).concat(&eta.entries()[n..])
}

fn image_of(op: &OpDesc, eta: &Node) -> Vec<Node> {
    let l = eta.level();
    match op {
        OpDesc::Identity | OpDesc::BinaryRestriction => vec![eta.clone()],
        OpDesc::Widening { k, n } => {
            if l < *n {
                return vec![eta.clone()];
            }
            let nu = eta.prefix(n - 1);
            let i = eta.entries()[n - 1];
            let xi = &eta.entries()[*n..];
            (0..*k).map(|r| nu.child(k * i + r).concat(xi)).collect()
        }
        OpDesc::Stretching { k, n } => {
            if l < *n {
                vec![eta.clone()]
            } else if l == *n {
                (0..*k).map(|r| eta.concat(&vec![0; r])).collect()
            } else {
                let nu = eta.prefix(*n).concat(&vec![0; k - 1]);
                vec![nu.concat(&eta.entries()[*n..])]
            }
        }
        OpDesc::Fattening { k } => (0..1u32 << k)
            .map(|bits| {
                let nu: Vec<u32> = (0..*k).map(|p| (bits >> (k - 1 - p)) & 1).collect();
                Node::new(nu).concat(eta.entries())
            })
            .collect(),
        OpDesc::Restriction { levels } => {
            let len = levels[l];
            let mut v = vec![0u32; len];
            for (t, &x) in eta.entries().iter().enumerate() {
                v[levels[t]] = x;
            }
            vec![Node::new(v)]
        }
        OpDesc::Elongation { k } => {
            let t = elongation_tilde(*k, eta);
            if l == 0 {
                return vec![t];
            }
            (0..*k).map(|r| t.concat(&vec![0; r])).collect()
        }
        OpDesc::Comb => vec![comb_node(eta)],
        OpDesc::Spread => vec![spread_node(eta)],
        OpDesc::SpreadAt { n } => vec![spread_node_at(*n, eta)],
        OpDesc::Compose { .. } => unreachable!("rejected by validate"),
    }
}

/// Minimal source shape for which the operation is total on `target`.
pub fn required_source_shape(op: &OpDesc, target: TreeShape) -> Result<TreeShape, OpError> {
    validate(op, target)?;
    let b = target.branching;
    let d = target.depth;
    let top = d.saturating_sub(1);
    let shape = |b, d| TreeShape { branching: b, depth: d };
    Ok(match op {
        OpDesc::Identity | OpDesc::BinaryRestriction => target,
        OpDesc::Widening { k, n } => {
            if d > *n {
                shape(k * b, d)
            } else {
                target
            }
        }
        OpDesc::Stretching { k, n } => {
            if d > *n {
                shape(b, d + k - 1)
            } else {
                target
            }
        }
        OpDesc::Fattening { k } => shape(2, d + k),
        OpDesc::Restriction { levels } => shape(b, levels.last().map_or(0, |m| m + 1)),
        OpDesc::Elongation { k } => shape(b, if d == 0 { 0 } else { k * top + 1 }),
        OpDesc::Comb => shape(2, if d == 0 { 0 } else { b as usize * top + 1 }),
        OpDesc::Spread => shape(b.max(1), if d == 0 { 0 } else { 2 * top + 1 }),
        OpDesc::SpreadAt { n } => {
            let len = if top <= *n { 2 * top } else { n + top };
            shape(b, if d == 0 { 0 } else { len + 1 })
        }
        OpDesc::Compose { .. } => unreachable!(),
    })
}

/// Builds the node map of `op` on `target`; `source` defaults to the minimal
/// shape and must contain every image node otherwise.
pub fn build(op: OpDesc, target: TreeShape, source: Option<TreeShape>) -> Result<NodeMap, OpError> {
    let required = required_source_shape(&op, target)?;
    let image: Vec<Vec<Node>> = target.nodes().iter().map(|n| image_of(&op, n)).collect();
    let m = NodeMap::from_parts(op, required, target, image)?;
    let m = match source {
        None => m,
        Some(s) => m.with_source(s)?,
    };
    if let OpDesc::Restriction { levels } = &m.op {
        check_isomorphism(&m, levels)?;
    }
    Ok(m)
}

fn check_isomorphism(m: &NodeMap, levels: &[usize]) -> Result<(), OpError> {
    let nodes = m.target.nodes();
    let img: Vec<&Node> = m.images().iter().map(|t| &t[0]).collect();
    for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            let (a, b) = (&nodes[i], &nodes[j]);
            let (x, y) = (img[i], img[j]);
            let meet_ok = m
                .image(&a.meet(b))
                .map(|t| t[0] == x.meet(y))
                .unwrap_or(false);
            if a.is_prefix_of(b) != x.is_prefix_of(y) || (a < b) != (x < y) || !meet_ok {
                return Err(OpError::NotIsomorphic {
                    levels: levels.to_vec(),
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    Ok(())
}

pub fn identity(target: TreeShape) -> NodeMap {
    build(OpDesc::Identity, target, None).expect("identity is total")
}

pub fn widening(k: u32, n: usize, target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::Widening { k, n }, target, None)
}

pub fn stretching(k: usize, n: usize, target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::Stretching { k, n }, target, None)
}

/// The fattening map together with the stump `2^{<k}` in canonical order.
pub fn fattening(k: usize, target: TreeShape) -> Result<(NodeMap, Vec<Node>), OpError> {
    let m = build(OpDesc::Fattening { k }, target, None)?;
    let stump = TreeShape { branching: 2, depth: k }.nodes();
    Ok((m, stump))
}

/// Restriction of `source` to the level set `levels`; the target has depth
/// `|levels|`.
pub fn restriction(levels: &[usize], source: TreeShape) -> Result<NodeMap, OpError> {
    let mut w = levels.to_vec();
    w.sort_unstable();
    w.dedup();
    if let Some(&m) = w.last() {
        if m >= source.depth {
            return Err(invalid(format!(
                "level {m} is outside source depth {}",
                source.depth
            )));
        }
    }
    let target = TreeShape {
        branching: source.branching,
        depth: w.len(),
    };
    build(OpDesc::Restriction { levels: w }, target, Some(source))
}

pub fn elongation(k: usize, target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::Elongation { k }, target, None)
}

pub fn comb_embedding(target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::Comb, target, None)
}

pub fn spread_embedding(target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::Spread, target, None)
}

pub fn spread_embedding_at(n: usize, target: TreeShape) -> Result<NodeMap, OpError> {
    build(OpDesc::SpreadAt { n }, target, None)
}

pub fn binary_restriction(target: TreeShape, source: TreeShape) -> Result<NodeMap, OpError> {
    if source.branching < 2 {
        return Err(invalid("source must have branching at least 2"));
    }
    build(OpDesc::BinaryRestriction, target, Some(source))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: &[u32]) -> Node {
        Node::new(v.to_vec())
    }
    fn sh(b: u32, d: usize) -> TreeShape {
        TreeShape::new(b, d).unwrap()
    }

    fn is_identity(m: &NodeMap) -> bool {
        m.target
            .nodes()
            .iter()
            .all(|x| m.image(x).unwrap() == std::slice::from_ref(x))
    }

    #[test]
    fn widening_examples() {
        assert!(is_identity(&widening(1, 1, sh(3, 3)).unwrap()));
        let m = widening(2, 1, sh(2, 2)).unwrap();
        assert_eq!(m.image(&n(&[1])).unwrap(), &[n(&[2]), n(&[3])]);
        let m = widening(2, 1, sh(2, 3)).unwrap();
        assert_eq!(m.image(&n(&[1, 0])).unwrap(), &[n(&[2, 0]), n(&[3, 0])]);
        assert_eq!(m.source, sh(4, 3));
        assert_eq!(
            m.map_tuple(&[n(&[0]), n(&[1])]).unwrap(),
            vec![n(&[0]), n(&[1]), n(&[2]), n(&[3])]
        );
        assert!(widening(2, 0, sh(2, 2)).is_err());
    }

    #[test]
    fn stretching_examples() {
        assert!(is_identity(&stretching(1, 1, sh(2, 3)).unwrap()));
        let m = stretching(2, 1, sh(2, 2)).unwrap();
        assert_eq!(m.image(&n(&[1])).unwrap(), &[n(&[1]), n(&[1, 0])]);
        let m = stretching(2, 0, sh(2, 2)).unwrap();
        assert_eq!(m.image(&n(&[1])).unwrap(), &[n(&[0, 1])]);
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[]), n(&[0])]);
        assert_eq!(stretching(2, 1, sh(2, 3)).unwrap().source, sh(2, 4));
    }

    #[test]
    fn fattening_examples() {
        let (m, stump) = fattening(0, sh(2, 3)).unwrap();
        assert!(is_identity(&m));
        assert!(stump.is_empty());
        let (m, stump) = fattening(1, sh(2, 2)).unwrap();
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[0]), n(&[1])]);
        assert_eq!(stump, vec![n(&[])]);
        let (m, stump) = fattening(2, sh(2, 3)).unwrap();
        for x in sh(2, 3).nodes() {
            assert_eq!(m.image(&x).unwrap().len(), 4);
        }
        assert_eq!(
            m.image(&n(&[1])).unwrap(),
            &[n(&[0, 0, 1]), n(&[0, 1, 1]), n(&[1, 0, 1]), n(&[1, 1, 1])]
        );
        assert_eq!(stump, vec![n(&[]), n(&[0]), n(&[1])]);
        assert!(fattening(1, sh(3, 2)).is_err());
    }

    #[test]
    fn restriction_examples() {
        assert!(is_identity(&restriction(&[0, 1, 2], sh(2, 3)).unwrap()));
        let m = restriction(&[1], sh(2, 3)).unwrap();
        assert_eq!(m.target, sh(2, 1));
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[0])]);
        let m = restriction(&[1, 2], sh(2, 4)).unwrap();
        assert_eq!(m.target, sh(2, 2));
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[0])]);
        assert_eq!(m.image(&n(&[1])).unwrap(), &[n(&[0, 1])]);
        let m = restriction(&[0, 2], sh(2, 3)).unwrap();
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[])]);
        assert_eq!(m.image(&n(&[1])).unwrap(), &[n(&[1, 0])]);
        assert!(restriction(&[3], sh(2, 3)).is_err());
    }

    #[test]
    fn restriction_is_isomorphism_for_all_level_sets() {
        let src = sh(2, 5);
        for mask in 1u32..(1 << 5) {
            let w: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
            restriction(&w, src).unwrap();
        }
    }

    #[test]
    fn elongation_examples() {
        assert!(is_identity(&elongation(1, sh(3, 3)).unwrap()));
        let m = elongation(2, sh(4, 3)).unwrap();
        assert_eq!(
            m.image(&n(&[3, 2])).unwrap(),
            &[n(&[3, 0, 2]), n(&[3, 0, 2, 0])]
        );
        assert_eq!(m.image(&n(&[3])).unwrap(), &[n(&[3]), n(&[3, 0])]);
        assert_eq!(m.image(&n(&[])).unwrap(), &[n(&[])]);
        assert_eq!(elongation(2, sh(2, 3)).unwrap().source, sh(2, 5));
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(comb_node(&n(&[])), n(&[]));
        assert_eq!(comb_node(&n(&[1])), n(&[1, 0]));
        assert_eq!(comb_node(&n(&[1, 2])), n(&[1, 0, 1, 1, 0]));
        assert_eq!(comb_embedding(sh(3, 2)).unwrap().source, sh(2, 4));
        assert_eq!(spread_node(&n(&[1])), n(&[0, 1]));
        assert_eq!(spread_node(&n(&[1, 0])), n(&[0, 1, 0, 0]));
        assert_eq!(spread_node_at(1, &n(&[1, 0, 1])), n(&[0, 1, 0, 1]));
        assert_eq!(spread_node_at(0, &n(&[1, 0, 1])), n(&[1, 0, 1]));
        assert!(spread_embedding_at(2, sh(2, 4)).is_ok());
        let m = binary_restriction(sh(2, 3), sh(4, 3)).unwrap();
        assert!(is_identity(&m));
        assert!(binary_restriction(sh(2, 4), sh(4, 3)).is_err());
    }

    #[test]
    fn required_shapes_are_exact() {
        let t = sh(2, 3);
        let ops = [
            OpDesc::Widening { k: 2, n: 1 },
            OpDesc::Stretching { k: 2, n: 1 },
            OpDesc::Fattening { k: 2 },
            OpDesc::Elongation { k: 2 },
            OpDesc::Comb,
            OpDesc::Spread,
            OpDesc::SpreadAt { n: 1 },
        ];
        assert_eq!(
            required_source_shape(&OpDesc::Widening { k: 2, n: 1 }, t).unwrap(),
            sh(4, 3)
        );
        assert_eq!(
            required_source_shape(&OpDesc::Stretching { k: 2, n: 1 }, t).unwrap(),
            sh(2, 4)
        );
        for op in ops {
            let req = required_source_shape(&op, t).unwrap();
            assert!(build(op.clone(), t, Some(req)).is_ok());
            let smaller = TreeShape { branching: req.branching, depth: req.depth - 1 };
            assert!(matches!(
                build(op.clone(), t, Some(smaller)),
                Err(OpError::ShapeInsufficient { .. })
            ), "{op:?}");
        }
    }

    #[test]
    fn image_arities() {
        let t = sh(2, 4);
        for x in t.nodes() {
            let l = x.level();
            let w = widening(2, 1, t).unwrap();
            assert_eq!(w.image(&x).unwrap().len(), if l >= 1 { 2 } else { 1 });
            let s = stretching(3, 1, t).unwrap();
            assert_eq!(s.image(&x).unwrap().len(), if l == 1 { 3 } else { 1 });
            let e = elongation(2, t).unwrap();
            assert_eq!(e.image(&x).unwrap().len(), if l >= 1 { 2 } else { 1 });
            assert_eq!(comb_embedding(t).unwrap().image(&x).unwrap().len(), 1);
        }
    }

    #[test]
    fn json_round_trip() {
        let m = widening(2, 1, sh(2, 3)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["op"], "widening");
        assert_eq!(v["params"]["k"], 2);
        assert_eq!(v["source"]["b"], 4);
        assert_eq!(v["image"]["1.0"][1], "3.0");
        let back: NodeMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn composition_concatenates() {
        let r = restriction(&[1, 2, 3], sh(2, 4)).unwrap();
        let w = widening(2, 2, sh(2, 4)).unwrap();
        let c = r.then(&w).unwrap();
        assert_eq!(c.source, sh(4, 4));
        assert_eq!(c.image(&n(&[1])).unwrap(), &[n(&[0, 2]), n(&[0, 3])]);
        assert!(w.then(&r).is_err());
    }
}
