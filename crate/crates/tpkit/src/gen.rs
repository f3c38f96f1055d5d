//! Random inputs: set systems, labeled trees, and "allowance" families whose
//! consistency depends only on the quantifier-free type of the index tuple.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::patterns::{InpArray, LabeledTree, SetSystem, Subset};
use crate::treeidx::TreeShape;

/// `domain` elements, `family` sets, each element kept with probability `p`.
pub fn random_system(rng: &mut impl Rng, domain: usize, family: usize, p: f64) -> SetSystem {
    let mut s = SetSystem::new(domain);
    for i in 0..family {
        s.add(format!("s{i}"), (0..domain).filter(|_| rng.gen_bool(p)))
            .expect("fresh names in range");
    }
    s
}

/// Independent random labels.
pub fn random_tree(rng: &mut impl Rng, shape: TreeShape, domain: usize, p: f64) -> LabeledTree {
    LabeledTree::from_fn(shape, domain, |_| Subset::from_elems(domain, (0..domain).filter(|_| rng.gen_bool(p))))
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Domain size of [`allowance_tree`]: each labeled level `l` picks
/// `allow[l-1]` children below every node picked at level `l-1`.
pub fn allowance_tree_size(b: u32, allow: &[usize]) -> u128 {
    let mut size = 1u128;
    let mut width = 1u128;
    for &c in allow {
        let per = binom(b as usize, c);
        let Ok(w) = u32::try_from(width) else { return u128::MAX };
        size = size.saturating_mul(per.checked_pow(w).unwrap_or(u128::MAX));
        width = width.saturating_mul(c as u128);
    }
    size
}

/// The domain is every subtree that, below each of its nodes at level
/// `l-1`, keeps exactly `allow[l-1]` children; a node's label is the set of
/// such subtrees containing it.
///
/// Sibling families at level `l` are exactly `(allow[l-1]+1)`-inconsistent;
/// incomparable `k`-sets are all inconsistent iff the product of the
/// allowances is below `k`. Returns `None` when the domain exceeds `budget`.
pub fn allowance_tree(shape: TreeShape, allow: &[usize], budget: usize) -> Option<LabeledTree> {
    let b = shape.branching as usize;
    assert_eq!(allow.len(), shape.depth.saturating_sub(1), "one allowance per labeled level");
    assert!(allow.iter().all(|&c| c >= 1 && c <= b), "allowances in 1..=b");
    if allowance_tree_size(shape.branching, allow) > budget as u128 {
        return None;
    }
    let n = shape.node_count();
    // Each domain element as the sorted list of canonical indices it keeps.
    let mut members: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier_of: Vec<Vec<usize>> = vec![vec![0]];
    for &c in allow {
        let mut next_members = Vec::new();
        let mut next_frontier = Vec::new();
        for (m, front) in members.iter().zip(&frontier_of) {
            // Independent choice of c children under every frontier node.
            let mut partial: Vec<(Vec<usize>, Vec<usize>)> = vec![(m.clone(), Vec::new())];
            for &f in front {
                let kids: Vec<usize> = (f * b + 1..f * b + 1 + b).collect();
                let mut grown = Vec::new();
                for (pm, pf) in &partial {
                    for pick in combinations(&kids, c) {
                        let mut nm = pm.clone();
                        nm.extend_from_slice(&pick);
                        let mut nf = pf.clone();
                        nf.extend_from_slice(&pick);
                        grown.push((nm, nf));
                    }
                }
                partial = grown;
            }
            for (pm, pf) in partial {
                next_members.push(pm);
                next_frontier.push(pf);
            }
        }
        members = next_members;
        frontier_of = next_frontier;
    }
    let domain = if shape.depth == 0 { 0 } else { members.len() };
    let mut labels = vec![Subset::empty(domain); n];
    for (x, m) in members.iter().enumerate().take(domain) {
        for &i in m {
            labels[i].insert(x);
        }
    }
    Some(LabeledTree::from_fn(shape, domain, |node| {
        labels[shape.index_of(node).expect("in shape")].clone()
    }))
}

/// Rows pick `allow[i]` of `cols` cells each; a domain element is one such
/// choice per row and lies in the cells it picked. Row `i` is exactly
/// `(allow[i]+1)`-inconsistent and every transversal is consistent.
pub fn allowance_array(cols: usize, allow: &[usize], budget: usize) -> Option<InpArray> {
    assert!(allow.iter().all(|&c| c >= 1 && c <= cols));
    let size = allow
        .iter()
        .try_fold(1u128, |acc, &c| acc.checked_mul(binom(cols, c)))
        .unwrap_or(u128::MAX);
    if size > budget as u128 {
        return None;
    }
    let all: Vec<usize> = (0..cols).collect();
    let choices: Vec<Vec<Vec<usize>>> = allow.iter().map(|&c| combinations(&all, c)).collect();
    let domain = size as usize;
    Some(InpArray::from_fn(allow.len(), cols, domain, |i, j| {
        let stride: usize = choices[i + 1..].iter().map(Vec::len).product();
        Subset::from_elems(
            domain,
            (0..domain).filter(|x| choices[i][(x / stride) % choices[i].len()].contains(&j)),
        )
    }))
}

fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Random allowances for `shape` whose tree fits in `budget`, trying
/// `tries` times.
pub fn random_allowance_tree(
    rng: &mut impl Rng,
    shape: TreeShape,
    max_allow: usize,
    budget: usize,
    tries: usize,
) -> Option<(Vec<usize>, LabeledTree)> {
    let b = shape.branching as usize;
    let top = max_allow.clamp(1, b);
    for _ in 0..tries {
        let allow: Vec<usize> = (1..shape.depth).map(|_| rng.gen_range(1..=top)).collect();
        if let Some(t) = allowance_tree(shape, &allow, budget) {
            return Some((allow, t));
        }
    }
    None
}

/// A cdt-pattern with 2-inconsistent siblings: every element picks at most
/// one child below each node and lies in the children it picks. One element
/// per maximal path follows that path; `extra` more pick at random.
pub fn random_cdt2_tree(rng: &mut impl Rng, shape: TreeShape, extra: usize) -> LabeledTree {
    let b = shape.branching as usize;
    let n = shape.node_count();
    let paths = shape.maximal_paths();
    let domain = paths.len() + extra;
    let mut labels = vec![Subset::empty(domain); n];
    for x in 0..domain {
        let follow = paths.get(x);
        for parent in 0..n {
            if parent * b + 1 >= n {
                break;
            }
            let node = shape.node_at(parent).expect("in shape");
            let on_path = follow.filter(|p| node.is_prefix_of(p) && p.level() > node.level());
            let pick = match on_path {
                Some(p) => Some(p.entries()[node.level()] as usize),
                None if rng.gen_bool(0.7) => Some(rng.gen_range(0..b)),
                None => None,
            };
            if let Some(j) = pick {
                labels[parent * b + 1 + j].insert(x);
            }
        }
    }
    LabeledTree::from_fn(shape, domain, |node| labels[shape.index_of(node).expect("in shape")].clone())
}

/// Relabels the domain by a random permutation; patterns are unaffected.
pub fn shuffle_domain(rng: &mut impl Rng, t: &LabeledTree) -> LabeledTree {
    let mut perm: Vec<usize> = (0..t.domain_size).collect();
    perm.shuffle(rng);
    LabeledTree::from_fn(t.shape, t.domain_size, |n| {
        Subset::from_elems(t.domain_size, t.label(n).elems().map(|x| perm[x]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{check_tree_kind, verify, Certificate, Kind};
    use rand::SeedableRng;

    #[test]
    fn allowance_tree_properties() {
        let shape = TreeShape::new(3, 4).unwrap();
        for allow in [[1, 1, 1], [2, 1, 1], [1, 2, 2], [2, 2, 1]] {
            let t = allowance_tree(shape, &allow, 100_000).unwrap();
            assert_eq!(t.domain_size as u128, allowance_tree_size(3, &allow));
            let cdt = Kind::Cdt { n: allow.iter().map(|c| c + 1).collect() };
            assert!(check_tree_kind(&cdt, &t, 1).unwrap().ok);
            if allow.iter().any(|&c| c >= 2) {
                let tight = Kind::Cdt { n: allow.iter().map(|&c| c.max(2)).collect() };
                assert!(!check_tree_kind(&tight, &t, 1).unwrap().ok);
            }
            let prod: usize = allow.iter().product();
            for k in 2..6 {
                assert_eq!(check_tree_kind(&Kind::SctK { k }, &t, 1).unwrap().ok, prod < k, "{allow:?} k={k}");
            }
            assert!(t.is_path_monotone());
        }
    }

    #[test]
    fn allowance_array_properties() {
        let a = allowance_array(3, &[1, 2], 1000).unwrap();
        assert_eq!(a.domain_size, 9);
        let c = verify(&Certificate::array(Kind::Inp { n: vec![2, 3] }, a.clone())).unwrap();
        assert!(c.is_verified());
        let c = verify(&Certificate::array(Kind::Inp { n: vec![2, 2] }, a)).unwrap();
        assert!(!c.is_verified());
    }

    #[test]
    fn random_cdt2_trees_verify() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let shape = TreeShape::new(rng.gen_range(1..4), rng.gen_range(1..5)).unwrap();
            let t = random_cdt2_tree(&mut rng, shape, 3);
            assert!(check_tree_kind(&Kind::CdtN { n: 2 }, &t, 1).unwrap().ok);
        }
    }

    #[test]
    fn budget_respected() {
        let shape = TreeShape::new(4, 4).unwrap();
        assert!(allowance_tree(shape, &[2, 2, 2], 1000).is_none());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (allow, t) = random_allowance_tree(&mut rng, shape, 3, 5000, 100).unwrap();
        assert!(t.domain_size <= 5000);
        assert_eq!(allow.len(), 3);
        let s = shuffle_domain(&mut rng, &t);
        assert!(check_tree_kind(&Kind::Cdt { n: allow.iter().map(|c| c + 1).collect() }, &s, 1).unwrap().ok);
    }
}
