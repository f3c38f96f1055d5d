//! Exact pattern checks with a capped, deterministic violation listing.
//!
//! Each check first decides the verdict with a per-element count, then lists
//! the first `cap` violations in a fixed order (path failures, then the
//! kind-specific families in lex order of canonical indices).

use super::{Certificate, InpArray, Kind, LabeledTree, PatternError, Payload, Subset, Verdict, Violation};
use crate::treeidx::{is_distant_siblings, Node};

pub const DEFAULT_CAP: usize = 32;

struct Listing {
    cap: usize,
    out: Vec<Violation>,
    truncated: bool,
}

impl Listing {
    fn new(cap: usize) -> Self {
        Listing {
            cap,
            out: Vec::new(),
            truncated: false,
        }
    }

    /// Returns `false` once the cap is exceeded.
    fn push(&mut self, v: Violation) -> bool {
        if self.truncated {
            return false;
        }
        if self.out.len() >= self.cap {
            self.truncated = true;
            return false;
        }
        self.out.push(v);
        true
    }

    fn open(&self) -> bool {
        !self.truncated
    }
}

/// Calls `f` on every `size`-subset of `sets` (as sorted positions, lex
/// order) with a common element; stops when `f` returns `false`.
fn consistent_combos(sets: &[&Subset], size: usize, domain: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        sets: &[&Subset],
        size: usize,
        start: usize,
        acc: &Subset,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.len() == size {
            return f(chosen);
        }
        let need = size - chosen.len();
        for i in start..sets.len() {
            if sets.len() - i < need {
                break;
            }
            let next = acc.intersection(sets[i]);
            if next.is_empty() {
                continue;
            }
            chosen.push(i);
            let go = rec(sets, size, i + 1, &next, chosen, f);
            chosen.pop();
            if !go {
                return false;
            }
        }
        true
    }
    rec(sets, size, 0, &Subset::full(domain), &mut Vec::new(), f)
}

/// Whether some element lies in at least `k` of `sets`.
fn some_k_overlap(sets: &[&Subset], k: usize, domain: usize) -> bool {
    if sets.len() < k {
        return false;
    }
    let mut counts = vec![0usize; domain];
    for s in sets {
        for e in s.elems() {
            counts[e] += 1;
            if counts[e] >= k {
                return true;
            }
        }
    }
    false
}

struct TreeCtx<'a> {
    t: &'a LabeledTree,
    nodes: Vec<Node>,
    b: usize,
    n: usize,
    depth: usize,
}

impl<'a> TreeCtx<'a> {
    fn new(t: &'a LabeledTree) -> Self {
        TreeCtx {
            t,
            nodes: t.shape.nodes(),
            b: t.shape.branching as usize,
            n: t.node_count(),
            depth: t.shape.depth,
        }
    }

    fn label(&self, i: usize) -> &Subset {
        self.t.label_at(i)
    }

    /// For canonical indices `i < j`.
    fn comparable(&self, i: usize, mut j: usize) -> bool {
        while j > i {
            j = (j - 1) / self.b;
        }
        i == j
    }

    fn level(&self, i: usize) -> usize {
        self.nodes[i].level()
    }

    fn path_check(&self, out: &mut Listing) -> bool {
        if self.depth < 2 {
            return true;
        }
        let p = self.t.path_intersections();
        let mut ok = true;
        for i in 0..self.n {
            if self.level(i) == self.depth - 1 && p[i].is_empty() {
                ok = false;
                if !out.push(Violation::Path {
                    node: self.nodes[i].clone(),
                }) {
                    break;
                }
            }
        }
        ok
    }

    fn consistent(&self, idx: &[usize]) -> Violation {
        Violation::Consistent {
            nodes: idx.iter().map(|&i| self.nodes[i].clone()).collect(),
        }
    }

    /// Sibling families of child level `l` must be `bound(l)`-inconsistent.
    fn sibling_check(&self, bound: &dyn Fn(usize) -> usize, out: &mut Listing) -> bool {
        let mut ok = true;
        let domain = self.t.domain_size;
        for p in 0..self.n {
            let kids = self.t.child_indices(p);
            if kids.is_empty() {
                continue;
            }
            let k = bound(self.level(p) + 1);
            let sets: Vec<&Subset> = kids.clone().map(|c| self.label(c)).collect();
            if !some_k_overlap(&sets, k, domain) {
                continue;
            }
            ok = false;
            if !out.open() {
                continue;
            }
            let first = kids.start;
            consistent_combos(&sets, k, domain, &mut |c| {
                let idx: Vec<usize> = c.iter().map(|&j| first + j).collect();
                out.push(self.consistent(&idx))
            });
        }
        ok
    }

    /// Largest antichain of nodes (root excluded) whose labels contain `x`,
    /// compared against `k`.
    fn antichain_reaches(&self, x: usize, k: usize, a: &mut [usize]) -> bool {
        for i in (1..self.n).rev() {
            let s: usize = self.t.child_indices(i).map(|c| a[c]).sum();
            let own = usize::from(self.label(i).contains(x));
            a[i] = own.max(s);
        }
        let top: usize = self.t.child_indices(0).map(|c| a[c]).sum();
        top >= k
    }

    /// Pairwise incomparable `k`-sets must be inconsistent.
    fn antichain_check(&self, k: usize, out: &mut Listing) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut a = vec![0usize; self.n];
        if !(0..self.t.domain_size).any(|x| self.antichain_reaches(x, k, &mut a)) {
            return true;
        }
        if out.open() {
            self.list_tuples(k, &|ctx, chosen, i| chosen.iter().all(|&c| !ctx.comparable(c, i)), out);
        }
        false
    }

    /// Distant-sibling `k`-sets must be inconsistent.
    fn distant_check(&self, k: usize, out: &mut Listing) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut s = vec![false; self.n];
        let mut bad = false;
        'elems: for x in 0..self.t.domain_size {
            for i in (0..self.n).rev() {
                let kids = self.t.child_indices(i);
                let hit = kids.clone().filter(|&c| s[c]).count();
                if hit >= k {
                    bad = true;
                    break 'elems;
                }
                s[i] = (i > 0 && self.label(i).contains(x)) || hit > 0;
            }
        }
        if !bad {
            return true;
        }
        if out.open() {
            self.list_tuples(
                k,
                &|ctx, chosen, i| {
                    if chosen.is_empty() {
                        return true;
                    }
                    let mut v: Vec<Node> = chosen.iter().map(|&c| ctx.nodes[c].clone()).collect();
                    v.push(ctx.nodes[i].clone());
                    is_distant_siblings(&v).unwrap_or(false)
                },
                out,
            );
        }
        false
    }

    /// Lists consistent `k`-tuples of non-root nodes, increasing canonical
    /// indices, subject to a hereditary admissibility test.
    fn list_tuples(&self, k: usize, admit: &dyn Fn(&TreeCtx, &[usize], usize) -> bool, out: &mut Listing) {
        fn rec(
            ctx: &TreeCtx,
            k: usize,
            start: usize,
            acc: &Subset,
            chosen: &mut Vec<usize>,
            admit: &dyn Fn(&TreeCtx, &[usize], usize) -> bool,
            out: &mut Listing,
        ) -> bool {
            if chosen.len() == k {
                return out.push(ctx.consistent(chosen));
            }
            for i in start..ctx.n {
                if ctx.n - i < k - chosen.len() {
                    break;
                }
                let next = acc.intersection(ctx.label(i));
                if next.is_empty() || !admit(ctx, chosen, i) {
                    continue;
                }
                chosen.push(i);
                let go = rec(ctx, k, i + 1, &next, chosen, admit, out);
                chosen.pop();
                if !go {
                    return false;
                }
            }
            true
        }
        rec(self, k, 1, &Subset::full(self.t.domain_size), &mut Vec::new(), admit, out);
    }

    /// `label(η⌢1)` is disjoint from every label at or above `η⌢0`.
    fn sop1_check(&self, out: &mut Listing) -> bool {
        let mut union: Vec<Subset> = self.t.labels().to_vec();
        for i in (1..self.n).rev() {
            let p = (i - 1) / self.b;
            if p > 0 {
                let (lo, hi) = union.split_at_mut(i);
                lo[p].union_with(&hi[0]);
            }
        }
        let mut ok = true;
        for e in 0..self.n {
            let kids = self.t.child_indices(e);
            if kids.len() < 2 {
                continue;
            }
            let (c0, c1) = (kids.start, kids.start + 1);
            if self.label(c1).is_disjoint(&union[c0]) {
                continue;
            }
            ok = false;
            if !out.open() {
                continue;
            }
            for v in c0..self.n {
                if self.comparable(c0, v) && !self.label(c1).is_disjoint(self.label(v)) && !out.push(self.consistent(&[c1, v])) {
                    break;
                }
            }
        }
        ok
    }
}

fn check_array(a: &InpArray, bounds: &[usize], cap: usize) -> Verdict {
    let mut out = Listing::new(cap);
    let mut ok = true;
    let domain = a.domain_size;
    for (r, row) in a.cells.iter().enumerate() {
        let sets: Vec<&Subset> = row.iter().collect();
        let k = bounds[r];
        if !some_k_overlap(&sets, k, domain) {
            continue;
        }
        ok = false;
        if out.open() {
            consistent_combos(&sets, k, domain, &mut |c| {
                out.push(Violation::Row {
                    row: r,
                    cols: c.to_vec(),
                })
            });
        }
    }
    if !transversals(a, &mut out) {
        ok = false;
    }
    Verdict {
        ok,
        violations: out.out,
        truncated: out.truncated,
    }
}

/// Every choice of one cell per row has a common element.
fn transversals(a: &InpArray, out: &mut Listing) -> bool {
    if a.rows == 0 {
        return true;
    }
    if a.cols == 0 {
        return true;
    }
    // Elements lying in every cell of rows r.. ; if the running intersection
    // meets this, the whole subtree is consistent.
    let mut suffix = vec![Subset::full(a.domain_size); a.rows + 1];
    for r in (0..a.rows).rev() {
        let mut s = suffix[r + 1].clone();
        for c in &a.cells[r] {
            s.intersect_with(c);
        }
        suffix[r] = s;
    }
    struct St<'a> {
        a: &'a InpArray,
        suffix: Vec<Subset>,
        found: bool,
    }
    fn emit_all(st: &mut St, r: usize, cols: &mut Vec<usize>, out: &mut Listing) -> bool {
        if r == st.a.rows {
            return out.push(Violation::Transversal { cols: cols.clone() });
        }
        for j in 0..st.a.cols {
            cols.push(j);
            let go = emit_all(st, r + 1, cols, out);
            cols.pop();
            if !go {
                return false;
            }
        }
        true
    }
    fn rec(st: &mut St, r: usize, acc: &Subset, cols: &mut Vec<usize>, out: &mut Listing) -> bool {
        if acc.is_empty() {
            st.found = true;
            return out.open() && emit_all(st, r, cols, out);
        }
        if r == st.a.rows || !acc.is_disjoint(&st.suffix[r]) {
            return true;
        }
        for j in 0..st.a.cols {
            let next = acc.intersection(&st.a.cells[r][j]);
            cols.push(j);
            let go = rec(st, r + 1, &next, cols, out);
            cols.pop();
            if !go {
                return false;
            }
        }
        true
    }
    let mut st = St {
        a,
        suffix,
        found: false,
    };
    rec(&mut st, 0, &Subset::full(a.domain_size), &mut Vec::new(), out);
    !st.found
}

fn need_k(k: usize, what: &str) -> Result<(), PatternError> {
    if k < 2 {
        Err(PatternError::BadParam(format!("{what} must be at least 2, got {k}")))
    } else {
        Ok(())
    }
}

/// Checks a tree against a tree kind.
pub fn check_tree_kind(kind: &Kind, t: &LabeledTree, cap: usize) -> Result<Verdict, PatternError> {
    if kind.is_array() {
        return Err(PatternError::Malformed(format!("{kind} expects an array payload")));
    }
    if kind.needs_binary() && t.shape.branching != 2 {
        return Err(PatternError::BadParam(format!(
            "{kind} needs a binary tree, got branching {}",
            t.shape.branching
        )));
    }
    let ctx = TreeCtx::new(t);
    let mut out = Listing::new(cap);
    let mut ok = ctx.path_check(&mut out);
    let body = match kind {
        Kind::Tp { k } | Kind::CdtN { n: k } => {
            need_k(*k, "k")?;
            ctx.sibling_check(&|_| *k, &mut out)
        }
        Kind::Cdt { n } => {
            let levels = t.shape.depth.saturating_sub(1);
            if n.len() != levels {
                return Err(PatternError::BadParam(format!(
                    "cdt needs {levels} level bounds for depth {}, got {}",
                    t.shape.depth,
                    n.len()
                )));
            }
            for &x in n {
                need_k(x, "level bound")?;
            }
            ctx.sibling_check(&|l| n[l - 1], &mut out)
        }
        Kind::Tp1 | Kind::Sct | Kind::Sop2 => ctx.antichain_check(2, &mut out),
        Kind::KTp1 { k } | Kind::SctK { k } => {
            need_k(*k, "k")?;
            ctx.antichain_check(*k, &mut out)
        }
        Kind::WeakKTp1 { k } => {
            need_k(*k, "k")?;
            ctx.distant_check(*k, &mut out)
        }
        Kind::Sop1 => ctx.sop1_check(&mut out),
        Kind::Tp2 { .. } | Kind::Inp { .. } => unreachable!(),
    };
    ok &= body;
    Ok(Verdict {
        ok,
        violations: out.out,
        truncated: out.truncated,
    })
}

pub fn check(kind: &Kind, payload: &Payload, cap: usize) -> Result<Verdict, PatternError> {
    match payload {
        Payload::Tree(t) => check_tree_kind(kind, t, cap),
        Payload::Array(a) => {
            let bounds = match kind {
                Kind::Tp2 { k } => {
                    need_k(*k, "k")?;
                    vec![*k; a.rows]
                }
                Kind::Inp { n } => {
                    if n.len() != a.rows {
                        return Err(PatternError::BadParam(format!(
                            "inp needs {} row bounds, got {}",
                            a.rows,
                            n.len()
                        )));
                    }
                    for &x in n {
                        need_k(x, "row bound")?;
                    }
                    n.clone()
                }
                _ => return Err(PatternError::Malformed(format!("{kind} expects a tree payload"))),
            };
            Ok(check_array(a, &bounds, cap))
        }
    }
}

/// Recomputes the verdict of a certificate, listing at most `cap` violations.
pub fn verify_with(c: &Certificate, cap: usize) -> Result<Certificate, PatternError> {
    let v = check(&c.kind, &c.payload, cap)?;
    Ok(Certificate {
        kind: c.kind.clone(),
        payload: c.payload.clone(),
        verdict: Some(v),
    })
}

pub fn verify(c: &Certificate) -> Result<Certificate, PatternError> {
    verify_with(c, DEFAULT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::is_consistent;
    use crate::treeidx::TreeShape;
    use rand::{Rng, SeedableRng};

    /// Brute-force listing straight from the definitions.
    fn naive(kind: &Kind, t: &LabeledTree) -> Vec<Violation> {
        let nodes = t.shape.nodes();
        let d = t.shape.depth;
        let mut out = Vec::new();
        let lab = |i: usize| t.label_at(i);
        if d >= 2 {
            for (i, n) in nodes.iter().enumerate() {
                if n.level() == d - 1 {
                    let fam: Vec<&Subset> = (1..=n.level()).map(|l| t.label(&n.prefix(l))).collect();
                    if !is_consistent(&fam) {
                        out.push(Violation::Path { node: nodes[i].clone() });
                    }
                }
            }
        }
        let subsets = |k: usize, pool: &[usize]| -> Vec<Vec<usize>> {
            let mut res = Vec::new();
            let m = pool.len();
            if k > m {
                return res;
            }
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                res.push(idx.iter().map(|&i| pool[i]).collect());
                let mut p = k;
                while p > 0 && idx[p - 1] == m - k + p - 1 {
                    p -= 1;
                }
                if p == 0 {
                    break;
                }
                idx[p - 1] += 1;
                for q in p..k {
                    idx[q] = idx[q - 1] + 1;
                }
            }
            res
        };
        let cons = |v: &[usize]| is_consistent(&v.iter().map(|&i| lab(i)).collect::<Vec<_>>());
        let push = |out: &mut Vec<Violation>, v: &[usize]| {
            out.push(Violation::Consistent {
                nodes: v.iter().map(|&i| nodes[i].clone()).collect(),
            })
        };
        let all: Vec<usize> = (1..nodes.len()).collect();
        match kind {
            Kind::Cdt { .. } | Kind::Tp { .. } | Kind::CdtN { .. } => {
                for (p, pn) in nodes.iter().enumerate() {
                    if pn.level() + 1 >= d {
                        continue;
                    }
                    let k = match kind {
                        Kind::Cdt { n } => n[pn.level()],
                        Kind::Tp { k } => *k,
                        Kind::CdtN { n } => *n,
                        _ => unreachable!(),
                    };
                    let kids: Vec<usize> = (0..t.shape.branching)
                        .map(|j| t.shape.index_of(&pn.child(j)).unwrap())
                        .collect();
                    let _ = p;
                    for s in subsets(k, &kids) {
                        if cons(&s) {
                            push(&mut out, &s);
                        }
                    }
                }
            }
            Kind::Sct | Kind::SctK { .. } | Kind::WeakKTp1 { .. } => {
                let k = match kind {
                    Kind::SctK { k } | Kind::WeakKTp1 { k } => *k,
                    _ => 2,
                };
                for s in subsets(k, &all) {
                    let ns: Vec<Node> = s.iter().map(|&i| nodes[i].clone()).collect();
                    let shape_ok = match kind {
                        Kind::WeakKTp1 { .. } => is_distant_siblings(&ns).unwrap(),
                        _ => ns
                            .iter()
                            .enumerate()
                            .all(|(a, x)| ns[a + 1..].iter().all(|y| !x.is_comparable(y))),
                    };
                    if shape_ok && cons(&s) {
                        push(&mut out, &s);
                    }
                }
            }
            Kind::Sop1 => {
                for e in nodes.iter().filter(|e| e.level() + 1 < d) {
                    let c0 = e.child(0);
                    let c1 = t.shape.index_of(&e.child(1)).unwrap();
                    for (v, vn) in nodes.iter().enumerate() {
                        if c0.is_prefix_of(vn) && cons(&[c1, v]) {
                            push(&mut out, &[c1, v]);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    fn random_tree(rng: &mut impl Rng, shape: TreeShape, m: usize, p: f64) -> LabeledTree {
        LabeledTree::from_fn(shape, m, |_| Subset::from_elems(m, (0..m).filter(|_| rng.gen_bool(p))))
    }

    #[test]
    fn fast_checks_match_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for round in 0..400 {
            let b = rng.gen_range(1..4);
            let d = rng.gen_range(0..4);
            let shape = TreeShape::new(b, d).unwrap();
            let m = rng.gen_range(0..7);
            let p = [0.15, 0.35, 0.6][round % 3];
            let t = random_tree(&mut rng, shape, m, p);
            let mut kinds = vec![
                Kind::Sct,
                Kind::SctK { k: 3 },
                Kind::WeakKTp1 { k: 2 },
                Kind::WeakKTp1 { k: 3 },
                Kind::Tp { k: 2 },
                Kind::Cdt {
                    n: (1..d).map(|l| 2 + l % 2).collect(),
                },
            ];
            if b == 2 {
                kinds.push(Kind::Sop1);
            }
            for kind in kinds {
                let expect = naive(&kind, &t);
                let v = check_tree_kind(&kind, &t, 10_000).unwrap();
                assert_eq!(v.violations, expect, "{kind} on {shape}");
                assert_eq!(v.ok, expect.is_empty());
                assert!(!v.truncated);
                let capped = check_tree_kind(&kind, &t, 2).unwrap();
                assert_eq!(capped.ok, v.ok);
                assert_eq!(capped.violations[..], expect[..expect.len().min(2)]);
                assert_eq!(capped.truncated, expect.len() > 2);
            }
        }
    }

    fn naive_array(a: &InpArray, bounds: &[usize]) -> Vec<Violation> {
        let mut out = Vec::new();
        for (r, row) in a.cells.iter().enumerate() {
            let k = bounds[r];
            for m in 0u32..1 << a.cols {
                if m.count_ones() as usize == k {
                    let cols: Vec<usize> = (0..a.cols).filter(|j| m >> j & 1 == 1).collect();
                    let fam: Vec<&Subset> = cols.iter().map(|&j| &row[j]).collect();
                    if is_consistent(&fam) {
                        out.push((r, cols));
                    }
                }
            }
        }
        let mut rows: Vec<Violation> = out
            .into_iter()
            .map(|(r, c)| (r, c))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(row, cols)| Violation::Row { row, cols })
            .collect();
        // Row violations sorted by row, then lex on columns.
        rows.sort_by(|x, y| match (x, y) {
            (Violation::Row { row: a, cols: c }, Violation::Row { row: b, cols: d }) => (a, c).cmp(&(b, d)),
            _ => std::cmp::Ordering::Equal,
        });
        let total = a.cols.pow(a.rows as u32);
        if a.rows > 0 {
            for f in 0..total {
                let mut cols = vec![0; a.rows];
                let mut x = f;
                for r in (0..a.rows).rev() {
                    cols[r] = x % a.cols;
                    x /= a.cols;
                }
                let fam: Vec<&Subset> = (0..a.rows).map(|r| &a.cells[r][cols[r]]).collect();
                if !is_consistent(&fam) {
                    rows.push(Violation::Transversal { cols });
                }
            }
        }
        rows
    }

    #[test]
    fn array_checks_match_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for round in 0..400 {
            let rows = rng.gen_range(0..4);
            let cols = rng.gen_range(0..4);
            let m = rng.gen_range(0..6);
            let p = [0.2, 0.5, 0.8][round % 3];
            let a = InpArray::from_fn(rows, cols, m, |_, _| Subset::from_elems(m, (0..m).filter(|_| rng.gen_bool(p))));
            let bounds: Vec<usize> = (0..rows).map(|_| rng.gen_range(2..4)).collect();
            let expect = naive_array(&a, &bounds);
            let v = check(&Kind::Inp { n: bounds.clone() }, &Payload::Array(a.clone()), 100_000).unwrap();
            assert_eq!(v.violations, expect);
            assert_eq!(v.ok, expect.is_empty());
        }
    }

    #[test]
    fn tp2_example() {
        // b_ij = {f : f(i) = j} over all functions 2 -> 2.
        let a = InpArray::from_fn(2, 2, 4, |i, j| Subset::from_elems(4, (0..4).filter(|f| (f >> i) & 1 == j)));
        let c = verify(&Certificate::array(Kind::Tp2 { k: 2 }, a)).unwrap();
        assert!(c.is_verified());
    }

    #[test]
    fn param_errors() {
        let shape = TreeShape::new(3, 3).unwrap();
        let t = LabeledTree::from_fn(shape, 1, |_| Subset::full(1));
        assert!(check_tree_kind(&Kind::Sop2, &t, 1).is_err());
        assert!(check_tree_kind(&Kind::SctK { k: 1 }, &t, 1).is_err());
        assert!(check_tree_kind(&Kind::Cdt { n: vec![2] }, &t, 1).is_err());
        assert!(check_tree_kind(&Kind::Tp2 { k: 2 }, &t, 1).is_err());
        let v = check_tree_kind(&Kind::Cdt { n: vec![2, 2] }, &t, 1).unwrap();
        assert!(!v.ok && v.truncated);
    }
}
