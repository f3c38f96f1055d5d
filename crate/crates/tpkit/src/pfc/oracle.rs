use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore};

use super::structure::{fresh, is_embedding, sig_set, Embedding, FinRelStructure, RelSym};
use super::PfcError;

/// A strong amalgam `D` of `B` and `C` over `A`, with `g: B → D` and
/// `h: C → D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub d: FinRelStructure,
    pub g: Embedding,
    pub h: Embedding,
}

/// Pushout of the universes: `B` keeps its names, `C` outside `f(A)` is
/// added, renamed only where a name is taken. Relations are not touched, so
/// the same object maps serve every structure on these universes.
pub fn object_pushout(
    a: &[String],
    b: &[String],
    e: &Embedding,
    c: &[String],
    f: &Embedding,
) -> Result<(Vec<String>, Embedding, Embedding), PfcError> {
    let mut universe = b.to_vec();
    let mut taken: BTreeSet<String> = b.iter().cloned().collect();
    let g: Embedding = b.iter().map(|x| (x.clone(), x.clone())).collect();
    let mut from_a = BTreeMap::new();
    for x in a {
        let (Some(bx), Some(cx)) = (e.get(x), f.get(x)) else {
            return Err(PfcError::NotEmbedding(format!("{x} is not mapped")));
        };
        from_a.insert(cx.clone(), bx.clone());
    }
    let mut h = Embedding::new();
    for y in c {
        let img = match from_a.get(y) {
            Some(bx) => bx.clone(),
            None => {
                let n = fresh(y, &taken);
                taken.insert(n.clone());
                universe.push(n.clone());
                n
            }
        };
        h.insert(y.clone(), img);
    }
    Ok((universe, g, h))
}

/// A class of finite structures with strong amalgamation.
///
/// Implementations must be closed under isomorphism and substructures.
pub trait BaseClassOracle: Send + Sync {
    fn name(&self) -> &'static str;

    fn signature(&self) -> Vec<RelSym>;

    fn member(&self, s: &FinRelStructure) -> bool;

    /// Structure on `universe` in the class containing `left` and `right`
    /// as substructures, given that they agree where they overlap.
    fn merge(&self, universe: &[String], left: &FinRelStructure, right: &FinRelStructure) -> FinRelStructure;

    /// A member on `s.universe ∪ new` that induces `s`.
    fn extend(&self, s: &FinRelStructure, new: &[String]) -> FinRelStructure;

    /// A random member on `s.universe ∪ new` that induces `s`.
    fn random_extension(&self, rng: &mut dyn RngCore, s: &FinRelStructure, new: &[String]) -> FinRelStructure;

    /// Amalgamates `e: A → B` and `f: A → C`, checking the result.
    fn strong_amalgamate(
        &self,
        a: &FinRelStructure,
        b: &FinRelStructure,
        e: &Embedding,
        c: &FinRelStructure,
        f: &Embedding,
    ) -> Result<Amalgam, PfcError> {
        for (s, what) in [(a, "A"), (b, "B"), (c, "C")] {
            if sig_set(&s.signature) != sig_set(&self.signature()) {
                return Err(PfcError::SignatureMismatch(format!("{what} for {}", self.name())));
            }
            if !self.member(s) {
                return Err(PfcError::NotMember(format!("{what} is not in the {} class", self.name())));
            }
        }
        if !is_embedding(e, a, b) || !is_embedding(f, a, c) {
            return Err(PfcError::NotEmbedding("amalgamation base does not embed".into()));
        }
        let (universe, g, h) = object_pushout(&a.universe, &b.universe, e, &c.universe, f)?;
        let am = Amalgam {
            d: self.merge(&universe, &b.rename(&g), &c.rename(&h)),
            g,
            h,
        };
        check_amalgam(self, a, b, e, c, f, &am)?;
        Ok(am)
    }
}

/// Commuting square, image intersection, embeddings and membership.
pub fn check_amalgam<O: BaseClassOracle + ?Sized>(
    oracle: &O,
    a: &FinRelStructure,
    b: &FinRelStructure,
    e: &Embedding,
    c: &FinRelStructure,
    f: &Embedding,
    am: &Amalgam,
) -> Result<(), PfcError> {
    let fail = |m: &str| Err(PfcError::Oracle(format!("{}: {m}", oracle.name())));
    if a.universe.iter().any(|x| am.g.get(&e[x]) != am.h.get(&f[x])) {
        return fail("square does not commute");
    }
    let gi: BTreeSet<&String> = b.universe.iter().filter_map(|x| am.g.get(x)).collect();
    let hi: BTreeSet<&String> = c.universe.iter().filter_map(|x| am.h.get(x)).collect();
    let common: BTreeSet<&String> = a.universe.iter().filter_map(|x| am.g.get(&e[x])).collect();
    if gi.intersection(&hi).copied().collect::<BTreeSet<_>>() != common {
        return fail("images meet outside the base");
    }
    if !is_embedding(&am.g, b, &am.d) || !is_embedding(&am.h, c, &am.d) {
        return fail("amalgam maps are not embeddings");
    }
    if !oracle.member(&am.d) {
        return fail("amalgam is not in the class");
    }
    Ok(())
}

fn pair(x: &str, y: &str) -> Vec<String> {
    vec![x.to_string(), y.to_string()]
}

/// Finite simple graphs (symmetric irreflexive `R`), free amalgamation.
#[derive(Clone, Copy, Debug, Default)]
pub struct GraphOracle;

impl BaseClassOracle for GraphOracle {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn signature(&self) -> Vec<RelSym> {
        vec![RelSym::new("R", 2)]
    }

    fn member(&self, s: &FinRelStructure) -> bool {
        s.validate().is_ok()
            && sig_set(&s.signature) == sig_set(&self.signature())
            && s.tuples("R").all(|t| t[0] != t[1] && s.holds("R", &pair(&t[1], &t[0])))
    }

    fn merge(&self, universe: &[String], left: &FinRelStructure, right: &FinRelStructure) -> FinRelStructure {
        let mut d = FinRelStructure::empty(universe.to_vec(), self.signature());
        let r = d.relations.entry("R".into()).or_default();
        r.extend(left.tuples("R").cloned());
        r.extend(right.tuples("R").cloned());
        d
    }

    fn extend(&self, s: &FinRelStructure, new: &[String]) -> FinRelStructure {
        let mut d = s.clone();
        d.universe.extend(new.iter().cloned());
        d
    }

    fn random_extension(&self, rng: &mut dyn RngCore, s: &FinRelStructure, new: &[String]) -> FinRelStructure {
        let mut d = self.extend(s, new);
        for (i, x) in new.iter().enumerate() {
            let earlier: Vec<String> = s.universe.iter().chain(&new[..i]).cloned().collect();
            for y in earlier {
                if rng.gen_bool(0.5) {
                    let r = d.relations.entry("R".into()).or_default();
                    r.insert(pair(x, &y));
                    r.insert(pair(&y, x));
                }
            }
        }
        d
    }
}

/// Equivalence relations `E` (all pairs, reflexive included); amalgamation
/// takes the union and closes it transitively.
#[derive(Clone, Copy, Debug, Default)]
pub struct EquivalenceOracle;

impl EquivalenceOracle {
    /// Classes in order of first element.
    pub fn classes(s: &FinRelStructure) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = Vec::new();
        for x in &s.universe {
            match out.iter_mut().find(|c| s.holds("E", &pair(&c[0], x))) {
                Some(c) => c.push(x.clone()),
                None => out.push(vec![x.clone()]),
            }
        }
        out
    }

    pub fn from_classes(classes: &[Vec<String>]) -> FinRelStructure {
        let universe = classes.iter().flatten().cloned().collect();
        let mut d = FinRelStructure::empty(universe, vec![RelSym::new("E", 2)]);
        let r = d.relations.entry("E".into()).or_default();
        for c in classes {
            for x in c {
                for y in c {
                    r.insert(pair(x, y));
                }
            }
        }
        d
    }
}

impl BaseClassOracle for EquivalenceOracle {
    fn name(&self) -> &'static str {
        "equivalence"
    }

    fn signature(&self) -> Vec<RelSym> {
        vec![RelSym::new("E", 2)]
    }

    fn member(&self, s: &FinRelStructure) -> bool {
        if s.validate().is_err() || sig_set(&s.signature) != sig_set(&self.signature()) {
            return false;
        }
        let e = |x: &String, y: &String| s.holds("E", &pair(x, y));
        let u = &s.universe;
        u.iter().all(|x| e(x, x))
            && s.tuples("E").all(|t| e(&t[1], &t[0]))
            && s.tuples("E")
                .all(|t| u.iter().all(|z| !e(&t[1], z) || e(&t[0], z)))
    }

    fn merge(&self, universe: &[String], left: &FinRelStructure, right: &FinRelStructure) -> FinRelStructure {
        let idx: BTreeMap<&String, usize> = universe.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut parent: Vec<usize> = (0..universe.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for t in left.tuples("E").chain(right.tuples("E")) {
            let (a, b) = (find(&mut parent, idx[&t[0]]), find(&mut parent, idx[&t[1]]));
            parent[a.max(b)] = a.min(b);
        }
        let mut classes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (i, x) in universe.iter().enumerate() {
            let r = find(&mut parent, i);
            classes.entry(r).or_default().push(x.clone());
        }
        let mut d = Self::from_classes(&classes.into_values().collect::<Vec<_>>());
        d.universe = universe.to_vec();
        d
    }

    fn extend(&self, s: &FinRelStructure, new: &[String]) -> FinRelStructure {
        let mut classes = Self::classes(s);
        classes.extend(new.iter().map(|x| vec![x.clone()]));
        let mut d = Self::from_classes(&classes);
        d.universe = s.universe.iter().chain(new).cloned().collect();
        d
    }

    fn random_extension(&self, rng: &mut dyn RngCore, s: &FinRelStructure, new: &[String]) -> FinRelStructure {
        let mut classes = Self::classes(s);
        for x in new {
            let k = rng.gen_range(0..=classes.len());
            match classes.get_mut(k) {
                Some(c) => c.push(x.clone()),
                None => classes.push(vec![x.clone()]),
            }
        }
        let mut d = Self::from_classes(&classes);
        d.universe = s.universe.iter().chain(new).cloned().collect();
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn id(u: &[String]) -> Embedding {
        u.iter().map(|x| (x.clone(), x.clone())).collect()
    }

    #[test]
    fn graph_free_amalgam_adds_no_edges() {
        let g = GraphOracle;
        let a = FinRelStructure::empty(s(&["v"]), g.signature());
        let mut b = g.extend(&a, &s(&["x"]));
        b.insert("R", s(&["x", "v"])).unwrap();
        b.insert("R", s(&["v", "x"])).unwrap();
        // Same name on the right: must be renamed apart.
        let c = b.clone();
        let am = g.strong_amalgamate(&a, &b, &id(&a.universe), &c, &id(&a.universe)).unwrap();
        assert_eq!(am.d.universe, s(&["v", "x", "x'"]));
        assert!(!am.d.holds("R", &s(&["x", "x'"])));
        assert_eq!(am.d.tuples("R").count(), 4);
    }

    #[test]
    fn equivalence_amalgam_merges_classes() {
        let o = EquivalenceOracle;
        let a = EquivalenceOracle::from_classes(&[s(&["p"]), s(&["q"])]);
        let b = EquivalenceOracle::from_classes(&[s(&["p", "x"]), s(&["q"])]);
        let c = EquivalenceOracle::from_classes(&[s(&["p", "y"]), s(&["q"])]);
        let am = o.strong_amalgamate(&a, &b, &id(&a.universe), &c, &id(&a.universe)).unwrap();
        assert!(am.d.holds("E", &s(&["x", "y"])));
        assert!(!am.d.holds("E", &s(&["x", "q"])));
        assert!(o.member(&am.d));
    }

    #[test]
    fn membership() {
        let o = EquivalenceOracle;
        let mut bad = FinRelStructure::empty(s(&["a", "b", "c"]), o.signature());
        for x in ["a", "b", "c"] {
            bad.insert("E", s(&[x, x])).unwrap();
        }
        for (x, y) in [("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")] {
            bad.insert("E", s(&[x, y])).unwrap();
        }
        assert!(!o.member(&bad));
        let mut loopy = FinRelStructure::empty(s(&["a"]), GraphOracle.signature());
        loopy.insert("R", s(&["a", "a"])).unwrap();
        assert!(!GraphOracle.member(&loopy));
        assert!(!GraphOracle.member(&o.extend(&bad, &[])));
    }

    #[test]
    fn random_extensions_are_members_over_base() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let oracles: [&dyn BaseClassOracle; 2] = [&GraphOracle, &EquivalenceOracle];
        for o in oracles {
            for _ in 0..50 {
                let base = o.random_extension(&mut rng, &FinRelStructure::empty(vec![], o.signature()), &s(&["a", "b"]));
                let ext = o.random_extension(&mut rng, &base, &s(&["c", "d"]));
                assert!(o.member(&base) && o.member(&ext));
                assert!(ext.restrict(&base.universe).same_as(&base));
                assert!(o.extend(&base, &s(&["z"])).restrict(&base.universe).same_as(&base));
            }
        }
    }
}
