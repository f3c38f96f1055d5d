//! Finite set systems: subsets of `{0..m-1}` standing for formula instances.

use fixedbitset::FixedBitSet;
use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PatternError;

/// A subset of the domain `{0..domain_size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subset(FixedBitSet);

impl Subset {
    pub fn empty(domain_size: usize) -> Self {
        Subset(FixedBitSet::with_capacity(domain_size))
    }

    pub fn full(domain_size: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(domain_size);
        b.insert_range(..);
        Subset(b)
    }

    pub fn from_elems(domain_size: usize, elems: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(domain_size);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Grows the domain if `e` lies beyond it.
    pub fn insert(&mut self, e: usize) {
        if e >= self.0.len() {
            self.0.grow(e + 1);
        }
        self.0.insert(e);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(e)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn domain_size(&self) -> usize {
        self.0.len()
    }

    pub fn resize(&mut self, domain_size: usize) {
        self.0.grow(domain_size);
    }

    pub fn elems(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn intersect_with(&mut self, other: &Subset) {
        self.0.intersect_with(&other.0);
    }

    pub fn union_with(&mut self, other: &Subset) {
        self.0.union_with(&other.0);
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.ones().collect()
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.ones())
    }
}

impl<'de> Deserialize<'de> for Subset {
    /// The domain size is fixed up by the enclosing structure.
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        let n = v.iter().max().map_or(0, |m| m + 1);
        Ok(Subset::from_elems(n, v))
    }
}

/// Intersection of a family; the empty family yields the full domain.
pub fn intersect_all<'a>(domain_size: usize, sets: impl IntoIterator<Item = &'a Subset>) -> Subset {
    let mut acc = Subset::full(domain_size);
    for s in sets {
        acc.intersect_with(s);
    }
    acc
}

/// Nonempty intersection; the empty family counts as consistent.
pub fn is_consistent(sets: &[&Subset]) -> bool {
    match sets.split_first() {
        None => true,
        Some((first, rest)) => {
            let mut acc = (*first).clone();
            for s in rest {
                acc.intersect_with(s);
                if acc.is_empty() {
                    return false;
                }
            }
            !acc.is_empty()
        }
    }
}

/// Every `k`-element subfamily (by position) has empty intersection.
pub fn is_k_inconsistent(sets: &[&Subset], k: usize) -> Result<bool, PatternError> {
    if k < 2 {
        return Err(PatternError::BadParam(format!(
            "k-inconsistency needs k >= 2, got {k}"
        )));
    }
    if sets.len() < k {
        return Ok(true);
    }
    let domain = sets.iter().map(|s| s.domain_size()).max().unwrap_or(0);
    Ok((0..domain).all(|x| sets.iter().filter(|s| s.contains(x)).count() < k))
}

/// A finite domain with named subsets, in insertion order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub domain_size: usize,
    pub sets: IndexMap<String, Subset>,
}

impl SetSystem {
    pub fn new(domain_size: usize) -> Self {
        SetSystem {
            domain_size,
            sets: IndexMap::new(),
        }
    }

    pub fn add(&mut self, name: impl Into<String>, elems: impl IntoIterator<Item = usize>) -> Result<(), PatternError> {
        let name = name.into();
        let s = Subset::from_elems(self.domain_size, elems);
        if s.domain_size() > self.domain_size {
            return Err(PatternError::OutsideDomain(name));
        }
        if self.sets.contains_key(&name) {
            return Err(PatternError::DuplicateName(name));
        }
        self.sets.insert(name, s);
        Ok(())
    }

    /// Checks every set lies in the domain and pads bitsets to its size.
    pub fn normalize(mut self) -> Result<Self, PatternError> {
        for (name, s) in self.sets.iter_mut() {
            if s.domain_size() > self.domain_size {
                return Err(PatternError::OutsideDomain(name.clone()));
            }
            s.resize(self.domain_size);
        }
        Ok(self)
    }

    pub fn family(&self) -> Vec<Subset> {
        self.sets.values().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Subset {
        Subset::from_elems(3, v.iter().copied())
    }

    #[test]
    fn consistency_examples() {
        assert!(is_consistent(&[]));
        let (a, b, c) = (s(&[0]), s(&[1]), s(&[2]));
        assert!(is_k_inconsistent(&[&a, &b, &c], 2).unwrap());
        let (a, b, c) = (s(&[0, 1]), s(&[1, 2]), s(&[0, 2]));
        assert!(!is_k_inconsistent(&[&a, &b, &c], 2).unwrap());
        assert!(is_k_inconsistent(&[&a, &b, &c], 3).unwrap());
        assert!(is_k_inconsistent(&[&a], 1).is_err());
    }

    #[test]
    fn k_inconsistency_matches_subset_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..6);
            let fam: Vec<Subset> = (0..n)
                .map(|_| Subset::from_elems(5, (0..5).filter(|_| rng.gen_bool(0.5))))
                .collect();
            let refs: Vec<&Subset> = fam.iter().collect();
            for k in 2..5 {
                let naive = (0u32..1 << n)
                    .filter(|m| m.count_ones() as usize == k)
                    .all(|m| {
                        let sub: Vec<&Subset> =
                            (0..n).filter(|i| m >> i & 1 == 1).map(|i| refs[i]).collect();
                        !is_consistent(&sub)
                    });
                assert_eq!(is_k_inconsistent(&refs, k).unwrap(), naive);
            }
        }
    }

    #[test]
    fn set_system_json() {
        let mut sys = SetSystem::new(4);
        sys.add("b", [1, 2]).unwrap();
        sys.add("a", [0]).unwrap();
        assert!(sys.add("a", [3]).is_err());
        assert!(sys.add("z", [9]).is_err());
        let j = serde_json::to_string(&sys).unwrap();
        assert_eq!(j, r#"{"domain_size":4,"sets":{"b":[1,2],"a":[0]}}"#);
        let back: SetSystem = serde_json::from_str::<SetSystem>(&j).unwrap().normalize().unwrap();
        assert_eq!(back, sys);
    }
}
