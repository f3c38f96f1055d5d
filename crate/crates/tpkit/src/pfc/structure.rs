use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::PfcError;

/// Relation tuples by relation name.
pub type Relations = BTreeMap<String, BTreeSet<Vec<String>>>;

/// Element renaming; must be injective where used as an embedding.
pub type Embedding = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelSym {
    pub name: String,
    pub arity: usize,
}

impl RelSym {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelSym {
            name: name.into(),
            arity,
        }
    }
}

/// A finite relational structure with named elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinRelStructure {
    pub universe: Vec<String>,
    pub signature: Vec<RelSym>,
    #[serde(default)]
    pub relations: Relations,
}

impl FinRelStructure {
    /// No tuples in any relation.
    pub fn empty(universe: Vec<String>, signature: Vec<RelSym>) -> Self {
        let relations = signature.iter().map(|r| (r.name.clone(), BTreeSet::new())).collect();
        FinRelStructure {
            universe,
            signature,
            relations,
        }
    }

    pub fn validate(&self) -> Result<(), PfcError> {
        let elems: BTreeSet<&String> = self.universe.iter().collect();
        if elems.len() != self.universe.len() {
            return Err(PfcError::Malformed("repeated universe element".into()));
        }
        let names: BTreeSet<&String> = self.signature.iter().map(|r| &r.name).collect();
        if names.len() != self.signature.len() {
            return Err(PfcError::Malformed("repeated relation symbol".into()));
        }
        for (name, tuples) in &self.relations {
            let sym = self
                .symbol(name)
                .ok_or_else(|| PfcError::SignatureMismatch(format!("relation {name} is not declared")))?;
            for t in tuples {
                if t.len() != sym.arity {
                    return Err(PfcError::Malformed(format!(
                        "{name} has arity {}, tuple {t:?} does not",
                        sym.arity
                    )));
                }
                if let Some(x) = t.iter().find(|x| !elems.contains(x)) {
                    return Err(PfcError::Malformed(format!("{x} is not in the universe")));
                }
            }
        }
        Ok(())
    }

    pub fn symbol(&self, name: &str) -> Option<&RelSym> {
        self.signature.iter().find(|r| r.name == name)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.universe.iter().any(|u| u == x)
    }

    pub fn holds(&self, rel: &str, tuple: &[String]) -> bool {
        self.relations.get(rel).is_some_and(|s| s.contains(tuple))
    }

    pub fn insert(&mut self, rel: &str, tuple: Vec<String>) -> Result<(), PfcError> {
        let sym = self
            .symbol(rel)
            .ok_or_else(|| PfcError::SignatureMismatch(format!("relation {rel} is not declared")))?;
        if tuple.len() != sym.arity {
            return Err(PfcError::Malformed(format!("{rel} has arity {}", sym.arity)));
        }
        if let Some(x) = tuple.iter().find(|x| !self.contains(x)) {
            return Err(PfcError::Malformed(format!("{x} is not in the universe")));
        }
        self.relations.entry(rel.to_string()).or_default().insert(tuple);
        Ok(())
    }

    /// Tuples of `rel`, empty if none.
    pub fn tuples(&self, rel: &str) -> impl Iterator<Item = &Vec<String>> {
        self.relations.get(rel).into_iter().flatten()
    }

    /// Induced substructure on the listed elements (universe order kept).
    pub fn restrict(&self, keep: &[String]) -> FinRelStructure {
        let keep: BTreeSet<&String> = keep.iter().collect();
        let universe = self.universe.iter().filter(|x| keep.contains(x)).cloned().collect();
        let relations = self
            .signature
            .iter()
            .map(|r| {
                let ts = self
                    .tuples(&r.name)
                    .filter(|t| t.iter().all(|x| keep.contains(x)))
                    .cloned()
                    .collect();
                (r.name.clone(), ts)
            })
            .collect();
        FinRelStructure {
            universe,
            signature: self.signature.clone(),
            relations,
        }
    }

    /// Copy with every element renamed through `map` (unmapped names kept).
    pub fn rename(&self, map: &Embedding) -> FinRelStructure {
        let f = |x: &String| map.get(x).unwrap_or(x).clone();
        FinRelStructure {
            universe: self.universe.iter().map(f).collect(),
            signature: self.signature.clone(),
            relations: self
                .relations
                .iter()
                .map(|(k, ts)| (k.clone(), ts.iter().map(|t| t.iter().map(f).collect()).collect()))
                .collect(),
        }
    }

    /// Same elements and tuples, ignoring universe order and empty relations.
    pub fn same_as(&self, other: &FinRelStructure) -> bool {
        let set = |s: &FinRelStructure| s.universe.iter().cloned().collect::<BTreeSet<_>>();
        let rels = |s: &FinRelStructure| {
            s.relations
                .iter()
                .filter(|(_, t)| !t.is_empty())
                .map(|(k, t)| (k.clone(), t.clone()))
                .collect::<Relations>()
        };
        set(self) == set(other)
            && sig_set(&self.signature) == sig_set(&other.signature)
            && rels(self) == rels(other)
    }
}

pub(crate) fn sig_set(s: &[RelSym]) -> BTreeSet<RelSym> {
    s.iter().cloned().collect()
}

/// Whether `map` embeds `from` into `to`: injective on `from`, and a tuple
/// holds in `from` exactly when its image holds in `to`.
pub fn is_embedding(map: &Embedding, from: &FinRelStructure, to: &FinRelStructure) -> bool {
    let Some(image) = from
        .universe
        .iter()
        .map(|x| map.get(x).filter(|y| to.contains(y)).cloned())
        .collect::<Option<Vec<String>>>()
    else {
        return false;
    };
    let distinct: BTreeSet<&String> = image.iter().collect();
    distinct.len() == image.len()
        && sig_set(&from.signature) == sig_set(&to.signature)
        && from.rename(map).same_as(&to.restrict(&image))
}

/// `name`, or `name` with primes appended until it is not taken.
pub(crate) fn fresh(name: &str, taken: &BTreeSet<String>) -> String {
    let mut n = name.to_string();
    while taken.contains(&n) {
        n.push('\'');
    }
    n
}

/// Two-sorted structure: objects, parameters and one structure on the
/// objects per parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfcStructure {
    pub objects: Vec<String>,
    pub parameters: Vec<String>,
    pub signature: Vec<RelSym>,
    #[serde(default)]
    pub structures: BTreeMap<String, Relations>,
}

impl PfcStructure {
    pub fn new(objects: Vec<String>, signature: Vec<RelSym>) -> Self {
        PfcStructure {
            objects,
            parameters: Vec::new(),
            signature,
            structures: BTreeMap::new(),
        }
    }

    /// Adds or replaces parameter `b` with structure `s` on the objects.
    pub fn set_structure(&mut self, b: &str, s: &FinRelStructure) -> Result<(), PfcError> {
        s.validate()?;
        if sig_set(&s.signature) != sig_set(&self.signature) {
            return Err(PfcError::SignatureMismatch(format!("structure for {b}")));
        }
        let want: BTreeSet<&String> = self.objects.iter().collect();
        let got: BTreeSet<&String> = s.universe.iter().collect();
        if want != got {
            return Err(PfcError::Malformed(format!("structure for {b} is not on the objects")));
        }
        if !self.parameters.iter().any(|p| p == b) {
            self.parameters.push(b.to_string());
        }
        self.structures.insert(b.to_string(), s.relations.clone());
        Ok(())
    }

    /// `A_b`.
    pub fn structure(&self, b: &str) -> Result<FinRelStructure, PfcError> {
        if !self.parameters.iter().any(|p| p == b) {
            return Err(PfcError::Malformed(format!("unknown parameter {b}")));
        }
        let mut s = FinRelStructure::empty(self.objects.clone(), self.signature.clone());
        if let Some(r) = self.structures.get(b) {
            for (k, ts) in r {
                s.relations.insert(k.clone(), ts.clone());
            }
        }
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PfcError> {
        let ps: BTreeSet<&String> = self.parameters.iter().collect();
        if ps.len() != self.parameters.len() {
            return Err(PfcError::Malformed("repeated parameter".into()));
        }
        if let Some(b) = self.structures.keys().find(|b| !ps.contains(b)) {
            return Err(PfcError::Malformed(format!("structure for undeclared parameter {b}")));
        }
        FinRelStructure::empty(self.objects.clone(), self.signature.clone()).validate()?;
        for b in &self.parameters {
            self.structure(b)?.validate()?;
        }
        Ok(())
    }

    /// Substructure on the given objects and parameters.
    pub fn restrict(&self, objects: &[String], parameters: &[String]) -> Result<PfcStructure, PfcError> {
        let mut out = PfcStructure::new(objects.to_vec(), self.signature.clone());
        for b in parameters {
            out.set_structure(b, &self.structure(b)?.restrict(objects))?;
        }
        Ok(out)
    }

    /// Same objects, parameters and per-parameter tuples, ignoring order.
    pub fn same_as(&self, other: &PfcStructure) -> bool {
        let set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<_>>();
        set(&self.objects) == set(&other.objects)
            && set(&self.parameters) == set(&other.parameters)
            && self.parameters.iter().all(|b| match (self.structure(b), other.structure(b)) {
                (Ok(x), Ok(y)) => x.same_as(&y),
                _ => false,
            })
    }
}
