use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::oracle::BaseClassOracle;
use super::pasting::Fragment;
use super::structure::{FinRelStructure, PfcStructure};

/// Common part and two extensions, related by name inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamationProblem {
    pub common: PfcStructure,
    pub left: PfcStructure,
    pub right: PfcStructure,
}

fn names(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// Up to 2 common objects plus up to 2 more on each side, and up to 2
/// common parameters plus up to 1 more on each side. Both sides use the
/// same fresh names, so the amalgam has to rename.
pub fn random_problem(rng: &mut dyn RngCore, oracle: &dyn BaseClassOracle) -> AmalgamationProblem {
    let na = rng.gen_range(0..=2);
    let nd = rng.gen_range(0..=2);
    let a = names("o", 0..na);
    let d = names("p", 0..nd);
    let empty = FinRelStructure::empty(Vec::new(), oracle.signature());
    let mut common = PfcStructure::new(a.clone(), oracle.signature());
    for p in &d {
        let s = oracle.random_extension(rng, &empty, &a);
        common.set_structure(p, &s).expect("well formed");
    }
    let side = |rng: &mut dyn RngCore| {
        let extra = names("o", na..na + rng.gen_range(0..=2));
        let mut objects = a.clone();
        objects.extend(extra.iter().cloned());
        let mut s = PfcStructure::new(objects.clone(), oracle.signature());
        for p in &d {
            let base = common.structure(p).expect("declared");
            s.set_structure(p, &oracle.random_extension(rng, &base, &extra)).expect("well formed");
        }
        for p in names("p", nd..nd + rng.gen_range(0..=1)) {
            s.set_structure(&p, &oracle.random_extension(rng, &empty, &objects)).expect("well formed");
        }
        s
    };
    let left = side(rng);
    let right = side(rng);
    AmalgamationProblem { common, left, right }
}

/// Shared objects `c0..` (up to 4) and up to 4 parameters, each with a
/// random structure and a random one-point extension.
pub fn random_fragments(rng: &mut dyn RngCore, oracle: &dyn BaseClassOracle) -> (Vec<String>, Vec<Fragment>) {
    let objects = names("c", 0..rng.gen_range(0..=4));
    let empty = FinRelStructure::empty(Vec::new(), oracle.signature());
    let fragments = (0..rng.gen_range(1..=4))
        .map(|i| {
            let base = oracle.random_extension(rng, &empty, &objects);
            let new_point = format!("d{i}");
            let extended = oracle.random_extension(rng, &base, std::slice::from_ref(&new_point));
            Fragment {
                parameter: format!("p{i}"),
                base,
                extended,
                new_point,
            }
        })
        .collect();
    (objects, fragments)
}

/// Input for pasting2: parameters `b0`, `b1` agreeing on `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pasting2Problem {
    pub structure: PfcStructure,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub b0: String,
    pub b1: String,
}

/// Up to 2 objects each in `A∖C`, `B∖C`, `C` and outside all three.
pub fn random_pasting2(rng: &mut dyn RngCore, oracle: &dyn BaseClassOracle) -> Pasting2Problem {
    let c = names("c", 0..rng.gen_range(0..=2));
    let a_only = names("a", 0..rng.gen_range(0..=2));
    let b_only = names("b", 0..rng.gen_range(0..=2));
    let rest = names("r", 0..rng.gen_range(0..=2));
    let mut others = a_only.clone();
    others.extend(b_only.iter().cloned());
    others.extend(rest.iter().cloned());
    let mut objects = c.clone();
    objects.extend(others.iter().cloned());
    let empty = FinRelStructure::empty(Vec::new(), oracle.signature());
    let on_c = oracle.random_extension(rng, &empty, &c);
    let mut structure = PfcStructure::new(objects, oracle.signature());
    for p in ["b0", "b1"] {
        let s = oracle.random_extension(rng, &on_c, &others);
        structure.set_structure(p, &s).expect("well formed");
    }
    let mut a = a_only;
    a.extend(c.iter().cloned());
    let mut b = c.clone();
    b.extend(b_only);
    Pasting2Problem {
        structure,
        a,
        b,
        c,
        b0: "b0".into(),
        b1: "b1".into(),
    }
}
