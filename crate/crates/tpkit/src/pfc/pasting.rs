use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::oracle::{BaseClassOracle, EquivalenceOracle};
use super::structure::{fresh, is_embedding, Embedding, FinRelStructure, PfcStructure, RelSym};
use super::PfcError;
use crate::patterns::{Certificate, InpArray, Kind, Subset};

/// One parameter's view: a structure on the shared objects and its
/// extension by one new point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub parameter: String,
    pub base: FinRelStructure,
    pub extended: FinRelStructure,
    pub new_point: String,
}

fn as_set(v: &[String]) -> BTreeSet<&String> {
    v.iter().collect()
}

/// A structure on `objects ∪ {star}` whose structure at each fragment's
/// parameter is that fragment's extension with its new point renamed to
/// `star`.
pub fn pasting1_build(
    oracle: &dyn BaseClassOracle,
    objects: &[String],
    fragments: &[Fragment],
    star: &str,
) -> Result<PfcStructure, PfcError> {
    if objects.iter().any(|x| x == star) {
        return Err(PfcError::Malformed(format!("{star} is already an object")));
    }
    let params: BTreeSet<&String> = fragments.iter().map(|f| &f.parameter).collect();
    if params.len() != fragments.len() {
        return Err(PfcError::Malformed("repeated parameter".into()));
    }
    let mut universe = objects.to_vec();
    universe.push(star.to_string());
    let mut out = PfcStructure::new(universe, oracle.signature());
    for f in fragments {
        let bad = |m: &str| PfcError::Incompatible(format!("fragment {}: {m}", f.parameter));
        f.base.validate()?;
        f.extended.validate()?;
        if as_set(&f.base.universe) != as_set(objects) {
            return Err(bad("base is not on the shared objects"));
        }
        if objects.contains(&f.new_point) {
            return Err(bad("new point is a shared object"));
        }
        let mut want = as_set(objects);
        want.insert(&f.new_point);
        if as_set(&f.extended.universe) != want {
            return Err(bad("extension adds other points"));
        }
        if !f.extended.restrict(objects).same_as(&f.base) {
            return Err(bad("base is not the reduct of the extension"));
        }
        if !oracle.member(&f.extended) {
            return Err(PfcError::NotMember(format!("fragment {}", f.parameter)));
        }
        let m: Embedding = [(f.new_point.clone(), star.to_string())].into_iter().collect();
        out.set_structure(&f.parameter, &f.extended.rename(&m))?;
    }
    for f in fragments {
        let mut iso: Embedding = objects.iter().map(|x| (x.clone(), x.clone())).collect();
        iso.insert(f.new_point.clone(), star.to_string());
        if !is_embedding(&iso, &f.extended, &out.structure(&f.parameter)?) {
            return Err(PfcError::Internal(format!("fragment {} is not realized", f.parameter)));
        }
    }
    Ok(out)
}

/// Output of [`pasting2_build`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pasting2 {
    pub structure: PfcStructure,
    pub parameter: String,
}

/// Adds a fresh parameter whose structure on `A ∪ B ∪ C` is the strong
/// amalgam of `⟨AC⟩` under `b0` and `⟨BC⟩` under `b1` over `⟨C⟩`,
/// extended by the oracle to any further objects.
pub fn pasting2_build(
    oracle: &dyn BaseClassOracle,
    m: &PfcStructure,
    a: &[String],
    b: &[String],
    c: &[String],
    b0: &str,
    b1: &str,
) -> Result<Pasting2, PfcError> {
    m.validate()?;
    let objs = as_set(&m.objects);
    if let Some(x) = a.iter().chain(b).chain(c).find(|x| !objs.contains(x)) {
        return Err(PfcError::Malformed(format!("{x} is not an object")));
    }
    let cs = as_set(c);
    if let Some(x) = a.iter().find(|x| b.contains(x) && !cs.contains(x)) {
        return Err(PfcError::Incompatible(format!("{x} is in A and B but not in C")));
    }
    let union = |xs: &[&[String]]| -> Vec<String> {
        let mut seen = BTreeSet::new();
        xs.iter()
            .flat_map(|v| v.iter())
            .filter(|x| seen.insert((*x).clone()))
            .cloned()
            .collect()
    };
    let ac = union(&[a, c]);
    let bc = union(&[b, c]);
    let s0 = m.structure(b0)?;
    let s1 = m.structure(b1)?;
    let c0 = s0.restrict(c);
    if !c0.same_as(&s1.restrict(c)) {
        return Err(PfcError::Incompatible(format!("{b0} and {b1} differ on C")));
    }
    let left = s0.restrict(&ac);
    let right = s1.restrict(&bc);
    let id = |v: &[String]| -> Embedding { v.iter().map(|x| (x.clone(), x.clone())).collect() };
    let am = oracle.strong_amalgamate(&c0, &left, &id(c), &right, &id(c))?;
    // Names of B outside C are not in A ∪ C, so the pushout keeps them.
    debug_assert!(am.h.iter().all(|(x, y)| x == y));
    let abc = union(&[a, b, c]);
    let rest: Vec<String> = m.objects.iter().filter(|x| !abc.contains(x)).cloned().collect();
    let full = oracle.extend(&am.d, &rest);
    let taken: BTreeSet<String> = m.parameters.iter().cloned().collect();
    let star = fresh("b*", &taken);
    let mut out = m.clone();
    out.set_structure(&star, &full)?;
    let got = out.structure(&star)?;
    if !got.restrict(&ac).same_as(&left) || !got.restrict(&bc).same_as(&right) {
        return Err(PfcError::Internal("new parameter does not agree with b0, b1".into()));
    }
    Ok(Pasting2 {
        structure: out,
        parameter: star,
    })
}

/// Each element becomes a class of `class_size` copies `x:i`; relations
/// hold on copies of related elements, and a new relation (named `E`, or
/// primed if taken) relates copies of the same element.
pub fn imaginary_cover(m: &FinRelStructure, class_size: usize) -> Result<FinRelStructure, PfcError> {
    if class_size == 0 {
        return Err(PfcError::Malformed("class size must be at least 1".into()));
    }
    m.validate()?;
    let copy = |x: &String, i: usize| format!("{x}:{i}");
    let universe: Vec<String> = m.universe.iter().flat_map(|x| (0..class_size).map(move |i| copy(x, i))).collect();
    let taken: BTreeSet<String> = m.signature.iter().map(|r| r.name.clone()).collect();
    let e = fresh("E", &taken);
    let mut signature = m.signature.clone();
    signature.push(RelSym::new(e.clone(), 2));
    let mut out = FinRelStructure::empty(universe, signature);
    for r in &m.signature {
        let lifted = out.relations.entry(r.name.clone()).or_default();
        for t in m.tuples(&r.name) {
            let mut acc: Vec<Vec<String>> = vec![Vec::new()];
            for x in t {
                acc = acc
                    .into_iter()
                    .flat_map(|p| {
                        (0..class_size).map(move |i| {
                            let mut q = p.clone();
                            q.push(copy(x, i));
                            q
                        })
                    })
                    .collect();
            }
            lifted.extend(acc);
        }
    }
    let eq = out.relations.entry(e).or_default();
    for x in &m.universe {
        for i in 0..class_size {
            for j in 0..class_size {
                eq.insert(vec![copy(x, i), copy(x, j)]);
            }
        }
    }
    Ok(out)
}

/// Parametrized equivalence relations realizing a `rows × cols` tp2-array.
///
/// Objects `a0..` lie in distinct classes under every parameter `p_i`; for
/// each `f: rows → cols` a new object `x_f` is pasted in, joining the class
/// of `a_{f(i)}` under `p_i`. Cell `(i, j)` is the set of pasted objects
/// `E_{p_i}`-related to `a_j`.
pub fn tp2_demo(rows: usize, cols: usize) -> Result<(PfcStructure, Certificate), PfcError> {
    if rows == 0 || cols < 2 {
        return Err(PfcError::Malformed("need at least one row and two columns".into()));
    }
    let total = cols
        .checked_pow(rows as u32)
        .filter(|&t| t <= 1 << 16)
        .ok_or_else(|| PfcError::Malformed("too many transversals".into()))?;
    let oracle = EquivalenceOracle;
    let params: Vec<String> = (0..rows).map(|i| format!("p{i}")).collect();
    let points: Vec<String> = (0..cols).map(|j| format!("a{j}")).collect();
    let mut m = PfcStructure::new(points.clone(), oracle.signature());
    let singletons: Vec<Vec<String>> = points.iter().map(|x| vec![x.clone()]).collect();
    for p in &params {
        m.set_structure(p, &EquivalenceOracle::from_classes(&singletons))?;
    }
    let mut pasted = Vec::with_capacity(total);
    for code in 0..total {
        let f: Vec<usize> = (0..rows).map(|i| code / cols.pow((rows - 1 - i) as u32) % cols).collect();
        let name = format!("x{}", f.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("_"));
        let fragments = params
            .iter()
            .zip(&f)
            .map(|(p, &j)| {
                let base = m.structure(p)?;
                let mut classes = EquivalenceOracle::classes(&base);
                let class = classes
                    .iter_mut()
                    .find(|c| c.contains(&points[j]))
                    .expect("every point has a class");
                class.push(name.clone());
                let mut extended = EquivalenceOracle::from_classes(&classes);
                extended.universe = base.universe.iter().cloned().chain([name.clone()]).collect();
                Ok(Fragment {
                    parameter: p.clone(),
                    base,
                    extended,
                    new_point: name.clone(),
                })
            })
            .collect::<Result<Vec<_>, PfcError>>()?;
        m = pasting1_build(&oracle, &m.objects, &fragments, &name)?;
        pasted.push(name);
    }
    let structures: Vec<FinRelStructure> = params.iter().map(|p| m.structure(p)).collect::<Result<_, _>>()?;
    let a = InpArray::from_fn(rows, cols, total, |i, j| {
        Subset::from_elems(
            total,
            pasted
                .iter()
                .enumerate()
                .filter(|(_, x)| structures[i].holds("E", &[(*x).clone(), points[j].clone()]))
                .map(|(d, _)| d),
        )
    });
    Ok((m, Certificate::array(Kind::Tp2 { k: 2 }, a)))
}
