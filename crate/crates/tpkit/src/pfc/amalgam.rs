use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::oracle::{object_pushout, BaseClassOracle};
use super::structure::{fresh, is_embedding, sig_set, Embedding, PfcStructure};
use super::{in_class, PfcError};

/// Maps of both sorts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfcEmbedding {
    pub objects: Embedding,
    pub parameters: Embedding,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfcAmalgam {
    pub result: PfcStructure,
    pub left: PfcEmbedding,
    pub right: PfcEmbedding,
}

fn identity(v: &[String]) -> Embedding {
    v.iter().map(|x| (x.clone(), x.clone())).collect()
}

fn includes(small: &PfcStructure, big: &PfcStructure, side: &str) -> Result<(), PfcError> {
    let sub = |a: &[String], b: &[String]| {
        let b: BTreeSet<&String> = b.iter().collect();
        a.iter().all(|x| b.contains(x))
    };
    if !sub(&small.objects, &big.objects) || !sub(&small.parameters, &big.parameters) {
        return Err(PfcError::NotEmbedding(format!("common part is not contained in {side}")));
    }
    if !big.restrict(&small.objects, &small.parameters)?.same_as(small) {
        return Err(PfcError::NotEmbedding(format!("{side} does not restrict to the common part")));
    }
    Ok(())
}

/// Strong amalgam of `left` and `right` over `common`, all related by name
/// inclusion.
///
/// Right-only objects and parameters are renamed apart from the left where
/// names clash. One object map serves every shared parameter, whose
/// structure is the base amalgam of the two sides; one-sided parameters are
/// extended by the oracle to the new objects.
pub fn pfc_amalgamate(
    base: &dyn BaseClassOracle,
    common: &PfcStructure,
    left: &PfcStructure,
    right: &PfcStructure,
) -> Result<PfcAmalgam, PfcError> {
    for (s, side) in [(common, "common"), (left, "left"), (right, "right")] {
        s.validate()?;
        if !in_class(s, base)? {
            return Err(PfcError::NotMember(format!("{side} is not in the class")));
        }
    }
    includes(common, left, "left")?;
    includes(common, right, "right")?;

    let a_id = identity(&common.objects);
    let (objects, g, h) = object_pushout(&common.objects, &left.objects, &a_id, &right.objects, &a_id)?;
    let mut taken: BTreeSet<String> = left.parameters.iter().cloned().collect();
    let shared: BTreeSet<&String> = common.parameters.iter().collect();
    let gp = identity(&left.parameters);
    let mut hp = Embedding::new();
    let mut parameters = left.parameters.clone();
    for p in &right.parameters {
        let img = if shared.contains(p) {
            p.clone()
        } else {
            let n = fresh(p, &taken);
            taken.insert(n.clone());
            parameters.push(n.clone());
            n
        };
        hp.insert(p.clone(), img);
    }

    let mut out = PfcStructure::new(objects.clone(), left.signature.clone());
    let h_image: Vec<String> = right.objects.iter().map(|x| h[x].clone()).collect();
    let beyond = |have: &[String]| -> Vec<String> {
        let have: BTreeSet<&String> = have.iter().collect();
        objects.iter().filter(|x| !have.contains(x)).cloned().collect()
    };
    for p in &parameters {
        let s = if shared.contains(p) {
            let l = left.structure(p)?.rename(&g);
            let r = right.structure(p)?.rename(&h);
            base.merge(&objects, &l, &r)
        } else if left.parameters.contains(p) {
            base.extend(&left.structure(p)?, &beyond(&left.objects))
        } else {
            let orig = hp.iter().find(|(_, v)| *v == p).map(|(k, _)| k).expect("renamed");
            base.extend(&right.structure(orig)?.rename(&h), &beyond(&h_image))
        };
        out.set_structure(p, &s)?;
    }
    let am = PfcAmalgam {
        result: out,
        left: PfcEmbedding {
            objects: g,
            parameters: gp,
        },
        right: PfcEmbedding {
            objects: h,
            parameters: hp,
        },
    };
    check_pfc_amalgam(base, common, left, right, &am)?;
    Ok(am)
}

/// Postconditions of [`pfc_amalgamate`].
pub fn check_pfc_amalgam(
    base: &dyn BaseClassOracle,
    common: &PfcStructure,
    left: &PfcStructure,
    right: &PfcStructure,
    am: &PfcAmalgam,
) -> Result<(), PfcError> {
    let fail = |m: &str| Err(PfcError::Internal(m.to_string()));
    let g = &am.left;
    let h = &am.right;
    let commutes = common.objects.iter().all(|x| g.objects.get(x) == h.objects.get(x) && g.objects.get(x).is_some())
        && common
            .parameters
            .iter()
            .all(|p| g.parameters.get(p) == h.parameters.get(p) && g.parameters.get(p).is_some());
    if !commutes {
        return fail("square does not commute");
    }
    let meet = |lv: &[String], lm: &Embedding, rv: &[String], rm: &Embedding| {
        let l: BTreeSet<&String> = lv.iter().filter_map(|x| lm.get(x)).collect();
        let r: BTreeSet<&String> = rv.iter().filter_map(|x| rm.get(x)).collect();
        l.intersection(&r).map(|x| (*x).clone()).collect::<BTreeSet<String>>()
    };
    let base_objs: BTreeSet<String> = common.objects.iter().cloned().collect();
    let base_params: BTreeSet<String> = common.parameters.iter().cloned().collect();
    if meet(&left.objects, &g.objects, &right.objects, &h.objects) != base_objs
        || meet(&left.parameters, &g.parameters, &right.parameters, &h.parameters) != base_params
    {
        return fail("images meet outside the common part");
    }
    for (side, m) in [(left, g), (right, h)] {
        for p in &side.parameters {
            let to = am.result.structure(&m.parameters[p])?;
            if !is_embedding(&m.objects, &side.structure(p)?, &to) {
                return fail("a side does not embed");
            }
        }
    }
    if sig_set(&am.result.signature) != sig_set(&base.signature()) || !in_class(&am.result, base)? {
        return fail("amalgam is not in the class");
    }
    Ok(())
}
