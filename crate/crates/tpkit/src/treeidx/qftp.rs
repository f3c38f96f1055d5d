use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::Node;

/// Index language for quantifier-free types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lang {
    /// `{⊲, ∧, <_lex}`
    L0,
    /// `L0` plus level predicates.
    Ls,
}

impl std::str::FromStr for Lang {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l0" => Ok(Lang::L0),
            "ls" => Ok(Lang::Ls),
            _ => Err(format!("unknown language {s:?} (expected L0 or Ls)")),
        }
    }
}

/// Canonical quantifier-free type of a node tuple.
///
/// Terms are the pairwise meets `m_ij` for `i <= j`, listed as
/// `(0,0), (0,1), .., (0,n-1), (1,1), ..`, with `m_ii` the i-th entry.
/// Equality ignores `terms` and compares only the relational data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QfType {
    pub lang: Lang,
    pub arity: usize,
    pub terms: Vec<Node>,
    pub eq: Vec<Vec<usize>>,
    pub le: Vec<Vec<bool>>,
    pub lex: Vec<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
}

impl QfType {
    fn key(&self) -> (Lang, usize, &[Vec<usize>], &[Vec<bool>], &[Vec<bool>], Option<&[usize]>) {
        (
            self.lang,
            self.arity,
            &self.eq,
            &self.le,
            &self.lex,
            self.levels.as_deref(),
        )
    }
}

impl PartialEq for QfType {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for QfType {}

impl Hash for QfType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// The `(i, j)` pairs, `i <= j`, in term order.
pub fn term_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

pub fn qftp(t: &[Node], lang: Lang) -> QfType {
    let terms: Vec<Node> = term_pairs(t.len())
        .into_iter()
        .map(|(i, j)| if i == j { t[i].clone() } else { t[i].meet(&t[j]) })
        .collect();
    let m = terms.len();

    let mut class_of: Vec<Option<usize>> = vec![None; m];
    let mut eq: Vec<Vec<usize>> = Vec::new();
    for a in 0..m {
        if class_of[a].is_some() {
            continue;
        }
        let c = eq.len();
        let mut members = Vec::new();
        for b in a..m {
            if class_of[b].is_none() && terms[b] == terms[a] {
                class_of[b] = Some(c);
                members.push(b);
            }
        }
        eq.push(members);
    }

    let le = terms
        .iter()
        .map(|x| terms.iter().map(|y| x.is_prefix_of(y)).collect())
        .collect();
    let lex = terms
        .iter()
        .map(|x| terms.iter().map(|y| x < y).collect())
        .collect();
    let levels = match lang {
        Lang::L0 => None,
        Lang::Ls => Some(terms.iter().map(Node::level).collect()),
    };
    QfType {
        lang,
        arity: t.len(),
        terms,
        eq,
        le,
        lex,
        levels,
    }
}

/// Closure of `t` under `∧`, deduplicated, in canonical (level, lex) order.
///
/// Pairwise meets already form the closure: `(a∧b)∧c` is the shorter of
/// `a∧b` and `a∧c`.
pub fn meet_closure(t: &[Node]) -> Vec<Node> {
    let mut out = pairwise_meets(t);
    out.sort_by(Node::canonical_cmp);
    out.dedup();
    out
}

/// As [`meet_closure`] but enumerated in `<_lex` order.
pub fn meet_closure_lex(t: &[Node]) -> Vec<Node> {
    let mut out = pairwise_meets(t);
    out.sort();
    out.dedup();
    out
}

fn pairwise_meets(t: &[Node]) -> Vec<Node> {
    term_pairs(t.len())
        .into_iter()
        .map(|(i, j)| t[i].meet(&t[j]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treeidx::TreeShape;

    fn n(v: &[u32]) -> Node {
        Node::new(v.to_vec())
    }

    #[test]
    fn examples() {
        assert_eq!(
            qftp(&[n(&[0]), n(&[1])], Lang::L0),
            qftp(&[n(&[0]), n(&[2])], Lang::L0)
        );
        let a = [n(&[0, 0]), n(&[1])];
        let b = [n(&[0]), n(&[1])];
        assert_eq!(qftp(&a, Lang::L0), qftp(&b, Lang::L0));
        assert_ne!(qftp(&a, Lang::Ls), qftp(&b, Lang::Ls));
        let empty = qftp(&[], Lang::Ls);
        assert_eq!(empty.arity, 0);
        assert!(empty.terms.is_empty());
    }

    #[test]
    fn closure_example() {
        let c = meet_closure(&[n(&[0, 0]), n(&[0, 1]), n(&[1])]);
        assert_eq!(c, vec![n(&[]), n(&[0]), n(&[1]), n(&[0, 0]), n(&[0, 1])]);
        assert_eq!(meet_closure(&[n(&[2, 1])]), vec![n(&[2, 1])]);
    }

    fn fixpoint_closure(t: &[Node]) -> Vec<Node> {
        let mut set: Vec<Node> = Vec::new();
        for x in t {
            if !set.contains(x) {
                set.push(x.clone());
            }
        }
        loop {
            let mut grew = false;
            for i in 0..set.len() {
                for j in 0..set.len() {
                    let m = set[i].meet(&set[j]);
                    if !set.contains(&m) {
                        set.push(m);
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        set.sort_by(Node::canonical_cmp);
        set
    }

    #[test]
    fn closure_matches_fixpoint_on_random_tuples() {
        use rand::{Rng, SeedableRng};
        let shape = TreeShape::new(3, 4).unwrap();
        let nodes = shape.nodes();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t: Vec<Node> = (0..5)
                .map(|_| nodes[rng.gen_range(0..nodes.len())].clone())
                .collect();
            assert_eq!(meet_closure(&t), fixpoint_closure(&t));
        }
    }

    #[test]
    fn equality_ignores_terms() {
        let a = qftp(&[n(&[0]), n(&[1])], Lang::Ls);
        let b = qftp(&[n(&[2]), n(&[5])], Lang::Ls);
        assert_ne!(a.terms, b.terms);
        assert_eq!(a, b);
    }

    #[test]
    fn json_fields() {
        let v = serde_json::to_value(qftp(&[n(&[0]), n(&[1, 2])], Lang::Ls)).unwrap();
        for f in ["lang", "arity", "terms", "eq", "le", "lex", "levels"] {
            assert!(v.get(f).is_some(), "missing {f}");
        }
        assert_eq!(v["terms"][2], "1.2");
        let l0 = serde_json::to_value(qftp(&[n(&[0])], Lang::L0)).unwrap();
        assert!(l0.get("levels").is_none());
    }
}
