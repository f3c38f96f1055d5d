//! Set-system semantics for tree and array patterns: a formula instance is a
//! subset of a finite domain, consistency is nonempty intersection.

mod sets;
mod tree;
mod verify;
mod witness;

pub use sets::{intersect_all, is_consistent, is_k_inconsistent, SetSystem, Subset};
pub use tree::{InpArray, LabeledTree};
pub use verify::{check, check_tree_kind, verify, verify_with, DEFAULT_CAP};
pub use witness::{canonical_witness, cdt_from_inp, Dims, WitnessBudget};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::treeidx::Node;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("malformed payload: {0}")]
    Malformed(String),
    #[error("set {0} has elements outside the domain")]
    OutsideDomain(String),
    #[error("duplicate set name {0}")]
    DuplicateName(String),
    #[error("dimensions too large: {0}")]
    TooLarge(String),
}

/// Pattern kinds with their parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Kind {
    /// Consistent paths, `k`-inconsistent sibling families.
    Tp { k: usize },
    /// Consistent paths, incomparable pairs inconsistent.
    Tp1,
    /// Array with `k`-inconsistent rows and consistent transversals.
    Tp2 { k: usize },
    Sop1,
    Sop2,
    #[serde(rename = "ktp1")]
    KTp1 { k: usize },
    #[serde(rename = "weak_ktp1")]
    WeakKTp1 { k: usize },
    /// Per-level sibling bounds, indexed by labeled level `1..depth`.
    Cdt { n: Vec<usize> },
    CdtN { n: usize },
    Sct,
    SctK { k: usize },
    /// Per-row bounds.
    Inp { n: Vec<usize> },
}

impl Kind {
    pub fn is_array(&self) -> bool {
        matches!(self, Kind::Tp2 { .. } | Kind::Inp { .. })
    }

    pub fn needs_binary(&self) -> bool {
        matches!(self, Kind::Sop1 | Kind::Sop2)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Tp { .. } => "tp",
            Kind::Tp1 => "tp1",
            Kind::Tp2 { .. } => "tp2",
            Kind::Sop1 => "sop1",
            Kind::Sop2 => "sop2",
            Kind::KTp1 { .. } => "ktp1",
            Kind::WeakKTp1 { .. } => "weak_ktp1",
            Kind::Cdt { .. } => "cdt",
            Kind::CdtN { .. } => "cdt_n",
            Kind::Sct => "sct",
            Kind::SctK { .. } => "sct_k",
            Kind::Inp { .. } => "inp",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Kind::Tp { k } | Kind::Tp2 { k } | Kind::KTp1 { k } | Kind::WeakKTp1 { k } | Kind::SctK { k } => {
                write!(f, "{}:{k}", self.name())
            }
            Kind::CdtN { n } => write!(f, "cdt_n:{n}"),
            Kind::Cdt { n } | Kind::Inp { n } => write!(f, "{}:{}", self.name(), list(n)),
            _ => f.write_str(self.name()),
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = PatternError;

    /// `name` or `name:params`, e.g. `sop2`, `tp:3`, `cdt:2,2,3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let name = name.trim().to_ascii_lowercase().replace('-', "_");
        let bad = |m: &str| PatternError::BadParam(format!("{s:?}: {m}"));
        let one = || -> Result<usize, PatternError> {
            arg.ok_or_else(|| bad("missing parameter"))?
                .trim()
                .parse()
                .map_err(|_| bad("parameter must be a natural number"))
        };
        let many = || -> Result<Vec<usize>, PatternError> {
            let a = arg.ok_or_else(|| bad("missing parameter list"))?;
            if a.trim().is_empty() {
                return Ok(Vec::new());
            }
            a.split(',')
                .map(|x| x.trim().parse().map_err(|_| bad("bad list entry")))
                .collect()
        };
        let no_arg = |k: Kind| match arg {
            None => Ok(k),
            Some(_) => Err(bad("takes no parameter")),
        };
        match name.as_str() {
            "tp" => Ok(Kind::Tp { k: one()? }),
            "tp1" => no_arg(Kind::Tp1),
            "tp2" => Ok(Kind::Tp2 { k: arg.map_or(Ok(2), |_| one())? }),
            "sop1" => no_arg(Kind::Sop1),
            "sop2" => no_arg(Kind::Sop2),
            "ktp1" => Ok(Kind::KTp1 { k: one()? }),
            "weak_ktp1" | "weakktp1" => Ok(Kind::WeakKTp1 { k: one()? }),
            "cdt" => Ok(Kind::Cdt { n: many()? }),
            "cdt_n" | "cdtn" => Ok(Kind::CdtN { n: one()? }),
            "sct" => no_arg(Kind::Sct),
            "sct_k" | "sctk" => Ok(Kind::SctK { k: one()? }),
            "inp" => Ok(Kind::Inp { n: many()? }),
            _ => Err(bad("unknown pattern kind")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Tree(LabeledTree),
    Array(InpArray),
}

/// A failing tuple, path or transversal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Violation {
    /// The labels along the path to this maximal node have empty intersection.
    Path { node: Node },
    /// A family required to be inconsistent has a common element.
    Consistent { nodes: Vec<Node> },
    /// A subfamily of one row has a common element.
    Row { row: usize, cols: Vec<usize> },
    /// The cells picked by this choice of columns have empty intersection.
    Transversal { cols: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// More violations exist than were listed.
    #[serde(default)]
    pub truncated: bool,
}

/// A claimed pattern witness with its (optional) verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub kind: Kind,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl Certificate {
    pub fn new(kind: Kind, payload: Payload) -> Self {
        Certificate {
            kind,
            payload,
            verdict: None,
        }
    }

    pub fn tree(kind: Kind, t: LabeledTree) -> Self {
        Self::new(kind, Payload::Tree(t))
    }

    pub fn array(kind: Kind, a: InpArray) -> Self {
        Self::new(kind, Payload::Array(a))
    }

    pub fn is_verified(&self) -> bool {
        self.verdict.as_ref().is_some_and(|v| v.ok)
    }

    pub fn as_tree(&self) -> Option<&LabeledTree> {
        match &self.payload {
            Payload::Tree(t) => Some(t),
            Payload::Array(_) => None,
        }
    }

    pub fn as_array(&self) -> Option<&InpArray> {
        match &self.payload {
            Payload::Array(a) => Some(a),
            Payload::Tree(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parse_round_trip() {
        for s in ["tp:3", "tp1", "tp2:2", "sop1", "sop2", "ktp1:3", "weak_ktp1:2", "cdt:2,3", "cdt_n:2", "sct", "sct_k:4", "inp:2,2"] {
            let k: Kind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert_eq!("TP2".parse::<Kind>().unwrap(), Kind::Tp2 { k: 2 });
        assert!("sop2:3".parse::<Kind>().is_err());
        assert!("nope".parse::<Kind>().is_err());
        assert!("tp".parse::<Kind>().is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let shape = crate::treeidx::TreeShape::new(2, 2).unwrap();
        let t = LabeledTree::from_fn(shape, 2, |n| Subset::from_elems(2, [n.entries()[0] as usize]));
        let c = Certificate::tree(Kind::SctK { k: 3 }, t);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["kind"], "sct_k");
        assert_eq!(v["params"]["k"], 3);
        assert!(v["payload"]["tree"].is_object());
        let back: Certificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
        let unit = serde_json::to_value(Certificate::tree(Kind::Sop2, back.as_tree().unwrap().clone())).unwrap();
        assert_eq!(unit["kind"], "sop2");
        let back: Certificate = serde_json::from_value(unit).unwrap();
        assert_eq!(back.kind, Kind::Sop2);
    }
}
