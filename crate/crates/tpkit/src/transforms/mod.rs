//! Constructive pattern transformations over set semantics. Every output is
//! re-verified; a postcondition failure is reported as an error, never
//! returned as a certificate.

mod aleph1;
mod comb;
mod inp;
mod sct;

pub use aleph1::{aleph1_stage, Aleph1Report};
pub use comb::{comb_transport, tp1_to_sop2};
pub use inp::{inp_halving, inp_halving_step};
pub use sct::{cdt2_to_sct, cdt_to_sctk_or_inp, sctk_to_cdt2, sctk_to_cdt2_step, Dichotomy};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::patterns::{verify, Certificate, Kind, PatternError, Violation};
use crate::treeops::{NodeMapRef, OpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("input does not verify as {kind}: {violations:?}")]
    InputRejected { kind: Kind, violations: Vec<Violation> },
    #[error("transform expects {expected}, got {got}")]
    WrongKind { expected: String, got: Kind },
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("output of {transform} does not verify as {kind}: {violations:?}")]
    Postcondition {
        transform: String,
        kind: Kind,
        violations: Vec<Violation>,
    },
    #[error("no violating tuple yields a verifying inp-pattern ({tried} tried)")]
    ExtractionFailed { tried: usize },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// What a transform did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub transform: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_fired: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_k: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub ops_applied: Vec<NodeMapRef>,
}

impl Provenance {
    fn new(transform: &str) -> Self {
        Provenance {
            transform: transform.to_string(),
            case_fired: None,
            minimal_k: None,
            n: None,
            ops_applied: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transformed {
    pub certificate: Certificate,
    pub provenance: Provenance,
}

/// Re-checks an input certificate from scratch.
fn verified_input(c: &Certificate) -> Result<(), TransformError> {
    let v = verify(c)?;
    match v.verdict {
        Some(ref x) if x.ok => Ok(()),
        Some(x) => Err(TransformError::InputRejected {
            kind: c.kind.clone(),
            violations: x.violations,
        }),
        None => unreachable!("verify sets a verdict"),
    }
}

/// Verifies an output, turning a failure into a postcondition error.
fn checked_output(transform: &str, c: Certificate) -> Result<Certificate, TransformError> {
    let c = verify(&c)?;
    let v = c.verdict.clone().expect("verify sets a verdict");
    if v.ok {
        Ok(c)
    } else {
        Err(TransformError::Postcondition {
            transform: transform.to_string(),
            kind: c.kind,
            violations: v.violations,
        })
    }
}

/// Per-level sibling bounds (labeled levels `1..depth`) of a tree kind that
/// implies a cdt-pattern, or `None`.
pub fn cdt_bounds(kind: &Kind, depth: usize) -> Option<Vec<usize>> {
    let levels = depth.saturating_sub(1);
    match kind {
        Kind::Cdt { n } => Some(n.clone()),
        Kind::CdtN { n: k } | Kind::Tp { k } => Some(vec![*k; levels]),
        _ => None,
    }
}

fn ceil_half(k: usize) -> usize {
    k.div_ceil(2).max(2)
}
