//! Parametrized Fraïssé classes over a finite base class: two-sorted
//! structures, membership, strong amalgamation, pasting and the imaginary
//! cover.

mod amalgam;
mod oracle;
mod pasting;
mod random;
mod structure;

pub use amalgam::{check_pfc_amalgam, pfc_amalgamate, PfcAmalgam, PfcEmbedding};
pub use oracle::{check_amalgam, object_pushout, Amalgam, BaseClassOracle, EquivalenceOracle, GraphOracle};
pub use pasting::{imaginary_cover, pasting1_build, pasting2_build, tp2_demo, Fragment, Pasting2};
pub use random::{random_fragments, random_pasting2, random_problem, AmalgamationProblem, Pasting2Problem};
pub use structure::{is_embedding, Embedding, FinRelStructure, PfcStructure, RelSym, Relations};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfcError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("not an embedding: {0}")]
    NotEmbedding(String),
    #[error("not in the base class: {0}")]
    NotMember(String),
    #[error("incompatible input: {0}")]
    Incompatible(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// Built-in oracle by name (`graph` or `equivalence`).
pub fn oracle_by_name(name: &str) -> Option<&'static dyn BaseClassOracle> {
    match name {
        "graph" | "graphs" => Some(&GraphOracle),
        "equivalence" | "eq" => Some(&EquivalenceOracle),
        _ => None,
    }
}

/// Whether every `A_b` is in the base class.
pub fn in_class(s: &PfcStructure, base: &dyn BaseClassOracle) -> Result<bool, PfcError> {
    if structure::sig_set(&s.signature) != structure::sig_set(&base.signature()) {
        return Err(PfcError::SignatureMismatch(format!(
            "structure signature differs from the {} class",
            base.name()
        )));
    }
    s.validate()?;
    for b in &s.parameters {
        if !base.member(&s.structure(b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
