//! Exhaustive witness search: assign sets from a candidate family to the
//! slots of a tree (non-root nodes, canonical order) or array (cells,
//! row-major) so that the result realizes a pattern kind.

mod inp;
mod naive;
mod pruned;

pub use inp::exists_inp_of_depth;
pub use naive::naive_search;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::patterns::{
    check, Certificate, Dims, InpArray, Kind, LabeledTree, PatternError, Payload, SetSystem, Subset,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search space {space} exceeds budget {limit}")]
    BudgetExceeded { space: u128, limit: u128 },
    #[error("set {0:?} is not in the system")]
    UnknownSet(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    /// Largest assignment space an unpruned search will enumerate.
    pub max_space: u128,
    /// Partial assignments a search may visit before giving up.
    pub max_visits: u64,
    #[serde(with = "opt_secs")]
    pub deadline: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_space: 10_000_000,
            max_visits: 200_000_000,
            deadline: None,
        }
    }
}

mod opt_secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        let v = Option::<f64>::deserialize(d)?;
        v.map(|x| Duration::try_from_secs_f64(x).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    #[serde(flatten)]
    pub kind: Kind,
    pub dims: Dims,
    /// Names of the candidate sets, in tie-break order; empty means every set
    /// of the system in insertion order.
    #[serde(default)]
    pub family: Vec<String>,
    #[serde(default)]
    pub budget: SearchBudget,
    #[serde(default = "yes")]
    pub prune: bool,
    #[serde(default = "one")]
    pub threads: usize,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

impl SearchSpec {
    pub fn new(kind: Kind, dims: Dims) -> Self {
        SearchSpec {
            kind,
            dims,
            family: Vec::new(),
            budget: SearchBudget::default(),
            prune: true,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Lexicographically least witness and its family indices per slot.
    Found { certificate: Certificate, assignment: Vec<usize> },
    /// The whole space was covered.
    NoWitness,
    /// Visit budget or deadline hit before the space was covered.
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub space: u128,
    pub visited: u64,
}

impl SearchResult {
    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.outcome {
            Outcome::Found { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

/// Resolved search problem: slots, candidate sets, domain.
pub(crate) struct Problem {
    pub kind: Kind,
    pub dims: Dims,
    pub family: Vec<Subset>,
    pub domain: usize,
    pub slots: usize,
}

impl Problem {
    pub fn new(spec: &SearchSpec, system: &SetSystem) -> Result<Problem, SearchError> {
        let family: Vec<Subset> = if spec.family.is_empty() {
            system.sets.values().cloned().collect()
        } else {
            spec.family
                .iter()
                .map(|n| system.sets.get(n).cloned().ok_or_else(|| SearchError::UnknownSet(n.clone())))
                .collect::<Result<_, _>>()?
        };
        let domain = system.domain_size;
        let family: Vec<Subset> = family
            .into_iter()
            .map(|mut s| {
                s.resize(domain);
                s
            })
            .collect();
        let slots = match spec.dims {
            Dims::Tree(shape) => shape.node_count().saturating_sub(1),
            Dims::Array { rows, cols } => rows.saturating_mul(cols),
        };
        let p = Problem {
            kind: spec.kind.clone(),
            dims: spec.dims,
            family,
            domain,
            slots,
        };
        if slots > 1 << 20 {
            return Err(PatternError::TooLarge(format!("{slots} slots")).into());
        }
        // Surface parameter errors before any enumeration.
        let probe = p.payload_from(&vec![usize::MAX; slots]);
        check(&p.kind, &probe, 0)?;
        Ok(p)
    }

    pub fn space(&self) -> u128 {
        let f = self.family.len() as u128;
        u32::try_from(self.slots)
            .ok()
            .and_then(|s| f.checked_pow(s))
            .unwrap_or(u128::MAX)
    }

    /// `usize::MAX` entries stand for the empty set.
    pub fn payload_from(&self, assignment: &[usize]) -> Payload {
        let get = |v: usize| match self.family.get(v) {
            Some(s) => s.clone(),
            None => Subset::empty(self.domain),
        };
        match self.dims {
            Dims::Tree(shape) => {
                let t = LabeledTree::from_fn(shape, self.domain, |n| {
                    get(assignment[shape.index_of(n).expect("in shape") - 1])
                });
                Payload::Tree(t)
            }
            Dims::Array { rows, cols } => {
                Payload::Array(InpArray::from_fn(rows, cols, self.domain, |i, j| get(assignment[i * cols + j])))
            }
        }
    }

    pub fn certificate(&self, assignment: &[usize]) -> Result<Certificate, SearchError> {
        let c = Certificate::new(self.kind.clone(), self.payload_from(assignment));
        Ok(crate::patterns::verify(&c)?)
    }
}

/// Shared stop conditions.
pub(crate) struct Control {
    pub visits: AtomicU64,
    pub max_visits: u64,
    pub deadline: Option<Instant>,
    pub aborted: AtomicBool,
}

impl Control {
    pub fn new(budget: &SearchBudget) -> Self {
        Control {
            visits: AtomicU64::new(0),
            max_visits: budget.max_visits,
            deadline: budget.deadline.map(|d| Instant::now() + d),
            aborted: AtomicBool::new(false),
        }
    }

    /// Counts one visit; `false` once a limit is hit.
    pub fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        let v = self.visits.fetch_add(1, Ordering::Relaxed) + 1;
        let over = v > self.max_visits || (v % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d));
        if over {
            self.aborted.store(true, Ordering::Relaxed);
        }
        !over
    }

    pub fn reason(&self) -> String {
        if self.visits.load(Ordering::Relaxed) > self.max_visits {
            format!("visit budget of {} exhausted", self.max_visits)
        } else {
            "deadline reached".to_string()
        }
    }
}

/// Finds the lexicographically least witness, or proves there is none.
pub fn search(spec: &SearchSpec, system: &SetSystem) -> Result<SearchResult, SearchError> {
    let p = Problem::new(spec, system)?;
    let space = p.space();
    if !spec.prune && space > spec.budget.max_space {
        return Err(SearchError::BudgetExceeded {
            space,
            limit: spec.budget.max_space,
        });
    }
    let ctl = Control::new(&spec.budget);
    let found = if spec.prune {
        pruned::run(&p, &ctl, spec.threads.max(1))
    } else {
        unpruned(&p, &ctl)
    };
    let visited = ctl.visits.load(Ordering::Relaxed);
    let outcome = match found {
        Run::Found(a) => Outcome::Found {
            certificate: p.certificate(&a)?,
            assignment: a,
        },
        Run::None => Outcome::NoWitness,
        Run::Aborted => Outcome::Unknown { reason: ctl.reason() },
    };
    Ok(SearchResult {
        outcome,
        space,
        visited,
    })
}

pub(crate) enum Run {
    Found(Vec<usize>),
    None,
    Aborted,
}

/// Odometer over every assignment in lex order, checking each in full.
fn unpruned(p: &Problem, ctl: &Control) -> Run {
    let f = p.family.len();
    if f == 0 && p.slots > 0 {
        return Run::None;
    }
    let mut a = vec![0usize; p.slots];
    loop {
        if !ctl.tick() {
            return Run::Aborted;
        }
        if check(&p.kind, &p.payload_from(&a), 0).is_ok_and(|v| v.ok) {
            return Run::Found(a);
        }
        let mut i = p.slots;
        loop {
            if i == 0 {
                return Run::None;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < f {
                break;
            }
            a[i] = 0;
        }
    }
}
