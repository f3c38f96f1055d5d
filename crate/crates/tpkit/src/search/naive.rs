//! Reference enumerator: walks every assignment with the last slot varying
//! slowest, checks each in full, and keeps the lexicographic minimum.

use super::{Problem, SearchError, SearchSpec};
use crate::patterns::{check, Certificate, SetSystem};

/// The least witness assignment and its certificate, if any.
pub fn naive_search(
    spec: &SearchSpec,
    system: &SetSystem,
) -> Result<Option<(Vec<usize>, Certificate)>, SearchError> {
    let p = Problem::new(spec, system)?;
    let space = p.space();
    if space > spec.budget.max_space {
        return Err(SearchError::BudgetExceeded {
            space,
            limit: spec.budget.max_space,
        });
    }
    let f = p.family.len();
    let mut best: Option<Vec<usize>> = None;
    let mut a = vec![0usize; p.slots];
    if f > 0 || p.slots == 0 {
        loop {
            if best.as_ref().is_none_or(|b| a < *b) && check(&p.kind, &p.payload_from(&a), 0)?.ok {
                best = Some(a.clone());
            }
            // Colex successor: slot 0 varies fastest.
            let mut i = 0;
            while i < p.slots {
                a[i] += 1;
                if a[i] < f {
                    break;
                }
                a[i] = 0;
                i += 1;
            }
            if i == p.slots {
                break;
            }
        }
    }
    best.map(|a| p.certificate(&a).map(|c| (a, c))).transpose()
}
