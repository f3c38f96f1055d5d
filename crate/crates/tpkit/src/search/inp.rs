use super::{Control, SearchBudget, SearchError};
use crate::patterns::{is_k_inconsistent, verify, Certificate, InpArray, Kind, PatternError, Subset};

/// Looks for a `k`-row array whose row `i` consists of `cols` distinct
/// members of `families[i]` (in family order), every row
/// `bound`-inconsistent and every transversal consistent.
///
/// A single family is reused for every row. Returns `Ok(None)` only after
/// covering the whole space.
pub fn exists_inp_of_depth(
    families: &[Vec<Subset>],
    k: usize,
    cols: usize,
    bound: usize,
    budget: &SearchBudget,
) -> Result<Option<Certificate>, SearchError> {
    if families.len() != k && families.len() != 1 {
        return Err(PatternError::BadParam(format!("{} families for {k} rows", families.len())).into());
    }
    if bound < 2 {
        return Err(PatternError::BadParam(format!("row bound must be at least 2, got {bound}")).into());
    }
    let domain = families.iter().flatten().map(Subset::domain_size).max().unwrap_or(0);
    let family = |i: usize| &families[if families.len() == 1 { 0 } else { i }];
    // Admissible rows, as index combinations in lex order.
    let mut rows: Vec<Vec<Vec<usize>>> = Vec::with_capacity(k);
    for i in 0..k {
        let fam = family(i);
        let mut ok = Vec::new();
        combos(fam.len(), cols, &mut |c| {
            let sets: Vec<&Subset> = c.iter().map(|&j| &fam[j]).collect();
            if is_k_inconsistent(&sets, bound).unwrap_or(false) {
                ok.push(c.to_vec());
            }
        });
        rows.push(ok);
    }
    let ctl = Control::new(budget);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let trans = vec![Subset::full(domain)];
    let cell = |i: usize, row: &[usize], j: usize| {
        let mut s = family(i)[row[j]].clone();
        s.resize(domain);
        s
    };
    fn dfs(
        i: usize,
        trans: &[Subset],
        rows: &[Vec<Vec<usize>>],
        chosen: &mut Vec<usize>,
        cell: &dyn Fn(usize, &[usize], usize) -> Subset,
        ctl: &Control,
    ) -> Result<bool, ()> {
        if i == rows.len() {
            return Ok(true);
        }
        for (ci, row) in rows[i].iter().enumerate() {
            if !ctl.tick() {
                return Err(());
            }
            let next: Vec<Subset> = trans
                .iter()
                .flat_map(|t| (0..row.len()).map(move |j| (t, j)))
                .map(|(t, j)| t.intersection(&cell(i, row, j)))
                .collect();
            if next.iter().any(Subset::is_empty) {
                continue;
            }
            chosen.push(ci);
            if dfs(i + 1, &next, rows, chosen, cell, ctl)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
    match dfs(0, &trans, &rows, &mut chosen, &cell, &ctl) {
        Err(()) => Err(SearchError::BudgetExceeded {
            space: ctl.visits.load(std::sync::atomic::Ordering::Relaxed) as u128,
            limit: budget.max_visits as u128,
        }),
        Ok(false) => Ok(None),
        Ok(true) => {
            let a = InpArray::from_fn(k, cols, domain, |i, j| cell(i, &rows[i][chosen[i]], j));
            let c = verify(&Certificate::array(Kind::Inp { n: vec![bound; k] }, a))?;
            Ok(Some(c))
        }
    }
}

/// Calls `f` on every `size`-subset of `0..n` in lex order.
fn combos(n: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, size, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(n, size, 0, &mut Vec::new(), f);
}
