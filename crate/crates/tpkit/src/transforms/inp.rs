use super::{ceil_half, checked_output, verified_input, Provenance, TransformError, Transformed};
use crate::patterns::{intersect_all, Certificate, InpArray, Kind};

fn uniform_bound(c: &Certificate) -> Result<usize, TransformError> {
    match &c.kind {
        Kind::Tp2 { k } => Ok(*k),
        Kind::Inp { n } if !n.is_empty() => Ok(*n.iter().max().expect("nonempty")),
        other => Err(TransformError::WrongKind {
            expected: "inp or tp2".into(),
            got: other.clone(),
        }),
    }
}

/// Regroups an inp-pattern of depth `m*m` into one of depth `m`.
///
/// Block `i` is rows `i*m .. i*m+m`. If the first two cells of every row in
/// some block meet, the least such block is kept with adjacent column pairs
/// intersected (bound `max(2, ceil(k/2))`, half the columns). Otherwise row
/// `l` of the output intersects rows `l*m .. l*m+m` cellwise (bound 2).
pub fn inp_halving_step(c: &Certificate, m: usize) -> Result<Transformed, TransformError> {
    let name = "inp_halving_step";
    let a = c
        .as_array()
        .ok_or_else(|| TransformError::Precondition("expected an array payload".into()))?;
    let k = uniform_bound(c)?;
    if m == 0 {
        return Err(TransformError::Precondition("m must be positive".into()));
    }
    if a.rows < m * m {
        return Err(TransformError::Precondition(format!(
            "{} rows are fewer than m*m = {}",
            a.rows,
            m * m
        )));
    }
    if a.cols < 2 {
        return Err(TransformError::Precondition("at least two columns are needed".into()));
    }
    verified_input(c)?;
    let d = a.domain_size;
    let gamma = |i: usize| {
        let cells: Vec<_> = (0..m)
            .flat_map(|l| [a.cell(i * m + l, 0), a.cell(i * m + l, 1)])
            .collect();
        intersect_all(d, cells)
    };
    let mut prov = Provenance::new(name);
    prov.minimal_k = Some(k);
    let (out, bound) = match (0..m).find(|&i| !gamma(i).is_empty()) {
        Some(i) => {
            prov.case_fired = Some(format!("1 (block {i})"));
            let b = InpArray::from_fn(m, a.cols / 2, d, |l, j| {
                a.cell(i * m + l, 2 * j).intersection(a.cell(i * m + l, 2 * j + 1))
            });
            (b, ceil_half(k))
        }
        None => {
            prov.case_fired = Some("2".into());
            let b = InpArray::from_fn(m, a.cols, d, |l, j| {
                intersect_all(d, (0..m).map(|r| a.cell(l * m + r, j)))
            });
            (b, 2)
        }
    };
    let cert = checked_output(name, Certificate::array(Kind::Inp { n: vec![bound; m] }, out))?;
    Ok(Transformed {
        certificate: cert,
        provenance: prov,
    })
}

/// Repeats [`inp_halving_step`] with `m = floor(sqrt(rows))` until the row
/// bound is 2.
pub fn inp_halving(c: &Certificate) -> Result<(Transformed, Vec<Provenance>), TransformError> {
    let mut cur = c.clone();
    let mut trail = Vec::new();
    loop {
        let rows = cur
            .as_array()
            .ok_or_else(|| TransformError::Precondition("expected an array payload".into()))?
            .rows;
        let m = (rows as f64).sqrt().floor() as usize;
        let step = inp_halving_step(&cur, m)?;
        trail.push(step.provenance.clone());
        if uniform_bound(&step.certificate)? <= 2 {
            return Ok((step, trail));
        }
        cur = step.certificate;
    }
}
