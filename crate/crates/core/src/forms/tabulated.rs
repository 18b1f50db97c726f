use std::collections::BTreeMap;
use std::io::Read;

use num_complex::Complex64;
use serde::Deserialize;

use super::family::MatrixFamily;
use crate::{CMat, Error, Result};

#[derive(Debug, Deserialize)]
struct Row {
    x: f64,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

/// Matrix family on the line read from CSV (`x,row,col,re,im`), interpolated by
/// cubic Hermite splines with centered-difference tangents and extended by the
/// endpoint values outside the table.
pub fn tabulated_family<R: Read>(reader: R) -> Result<MatrixFamily> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut nodes: BTreeMap<u64, BTreeMap<(usize, usize), Complex64>> = BTreeMap::new();
    let mut rank = 0;
    for row in rdr.deserialize::<Row>() {
        let r = row.map_err(|e| Error::InvalidInput(format!("tabulated family: {e}")))?;
        if !(r.x.is_finite() && r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::NonFinite { at: vec![r.x] });
        }
        rank = rank.max(r.row + 1).max(r.col + 1);
        // Order-preserving key for f64 (finite values only).
        let key = if r.x >= 0.0 { r.x.to_bits() ^ (1 << 63) } else { !r.x.to_bits() };
        nodes.entry(key).or_default().insert((r.row, r.col), Complex64::new(r.re, r.im));
    }
    if nodes.len() < 2 {
        return Err(Error::InvalidInput("tabulated family needs at least two abscissae".into()));
    }
    let mut xs = Vec::with_capacity(nodes.len());
    let mut ms = Vec::with_capacity(nodes.len());
    for (key, entries) in nodes {
        let bits = if key >> 63 == 1 { key ^ (1 << 63) } else { !key };
        xs.push(f64::from_bits(bits));
        let mut m = CMat::zeros(rank, rank);
        for ((i, j), v) in entries {
            m[(i, j)] = v;
        }
        ms.push(m);
    }
    let n = xs.len();
    let tangents: Vec<CMat> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (&ms[b] - &ms[a]) / Complex64::new(xs[b] - xs[a], 0.0)
        })
        .collect();
    let (xs1, ms1, ts1) = (xs.clone(), ms.clone(), tangents.clone());
    let locate = |xs: &[f64], x: f64| -> Option<(usize, f64, f64)> {
        if x <= xs[0] || x >= xs[xs.len() - 1] {
            return None;
        }
        let i = xs.partition_point(|&v| v <= x) - 1;
        let h = xs[i + 1] - xs[i];
        Some((i, (x - xs[i]) / h, h))
    };
    let eval = move |x: &[f64]| -> Result<CMat> {
        Ok(match locate(&xs, x[0]) {
            None if x[0] <= xs[0] => ms[0].clone(),
            None => ms[ms.len() - 1].clone(),
            Some((i, t, h)) => {
                let (t2, t3) = (t * t, t * t * t);
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                &ms[i] * Complex64::new(h00, 0.0)
                    + &tangents[i] * Complex64::new(h10 * h, 0.0)
                    + &ms[i + 1] * Complex64::new(h01, 0.0)
                    + &tangents[i + 1] * Complex64::new(h11 * h, 0.0)
            }
        })
    };
    let deriv = move |x: &[f64]| -> Result<Vec<CMat>> {
        let r = ms1[0].nrows();
        Ok(vec![match locate(&xs1, x[0]) {
            None => CMat::zeros(r, r),
            Some((i, t, h)) => {
                let t2 = t * t;
                let d00 = (6.0 * t2 - 6.0 * t) / h;
                let d10 = 3.0 * t2 - 4.0 * t + 1.0;
                let d01 = (-6.0 * t2 + 6.0 * t) / h;
                let d11 = 3.0 * t2 - 2.0 * t;
                &ms1[i] * Complex64::new(d00, 0.0)
                    + &ts1[i] * Complex64::new(d10, 0.0)
                    + &ms1[i + 1] * Complex64::new(d01, 0.0)
                    + &ts1[i + 1] * Complex64::new(d11, 0.0)
            }
        }])
    };
    Ok(MatrixFamily::new(1, rank, eval).with_partials(deriv))
}
