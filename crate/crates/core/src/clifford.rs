//! The standard representation of `Cℓ_{2k-1}` on `ℂ^{2^{k-1}}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CMat, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Generators `E_1, …, E_p` (`p = 2k-1`) with `E_iE_j + E_jE_i = -2δ_ij` and
/// `i^k E_1⋯E_p = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    pub k: usize,
    pub p: usize,
    pub rank: usize,
    pub generators: Vec<CMat>,
}

/// Largest deviations from the defining relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffordDefects {
    pub skew_adjoint: f64,
    pub anticommutation: f64,
    pub volume_element: f64,
    pub volume_trace: f64,
}

impl CliffordDefects {
    pub fn max(&self) -> f64 {
        self.skew_adjoint
            .max(self.anticommutation)
            .max(self.volume_element)
            .max(self.volume_trace)
    }
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn pauli(entries: [Complex64; 4]) -> CMat {
    DMatrix::from_row_slice(2, 2, &entries)
}

/// `i^{-k}`.
pub fn i_pow_neg(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

impl CliffordRep {
    /// Recursive tensor construction, `1 ≤ k ≤ 8`.
    pub fn standard(k: usize) -> Result<Self> {
        if !(1..=8).contains(&k) {
            return Err(Error::OutOfRange(format!(
                "Clifford representation needs 1 <= k <= 8, got {k}"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let sx = pauli([zero, one, one, zero]);
        let isy = pauli([zero, one, -one, zero]);
        let isz = pauli([I, zero, zero, -I]);
        let mut gens = vec![DMatrix::from_element(1, 1, -I)];
        for level in 1..k {
            let n = 1usize << (level - 1);
            let id = CMat::identity(n, n);
            let mut next: Vec<CMat> = gens.iter().map(|e| kron(e, &sx)).collect();
            next.push(kron(&id, &isy));
            next.push(kron(&id, &isz));
            gens = next;
        }
        let mut rep = Self {
            k,
            p: 2 * k - 1,
            rank: 1 << (k - 1),
            generators: gens,
        };
        // Pin the orientation: flip E_p if the volume element acts as -1.
        let vol = rep.volume_element();
        if (vol[(0, 0)] + 1.0).norm() < 1e-12 {
            let last = rep.p - 1;
            rep.generators[last] = -rep.generators[last].clone();
        }
        Ok(rep)
    }

    /// `i^k E_1 ⋯ E_p`.
    pub fn volume_element(&self) -> CMat {
        let mut m = CMat::identity(self.rank, self.rank);
        for e in &self.generators {
            m *= e;
        }
        m * I.powu(self.k as u32)
    }

    /// `tr(E_1 ⋯ E_p)`; equals `2^{k-1} i^{-k}`.
    pub fn volume_trace(&self) -> Complex64 {
        let mut m = CMat::identity(self.rank, self.rank);
        for e in &self.generators {
            m *= e;
        }
        m.trace()
    }

    /// `c(x) = Σ x_j E_j`.
    pub fn action(&self, x: &[f64]) -> Result<CMat> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: x.len(),
            });
        }
        let mut m = CMat::zeros(self.rank, self.rank);
        for (xj, e) in x.iter().zip(&self.generators) {
            if *xj != 0.0 {
                m += e * Complex64::new(*xj, 0.0);
            }
        }
        Ok(m)
    }

    pub fn defects(&self) -> CliffordDefects {
        let n = self.rank;
        let id = CMat::identity(n, n);
        let mut skew = 0.0f64;
        let mut anti = 0.0f64;
        for (i, a) in self.generators.iter().enumerate() {
            skew = skew.max(max_abs(&(a.adjoint() + a)));
            for (j, b) in self.generators.iter().enumerate() {
                let target = if i == j { -2.0 } else { 0.0 };
                let d = a * b + b * a - &id * Complex64::new(target, 0.0);
                anti = anti.max(max_abs(&d));
            }
        }
        let vol = max_abs(&(self.volume_element() - &id));
        let expected = Complex64::new(self.rank as f64, 0.0) * i_pow_neg(self.k);
        CliffordDefects {
            skew_adjoint: skew,
            anticommutation: anti,
            volume_element: vol,
            volume_trace: (self.volume_trace() - expected).norm(),
        }
    }

    /// Generators as nested arrays of `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<Vec<Vec<[f64; 2]>>> = self
            .generators
            .iter()
            .map(|g| {
                (0..self.rank)
                    .map(|i| (0..self.rank).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({ "k": self.k, "p": self.p, "rank": self.rank, "generators": gens })
    }
}

/// Same as [`CliffordRep::standard`].
pub fn standard_rep(k: usize) -> Result<CliffordRep> {
    CliffordRep::standard(k)
}
