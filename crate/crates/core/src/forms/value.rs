use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::{CMat, Error, Result};

/// Sign of `dx_I ∧ dx_J` relative to `dx_{I∪J}` (disjoint index sets as bitmasks).
pub fn shuffle_sign(i: u32, j: u32) -> f64 {
    let mut inversions = 0u32;
    let mut rest = i;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        // Indices of J below this index of I.
        inversions += (j & ((1u32 << bit) - 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Increasing multi-index of a bitmask.
pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

pub fn mask_of(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// A matrix-valued differential form evaluated at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub p: usize,
    pub rank: usize,
    pub degree: usize,
    /// Coefficient of `dx_I` keyed by the bitmask of `I`; absent keys are zero.
    pub coeffs: BTreeMap<u32, CMat>,
    /// Set when a wedge exceeded the top degree and was truncated to zero.
    pub overflow: bool,
}

impl FormValue {
    pub fn zero(p: usize, rank: usize, degree: usize) -> Self {
        Self {
            p,
            rank,
            degree,
            coeffs: BTreeMap::new(),
            overflow: false,
        }
    }

    /// Degree-0 form with the given matrix.
    pub fn function(p: usize, m: CMat) -> Self {
        let rank = m.nrows();
        let mut f = Self::zero(p, rank, 0);
        f.coeffs.insert(0, m);
        f
    }

    /// One-form `Σ_j a_j dx_j`.
    pub fn one_form(p: usize, parts: Vec<CMat>) -> Result<Self> {
        if parts.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: parts.len(),
            });
        }
        let rank = parts.first().map(|m| m.nrows()).unwrap_or(1);
        let mut f = Self::zero(p, rank, 1);
        for (j, m) in parts.into_iter().enumerate() {
            f.coeffs.insert(1 << j, m);
        }
        Ok(f)
    }

    pub fn coefficient(&self, idx: &[usize]) -> CMat {
        self.coeffs
            .get(&mask_of(idx))
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rank, self.rank))
    }

    pub fn set(&mut self, idx: &[usize], m: CMat) {
        self.coeffs.insert(mask_of(idx), m);
    }

    pub fn add_assign_at(&mut self, mask: u32, m: CMat) {
        match self.coeffs.get_mut(&mask) {
            Some(c) => *c += m,
            None => {
                self.coeffs.insert(mask, m);
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: other.p,
            });
        }
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    /// `self ∧ other` with matrix products taken in order.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        if degree > self.p {
            let mut z = Self::zero(self.p, self.rank, self.p);
            z.overflow = true;
            return Ok(z);
        }
        let mut out = Self::zero(self.p, self.rank, degree);
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                if i & j != 0 {
                    continue;
                }
                let s = shuffle_sign(i, j);
                out.add_assign_at(i | j, a * b * Complex64::new(s, 0.0));
            }
        }
        out.overflow = self.overflow || other.overflow;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::InvalidInput(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.add_assign_at(m, c.clone());
        }
        out.overflow |= other.overflow;
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out
    }

    /// Left and right matrix multiplication of every coefficient: `L ω R`.
    pub fn sandwich(&self, left: &CMat, right: &CMat) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = left * &*c * right;
        }
        out
    }

    /// Pointwise trace: a scalar (rank 1) form.
    pub fn trace(&self) -> Self {
        let mut out = Self::zero(self.p, 1, self.degree);
        for (&m, c) in &self.coeffs {
            out.coeffs.insert(m, CMat::from_element(1, 1, c.trace()));
        }
        out.overflow = self.overflow;
        out
    }

    /// `dx_j ∧ self`.
    pub fn dx_wedge(&self, j: usize) -> Self {
        let mut out = Self::zero(self.p, self.rank, self.degree + 1);
        for (&m, c) in &self.coeffs {
            let bit = 1u32 << j;
            if m & bit != 0 {
                continue;
            }
            out.coeffs.insert(m | bit, c * Complex64::new(shuffle_sign(bit, m), 0.0));
        }
        out
    }

    /// Largest entry modulus over all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Scalar coefficient of a rank-1 form at `mask`.
    pub fn scalar(&self, mask: u32) -> Complex64 {
        self.coeffs
            .get(&mask)
            .map(|c| c[(0, 0)])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Coefficient of `dx_1 ∧ … ∧ dx_p` (scalar forms).
    pub fn top_scalar(&self) -> Complex64 {
        self.scalar((1u32 << self.p) - 1)
    }
}

impl crate::fd::Linear for FormValue {
    fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        self.scale(Complex64::new(a, 0.0))
            .add(&other.scale(Complex64::new(b, 0.0)))
            .expect("compatible forms")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: f64) -> CMat {
        CMat::from_element(1, 1, Complex64::new(v, 0.0))
    }

    #[test]
    fn shuffle_signs() {
        assert_eq!(shuffle_sign(0b001, 0b010), 1.0);
        assert_eq!(shuffle_sign(0b010, 0b001), -1.0);
        // dx_1∧dx_3 ∧ dx_2 = -dx_1∧dx_2∧dx_3
        assert_eq!(shuffle_sign(0b101, 0b010), -1.0);
        assert_eq!(shuffle_sign(0b100, 0b011), 1.0);
    }

    #[test]
    fn scalar_one_form_squares_to_zero() {
        let w = FormValue::one_form(3, vec![m(1.0), m(2.0), m(-3.0)]).unwrap();
        let ww = w.wedge(&w).unwrap();
        assert!(ww.max_abs() < 1e-15);
        assert_eq!(ww.degree, 2);
    }

    #[test]
    fn matrix_wedge_keeps_order() {
        let a = CMat::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0].map(|v| Complex64::new(v, 0.0)));
        let b = CMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| Complex64::new(v, 0.0)));
        let z = CMat::zeros(2, 2);
        let w1 = FormValue::one_form(3, vec![a.clone(), z.clone(), z.clone()]).unwrap();
        let w2 = FormValue::one_form(3, vec![z.clone(), b.clone(), z]).unwrap();
        let p = w1.wedge(&w2).unwrap();
        assert_eq!(p.coefficient(&[0, 1]), &a * &b);
        let q = w2.wedge(&w1).unwrap();
        assert_eq!(q.coefficient(&[0, 1]), -(&b * &a));
    }

    #[test]
    fn overflow_is_flagged() {
        let w = FormValue::one_form(1, vec![m(1.0)]).unwrap();
        let ww = w.wedge(&w).unwrap();
        assert!(ww.overflow);
        assert!(ww.coeffs.is_empty());
    }

    #[test]
    fn dx_wedge_sign() {
        // dx_2 ∧ dx_1 = -dx_1∧dx_2
        let mut f = FormValue::zero(3, 1, 1);
        f.set(&[0], m(1.0));
        let g = f.dx_wedge(1);
        assert_eq!(g.scalar(0b011).re, -1.0);
    }
}
