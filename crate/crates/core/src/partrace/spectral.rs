use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use crate::{Error, Result};

/// Spectrum of the base operator `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectralModel {
    /// `D = -i d/dθ + a` on the circle: eigenvalues `n + a`, `n ∈ ℤ`, each simple.
    Circle { a: f64 },
    /// Finite-dimensional base with the listed eigenvalues.
    Point { eigenvalues: Vec<f64> },
}

impl SpectralModel {
    pub fn circle(a: f64) -> Result<Self> {
        let m = SpectralModel::Circle { a };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            SpectralModel::Circle { .. } => 1,
            SpectralModel::Point { .. } => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralModel::Circle { a } => {
                if !a.is_finite() || a.fract() == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "circle shift a = {a} must be finite and non-integer (D must be invertible)"
                    )));
                }
            }
            SpectralModel::Point { eigenvalues } => {
                if eigenvalues.iter().any(|l| !l.is_finite() || *l == 0.0) {
                    return Err(Error::InvalidInput("point eigenvalues must be finite and nonzero".into()));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalues with `|λ| ≤ window`, in increasing order of index.
    pub fn eigenvalues_within(&self, window: f64) -> Vec<f64> {
        match self {
            SpectralModel::Circle { a } => {
                let lo = (-window - a).ceil() as i64;
                let hi = (window - a).floor() as i64;
                (lo..=hi).map(|n| n as f64 + a).collect()
            }
            SpectralModel::Point { eigenvalues } => eigenvalues.clone(),
        }
    }
}

/// `A(μ) = F(D, μ)`, optionally tensored with the identity of the rank-`2^{k-1}`
/// Clifford module.
#[derive(Debug, Clone)]
pub struct SpectralFamily {
    pub model: SpectralModel,
    pub kernel: Kernel,
    /// Declared order `m` of `A` as a parametric operator.
    pub order: f64,
    pub clifford_k: Option<usize>,
}

impl SpectralFamily {
    pub fn new(model: SpectralModel, kernel: Kernel, order: f64) -> Result<Self> {
        model.validate()?;
        if !order.is_finite() {
            return Err(Error::InvalidInput("family order must be finite".into()));
        }
        if let Some(e) = kernel.as_expr() {
            let actual = e.order();
            if actual > order + 1e-12 {
                return Err(Error::OrderViolation(format!(
                    "kernel has order {actual} but the family declares {order}"
                )));
            }
        }
        Ok(Self {
            model,
            kernel,
            order,
            clifford_k: None,
        })
    }

    pub fn with_clifford(mut self, k: usize) -> Result<Self> {
        if !(1..=8).contains(&k) {
            return Err(Error::InvalidInput(format!("Clifford index k = {k} out of range 1..=8")));
        }
        self.clifford_k = Some(k);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.kernel.p()
    }

    /// Degree of the Taylor polynomial subtracted at `μ = 0`: `N - 1` with `N`
    /// minimal such that `m - N + dim M < 0`; `-1` when `A(μ)` is trace class.
    pub fn taylor_degree(&self) -> i32 {
        let s = self.order + self.model.dim() as f64;
        if s < 0.0 {
            -1
        } else {
            s.floor() as i32
        }
    }

    pub fn is_trace_class(&self) -> bool {
        self.taylor_degree() < 0
    }

    /// Trace of the identity on the Clifford factor.
    pub fn multiplicity(&self) -> f64 {
        self.clifford_k.map_or(1.0, |k| (1u64 << (k - 1)) as f64)
    }

    /// Same model and order with a different kernel.
    pub fn with_kernel(&self, kernel: Kernel, order: f64) -> Result<Self> {
        let mut f = Self::new(self.model.clone(), kernel, order)?;
        f.clifford_k = self.clifford_k;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partrace::kernel::named_kernel;

    #[test]
    fn taylor_degree_follows_order_and_dimension() {
        let m = SpectralModel::circle(0.25).unwrap();
        let f = |id: &str, ord: f64| {
            SpectralFamily::new(m.clone(), Kernel::Expr(named_kernel(id, 1).unwrap()), ord).unwrap()
        };
        assert_eq!(f("eta_kernel(2)", -3.0).taylor_degree(), -1);
        assert_eq!(f("resolvent(1)", -2.0).taylor_degree(), -1);
        assert_eq!(f("weighted_eta(2)", -1.0).taylor_degree(), 0);
        assert_eq!(f("mu_sq_resolvent", 0.0).taylor_degree(), 1);
    }

    #[test]
    fn integer_shift_and_understated_order_are_rejected() {
        assert!(SpectralModel::circle(2.0).is_err());
        let m = SpectralModel::circle(0.5).unwrap();
        let k = Kernel::Expr(named_kernel("eta_kernel(1)", 1).unwrap());
        assert!(matches!(SpectralFamily::new(m, k, -2.0), Err(Error::OrderViolation(_))));
    }

    #[test]
    fn window_enumeration() {
        let m = SpectralModel::circle(0.25).unwrap();
        let ev = m.eigenvalues_within(2.0);
        assert_eq!(ev, vec![-1.75, -0.75, 0.25, 1.25]);
    }
}
