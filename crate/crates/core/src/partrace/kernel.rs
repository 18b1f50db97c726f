use std::sync::Arc;

use num_complex::Complex64;

use crate::ids::{expect_args, parse_call, positive_int};
use crate::{Error, Result};

/// One term `coeff · μ^β · u^j · λ^e · (λ² + u)^{-k}` with `u = |μ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTerm {
    pub coeff: Complex64,
    pub beta: Vec<u32>,
    pub j: u32,
    pub e: i32,
    pub k: u32,
}

impl KernelTerm {
    /// Joint homogeneity degree in `(λ, μ)`.
    pub fn order(&self) -> i32 {
        self.mu_degree() as i32 + self.e - 2 * self.k as i32
    }

    /// Polynomial degree in `μ` of the prefactor `μ^β u^j`.
    pub fn mu_degree(&self) -> u32 {
        self.beta.iter().sum::<u32>() + 2 * self.j
    }

    fn monomial(&self, mu: &[f64], u: f64) -> f64 {
        let mut m = u.powi(self.j as i32);
        for (b, x) in self.beta.iter().zip(mu) {
            m *= x.powi(*b as i32);
        }
        m
    }

    pub fn eval(&self, lambda: f64, mu: &[f64]) -> Complex64 {
        let u: f64 = mu.iter().map(|v| v * v).sum();
        let v = self.monomial(mu, u) * lambda.powi(self.e) * (lambda * lambda + u).powi(-(self.k as i32));
        self.coeff * v
    }

    /// Largest series index `i` kept by a Taylor polynomial of degree `d` in `μ`
    /// (`None` if no term survives).
    fn taylor_cut(&self, d: i32) -> Option<u32> {
        let base = self.mu_degree() as i32;
        if d < base {
            None
        } else {
            Some(((d - base) / 2) as u32)
        }
    }

    /// Binomial series coefficients `binom(-k, i)` for `i = 0..=n`.
    fn binomials(&self, n: usize) -> Vec<f64> {
        let k = self.k as f64;
        let mut c = Vec::with_capacity(n + 1);
        let mut v = 1.0;
        for i in 0..=n {
            c.push(v);
            v *= -(k + i as f64) / (i as f64 + 1.0);
        }
        c
    }

    /// Taylor polynomial of degree `d` in `μ` at `μ = 0`, evaluated at `μ`.
    pub fn taylor(&self, lambda: f64, mu: &[f64], d: i32) -> Complex64 {
        let Some(imax) = self.taylor_cut(d) else {
            return Complex64::new(0.0, 0.0);
        };
        let u: f64 = mu.iter().map(|v| v * v).sum();
        let t = u / (lambda * lambda);
        let b = self.binomials(imax as usize);
        let series: f64 = (0..=imax as usize).map(|i| b[i] * t.powi(i as i32)).sum();
        self.coeff * (self.monomial(mu, u) * lambda.powi(self.e - 2 * self.k as i32) * series)
    }

    /// `F - T_d F` at `(λ, μ)`, using the convergent series when `|μ| ≤ |λ|/2`.
    pub fn remainder(&self, lambda: f64, mu: &[f64], d: i32) -> Complex64 {
        let u: f64 = mu.iter().map(|v| v * v).sum();
        let Some(imax) = self.taylor_cut(d) else {
            return self.eval(lambda, mu);
        };
        if 4.0 * u > lambda * lambda {
            return self.eval(lambda, mu) - self.taylor(lambda, mu, d);
        }
        let t = u / (lambda * lambda);
        let k = self.k as f64;
        // Tail Σ_{i>imax} binom(-k,i) t^i.
        let mut c = self.binomials(imax as usize + 1)[imax as usize + 1];
        let mut tp = t.powi(imax as i32 + 1);
        let mut acc = 0.0;
        let mut i = imax as f64 + 1.0;
        loop {
            let term = c * tp;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() || tp == 0.0 || i > imax as f64 + 400.0 {
                break;
            }
            c *= -(k + i) / (i + 1.0);
            tp *= t;
            i += 1.0;
        }
        self.coeff * (self.monomial(mu, u) * lambda.powi(self.e - 2 * self.k as i32) * acc)
    }

    /// `∂/∂μ_i` as a sum of terms.
    pub fn derivative(&self, i: usize) -> Vec<KernelTerm> {
        let mut out = Vec::new();
        if self.beta[i] > 0 {
            let mut t = self.clone();
            t.coeff *= self.beta[i] as f64;
            t.beta[i] -= 1;
            out.push(t);
        }
        if self.j > 0 {
            let mut t = self.clone();
            t.coeff *= 2.0 * self.j as f64;
            t.j -= 1;
            t.beta[i] += 1;
            out.push(t);
        }
        if self.k > 0 {
            let mut t = self.clone();
            t.coeff *= -2.0 * self.k as f64;
            t.k += 1;
            t.beta[i] += 1;
            out.push(t);
        }
        out
    }

    fn times(&self, other: &KernelTerm) -> KernelTerm {
        KernelTerm {
            coeff: self.coeff * other.coeff,
            beta: self.beta.iter().zip(&other.beta).map(|(a, b)| a + b).collect(),
            j: self.j + other.j,
            e: self.e + other.e,
            k: self.k + other.k,
        }
    }
}

/// A finite sum of [`KernelTerm`]s: a scalar function `F(λ, μ)` closed under
/// `∂_μ`, multiplication by `μ_j` and products.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpr {
    pub p: usize,
    pub terms: Vec<KernelTerm>,
}

impl KernelExpr {
    pub fn zero(p: usize) -> Self {
        Self { p, terms: Vec::new() }
    }

    pub fn term(p: usize, coeff: Complex64, beta: Vec<u32>, j: u32, e: i32, k: u32) -> Result<Self> {
        if beta.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: beta.len(),
            });
        }
        Ok(Self {
            p,
            terms: vec![KernelTerm { coeff, beta, j, e, k }],
        })
    }

    /// `|μ|^{2j} λ^e (λ² + |μ|²)^{-k}`.
    pub fn radial(p: usize, j: u32, e: i32, k: u32) -> Self {
        Self::term(p, Complex64::new(1.0, 0.0), vec![0; p], j, e, k).expect("matching length")
    }

    /// Largest joint order over the terms (`-∞` for the zero kernel).
    pub fn order(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.order() as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every term depends on `μ` through `|μ|` only.
    pub fn is_radial(&self) -> bool {
        self.terms.iter().all(|t| t.beta.iter().all(|b| *b == 0))
    }

    pub fn eval(&self, lambda: f64, mu: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval(lambda, mu)).sum()
    }

    pub fn derivative(&self, i: usize) -> Result<Self> {
        if i >= self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: i + 1,
            });
        }
        Ok(Self {
            p: self.p,
            terms: self.terms.iter().flat_map(|t| t.derivative(i)).collect(),
        })
    }

    /// Multiplication by `μ_i`.
    pub fn times_mu(&self, i: usize) -> Result<Self> {
        if i >= self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: i + 1,
            });
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.beta[i] += 1;
        }
        Ok(out)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: other.p,
            });
        }
        let terms = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.times(b)))
            .collect();
        Ok(Self { p: self.p, terms })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: other.p,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { p: self.p, terms })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= s;
        }
        out
    }
}

pub type CustomFn = Arc<dyn Fn(f64, &[f64]) -> Complex64 + Send + Sync>;

/// The scalar function `F(λ, μ)` defining `A(μ) = F(D, μ)`.
#[derive(Clone)]
pub enum Kernel {
    Expr(KernelExpr),
    /// Opaque closure; only its value at `μ0 = 0` is available for Taylor subtraction.
    Custom { p: usize, f: CustomFn },
}

impl std::fmt::Debug for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Expr(e) => f.debug_tuple("Expr").field(e).finish(),
            Kernel::Custom { p, .. } => f.debug_struct("Custom").field("p", p).finish(),
        }
    }
}

impl Kernel {
    pub fn p(&self) -> usize {
        match self {
            Kernel::Expr(e) => e.p,
            Kernel::Custom { p, .. } => *p,
        }
    }

    pub fn eval(&self, lambda: f64, mu: &[f64]) -> Complex64 {
        match self {
            Kernel::Expr(e) => e.eval(lambda, mu),
            Kernel::Custom { f, .. } => f(lambda, mu),
        }
    }

    pub fn as_expr(&self) -> Option<&KernelExpr> {
        match self {
            Kernel::Expr(e) => Some(e),
            Kernel::Custom { .. } => None,
        }
    }
}

/// Ids: `zero`, `resolvent(k)`, `eta_kernel(k)`, `weighted_eta(k)`, `mu_sq_resolvent`.
pub fn named_kernel(id: &str, p: usize) -> Result<KernelExpr> {
    let (name, args) = parse_call(id)?;
    match name.as_str() {
        "zero" => {
            expect_args(&name, &args, 0)?;
            Ok(KernelExpr::zero(p))
        }
        "resolvent" => {
            expect_args(&name, &args, 1)?;
            Ok(KernelExpr::radial(p, 0, 0, positive_int(&name, args[0])? as u32))
        }
        "eta_kernel" => {
            expect_args(&name, &args, 1)?;
            Ok(KernelExpr::radial(p, 0, 1, positive_int(&name, args[0])? as u32))
        }
        "weighted_eta" => {
            expect_args(&name, &args, 1)?;
            let k = positive_int(&name, args[0])? as u32;
            Ok(KernelExpr::radial(p, k - 1, 1, k))
        }
        "mu_sq_resolvent" => {
            expect_args(&name, &args, 0)?;
            Ok(KernelExpr::radial(p, 1, 0, 1))
        }
        other => Err(Error::InvalidInput(format!("unknown kernel id `{other}`"))),
    }
}
