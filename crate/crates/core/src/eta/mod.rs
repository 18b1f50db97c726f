//! Higher eta-invariants `η_k`, winding numbers, the variation formula, the
//! additivity defect, spectral eta-invariants and the divisor-flow example.

mod boundary;
mod divisor;
mod invariant;
mod path;
mod spectral;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::RegularizedValue;

pub use boundary::{boundary_model, formal_trace_form};
pub use divisor::{
    constant_path, divisor_flow, linear_path, path_flow, named_scalar_path, unwinding_path, DivisorFlowReport, PathFlow, ScalarPath,
};
pub use invariant::{
    affine_clifford_density, eta_affine_closed_form, eta_k, winding, winding_sphere,
};
pub use path::{additivity_defect, eta1_additivity, eta_variation, variation_form, PathFamily};
pub use spectral::{eta_suspension, eta_suspension_full, spectral_eta, suspension_density, SpectralEtaMethod};

/// `c_k = (-1)^{k-1} (k-1)! / ((2πi)^k (2k-1)!)`.
pub fn c_k(k: usize) -> Complex64 {
    assert!(k >= 1, "c_k needs k >= 1");
    let fact = |n: usize| (1..=n).fold(1.0, |a, i| a * i as f64);
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Complex64::new(sign * fact(k - 1) / fact(2 * k - 1), 0.0) / two_pi_i.powi(k as i32)
}

/// How an eta value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaRoute {
    MatrixForm,
    ClosedForm,
    SpectralReduction,
    Hurwitz,
    Boundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaResult {
    pub value: Complex64,
    pub route: EtaRoute,
    /// Largest relative residual of the fits behind the value.
    pub error_estimate: f64,
    #[serde(skip)]
    pub diagnostics: Vec<RegularizedValue>,
}

impl EtaResult {
    pub(crate) fn from_regint(scale: Complex64, rv: RegularizedValue, route: EtaRoute) -> Self {
        Self {
            value: scale * rv.value,
            route,
            error_estimate: rv.residual(),
            diagnostics: vec![rv],
        }
    }
}
