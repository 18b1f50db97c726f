//! Registered experiments. Each one takes typed parameters (unknown keys are
//! rejected), runs under a [`Budget`] and returns checks against references.

mod eta;
mod geometry;
mod properties;
mod regint;
mod trace;

use serde::{Deserialize, Serialize};

use super::config::Budget;
use super::report::Outcome;
use crate::Result;

pub(crate) trait Params {
    fn validate(&self) -> std::result::Result<(), String> {
        Ok(())
    }

    fn set_seed(&mut self, _seed: u64) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub tags: &'static [&'static str],
    /// Part of the acceptance suite (`all`).
    pub acceptance: bool,
    pub summary: &'static str,
}

macro_rules! experiments {
    ($($variant:ident($ty:ty) = $id:literal, [$($tag:literal),*], $acc:expr, $run:path, $summary:literal;)*) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(tag = "experiment")]
        pub enum ExperimentParams {
            $(#[serde(rename = $id)] $variant($ty),)*
        }

        impl ExperimentParams {
            pub fn id(&self) -> &'static str {
                match self {
                    $(Self::$variant(_) => $id,)*
                }
            }

            pub fn validate(&self) -> std::result::Result<(), String> {
                match self {
                    $(Self::$variant(p) => p.validate(),)*
                }
            }

            /// Sets the corpus seed of randomized experiments; a no-op otherwise.
            pub fn set_seed(&mut self, seed: u64) {
                match self {
                    $(Self::$variant(p) => p.set_seed(seed),)*
                }
            }

            pub(crate) fn execute(&self, budget: &Budget) -> Result<Outcome> {
                match self {
                    $(Self::$variant(p) => $run(p, budget),)*
                }
            }
        }

        pub const REGISTRY: &[ExperimentInfo] = &[
            $(ExperimentInfo { id: $id, tags: &[$($tag),*], acceptance: $acc, summary: $summary },)*
        ];
    };
}

experiments! {
    RegintDemo(regint::RegintDemo) = "regint-demo", ["asymptotics", "regint"], true, regint::regint_demo,
        "regularized integrals: vanishing on powers and polynomials, convergent cases";
    CovCheck(regint::CovCheck) = "cov-check", ["asymptotics", "regint"], true, regint::cov_check,
        "change of variables with the logarithmic correction";
    StokesCheck(regint::StokesCheck) = "stokes-check", ["asymptotics", "regint"], true, regint::stokes_check,
        "Stokes defect of regularized integrals";
    MellinZero(regint::MellinZero) = "mellin-zero", ["asymptotics", "mellin"], true, regint::mellin_zero,
        "regularized Mellin transforms";
    CliffordCheck(geometry::CliffordCheck) = "clifford-check", ["clifford"], true, geometry::clifford_check,
        "Clifford relations and the volume-element trace";
    SphereOmega(geometry::SphereOmega) = "sphere-omega", ["forms", "sphere"], true, geometry::sphere_omega,
        "sphere integral of tr((f^-1 df)^(2k-1)) for f = x0 + c(x')";
    RpOmega(geometry::RpOmega) = "rp-omega", ["forms", "regint"], true, geometry::rp_omega,
        "full-space integral of tr((f^-1 df)^3) for f = a + c(x)";
    EtaMatrix(eta::EtaMatrix) = "eta-matrix", ["eta"], true, eta::eta_matrix,
        "eta invariants of matrix families";
    Winding(eta::Winding) = "winding", ["eta", "winding"], true, eta::winding_numbers,
        "winding numbers on spheres and on the line";
    VariationCheck(eta::VariationCheck) = "variation-check", ["eta", "variation"], true, eta::variation_check,
        "variation formula along paths";
    AdditivityDefect(eta::AdditivityDefect) = "additivity-defect", ["eta", "additivity"], true, eta::additivity,
        "additivity of eta_1 and the defect of eta_2";
    SpectralEta(eta::SpectralEta) = "spectral-eta", ["eta", "spectral", "partrace"], true, eta::spectral,
        "spectral eta invariant of the circle operator";
    EtaSuspension(eta::EtaSuspension) = "eta-suspension", ["eta", "spectral", "partrace"], true, eta::suspension,
        "eta of the suspension D + c(mu)";
    DivisorFlow(eta::DivisorFlowParams) = "divisor-flow", ["eta", "divisor"], true, eta::divisor,
        "path dependence of the divisor flow";
    TraceTanh(trace::TraceTanh) = "trace-tanh", ["partrace", "trace"], true, trace::trace_tanh,
        "trace of the circle resolvent";
    TrDerivativeCheck(trace::TrDerivativeCheck) = "tr-derivative-check", ["partrace", "trace"], true, trace::tr_derivative,
        "TR commutes with parameter derivatives";
    PropDSquared(properties::PropParams) = "prop-d-squared", ["properties"], false, properties::d_squared,
        "d(d omega) = 0 on random forms";
    PropLeibniz(properties::PropParams) = "prop-leibniz", ["properties"], false, properties::leibniz,
        "graded Leibniz rule on random forms";
    PropStructure(properties::PropParams) = "prop-structure-equation", ["properties"], false, properties::structure,
        "Maurer-Cartan structure equation on random families";
    PropTrDerivative(properties::PropParams) = "prop-tr-derivative", ["properties"], false, properties::tr_derivative,
        "TR(d_mu A) = d_mu TR(A) modulo polynomials";
    PropMuMultiplication(properties::PropParams) = "prop-mu-multiplication", ["properties"], false, properties::mu_multiplication,
        "TR(mu A) = mu TR(A) modulo polynomials";
    PropRegintLinearity(properties::PropParams) = "prop-regint-linearity", ["properties"], false, properties::linearity,
        "linearity of the regularized integral";
    PropConvergent(properties::PropParams) = "prop-convergent-agreement", ["properties"], false, properties::convergent,
        "regularized and ordinary integrals agree on integrable functions";
}

impl ExperimentParams {
    /// Default parameters of a registered experiment.
    pub fn default_for(id: &str) -> Option<Self> {
        serde_json::from_value(serde_json::json!({ "experiment": id })).ok()
    }
}

pub fn info(id: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.id == id)
}
