//! Log-polyhomogeneous functions: expansion models, coefficient fits and
//! regularized integrals on `ℝ^p` and on the half-line.

mod fit;
mod halfline;
mod identities;
mod model;
mod regint;
mod registry;
mod tabulated;

use serde::{Deserialize, Serialize};

pub use fit::{fit_expansion, fit_radial, Fallible, FitConfig, FittedExpansion, Integrand};
pub use halfline::{mellin_reg, regint_halfline, HalflineConfig};
pub use identities::{cov_correction, stokes_defect, IdentityCheck};
pub use model::{ExpansionModel, Side, Term};
pub use regint::{
    ball_integrals, ordinary_integral_rp, regint_from_primitive, regint_radial, regint_rp,
    RegintConfig, RegularizedValue,
};
pub use registry::{named_function, NamedFunction, ScalarFn};
pub use tabulated::TabulatedSamples;


/// The cones on which integrals are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConeDescriptor {
    FullSpace { p: usize },
    HalfLine,
}

impl ConeDescriptor {
    pub fn full_space(p: usize) -> crate::Result<Self> {
        if p == 0 {
            return Err(crate::Error::InvalidInput("cone dimension must be positive".into()));
        }
        Ok(Self::FullSpace { p })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::FullSpace { p } => *p,
            Self::HalfLine => 1,
        }
    }
}
