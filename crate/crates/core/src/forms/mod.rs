//! Matrix-valued differential forms on `ℝ^p`: wedge products, exterior
//! derivatives, Maurer–Cartan powers and sphere integrals.

mod family;
mod form;
mod maurer_cartan;
mod registry;
mod sphere;
mod tabulated;
mod value;

pub use family::MatrixFamily;
pub use form::{DerivativeScheme, MatrixForm};
pub(crate) use form::power_value;
pub(crate) use maurer_cartan::mc_value;
pub use maurer_cartan::{
    clifford_omega_closed_form, maurer_cartan_form, maurer_cartan_power, structure_equation_defect,
    trace_density, MaurerCartanPower,
};
pub use registry::{affine_clifford, clifford_cone, moebius_family, named_family, unit_clifford};
pub use sphere::{default_s3_resolution, sphere_integrate, sphere_integrate_checked, SphereIntegral};
pub use tabulated::tabulated_family;
pub use value::{indices, mask_of, shuffle_sign, FormValue};
