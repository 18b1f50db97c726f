//! Parametric traces of families `A(μ) = F(D, μ)` built from a base operator with
//! known spectrum.

mod formal;
mod kernel;
mod spectral;
mod trace;

pub use formal::{extended_trace, formal_trace};
pub use kernel::{named_kernel, CustomFn, Kernel, KernelExpr, KernelTerm};
pub use spectral::{SpectralFamily, SpectralModel};
pub use trace::{l2_trace, tr_param, TraceConfig, TraceValue};
