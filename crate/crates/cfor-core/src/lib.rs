//! Conjugate filter oscillation reduction (CFOR) with discrete singular
//! convolution (DSC) kernels: stencils, filters, spectral analysis and the
//! flow solvers built on them.

pub mod benchmarks;
pub mod error;
pub mod euler;
pub mod filters;
pub mod grid;
pub mod incompressible;
pub mod kernels;
pub mod poisson;
pub mod spectral;
pub mod time;

pub use error::{CforError, Result};
pub use grid::{deriv, norms, Axis, ErrorReport, Field, NormConvention};
pub use kernels::{halfgrid_stencil, stencil, KernelFamily, KernelSpec, StencilWeights};
pub use benchmarks::{run_case, CaseConfig, CaseKind, RunOutput};
