//! Steady-state transmission spectroscopy of a thermally dissipative
//! transmon-resonator system: dressed-state analytics, Lindblad steady
//! states, a secular-approximation oracle and parameter sweeps.

pub mod algebra;
pub mod config;
pub mod device;
pub mod dressed;
pub mod error;
pub mod lindblad;
pub mod scalar;
pub mod secular;
pub mod steady;
pub mod sweeps;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;
pub type Cplx = num_complex::Complex<Real>;

pub type DeviceParams = device::DeviceParams<Real>;
pub type Operator = algebra::Operator<Real>;
pub type DensityMatrix = steady::DensityMatrix<Real>;
pub type Liouvillian = lindblad::Liouvillian<Real>;
pub type SpectrumResult = steady::SpectrumResult<Real>;
pub type TransitionLine = dressed::TransitionLine<Real>;
