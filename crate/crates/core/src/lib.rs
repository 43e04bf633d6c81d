//! Forward and inverse resonance problems for Dirac operators on a half-line with compactly
//! supported potentials.
//!
//! The numerical core is generic over the real scalar type (`f32` or `f64`); the aliases below
//! fix it to `f64`, and the [`single`] module provides the `f32` versions.

pub mod entire;
pub mod error;
pub mod forward;
pub mod hermite_biehler;
pub mod io;
pub mod jost;
pub mod perturbation;
pub mod potential;
pub mod reconstruction;
pub mod resonance;
pub mod scalar;
pub mod transform;
pub mod wiener;

pub use error::{Error, ErrorClass, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Potential = potential::Potential<f64>;
pub type JostFunction = jost::JostFunction<f64>;
pub type HermiteBiehler = hermite_biehler::HermiteBiehler<f64>;
pub type ShiftSet = perturbation::ShiftSet<f64>;
pub type ResonanceList = resonance::ResonanceList<f64>;
pub type Rect = resonance::Rect<f64>;
pub type TransformOptions = forward::TransformOptions<f64>;
pub type WienerElement = wiener::WienerElement<f64>;
pub type HadamardData = entire::HadamardData<f64>;
pub type ReconstructionOptions = reconstruction::ReconstructionOptions<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Potential = crate::potential::Potential<f32>;
    pub type JostFunction = crate::jost::JostFunction<f32>;
    pub type HermiteBiehler = crate::hermite_biehler::HermiteBiehler<f32>;
    pub type ShiftSet = crate::perturbation::ShiftSet<f32>;
    pub type ResonanceList = crate::resonance::ResonanceList<f32>;
    pub type TransformOptions = crate::forward::TransformOptions<f32>;
    pub type WienerElement = crate::wiener::WienerElement<f32>;
}
