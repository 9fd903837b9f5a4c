//! Numerical core for elastic shape analysis of framed loops in ℝ³.
//!
//! A framed curve `(γ, V)` is sampled on the uniform grid `t_k = 2k/N` over
//! `[0, 2]`. The frame-Hopf map identifies such curves with pairs of complex
//! functions `Φ = (φ, ψ)`; closed framed loops of length 2 become
//! L²-orthonormal 2-frames, and their similarity classes become points of an
//! infinite-dimensional complex Grassmannian with explicit geodesics.
//!
//! Module map:
//!
//! * [`curve`]: framed-curve data model, frame map, twist/writhe/linking, CTMF
//!   and Bishop framings.
//! * [`hopf`]: complex coordinates, reconstruction, lifting, group actions.
//! * [`grassmann`]: Stiefel/Grassmann geometry (Jordan angles, geodesics,
//!   exponential and logarithm).
//! * [`alignment`]: registration over U(2), reparameterizations and frame
//!   twists.
//! * [`mechanics`]: metrics, momentum maps, torus-knot critical points and
//!   curvature probes.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alignment;
pub mod curve;
pub mod error;
pub mod grassmann;
pub mod hopf;
pub mod linalg;
pub mod mechanics;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Length of the parameter interval. Every curve lives on `[0, PARAM_LENGTH]`.
pub const PARAM_LENGTH: f64 = 2.0;

/// Validation tolerances shared by curves and complex coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Pointwise geometric checks: unit framing, normality, immersion.
    pub geom: f64,
    /// Constancy checks on derived fields (twist rate, speed).
    pub field: f64,
    /// Orthonormality residuals of Stiefel representatives.
    pub stiefel: f64,
    /// Closure gap below which a reconstruction is reported as closed.
    pub closure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geom: 1e-6,
            field: 1e-6,
            stiefel: 1e-10,
            closure: 1e-8,
        }
    }
}

/// Uniform parameter grid value `t_k = 2k/N`.
#[inline]
pub fn grid_param(k: usize, n_intervals: usize) -> f64 {
    PARAM_LENGTH * k as f64 / n_intervals as f64
}
