use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curve is not immersed: speed {speed:e} at sample {index}")]
    NonImmersed { index: usize, speed: f64 },
    #[error("framing violates {what} at sample {index} (residual {residual:e})")]
    BadFraming {
        what: &'static str,
        index: usize,
        residual: f64,
    },
    #[error("frame at sample {index} is not orthonormal (residual {residual:e})")]
    BadFrame { index: usize, residual: f64 },
    #[error("operation requires a closed curve")]
    OpenCurve,
    #[error("operation requires periodic or antiperiodic input")]
    OpenInput,
    #[error("complex coordinates vanish at sample {index} (|Φ| = {norm:e})")]
    ZeroLocus { index: usize, norm: f64 },
    #[error("lift is discontinuous between samples {index} and {next} (quaternion overlap {overlap:.3}); refine the grid")]
    DiscontinuousLift {
        index: usize,
        next: usize,
        overlap: f64,
    },
    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("periodicity mismatch")]
    PeriodicityMismatch,
    #[error("matrix is not special unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("spanning functions are linearly dependent (smallest Gram eigenvalue {eigenvalue:e})")]
    DegenerateSpan { eigenvalue: f64 },
    #[error("planes are not transverse (singular value {singular_value:e}); geodesic is not unique")]
    NonTransverse { singular_value: f64 },
    #[error("reparameterization is not strictly increasing at sample {index}")]
    NonMonotone { index: usize },
    #[error("no monotone lattice path fits in the band")]
    BandTooNarrow,
    #[error("linking number did not converge: Tw + Wr = {value:.4} is {residual:.3} from an integer")]
    NonConvergent { value: f64, residual: f64 },
    #[error("curvature extrapolation is ill-conditioned (spread {spread:e})")]
    IllConditioned { spread: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
