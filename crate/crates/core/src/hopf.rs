//! Complex coordinates `Φ = (φ, ψ)` for framed curves.
//!
//! A point `(z, w) ∈ ℂ²` is identified with the quaternion `z + w·j`; the
//! frame-Hopf map sends it to the scaled rotation whose columns are
//! `r·T`, `r·V`, `r·W` with `r = |z|² + |w|²`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};


use crate::curve::{self, FramedCurve};
use crate::error::{Error, Result};
use crate::linalg::{Mat2c, Mat3, Vec3};
use crate::spectral;
use crate::{grid_param, Tolerances, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Periodicity {
    Periodic,
    Antiperiodic,
    Open,
}

impl Periodicity {
    pub fn is_loop(self) -> bool {
        !matches!(self, Periodicity::Open)
    }

    /// Periodicity after multiplication by a phase loop of odd winding.
    pub fn toggled(self) -> Periodicity {
        match self {
            Periodicity::Periodic => Periodicity::Antiperiodic,
            Periodicity::Antiperiodic => Periodicity::Periodic,
            Periodicity::Open => Periodicity::Open,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Periodicity::Periodic => "periodic",
            Periodicity::Antiperiodic => "antiperiodic",
            Periodicity::Open => "open",
        }
    }
}

/// Samples of `Φ = (φ, ψ)`. Loops store `N` samples, open data `N + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCurve {
    phi: Vec<C64>,
    psi: Vec<C64>,
    periodicity: Periodicity,
    tol: Tolerances,
}

impl ComplexCurve {
    pub fn new(phi: Vec<C64>, psi: Vec<C64>, periodicity: Periodicity) -> Result<Self> {
        Self::with_tolerances(phi, psi, periodicity, Tolerances::default())
    }

    pub fn with_tolerances(
        phi: Vec<C64>,
        psi: Vec<C64>,
        periodicity: Periodicity,
        tol: Tolerances,
    ) -> Result<Self> {
        if phi.len() != psi.len() {
            return Err(Error::GridMismatch {
                left: phi.len(),
                right: psi.len(),
            });
        }
        let min = if periodicity.is_loop() { 4 } else { 5 };
        if phi.len() < min {
            return Err(Error::InvalidInput(alloc::format!(
                "need at least {min} samples, got {}",
                phi.len()
            )));
        }
        Ok(ComplexCurve {
            phi,
            psi,
            periodicity,
            tol,
        })
    }

    /// Samples `f` on the grid with `n` intervals.
    pub fn from_fn(n: usize, periodicity: Periodicity, f: impl Fn(f64) -> (C64, C64)) -> Self {
        let m = if periodicity.is_loop() { n } else { n + 1 };
        let (phi, psi) = (0..m).map(|k| f(grid_param(k, n))).unzip();
        ComplexCurve {
            phi,
            psi,
            periodicity,
            tol: Tolerances::default(),
        }
    }

    pub fn phi(&self) -> &[C64] {
        &self.phi
    }

    pub fn psi(&self) -> &[C64] {
        &self.psi
    }

    pub fn component(&self, j: usize) -> &[C64] {
        if j == 0 {
            &self.phi
        } else {
            &self.psi
        }
    }

    pub fn periodicity(&self) -> Periodicity {
        self.periodicity
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn n_intervals(&self) -> usize {
        if self.periodicity.is_loop() {
            self.len()
        } else {
            self.len() - 1
        }
    }

    pub fn params(&self) -> Vec<f64> {
        let n = self.n_intervals();
        (0..self.len()).map(|k| grid_param(k, n)).collect()
    }

    /// Same grid, new values.
    pub fn with_values(&self, phi: Vec<C64>, psi: Vec<C64>) -> ComplexCurve {
        debug_assert_eq!(phi.len(), self.len());
        ComplexCurve {
            phi,
            psi,
            periodicity: self.periodicity,
            tol: self.tol,
        }
    }

    pub(crate) fn with_periodicity(mut self, p: Periodicity) -> ComplexCurve {
        self.periodicity = p;
        self
    }

    pub fn check_compatible(&self, other: &ComplexCurve) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.periodicity != other.periodicity {
            return Err(Error::PeriodicityMismatch);
        }
        Ok(())
    }

    /// `|Φ(t_k)|²`.
    pub fn modulus_sq(&self) -> Vec<f64> {
        self.phi
            .iter()
            .zip(&self.psi)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// `t ↦ d/dt Φ`: spectral for loops, fourth order for open data.
    pub fn derivative(&self) -> ComplexCurve {
        let d = |f: &[C64]| match self.periodicity {
            Periodicity::Periodic => spectral::derivative(f, false),
            Periodicity::Antiperiodic => spectral::derivative(f, true),
            Periodicity::Open => spectral::fd4_derivative(f, 2.0 / (f.len() - 1) as f64),
        };
        self.with_values(d(&self.phi), d(&self.psi))
    }

    /// Quadrature of grid samples over `[0, 2]`.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        if self.periodicity.is_loop() {
            spectral::integrate_periodic(f)
        } else {
            spectral::integrate_open(f, 2.0 / (f.len() - 1) as f64)
        }
    }

    pub fn integrate_real(&self, f: &[f64]) -> f64 {
        if self.periodicity.is_loop() {
            spectral::integrate_periodic(f)
        } else {
            spectral::integrate_open(f, 2.0 / (f.len() - 1) as f64)
        }
    }

    /// `⟨f, g⟩ = ∫ f·ḡ` on this grid.
    pub fn inner_fn(&self, f: &[C64], g: &[C64]) -> C64 {
        let p: Vec<C64> = f.iter().zip(g).map(|(a, b)| a * b.conj()).collect();
        self.integrate(&p)
    }

    /// Hermitian L² product of pairs, `⟨φ, φ'⟩ + ⟨ψ, ψ'⟩`.
    pub fn inner(&self, other: &ComplexCurve) -> C64 {
        self.inner_fn(&self.phi, &other.phi) + self.inner_fn(&self.psi, &other.psi)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// `Φ*Ψ`: entries `∫ conj(Φ_j)·Ψ_k`.
    pub fn adjoint_mul(&self, other: &ComplexCurve) -> Mat2c {
        let mut m = Mat2c::zero();
        for j in 0..2 {
            for k in 0..2 {
                m.0[j][k] = self.inner_fn(other.component(k), self.component(j));
            }
        }
        m
    }

    /// Gram matrix `Φ*Φ`.
    pub fn gram(&self) -> Mat2c {
        self.adjoint_mul(self)
    }

    /// Pointwise row-vector product `Φ·U`.
    pub fn right_mul(&self, u: &Mat2c) -> ComplexCurve {
        let m = &u.0;
        let (phi, psi) = self
            .phi
            .iter()
            .zip(&self.psi)
            .map(|(a, b)| (a * m[0][0] + b * m[1][0], a * m[0][1] + b * m[1][1]))
            .unzip();
        self.with_values(phi, psi)
    }

    pub fn scale(&self, s: C64) -> ComplexCurve {
        self.with_values(
            self.phi.iter().map(|a| a * s).collect(),
            self.psi.iter().map(|a| a * s).collect(),
        )
    }

    /// Pointwise product with a scalar function.
    pub fn mul_pointwise(&self, f: &[C64]) -> ComplexCurve {
        self.with_values(
            self.phi.iter().zip(f).map(|(a, b)| a * b).collect(),
            self.psi.iter().zip(f).map(|(a, b)| a * b).collect(),
        )
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: C64, other: &ComplexCurve) -> ComplexCurve {
        self.with_values(
            self.phi.iter().zip(&other.phi).map(|(a, b)| a + b * s).collect(),
            self.psi.iter().zip(&other.psi).map(|(a, b)| a + b * s).collect(),
        )
    }

    pub fn add(&self, other: &ComplexCurve) -> ComplexCurve {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &ComplexCurve) -> ComplexCurve {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn neg(&self) -> ComplexCurve {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// Max pointwise distance in ℂ².
    pub fn max_diff(&self, other: &ComplexCurve) -> f64 {
        let mut m = 0.0f64;
        for k in 0..self.len().min(other.len()) {
            let d = (self.phi[k] - other.phi[k]).norm_sqr() + (self.psi[k] - other.psi[k]).norm_sqr();
            m = m.max(d.sqrt());
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.modulus_sq().into_iter().fold(0.0, f64::max).sqrt()
    }

    /// Values of the trigonometric interpolant (loops only).
    pub fn evaluate(&self, ts: &[f64]) -> Result<ComplexCurve> {
        let anti = match self.periodicity {
            Periodicity::Periodic => false,
            Periodicity::Antiperiodic => true,
            Periodicity::Open => return Err(Error::OpenInput),
        };
        Ok(ComplexCurve {
            phi: spectral::evaluate(&self.phi, anti, ts),
            psi: spectral::evaluate(&self.psi, anti, ts),
            periodicity: Periodicity::Open,
            tol: self.tol,
        })
    }
}

/// Frame-Hopf map as a 3×3 matrix (row-major); its columns are
/// `r·T`, `r·V`, `r·W`.
pub fn hopf_pointwise(z: C64, w: C64) -> Mat3 {
    let zw = z * w;
    let zwb = z * w.conj();
    let z2 = z * z;
    let w2 = w * w;
    [
        [z.norm_sqr() - w.norm_sqr(), 2.0 * zw.im, -2.0 * zw.re],
        [2.0 * zwb.im, (z2 + w2).re, (z2 + w2).im],
        [2.0 * zwb.re, (w2 - z2).im, (z2 - w2).re],
    ]
}

/// Columns `Hopf₁, Hopf₂, Hopf₃` of the frame-Hopf map.
pub fn hopf_columns(z: C64, w: C64) -> [Vec3; 3] {
    let m = hopf_pointwise(z, w);
    [
        crate::linalg::mat3_col(&m, 0),
        crate::linalg::mat3_col(&m, 1),
        crate::linalg::mat3_col(&m, 2),
    ]
}

/// Rotation induced by a special unitary matrix acting on the right.
pub fn hopf_of_su2(u: &Mat2c) -> Mat3 {
    hopf_pointwise(u.0[0][0], u.0[0][1])
}

/// Unit quaternion `(z, w)` whose frame-Hopf image is the rotation `f`.
///
/// Uses the largest-pivot branch for stability near half turns.
pub fn rotation_to_pair(f: &Mat3) -> (C64, C64) {
    let tr = f[0][0] + f[1][1] + f[2][2];
    let (a, b, c, d);
    if tr >= f[0][0] && tr >= f[1][1] && tr >= f[2][2] {
        let s = 0.5 * (1.0 + tr).max(0.0).sqrt();
        a = s;
        b = (f[2][1] - f[1][2]) / (4.0 * s);
        c = (f[0][2] - f[2][0]) / (4.0 * s);
        d = (f[1][0] - f[0][1]) / (4.0 * s);
    } else if f[0][0] >= f[1][1] && f[0][0] >= f[2][2] {
        let s = 0.5 * (1.0 + f[0][0] - f[1][1] - f[2][2]).max(0.0).sqrt();
        b = s;
        a = (f[2][1] - f[1][2]) / (4.0 * s);
        c = (f[0][1] + f[1][0]) / (4.0 * s);
        d = (f[0][2] + f[2][0]) / (4.0 * s);
    } else if f[1][1] >= f[2][2] {
        let s = 0.5 * (1.0 - f[0][0] + f[1][1] - f[2][2]).max(0.0).sqrt();
        c = s;
        a = (f[0][2] - f[2][0]) / (4.0 * s);
        b = (f[0][1] + f[1][0]) / (4.0 * s);
        d = (f[1][2] + f[2][1]) / (4.0 * s);
    } else {
        let s = 0.5 * (1.0 - f[0][0] - f[1][1] + f[2][2]).max(0.0).sqrt();
        d = s;
        a = (f[1][0] - f[0][1]) / (4.0 * s);
        b = (f[0][2] + f[2][0]) / (4.0 * s);
        c = (f[1][2] + f[2][1]) / (4.0 * s);
    }
    // Conjugate quaternion, written in the (z, w) chart.
    (C64::new(a, -b), C64::new(-c, -d))
}

/// Framed curve `Ĥ(Φ)` with `γ(0) = 0`.
pub fn reconstruct(phi: &ComplexCurve) -> Result<FramedCurve> {
    let n = phi.len();
    let mut t = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for k in 0..n {
        let (z, w) = (phi.phi[k], phi.psi[k]);
        let m2 = z.norm_sqr() + w.norm_sqr();
        if !(m2.sqrt() > phi.tol.geom) {
            return Err(Error::ZeroLocus {
                index: k,
                norm: m2.sqrt(),
            });
        }
        let [c1, c2, _] = hopf_columns(z, w);
        t.push(crate::linalg::scale3(1.0 / m2, c1));
        v.push(crate::linalg::scale3(1.0 / m2, c2));
        r.push(m2);
    }
    Ok(curve::integrate_frames(
        &t,
        &v,
        &r,
        phi.periodicity.is_loop(),
        phi.tol,
    ))
}

fn qdot(a: (C64, C64), b: (C64, C64)) -> f64 {
    (a.0 * b.0.conj() + a.1 * b.1.conj()).re
}

/// Continuous lift of a framed curve to complex coordinates.
pub fn lift(c: &FramedCurve) -> Result<ComplexCurve> {
    let p = curve::frame_map(c)?;
    let n = c.len();
    let limit = FRAC_1_SQRT_2;
    let mut q: Vec<(C64, C64)> = Vec::with_capacity(n);
    for k in 0..n {
        let f = crate::linalg::mat3_from_cols(p.t[k], p.v[k], p.w[k]);
        let mut cur = rotation_to_pair(&f);
        if k > 0 {
            let d = qdot(cur, q[k - 1]);
            if d < 0.0 {
                cur = (-cur.0, -cur.1);
            }
            if d.abs() <= limit {
                return Err(Error::DiscontinuousLift {
                    index: k - 1,
                    next: k,
                    overlap: d.abs(),
                });
            }
        }
        q.push(cur);
    }
    let periodicity = if c.is_closed() {
        let d = qdot(q[0], q[n - 1]);
        if d.abs() <= limit {
            return Err(Error::DiscontinuousLift {
                index: n - 1,
                next: 0,
                overlap: d.abs(),
            });
        }
        if d > 0.0 {
            Periodicity::Periodic
        } else {
            Periodicity::Antiperiodic
        }
    } else {
        Periodicity::Open
    };
    let (phi, psi) = q
        .iter()
        .zip(&p.r)
        .map(|((z, w), r)| {
            let s = r.sqrt();
            (z * s, w * s)
        })
        .unzip();
    ComplexCurve::with_tolerances(phi, psi, periodicity, c.tolerances())
}

/// `(∫|φ|² − ∫|ψ|², ∫φψ̄)`; both vanish iff the reconstruction closes.
pub fn closure_residuals(phi: &ComplexCurve) -> Result<(f64, C64)> {
    if !phi.periodicity.is_loop() {
        return Err(Error::OpenInput);
    }
    let a = phi.inner_fn(&phi.phi, &phi.phi).re;
    let b = phi.inner_fn(&phi.psi, &phi.psi).re;
    Ok((a - b, phi.inner_fn(&phi.phi, &phi.psi)))
}

/// `γ(2) − γ(0)` predicted by the closure residuals.
pub fn closure_vector(phi: &ComplexCurve) -> Result<Vec3> {
    let (d, i) = closure_residuals(phi)?;
    Ok([d, 2.0 * i.im, 2.0 * i.re])
}

/// Frame-twist loop `α` on the storage grid with `α(2) − α(0) = winding·π`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistLoop {
    pub values: Vec<f64>,
    pub winding: i64,
}

impl TwistLoop {
    pub fn new(values: Vec<f64>, winding: i64) -> Self {
        TwistLoop { values, winding }
    }

    pub fn constant(len: usize, a: f64) -> Self {
        TwistLoop {
            values: alloc::vec![a; len],
            winding: 0,
        }
    }

    /// `α(t) = πt/2` sampled like `like`.
    pub fn unit(like: &ComplexCurve) -> Self {
        TwistLoop {
            values: like.params().iter().map(|t| 0.5 * PI * t).collect(),
            winding: 1,
        }
    }

    /// `α(t) = f(t) + winding·πt/2` with `f` periodic.
    pub fn from_fn(like: &ComplexCurve, winding: i64, f: impl Fn(f64) -> f64) -> Self {
        TwistLoop {
            values: like
                .params()
                .iter()
                .map(|&t| f(t) + 0.5 * PI * winding as f64 * t)
                .collect(),
            winding,
        }
    }

    pub fn neg(&self) -> TwistLoop {
        TwistLoop {
            values: self.values.iter().map(|a| -a).collect(),
            winding: -self.winding,
        }
    }

    /// Periodic part `α − winding·πt/2`.
    pub fn periodic_part(&self, n: usize) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(k, a)| a - 0.5 * PI * self.winding as f64 * grid_param(k, n))
            .collect()
    }

    pub fn phases(&self) -> Vec<C64> {
        self.values.iter().map(|a| C64::from_polar(1.0, *a)).collect()
    }
}

/// `Φ ↦ e^{iα}Φ`. Odd winding toggles periodicity.
pub fn apply_frame_twist(phi: &ComplexCurve, alpha: &TwistLoop) -> Result<ComplexCurve> {
    if alpha.values.len() != phi.len() {
        return Err(Error::GridMismatch {
            left: phi.len(),
            right: alpha.values.len(),
        });
    }
    let out = phi.mul_pointwise(&alpha.phases());
    Ok(if alpha.winding.rem_euclid(2) == 1 {
        out.with_periodicity(phi.periodicity.toggled())
    } else {
        out
    })
}

/// `Φ ↦ Φ·U` for `U ∈ U(2)`.
pub fn apply_unitary(phi: &ComplexCurve, u: &Mat2c) -> Result<ComplexCurve> {
    let residual = u.unitarity_residual();
    if !(residual <= 1e-10) {
        return Err(Error::NotUnitary { residual });
    }
    Ok(phi.right_mul(u))
}

/// `Φ ↦ Φ·U` for `U ∈ SU(2)`; the reconstruction rotates by `hopf_of_su2(U)`.
pub fn apply_su2(phi: &ComplexCurve, u: &Mat2c) -> Result<ComplexCurve> {
    let residual = u.unitarity_residual().max((u.det() - 1.0).norm());
    if !(residual <= 1e-10) {
        return Err(Error::NotUnitary { residual });
    }
    Ok(phi.right_mul(u))
}

/// Global phase making `∫φ` real and positive (falling back to `∫ψ`).
pub fn normalize_phase(phi: &ComplexCurve) -> ComplexCurve {
    let a = phi.integrate(&phi.phi);
    let b = phi.integrate(&phi.psi);
    let pick = if a.norm() > 1e-12 { a } else { b };
    if pick.norm() == 0.0 {
        return phi.clone();
    }
    phi.scale(pick.conj() / pick.norm())
}

/// Lift of the planar loop `((x, 0, y), V = e_y)`, phase-normalized.
pub fn embed_planar(points: &[[f64; 2]], tol: Tolerances) -> Result<ComplexCurve> {
    let gamma: Vec<Vec3> = points.iter().map(|p| [p[0], 0.0, p[1]]).collect();
    let v = alloc::vec![[0.0, 1.0, 0.0]; gamma.len()];
    let c = FramedCurve::with_tolerances(gamma, v, true, tol)?;
    Ok(normalize_phase(&lift(&c)?))
}

/// Multiplication by `e^{iπt/2}`, exchanging loops and antiloops.
pub fn loop_antiloop_transfer(phi: &ComplexCurve) -> Result<ComplexCurve> {
    if !phi.periodicity.is_loop() {
        return Err(Error::OpenInput);
    }
    apply_frame_twist(phi, &TwistLoop::unit(phi))
}

/// Largest imaginary part of the coordinates.
pub fn max_imaginary(phi: &ComplexCurve) -> f64 {
    phi.phi
        .iter()
        .chain(&phi.psi)
        .map(|z| z.im.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{apply_frame_twist as twist_curve, frame_map, linking_number};
    use crate::linalg::{dot3, mat3_det, mat3_mul, mat3_transpose, mat3_vec, norm3, sub3};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn stiefel_example(n: usize) -> ComplexCurve {
        ComplexCurve::from_fn(n, Periodicity::Periodic, |t| {
            (
                C64::from_polar(FRAC_1_SQRT_2, -PI * t),
                c(FRAC_1_SQRT_2, 0.0),
            )
        })
    }

    fn random_su2(x: [f64; 4]) -> Mat2c {
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b) = (c(x[0] / n, x[1] / n), c(x[2] / n, x[3] / n));
        Mat2c::new(a, b, -b.conj(), a.conj())
    }

    #[test]
    fn identity_at_one() {
        let m = hopf_pointwise(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(m, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn stiefel_example_reconstructs_circle() {
        let phi = stiefel_example(256);
        let fc = reconstruct(&phi).unwrap();
        assert!(fc.is_closed());
        for (k, t) in phi.params().iter().enumerate() {
            let (s, co) = (PI * t).sin_cos();
            let g = [0.0, (co - 1.0) / PI, s / PI];
            let v = [-s, co * co, co * s];
            assert!(norm3(sub3(fc.gamma()[k], g)) < 1e-12);
            assert!(norm3(sub3(fc.v()[k], v)) < 1e-12);
        }
        assert_eq!(linking_number(&fc).unwrap(), 1);
        let (d, i) = closure_residuals(&phi).unwrap();
        assert!(d.abs() < 1e-12 && i.norm() < 1e-12);
    }

    #[test]
    fn negation_gives_same_curve() {
        let phi = stiefel_example(64);
        assert_eq!(reconstruct(&phi).unwrap(), reconstruct(&phi.neg()).unwrap());
    }

    #[test]
    fn lift_round_trip() {
        // Closes because ρ² has no first harmonic and |φ| = |ψ|.
        let phi = ComplexCurve::from_fn(128, Periodicity::Antiperiodic, |t| {
            let rho = (1.0 + 0.5 * (2.0 * PI * t).cos()).sqrt() * FRAC_1_SQRT_2;
            let a = C64::from_polar(rho, 0.5 * PI * t + 0.3 * (PI * t).sin());
            (a * C64::from_polar(1.0, -PI * t), a)
        });
        let fc = reconstruct(&phi).unwrap();
        assert!(fc.is_closed());
        let back = lift(&fc).unwrap();
        assert_eq!(back.periodicity(), Periodicity::Antiperiodic);
        let sign = if (back.phi()[0] - phi.phi()[0]).norm() < 1e-6 { 1.0 } else { -1.0 };
        assert!(back.scale(c(sign, 0.0)).max_diff(&phi) < 1e-10);
    }

    #[test]
    fn constant_twist_rotates_v_toward_minus_w() {
        let phi = stiefel_example(64);
        let fc = reconstruct(&phi).unwrap();
        let p = frame_map(&fc).unwrap();
        let th = 0.3;
        let tw = apply_frame_twist(&phi, &TwistLoop::constant(64, th)).unwrap();
        let g = reconstruct(&tw).unwrap();
        assert!(norm3(sub3(g.gamma()[10], fc.gamma()[10])) < 1e-12);
        for k in 0..64 {
            let e = sub3(
                crate::linalg::scale3((2.0 * th).cos(), p.v[k]),
                crate::linalg::scale3((2.0 * th).sin(), p.w[k]),
            );
            assert!(norm3(sub3(g.v()[k], e)) < 1e-12);
        }
    }

    #[test]
    fn twist_equivariance_matches_curve_twist() {
        let phi = stiefel_example(128);
        let alpha = TwistLoop::from_fn(&phi, 2, |t| 0.4 * (PI * t).sin());
        let a = reconstruct(&apply_frame_twist(&phi, &alpha).unwrap()).unwrap();
        let b = twist_curve(&reconstruct(&phi).unwrap(), &alpha.values).unwrap();
        assert!(a.max_deviation(&b) < 1e-12);
    }

    #[test]
    fn transfer_toggles_periodicity() {
        let phi = stiefel_example(32);
        let a = loop_antiloop_transfer(&phi).unwrap();
        assert_eq!(a.periodicity(), Periodicity::Antiperiodic);
        let b = loop_antiloop_transfer(&a).unwrap();
        assert_eq!(b.periodicity(), Periodicity::Periodic);
        let full: Vec<C64> = phi.params().iter().map(|t| C64::from_polar(1.0, PI * t)).collect();
        assert!(b.max_diff(&phi.mul_pointwise(&full)) < 1e-12);
        let twist = |x: &ComplexCurve| crate::curve::total_twist(&reconstruct(x).unwrap()).unwrap();
        assert!((twist(&b) - twist(&phi) + 2.0).abs() < 1e-10);
    }

    #[test]
    fn planar_embedding_is_real() {
        let n = 128;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let t = grid_param(k, n);
                [(PI * t).sin() / PI, (2.0 * PI * t).sin() / (2.0 * PI)]
            })
            .collect();
        let phi = embed_planar(&pts, Tolerances::default()).unwrap();
        assert!(max_imaginary(&phi) < 1e-12);
        let fc = reconstruct(&phi).unwrap();
        assert!(fc.gamma().iter().all(|p| p[1].abs() < 1e-12));
    }

    proptest! {
        #[test]
        fn columns_orthogonal_equal_norm(x in proptest::array::uniform4(-3.0f64..3.0)) {
            let (z, w) = (c(x[0], x[1]), c(x[2], x[3]));
            let m2 = z.norm_sqr() + w.norm_sqr();
            let [a, b, d] = hopf_columns(z, w);
            let s = m2 * m2;
            prop_assert!((dot3(a, a) - s).abs() <= 1e-12 * s.max(1e-300));
            prop_assert!((dot3(b, b) - s).abs() <= 1e-12 * s.max(1e-300));
            prop_assert!((dot3(d, d) - s).abs() <= 1e-12 * s.max(1e-300));
            prop_assert!(dot3(a, b).abs() <= 1e-12 * s.max(1e-300));
            prop_assert!(dot3(a, d).abs() <= 1e-12 * s.max(1e-300));
            prop_assert!(dot3(b, d).abs() <= 1e-12 * s.max(1e-300));
        }

        #[test]
        fn scaling_property(x in proptest::array::uniform4(-3.0f64..3.0), r in 0.1f64..5.0) {
            let (z, w) = (c(x[0], x[1]), c(x[2], x[3]));
            let a = hopf_pointwise(z * r, w * r);
            let b = hopf_pointwise(z, w);
            for i in 0..3 { for j in 0..3 {
                prop_assert!((a[i][j] - r * r * b[i][j]).abs() < 1e-10);
            }}
        }

        #[test]
        fn pair_from_rotation_inverts_hopf(x in proptest::array::uniform4(-1.0f64..1.0)) {
            prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            let u = random_su2(x);
            let f = hopf_pointwise(u.0[0][0], u.0[0][1]);
            let (z, w) = rotation_to_pair(&f);
            let g = hopf_pointwise(z, w);
            for i in 0..3 { for j in 0..3 {
                prop_assert!((f[i][j] - g[i][j]).abs() < 1e-12);
            }}
        }

        #[test]
        fn su2_acts_by_rotation(x in proptest::array::uniform4(-1.0f64..1.0)) {
            prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-3);
            let u = random_su2(x);
            let rot = hopf_of_su2(&u);
            prop_assert!((mat3_det(&rot) - 1.0).abs() < 1e-12);
            let id = mat3_mul(&rot, &mat3_transpose(&rot));
            for i in 0..3 { for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                prop_assert!((id[i][j] - e).abs() < 1e-12);
            }}
            let phi = stiefel_example(64);
            let a = reconstruct(&apply_su2(&phi, &u).unwrap()).unwrap();
            let b = reconstruct(&phi).unwrap();
            for k in 0..64 {
                prop_assert!(norm3(sub3(a.gamma()[k], mat3_vec(&rot, b.gamma()[k]))) < 1e-10);
                prop_assert!(norm3(sub3(a.v()[k], mat3_vec(&rot, b.v()[k]))) < 1e-10);
            }
        }

        #[test]
        fn diagonal_circle_keeps_tangent(x in proptest::array::uniform4(-3.0f64..3.0), th in -3.0f64..3.0) {
            let (z, w) = (c(x[0], x[1]), c(x[2], x[3]));
            let e = C64::from_polar(1.0, th);
            let a = hopf_columns(z * e, w * e)[0];
            let b = hopf_columns(z, w)[0];
            prop_assert!(norm3(sub3(a, b)) < 1e-10);
        }
    }
}
