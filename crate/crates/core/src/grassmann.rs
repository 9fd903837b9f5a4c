//! Stiefel and Grassmann geometry of L²-orthonormal 2-frames of loops.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::hopf::{ComplexCurve, Periodicity};
use crate::linalg::{complement2, expm, hermitian_eig2, inv_sqrt_hermitian2, Mat2c, MatC};
use crate::C64;

/// L²-orthonormal pair `(φ, ψ)` of loops or antiloops.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    rep: ComplexCurve,
}

impl StiefelPoint {
    /// Accepts `c` if its Gram matrix is the identity within `tol.stiefel`.
    pub fn new(c: ComplexCurve) -> Result<Self> {
        if !c.periodicity().is_loop() {
            return Err(Error::OpenInput);
        }
        let residual = c.gram().max_diff(&Mat2c::identity());
        if !(residual <= c.tolerances().stiefel) {
            return Err(Error::InvalidInput(alloc::format!(
                "coordinates are not L²-orthonormal (residual {residual:e})"
            )));
        }
        Ok(StiefelPoint { rep: c })
    }

    pub(crate) fn new_unchecked(c: ComplexCurve) -> Self {
        StiefelPoint { rep: c }
    }

    pub fn curve(&self) -> &ComplexCurve {
        &self.rep
    }

    pub fn into_curve(self) -> ComplexCurve {
        self.rep
    }

    pub fn periodicity(&self) -> Periodicity {
        self.rep.periodicity()
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    /// `max |Φ*Φ − I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        self.rep.gram().max_diff(&Mat2c::identity())
    }

    /// Representative change `Φ ↦ Φ·U`.
    pub fn rotate(&self, u: &Mat2c) -> StiefelPoint {
        StiefelPoint {
            rep: self.rep.right_mul(u),
        }
    }
}

/// A 2-plane, represented by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint {
    pub rep: StiefelPoint,
}

impl From<StiefelPoint> for GrassmannPoint {
    fn from(rep: StiefelPoint) -> Self {
        GrassmannPoint { rep }
    }
}

/// Tangent vector `δΦ` at a Stiefel point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub at: StiefelPoint,
    pub delta: ComplexCurve,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    /// Largest of `|⟨φ,δφ⟩|, |⟨ψ,δψ⟩|, |⟨φ,δψ⟩|, |⟨ψ,δφ⟩|`.
    pub fn horizontality_residual(&self) -> f64 {
        let m = self.at.rep.adjoint_mul(&self.delta);
        m.max_diff(&Mat2c::zero())
    }

    pub fn scaled(&self, s: f64) -> TangentVector {
        TangentVector {
            at: self.at.clone(),
            delta: self.delta.scale(C64::new(s, 0.0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanAngles {
    pub theta_phi: f64,
    pub theta_psi: f64,
}

impl JordanAngles {
    pub fn distance(&self) -> f64 {
        self.theta_phi.hypot(self.theta_psi)
    }
}

/// Scale factor taking raw distances to the diameter-2 normalization.
pub const DIAMETER_SCALE: f64 = 2.0 * SQRT_2 / PI;

/// Symmetric orthonormalization `Φ ↦ Φ·G^{−1/2}`.
pub fn project_stiefel(c: &ComplexCurve) -> Result<StiefelPoint> {
    if !c.periodicity().is_loop() {
        return Err(Error::OpenInput);
    }
    let g = c.gram();
    let (r, l) = inv_sqrt_hermitian2(&g);
    if !(l[1] >= 1e-12) {
        return Err(Error::DegenerateSpan { eigenvalue: l[1] });
    }
    Ok(StiefelPoint {
        rep: c.right_mul(&r),
    })
}

/// `A = P₀*P₁`, so that `P₁ = P₀·U` gives `A = U`.
pub fn cross_gram(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<Mat2c> {
    p0.rep.check_compatible(&p1.rep)?;
    Ok(p0.rep.adjoint_mul(&p1.rep))
}

/// SVD-aligned bases of a pair of planes.
///
/// `base0 = P₀·U`, `base1 = P₁·V` with `A = P₀*P₁ = U·Σ·V*`; `residual_j` is
/// the part of `base1_j` orthogonal to `[P₀]`, and
/// `theta_j = atan2(‖residual_j‖, σ_j)`.
#[derive(Clone, Debug)]
pub struct PrincipalBases {
    pub base0: ComplexCurve,
    pub base1: ComplexCurve,
    pub residual: ComplexCurve,
    pub sigma: [f64; 2],
    pub theta: [f64; 2],
    pub u: Mat2c,
    pub v: Mat2c,
}

pub fn principal_bases(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<PrincipalBases> {
    let a = cross_gram(p0, p1)?;
    let rest = p1.rep.sub(&p0.rep.right_mul(&a));
    let s_res = rest.gram();
    let ata = a.adjoint().mul(&a);
    // Right singular vectors from whichever Gram matrix is smaller: the
    // residual Gram resolves small angles, A*A resolves angles near π/2.
    let v = if s_res.frobenius_sq() < ata.frobenius_sq() {
        let (_, q) = hermitian_eig2(&s_res);
        Mat2c::from_cols(q.col(1), q.col(0))
    } else {
        hermitian_eig2(&ata).1
    };
    let av0 = a.apply(v.col(0));
    let n0 = (av0[0].norm_sqr() + av0[1].norm_sqr()).sqrt();
    let u0 = if n0 > 0.0 {
        [av0[0] / n0, av0[1] / n0]
    } else {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    };
    let mut u1 = complement2(u0);
    let av1 = a.apply(v.col(1));
    let c = u1[0].conj() * av1[0] + u1[1].conj() * av1[1];
    if c.norm() > 0.0 {
        let ph = c / c.norm();
        u1 = [u1[0] * ph, u1[1] * ph];
    }
    let u = Mat2c::from_cols(u0, u1);
    let sigma = [n0, c.norm()];
    let base0 = p0.rep.right_mul(&u);
    let base1 = p1.rep.right_mul(&v);
    let residual = rest.right_mul(&v);
    let mut theta = [0.0; 2];
    for j in 0..2 {
        let r = residual.inner_fn(residual.component(j), residual.component(j)).re;
        theta[j] = r.max(0.0).sqrt().atan2(sigma[j].clamp(0.0, 1.0));
    }
    Ok(PrincipalBases {
        base0,
        base1,
        residual,
        sigma,
        theta,
        u,
        v,
    })
}

pub fn jordan_angles(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<JordanAngles> {
    let b = principal_bases(p0, p1)?;
    let (a, c) = if b.theta[0] <= b.theta[1] {
        (b.theta[0], b.theta[1])
    } else {
        (b.theta[1], b.theta[0])
    };
    Ok(JordanAngles {
        theta_phi: a,
        theta_psi: c,
    })
}

/// Geodesic distance `√(θ_φ² + θ_ψ²)`.
pub fn distance(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<f64> {
    Ok(jordan_angles(p0, p1)?.distance())
}

/// Distance scaled so the Grassmannian has diameter 2.
pub fn normalized_distance(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<f64> {
    Ok(distance(p0, p1)? * DIAMETER_SCALE)
}

/// Precomputed geodesic between two transverse planes.
#[derive(Clone, Debug)]
pub struct Geodesic {
    bases: PrincipalBases,
}

impl Geodesic {
    pub fn new(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<Self> {
        let bases = principal_bases(p0, p1)?;
        let smin = bases.sigma[1];
        if !(smin >= 1e-9) {
            return Err(Error::NonTransverse {
                singular_value: smin,
            });
        }
        Ok(Geodesic { bases })
    }

    pub fn angles(&self) -> [f64; 2] {
        self.bases.theta
    }

    pub fn length(&self) -> f64 {
        self.bases.theta[0].hypot(self.bases.theta[1])
    }

    /// Stiefel representative of the plane at parameter `u`.
    pub fn at(&self, u: f64) -> StiefelPoint {
        let b = &self.bases;
        let mut coef = [(0.0, 0.0); 2];
        for j in 0..2 {
            let th = b.theta[j];
            let st = th.sin();
            let c1 = if st > 1e-300 { (u * th).sin() / st } else { u };
            coef[j] = ((u * th).cos(), c1);
        }
        let comp = |j: usize| -> Vec<C64> {
            b.base0
                .component(j)
                .iter()
                .zip(b.residual.component(j))
                .map(|(x, r)| x * coef[j].0 + r * coef[j].1)
                .collect()
        };
        StiefelPoint {
            rep: b.base0.with_values(comp(0), comp(1)),
        }
    }

    /// Horizontal initial velocity at the representative `P₀` (unit time).
    pub fn initial_velocity(&self, p0: &StiefelPoint) -> TangentVector {
        let b = &self.bases;
        let mut scale = [0.0; 2];
        for j in 0..2 {
            let th = b.theta[j];
            let st = th.sin();
            scale[j] = if st > 1e-300 { th / st } else { 1.0 };
        }
        let comp = |j: usize| -> Vec<C64> {
            b.residual.component(j).iter().map(|r| r * scale[j]).collect()
        };
        let delta = b.residual.with_values(comp(0), comp(1)).right_mul(&b.u.adjoint());
        TangentVector {
            at: p0.clone(),
            delta,
        }
    }
}

/// Point at parameter `u ∈ [0, 1]` on the geodesic from `[P₀]` to `[P₁]`.
pub fn geodesic(p0: &StiefelPoint, p1: &StiefelPoint, u: f64) -> Result<GrassmannPoint> {
    Ok(Geodesic::new(p0, p1)?.at(u).into())
}

/// Horizontal part `δΦ − Φ·(Φ*δΦ)`.
pub fn horizontal_project(p: &StiefelPoint, delta: &ComplexCurve) -> Result<TangentVector> {
    p.rep.check_compatible(delta)?;
    let m = p.rep.adjoint_mul(delta);
    Ok(TangentVector {
        at: p.clone(),
        delta: delta.sub(&p.rep.right_mul(&m)),
    })
}

/// Stiefel geodesic `exp_P(u·δΦ)` in closed form.
pub fn exp_stiefel(p: &StiefelPoint, v: &TangentVector, u: f64) -> Result<StiefelPoint> {
    p.rep.check_compatible(&v.delta)?;
    let a = p.rep.adjoint_mul(&v.delta);
    let s = v.delta.gram();
    let zero = C64::new(0.0, 0.0);
    let mut m: MatC<4> = [[zero; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a.0[i][j] * u;
            m[i][j + 2] = -s.0[i][j] * u;
            m[i + 2][j + 2] = a.0[i][j] * u;
        }
        m[i + 2][i] = C64::new(u, 0.0);
    }
    let e = expm(&m);
    let back = crate::linalg::expm2(&a.scale(C64::new(-u, 0.0)));
    let top = Mat2c([[e[0][0], e[0][1]], [e[1][0], e[1][1]]]).mul(&back);
    let bottom = Mat2c([[e[2][0], e[2][1]], [e[3][0], e[3][1]]]).mul(&back);
    let rep = p.rep.right_mul(&top).add(&v.delta.right_mul(&bottom));
    Ok(StiefelPoint { rep })
}

pub fn exp_grassmann(p: &StiefelPoint, v: &TangentVector, u: f64) -> Result<GrassmannPoint> {
    Ok(exp_stiefel(p, v, u)?.into())
}

/// Horizontal tangent at `P₀` whose geodesic reaches `[P₁]` at time 1.
pub fn log_grassmann(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<TangentVector> {
    Ok(Geodesic::new(p0, p1)?.initial_velocity(p0))
}

/// Result of [`is_real_plane`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealPlaneCheck {
    pub is_real: bool,
    /// Largest L² norm of the imaginary part of the best real basis.
    pub residual: f64,
    /// Unitary change of basis realizing the residual.
    pub basis_change: Mat2c,
}

/// Threshold used by [`is_real_plane`].
pub const REAL_PLANE_TOL: f64 = 1e-8;

/// Tests whether some unitary change of basis makes both coordinates real.
///
/// For a real plane the symmetric form `B = ∫ΦᵀΦ` is unitary with commuting
/// real and imaginary parts; a generic real combination of the two is
/// diagonalized by a rotation `O`, and `Φ·O·diag(e^{−iθ/2})` is then real.
pub fn is_real_plane(p: &StiefelPoint) -> RealPlaneCheck {
    let c = &p.rep;
    let mut b = Mat2c::zero();
    for j in 0..2 {
        for k in 0..2 {
            let conj: Vec<C64> = c.component(k).iter().map(|z| z.conj()).collect();
            b.0[j][k] = c.inner_fn(c.component(j), &conj);
        }
    }
    let w = 0.618_033_988_749_894_9;
    let m00 = b.0[0][0].re + w * b.0[0][0].im;
    let m11 = b.0[1][1].re + w * b.0[1][1].im;
    let m01 = 0.5 * (b.0[0][1].re + b.0[1][0].re + w * (b.0[0][1].im + b.0[1][0].im));
    let rot = 0.5 * (2.0 * m01).atan2(m00 - m11);
    let (s, co) = rot.sin_cos();
    let o = Mat2c::new(
        C64::new(co, 0.0),
        C64::new(-s, 0.0),
        C64::new(s, 0.0),
        C64::new(co, 0.0),
    );
    let d = o.transpose().mul(&b).mul(&o);
    let ph = |z: C64| C64::from_polar(1.0, -0.5 * z.arg());
    let basis_change = o.mul(&Mat2c::diag(ph(d.0[0][0]), ph(d.0[1][1])));
    let q = c.right_mul(&basis_change);
    let mut residual = 0.0f64;
    for j in 0..2 {
        let im: Vec<f64> = q.component(j).iter().map(|z| z.im * z.im).collect();
        residual = residual.max(q.integrate_real(&im).max(0.0).sqrt());
    }
    RealPlaneCheck {
        is_real: residual <= REAL_PLANE_TOL,
        residual,
        basis_change,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::hopf::Periodicity;
    use crate::linalg::svd2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random band-limited pair with `modes` Fourier modes per coordinate.
    pub(crate) fn random_curve(rng: &mut ChaCha8Rng, n: usize, p: Periodicity, modes: i64) -> ComplexCurve {
        let shift = if p == Periodicity::Antiperiodic { 0.5 } else { 0.0 };
        let mut coef = Vec::new();
        for _ in 0..2 {
            let mut c = Vec::new();
            for m in -modes..=modes {
                let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                c.push((m as f64 + shift, a / (1.0 + (m as f64).abs())));
            }
            coef.push(c);
        }
        ComplexCurve::from_fn(n, p, |t| {
            let ev = |c: &Vec<(f64, C64)>| {
                c.iter()
                    .map(|(f, a)| a * C64::from_polar(1.0, PI * f * t))
                    .sum::<C64>()
            };
            (ev(&coef[0]), ev(&coef[1]))
        })
    }

    pub(crate) fn random_point(rng: &mut ChaCha8Rng, n: usize, p: Periodicity) -> StiefelPoint {
        project_stiefel(&random_curve(rng, n, p, 3)).unwrap()
    }

    pub(crate) fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2c {
        let x: [f64; 5] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = x[..4].iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b) = (C64::new(x[0] / n, x[1] / n), C64::new(x[2] / n, x[3] / n));
        Mat2c::new(a, b, -b.conj(), a.conj()).scale(C64::from_polar(1.0, 3.0 * x[4]))
    }

    /// Four orthonormal loops `e_m(t) = e^{iπmt}/√2`.
    pub(crate) fn fourier_basis(n: usize, m: i64) -> Vec<C64> {
        (0..n)
            .map(|k| C64::from_polar(core::f64::consts::FRAC_1_SQRT_2, PI * m as f64 * crate::grid_param(k, n)))
            .collect()
    }

    fn two_block(n: usize, theta: f64) -> (StiefelPoint, StiefelPoint) {
        let e: Vec<Vec<C64>> = (0..4).map(|m| fourier_basis(n, m)).collect();
        let p0 = ComplexCurve::new(e[0].clone(), e[1].clone(), Periodicity::Periodic).unwrap();
        let mixed: Vec<C64> = e[0]
            .iter()
            .zip(&e[2])
            .map(|(a, b)| a * theta.cos() + b * theta.sin())
            .collect();
        let p1 = ComplexCurve::new(mixed, e[1].clone(), Periodicity::Periodic).unwrap();
        (StiefelPoint::new(p0).unwrap(), StiefelPoint::new(p1).unwrap())
    }

    #[test]
    fn projection_of_orthonormal_and_scaled() {
        let (p, _) = two_block(32, 0.0);
        let q = project_stiefel(p.curve()).unwrap();
        assert!(q.curve().max_diff(p.curve()) < 1e-12);
        let scaled = p.curve().with_values(
            p.curve().phi().iter().map(|z| z * 2.0).collect(),
            p.curve().psi().to_vec(),
        );
        assert!(project_stiefel(&scaled).unwrap().curve().max_diff(p.curve()) < 1e-12);
    }

    #[test]
    fn degenerate_span_is_rejected() {
        let (p, _) = two_block(32, 0.0);
        let c = p.curve().with_values(p.curve().phi().to_vec(), p.curve().phi().to_vec());
        assert!(matches!(project_stiefel(&c), Err(Error::DegenerateSpan { .. })));
    }

    #[test]
    fn two_block_angles() {
        for th in [1e-6, 0.3, 1.2] {
            let (p0, p1) = two_block(32, th);
            let j = jordan_angles(&p0, &p1).unwrap();
            assert!(j.theta_phi.abs() < 1e-12, "{th} {:?}", j);
            assert!((j.theta_psi - th).abs() < 1e-12, "{th}");
        }
    }

    #[test]
    fn orthogonal_planes() {
        let e: Vec<Vec<C64>> = (0..4).map(|m| fourier_basis(32, m)).collect();
        let p0 = StiefelPoint::new(ComplexCurve::new(e[0].clone(), e[1].clone(), Periodicity::Periodic).unwrap()).unwrap();
        let p1 = StiefelPoint::new(ComplexCurve::new(e[2].clone(), e[3].clone(), Periodicity::Periodic).unwrap()).unwrap();
        assert!((distance(&p0, &p1).unwrap() - PI / SQRT_2).abs() < 1e-12);
        assert!((normalized_distance(&p0, &p1).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(Geodesic::new(&p0, &p1), Err(Error::NonTransverse { .. })));
    }

    #[test]
    fn geodesic_endpoints_and_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p0 = random_point(&mut rng, 64, Periodicity::Periodic);
        let p1 = random_point(&mut rng, 64, Periodicity::Periodic);
        let g = Geodesic::new(&p0, &p1).unwrap();
        let d = g.length();
        assert!(distance(&g.at(0.0), &p0).unwrap() < 1e-8);
        assert!(distance(&g.at(1.0), &p1).unwrap() < 1e-8);
        for i in 0..5 {
            let (u, w) = (0.1 * i as f64, 0.1 * i as f64 + 0.35);
            let dd = distance(&g.at(u), &g.at(w)).unwrap();
            assert!((dd - 0.35 * d).abs() < 1e-8);
        }
        assert!(g.at(0.4).orthonormality_residual() < 1e-12);
    }

    #[test]
    fn exp_log_inverse_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p0 = random_point(&mut rng, 64, Periodicity::Antiperiodic);
        let q = random_point(&mut rng, 64, Periodicity::Antiperiodic);
        let p1 = Geodesic::new(&p0, &q).unwrap().at(0.7 / distance(&p0, &q).unwrap());
        let l = log_grassmann(&p0, &p1).unwrap();
        assert!(l.horizontality_residual() < 1e-12);
        assert!((l.norm() - distance(&p0, &p1).unwrap()).abs() < 1e-9);
        let e = exp_stiefel(&p0, &l, 1.0).unwrap();
        assert!(distance(&e, &p1).unwrap() < 1e-7);
        for u in [0.0, 0.5, 1.0, 2.0] {
            assert!(exp_stiefel(&p0, &l, u).unwrap().orthonormality_residual() < 1e-9);
        }
    }

    #[test]
    fn exp_with_vertical_component_stays_on_stiefel() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_point(&mut rng, 64, Periodicity::Periodic);
        let d = random_curve(&mut rng, 64, Periodicity::Periodic, 2);
        let h = horizontal_project(&p, &d).unwrap();
        let vert = p.curve().right_mul(&Mat2c::new(
            C64::new(0.0, 0.3),
            C64::new(0.2, 0.1),
            C64::new(-0.2, 0.1),
            C64::new(0.0, -0.5),
        ));
        let v = TangentVector {
            at: p.clone(),
            delta: h.delta.add(&vert),
        };
        for u in [0.3, 1.0, 2.0] {
            assert!(exp_stiefel(&p, &v, u).unwrap().orthonormality_residual() < 1e-9);
        }
    }

    #[test]
    fn horizontal_projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_point(&mut rng, 64, Periodicity::Periodic);
        let d = random_curve(&mut rng, 64, Periodicity::Periodic, 3);
        let h = horizontal_project(&p, &d).unwrap();
        assert!(h.horizontality_residual() < 1e-12);
        let h2 = horizontal_project(&p, &h.delta).unwrap();
        assert!(h2.delta.max_diff(&h.delta) < 1e-12);
        let vert = p.curve().right_mul(&random_unitary(&mut rng));
        assert!(horizontal_project(&p, &vert).unwrap().delta.max_abs() < 1e-12);
    }

    #[test]
    fn real_plane_detection() {
        let (p, _) = two_block(32, 0.0);
        // e_0 = 1/√2 and e_1 rotated into cos/sin form.
        let c = p.curve();
        let re = c.with_values(
            c.phi().to_vec(),
            c.psi().iter().map(|z| C64::new(z.re, 0.0) * SQRT_2).collect(),
        );
        let real = project_stiefel(&re).unwrap();
        assert!(is_real_plane(&real).is_real);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rotated = real.rotate(&random_unitary(&mut rng));
        let chk = is_real_plane(&rotated);
        assert!(chk.is_real, "{}", chk.residual);
        let generic = random_point(&mut rng, 64, Periodicity::Periodic);
        assert!(is_real_plane(&generic).residual > 0.05);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn invariant_under_representative_change(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p0 = random_point(&mut rng, 32, Periodicity::Periodic);
            let p1 = random_point(&mut rng, 32, Periodicity::Periodic);
            let d = distance(&p0, &p1).unwrap();
            let q0 = p0.rotate(&random_unitary(&mut rng));
            let q1 = p1.rotate(&random_unitary(&mut rng));
            prop_assert!((distance(&q0, &q1).unwrap() - d).abs() < 1e-9);
            let s0 = svd2(&cross_gram(&p0, &p1).unwrap()).sigma;
            let s1 = svd2(&cross_gram(&q0, &q1).unwrap()).sigma;
            prop_assert!((s0[0] - s1[0]).abs() < 1e-10 && (s0[1] - s1[1]).abs() < 1e-10);
        }

        #[test]
        fn symmetric_and_triangle(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_point(&mut rng, 32, Periodicity::Antiperiodic);
            let b = random_point(&mut rng, 32, Periodicity::Antiperiodic);
            let c = random_point(&mut rng, 32, Periodicity::Antiperiodic);
            let ab = distance(&a, &b).unwrap();
            prop_assert!((ab - distance(&b, &a).unwrap()).abs() < 1e-8);
            prop_assert!(distance(&a, &c).unwrap() <= ab + distance(&b, &c).unwrap() + 1e-8);
        }

        #[test]
        fn cross_gram_recovers_unitary(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_point(&mut rng, 32, Periodicity::Periodic);
            let u = random_unitary(&mut rng);
            let a = cross_gram(&p, &p.rotate(&u)).unwrap();
            prop_assert!(a.max_diff(&u) < 1e-10);
        }
    }
}
