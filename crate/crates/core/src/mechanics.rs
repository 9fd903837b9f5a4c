//! Metrics, complex structure and momentum maps on framed loop space, the
//! weighted total twist and its critical torus knots, and a numerical
//! sectional-curvature probe.
//!
//! Conventions: `g = Re⟨·,·⟩`, `ω = −Im⟨·,·⟩` and `J` is multiplication by
//! `i`, so that `ω(X, Y) = g(JX, Y)`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{self, FramedCurve};
use crate::error::{Error, Result};
use crate::grassmann::{distance, exp_grassmann, horizontal_project, StiefelPoint, TangentVector};
use crate::hopf::{hopf_pointwise, reconstruct, ComplexCurve, Periodicity};
use crate::linalg::{cross3, dot3, scale3, sub3, Mat2c, Vec3};
use crate::{grid_param, C64};

pub fn g_l2(a: &ComplexCurve, b: &ComplexCurve) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(a.inner(b).re)
}

pub fn omega_l2(a: &ComplexCurve, b: &ComplexCurve) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(-a.inner(b).im)
}

pub fn j_apply(a: &ComplexCurve) -> ComplexCurve {
    a.scale(C64::new(0.0, 1.0))
}

/// Tangent vector `(δγ, δV)` to framed path space at `at`.
#[derive(Clone, Debug)]
pub struct CurveVariation {
    pub at: FramedCurve,
    pub dgamma: Vec<Vec3>,
    /// `d/dt δγ` on the same grid.
    pub dgamma_prime: Vec<Vec3>,
    pub dv: Vec<Vec3>,
}

impl CurveVariation {
    /// Builds `δγ` as the antiderivative of `δγ'` based at the origin.
    pub fn from_derivative(at: &FramedCurve, dgamma_prime: Vec<Vec3>, dv: Vec<Vec3>) -> Result<Self> {
        if dgamma_prime.len() != at.len() || dv.len() != at.len() {
            return Err(Error::GridMismatch {
                left: at.len(),
                right: dgamma_prime.len().min(dv.len()),
            });
        }
        let closed = at.is_closed();
        let cols = curve::columns(&dgamma_prime).map(|c| {
            let mut v = curve::cumulative1(&c, closed);
            v.truncate(at.len());
            v
        });
        Ok(CurveVariation {
            at: at.clone(),
            dgamma: curve::from_columns(cols),
            dgamma_prime,
            dv,
        })
    }

    /// Largest violation of basepoint, orthogonality and normality
    /// preservation.
    pub fn constraint_residual(&self) -> f64 {
        let vel = self.at.velocity();
        let v = self.at.v();
        let mut r = crate::linalg::norm3(self.dgamma[0]);
        for k in 0..v.len() {
            r = r.max((dot3(self.dgamma_prime[k], v[k]) + dot3(vel[k], self.dv[k])).abs());
            r = r.max(dot3(self.dv[k], v[k]).abs());
        }
        r
    }

    pub fn scaled(&self, s: f64) -> CurveVariation {
        CurveVariation {
            at: self.at.clone(),
            dgamma: self.dgamma.iter().map(|x| scale3(s, *x)).collect(),
            dgamma_prime: self.dgamma_prime.iter().map(|x| scale3(s, *x)).collect(),
            dv: self.dv.iter().map(|x| scale3(s, *x)).collect(),
        }
    }

    pub fn max_diff(&self, other: &CurveVariation) -> f64 {
        let m = |a: &[Vec3], b: &[Vec3]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| crate::linalg::norm3(sub3(*x, *y)))
                .fold(0.0, f64::max)
        };
        m(&self.dgamma, &other.dgamma)
            .max(m(&self.dgamma_prime, &other.dgamma_prime))
            .max(m(&self.dv, &other.dv))
    }
}

/// Stretch, twist and the two bending variations of a framed curve.
#[derive(Clone, Debug)]
pub struct BasicVariations {
    pub x_st: CurveVariation,
    pub x_tw: CurveVariation,
    pub x_b1: CurveVariation,
    pub x_b2: CurveVariation,
}

pub fn basic_variations(c: &FramedCurve) -> Result<BasicVariations> {
    let p = curve::frame_map(c)?;
    let n = c.len();
    let zero = alloc::vec![[0.0; 3]; n];
    let rt: Vec<Vec3> = (0..n).map(|k| scale3(p.r[k], p.t[k])).collect();
    let rw: Vec<Vec3> = (0..n).map(|k| scale3(p.r[k], p.w[k])).collect();
    let mrv: Vec<Vec3> = (0..n).map(|k| scale3(-p.r[k], p.v[k])).collect();
    let mw: Vec<Vec3> = p.w.iter().map(|w| scale3(-1.0, *w)).collect();
    Ok(BasicVariations {
        x_st: CurveVariation::from_derivative(c, rt, zero.clone())?,
        x_tw: CurveVariation::from_derivative(c, zero.clone(), mw)?,
        x_b1: CurveVariation::from_derivative(c, rw, zero)?,
        x_b2: CurveVariation::from_derivative(c, mrv, p.t.clone())?,
    })
}

/// Coefficients `(a, b, c, d)` of the framed-curve elastic metrics; the
/// default `(1, 1, 1, 1)` is the metric pulled back from `L²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for ElasticWeights {
    fn default() -> Self {
        ElasticWeights {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
        }
    }
}

/// `¼∫ a⟨δγ₁,V⟩⟨δγ₂,V⟩ + b⟨·,W⟩⟨·,W⟩ + c⟨·,T⟩⟨·,T⟩ + d⟨δV₁,W⟩⟨δV₂,W⟩ ds`
/// with `δγ` differentiated in arclength.
pub fn g_elastic(c: &FramedCurve, x1: &CurveVariation, x2: &CurveVariation, w: ElasticWeights) -> Result<f64> {
    let p = curve::frame_map(c)?;
    let tol = 1e-6 * (1.0 + c.length());
    for x in [x1, x2] {
        if x.dv.len() != c.len() {
            return Err(Error::GridMismatch {
                left: c.len(),
                right: x.dv.len(),
            });
        }
        let res = x.constraint_residual();
        if !(res <= tol) {
            return Err(Error::InvalidInput(alloc::format!(
                "variation is not tangent to framed path space (residual {res:e})"
            )));
        }
    }
    let integrand: Vec<f64> = (0..c.len())
        .map(|k| {
            let s1 = scale3(1.0 / p.r[k], x1.dgamma_prime[k]);
            let s2 = scale3(1.0 / p.r[k], x2.dgamma_prime[k]);
            let e = w.a * dot3(s1, p.v[k]) * dot3(s2, p.v[k])
                + w.b * dot3(s1, p.w[k]) * dot3(s2, p.w[k])
                + w.c * dot3(s1, p.t[k]) * dot3(s2, p.t[k])
                + w.d * dot3(x1.dv[k], p.w[k]) * dot3(x2.dv[k], p.w[k]);
            0.25 * e * p.r[k]
        })
        .collect();
    Ok(curve::integrate1(&integrand, c.is_closed()))
}

/// Differential of the frame-Hopf map. The map is quadratic, so the central
/// difference with unit step is exact.
pub fn pushforward(phi: &ComplexCurve, delta: &ComplexCurve) -> Result<CurveVariation> {
    phi.check_compatible(delta)?;
    let at = reconstruct(phi)?;
    let n = at.len();
    let mut dgp = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    for k in 0..n {
        // Open reconstructions repeat the first sample at t = 2; the
        // bilinear quantities below are periodic for loops.
        let j = k % phi.len();
        let (z, w) = (phi.phi()[j], phi.psi()[j]);
        let (dz, dw) = (delta.phi()[j], delta.psi()[j]);
        let hp = hopf_pointwise(z + dz, w + dw);
        let hm = hopf_pointwise(z - dz, w - dw);
        let col = |m: &[[f64; 3]; 3], c: usize| [m[0][c], m[1][c], m[2][c]];
        let drt = scale3(0.5, sub3(col(&hp, 0), col(&hm, 0)));
        let drv = scale3(0.5, sub3(col(&hp, 1), col(&hm, 1)));
        let r = z.norm_sqr() + w.norm_sqr();
        let dr = 2.0 * (z * dz.conj() + w * dw.conj()).re;
        let rv = scale3(r, at.v()[k]);
        dgp.push(drt);
        dv.push(scale3(1.0 / r, sub3(drv, scale3(dr / r, rv))));
    }
    CurveVariation::from_derivative(&at, dgp, dv)
}

/// Quaternionic variations `q/2, iq/2, jq/2, kq/2` of `Φ`, with
/// `j·(z, w) = (−w̄, z̄)` and `k = ij`.
pub fn quaternion_variations(phi: &ComplexCurve) -> [ComplexCurve; 4] {
    let half = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    let jq = phi.with_values(
        phi.psi().iter().map(|w| -w.conj() * half).collect(),
        phi.phi().iter().map(|z| z.conj() * half).collect(),
    );
    [phi.scale(half), phi.scale(ih), jq.clone(), jq.scale(C64::new(0.0, 1.0))]
}

/// `i·Φ*Φ`, equal to `i·I` exactly on the Stiefel manifold.
pub fn momentum_u2(phi: &ComplexCurve) -> Mat2c {
    phi.gram().scale(C64::new(0.0, 1.0))
}

/// Speed loop `|φ|² + |ψ|²`, a representative modulo constants.
pub fn momentum_loopgroup(p: &StiefelPoint) -> Vec<f64> {
    p.curve().modulus_sq()
}

/// `Im(φ'φ̄ + ψ'ψ̄)`.
pub fn momentum_diff(p: &StiefelPoint) -> Vec<f64> {
    diff_density(p.curve())
}

fn diff_density(c: &ComplexCurve) -> Vec<f64> {
    let d = c.derivative();
    (0..c.len())
        .map(|k| (d.phi()[k] * c.phi()[k].conj() + d.psi()[k] * c.psi()[k].conj()).im)
        .collect()
}

/// `∫ Im(φ'φ̄ + ψ'ψ̄) dt`.
pub fn momentum_s1(p: &StiefelPoint) -> f64 {
    p.curve().integrate_real(&diff_density(p.curve()))
}

/// `(1/2π) ∫ tw·‖γ'‖ ds`.
pub fn weighted_total_twist(c: &FramedCurve) -> Result<f64> {
    let tw = curve::twist_rate(c)?;
    let r = c.speed();
    let f: Vec<f64> = tw.iter().zip(&r).map(|(a, s)| a * s * s).collect();
    Ok(curve::integrate1(&f, c.is_closed()) / (2.0 * PI))
}

/// Pairing on loops modulo constants,
/// `⟨[α], [β]⟩ = ½∫αβ − ¼∫α∫β`.
pub fn loop_pairing(like: &ComplexCurve, alpha: &[f64], beta: &[f64]) -> f64 {
    let ab: Vec<f64> = alpha.iter().zip(beta).map(|(a, b)| a * b).collect();
    0.5 * like.integrate_real(&ab) - 0.25 * like.integrate_real(alpha) * like.integrate_real(beta)
}

/// Clifford torus knot `(e^{i(k+h)πt/2}, e^{i(k−h)πt/2})/√2`: an `h`-times
/// covered circle of length 2 with constant twist.
pub fn torus_knot(n: usize, h: u32, k: i64) -> Result<StiefelPoint> {
    if h == 0 {
        return Err(Error::InvalidInput("torus knot needs h ≥ 1".into()));
    }
    let h = h as i64;
    let per = if (k + h).rem_euclid(2) == 0 {
        Periodicity::Periodic
    } else {
        Periodicity::Antiperiodic
    };
    let c = ComplexCurve::from_fn(n, per, |t| {
        (
            C64::from_polar(FRAC_1_SQRT_2, 0.5 * PI * (k + h) as f64 * t),
            C64::from_polar(FRAC_1_SQRT_2, 0.5 * PI * (k - h) as f64 * t),
        )
    });
    StiefelPoint::new(c)
}

/// Generator of a Hamiltonian action.
#[derive(Clone, Debug)]
pub enum Generator {
    /// Element `α` of the loop algebra acting by frame twists.
    Loop(Vec<f64>),
    /// Vector field `ξ ∂_t` generating reparameterizations.
    Diff(Vec<f64>),
}

/// Paired momentum `f(Φ)` of a generator.
pub fn paired_momentum(phi: &ComplexCurve, generator: &Generator) -> f64 {
    match generator {
        Generator::Loop(a) => loop_pairing(phi, &phi.modulus_sq(), a),
        Generator::Diff(xi) => {
            let m = diff_density(phi);
            let f: Vec<f64> = m.iter().zip(xi).map(|(a, b)| a * b).collect();
            0.5 * phi.integrate_real(&f)
        }
    }
}

/// Induced field of a generator at `P`: `proj(iαΦ)` for loops and
/// `½ξ'Φ + ξΦ'` for reparameterizations.
pub fn induced_field(p: &StiefelPoint, generator: &Generator) -> Result<ComplexCurve> {
    let c = p.curve();
    match generator {
        Generator::Loop(a) => {
            let f: Vec<C64> = a.iter().map(|x| C64::new(0.0, *x)).collect();
            Ok(horizontal_project(p, &c.mul_pointwise(&f))?.delta)
        }
        Generator::Diff(xi) => {
            let dxi = crate::spectral::derivative_real(xi);
            let half: Vec<C64> = dxi.iter().map(|x| C64::new(0.5 * x, 0.0)).collect();
            let xs: Vec<C64> = xi.iter().map(|x| C64::new(*x, 0.0)).collect();
            Ok(c.mul_pointwise(&half).add(&c.derivative().mul_pointwise(&xs)))
        }
    }
}

/// `|Df(δΦ) − ω(δΦ, X)|` with `Df` a central difference of step `h`.
pub fn hamiltonian_residual(p: &StiefelPoint, generator: &Generator, delta: &ComplexCurve, h: f64) -> Result<f64> {
    let c = p.curve();
    c.check_compatible(delta)?;
    let len = match generator {
        Generator::Loop(a) | Generator::Diff(a) => a.len(),
    };
    if len != c.len() {
        return Err(Error::GridMismatch {
            left: c.len(),
            right: len,
        });
    }
    let fp = paired_momentum(&c.axpy(C64::new(h, 0.0), delta), generator);
    let fm = paired_momentum(&c.axpy(C64::new(-h, 0.0), delta), generator);
    let df = (fp - fm) / (2.0 * h);
    let x = induced_field(p, generator)?;
    Ok((df - omega_l2(delta, &x)?).abs())
}

/// Random band-limited horizontal direction of unit norm.
pub fn random_horizontal(p: &StiefelPoint, rng: &mut ChaCha8Rng, modes: i64) -> Result<TangentVector> {
    let c = p.curve();
    let shift = if c.periodicity() == Periodicity::Antiperiodic { 0.5 } else { 0.0 };
    let mut coef: Vec<Vec<(f64, C64)>> = Vec::new();
    for _ in 0..2 {
        coef.push(
            (-modes..=modes)
                .map(|m| {
                    let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    (m as f64 + shift, a / (1.0 + (m as f64).abs()))
                })
                .collect(),
        );
    }
    let ev = |cf: &[(f64, C64)], t: f64| cf.iter().map(|(f, a)| a * C64::from_polar(1.0, PI * f * t)).sum::<C64>();
    let n = c.n_intervals();
    let raw = c.with_values(
        (0..c.len()).map(|k| ev(&coef[0], grid_param(k, n))).collect(),
        (0..c.len()).map(|k| ev(&coef[1], grid_param(k, n))).collect(),
    );
    let v = horizontal_project(p, &raw)?;
    let nv = v.norm();
    if !(nv > 1e-12) {
        return Err(Error::DegenerateSpan { eigenvalue: nv });
    }
    Ok(v.scaled(1.0 / nv))
}

/// Weighted total twist of the framed loop represented by `P`.
pub fn weighted_total_twist_of(p: &StiefelPoint) -> Result<f64> {
    weighted_total_twist(&reconstruct(p.curve())?)
}

/// Largest central-difference directional derivative of the weighted total
/// twist along geodesics in `n_directions` random horizontal directions.
pub fn criticality_check(p: &StiefelPoint, n_directions: usize, seed: u64, step: f64) -> Result<f64> {
    if !p.periodicity().is_loop() {
        return Err(Error::OpenInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..n_directions {
        let v = random_horizontal(p, &mut rng, 4)?;
        let f = |u: f64| -> Result<f64> { weighted_total_twist_of(&exp_grassmann(p, &v, u)?.rep) };
        let d = (f(step)? - f(-step)?) / (2.0 * step);
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

/// Sectional curvature of the plane spanned by two horizontal directions,
/// from `d(exp sX, exp sY)² = 2s² − (K/3)s⁴ + O(s⁶)` for `g`-orthonormal
/// `X, Y`, Richardson-extrapolated over `s = 0.1, 0.05, 0.025`.
pub fn sectional_curvature_probe(p: &StiefelPoint, d1: &ComplexCurve, d2: &ComplexCurve) -> Result<f64> {
    let x = horizontal_project(p, d1)?;
    let y0 = horizontal_project(p, d2)?;
    let nx = x.norm();
    if !(nx > 1e-12) {
        return Err(Error::DegenerateSpan { eigenvalue: nx });
    }
    let x = x.scaled(1.0 / nx);
    let proj = g_l2(&y0.delta, &x.delta)?;
    let y = TangentVector {
        at: p.clone(),
        delta: y0.delta.axpy(C64::new(-proj, 0.0), &x.delta),
    };
    let ny = y.norm();
    if !(ny > 1e-12) {
        return Err(Error::DegenerateSpan { eigenvalue: ny });
    }
    let y = y.scaled(1.0 / ny);
    let k_at = |s: f64| -> Result<f64> {
        let a = exp_grassmann(p, &x, s)?.rep;
        let b = exp_grassmann(p, &y, s)?.rep;
        let d = distance(&a, &b)?;
        Ok(3.0 * (2.0 * s * s - d * d) / s.powi(4))
    };
    let k = [k_at(0.1)?, k_at(0.05)?, k_at(0.025)?];
    let r1 = (4.0 * k[1] - k[0]) / 3.0;
    let r2 = (4.0 * k[2] - k[1]) / 3.0;
    let spread = (r2 - r1).abs();
    if !(spread <= 1e-3 * (1.0 + r2.abs())) {
        return Err(Error::IllConditioned { spread });
    }
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Curvature probe on `n_planes` random horizontal 2-planes at `P`.
pub fn curvature_survey(p: &StiefelPoint, n_planes: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_planes)
        .map(|_| {
            let x = random_horizontal(p, &mut rng, 3)?.delta;
            let y = random_horizontal(p, &mut rng, 3)?.delta;
            sectional_curvature_probe(p, &x, &y)
        })
        .collect()
}

/// `(T, V, W)` and speed of a reconstruction, for diagnostics.
pub fn frame_of(c: &FramedCurve) -> Result<Vec<[Vec3; 3]>> {
    let p = curve::frame_map(c)?;
    Ok((0..c.len()).map(|k| [p.t[k], p.v[k], cross3(p.t[k], p.v[k])]).collect())
}
