//! Framed curves, the frame map and classical invariants.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hopf::{self, Periodicity};
use crate::linalg::{
    add3, cross3, dot3, norm3, normalize3, scale3, sub3, Vec3,
};
use crate::spectral::{self, CubicSpline};
use crate::{grid_param, Tolerances};

/// A framed curve `(γ, V)` sampled on the uniform grid over `[0, 2]`.
///
/// Closed curves store `N` samples at `t_k = 2k/N`, `k < N`; open curves
/// store `N + 1` samples including `t = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramedCurve {
    gamma: Vec<Vec3>,
    v: Vec<Vec3>,
    closed: bool,
    tol: Tolerances,
}

/// The frame path `(T, V, W, r)` of a framed curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePath {
    pub t: Vec<Vec3>,
    pub v: Vec<Vec3>,
    pub w: Vec<Vec3>,
    pub r: Vec<f64>,
    pub closed: bool,
    pub tol: Tolerances,
}

/// Output of [`bishop_framing`].
#[derive(Clone, Debug)]
pub struct BishopFraming {
    pub curve: FramedCurve,
    /// Angle from `V(0)` to the transported `V(2)`, measured about `T(0)`.
    pub holonomy: f64,
}

/// Per-sample curvatures with respect to the frame `(T, V, W)`.
#[derive(Clone, Debug)]
pub struct Curvatures {
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
}

impl Curvatures {
    pub fn total(&self) -> Vec<f64> {
        self.kappa1
            .iter()
            .zip(&self.kappa2)
            .map(|(a, b)| a.hypot(*b))
            .collect()
    }
}

pub(crate) fn columns(x: &[Vec3]) -> [Vec<f64>; 3] {
    [
        x.iter().map(|p| p[0]).collect(),
        x.iter().map(|p| p[1]).collect(),
        x.iter().map(|p| p[2]).collect(),
    ]
}

pub(crate) fn from_columns(c: [Vec<f64>; 3]) -> Vec<Vec3> {
    (0..c[0].len()).map(|k| [c[0][k], c[1][k], c[2][k]]).collect()
}

/// Derivative along the grid: spectral when `closed`, fourth order otherwise.
pub(crate) fn derivative3(x: &[Vec3], closed: bool) -> Vec<Vec3> {
    if closed {
        from_columns(columns(x).map(|c| spectral::derivative_real(&c)))
    } else {
        let h = 2.0 / (x.len() - 1) as f64;
        from_columns(columns(x).map(|c| spectral::fd4_derivative(&c, h)))
    }
}

/// Integral over `[0, 2]` of grid samples.
pub(crate) fn integrate1(x: &[f64], closed: bool) -> f64 {
    if closed {
        spectral::integrate_periodic(x)
    } else {
        spectral::integrate_open(x, 2.0 / (x.len() - 1) as f64)
    }
}

/// Cumulative integral from 0 at every grid point, `N + 1` values.
pub(crate) fn cumulative1(x: &[f64], closed: bool) -> Vec<f64> {
    if closed {
        spectral::antiderivative_periodic_real(x)
    } else {
        spectral::cumulative_open(x, 2.0 / (x.len() - 1) as f64)
    }
}

fn cumulative3(x: &[Vec3], closed: bool) -> Vec<Vec3> {
    from_columns(columns(x).map(|c| cumulative1(&c, closed)))
}

/// Unit vector in the normal plane of `t` closest to `v`.
pub(crate) fn project_normal(v: Vec3, t: Vec3) -> Vec3 {
    normalize3(sub3(v, scale3(dot3(v, t), t)))
}

impl FramedCurve {
    /// Validated constructor with default tolerances.
    pub fn new(gamma: Vec<Vec3>, v: Vec<Vec3>, closed: bool) -> Result<Self> {
        Self::with_tolerances(gamma, v, closed, Tolerances::default())
    }

    pub fn with_tolerances(
        gamma: Vec<Vec3>,
        v: Vec<Vec3>,
        closed: bool,
        tol: Tolerances,
    ) -> Result<Self> {
        let c = Self::from_parts(gamma, v, closed, tol)?;
        c.validate()?;
        Ok(c)
    }

    /// Shape-checked but otherwise unvalidated constructor.
    pub fn from_parts(gamma: Vec<Vec3>, v: Vec<Vec3>, closed: bool, tol: Tolerances) -> Result<Self> {
        if gamma.len() != v.len() {
            return Err(Error::GridMismatch {
                left: gamma.len(),
                right: v.len(),
            });
        }
        let min = if closed { 4 } else { 5 };
        if gamma.len() < min {
            return Err(Error::InvalidInput(alloc::format!(
                "need at least {min} samples, got {}",
                gamma.len()
            )));
        }
        Ok(FramedCurve { gamma, v, closed, tol })
    }

    /// Checks unit framing, immersion and normality.
    pub fn validate(&self) -> Result<()> {
        for (k, v) in self.v.iter().enumerate() {
            let e = (norm3(*v) - 1.0).abs();
            if !(e <= self.tol.geom) {
                return Err(Error::BadFraming {
                    what: "unit length",
                    index: k,
                    residual: e,
                });
            }
        }
        frame_map(self).map(|_| ())
    }

    pub fn gamma(&self) -> &[Vec3] {
        &self.gamma
    }

    pub fn v(&self) -> &[Vec3] {
        &self.v
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Number of grid intervals `N`.
    pub fn n_intervals(&self) -> usize {
        if self.closed {
            self.gamma.len()
        } else {
            self.gamma.len() - 1
        }
    }

    pub fn params(&self) -> Vec<f64> {
        let n = self.n_intervals();
        (0..self.len()).map(|k| grid_param(k, n)).collect()
    }

    pub fn velocity(&self) -> Vec<Vec3> {
        derivative3(&self.gamma, self.closed)
    }

    pub fn speed(&self) -> Vec<f64> {
        self.velocity().into_iter().map(norm3).collect()
    }

    pub fn length(&self) -> f64 {
        integrate1(&self.speed(), self.closed)
    }

    pub(crate) fn with_v(&self, v: Vec<Vec3>) -> FramedCurve {
        FramedCurve {
            gamma: self.gamma.clone(),
            v,
            closed: self.closed,
            tol: self.tol,
        }
    }

    /// Translates `γ(0)` to the origin.
    pub fn translated_to_origin(&self) -> FramedCurve {
        let o = self.gamma[0];
        FramedCurve {
            gamma: self.gamma.iter().map(|p| sub3(*p, o)).collect(),
            v: self.v.clone(),
            closed: self.closed,
            tol: self.tol,
        }
    }

    /// Applies a rotation matrix to both `γ` and `V`.
    pub fn rotated(&self, m: &crate::linalg::Mat3) -> FramedCurve {
        use crate::linalg::mat3_vec;
        FramedCurve {
            gamma: self.gamma.iter().map(|p| mat3_vec(m, *p)).collect(),
            v: self.v.iter().map(|p| mat3_vec(m, *p)).collect(),
            closed: self.closed,
            tol: self.tol,
        }
    }

    /// Max pointwise distance of `γ` and `V` to another curve on the same grid.
    pub fn max_deviation(&self, other: &FramedCurve) -> f64 {
        let mut m = 0.0f64;
        for k in 0..self.len().min(other.len()) {
            m = m.max(norm3(sub3(self.gamma[k], other.gamma[k])));
            m = m.max(norm3(sub3(self.v[k], other.v[k])));
        }
        m
    }
}

/// Frame map `(γ, V) ↦ (T, V, W, r)`.
pub fn frame_map(c: &FramedCurve) -> Result<FramePath> {
    let vel = c.velocity();
    let n = c.len();
    let mut t = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for k in 0..n {
        let s = norm3(vel[k]);
        if !(s > c.tol.geom) {
            return Err(Error::NonImmersed { index: k, speed: s });
        }
        let tk = scale3(1.0 / s, vel[k]);
        let e = dot3(tk, c.v[k]).abs();
        if !(e <= c.tol.geom) {
            return Err(Error::BadFraming {
                what: "normality",
                index: k,
                residual: e,
            });
        }
        w.push(cross3(tk, c.v[k]));
        t.push(tk);
        r.push(s);
    }
    Ok(FramePath {
        t,
        v: c.v.clone(),
        w,
        r,
        closed: c.closed,
        tol: c.tol,
    })
}

impl FramePath {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Max deviation of `(T, V, W)` from a right-handed orthonormal triple.
    pub fn frame_residual(&self) -> f64 {
        let mut m = 0.0f64;
        for k in 0..self.len() {
            let (a, b, c) = (self.t[k], self.v[k], self.w[k]);
            for e in [
                dot3(a, a) - 1.0,
                dot3(b, b) - 1.0,
                dot3(c, c) - 1.0,
                dot3(a, b),
                dot3(a, c),
                dot3(b, c),
                dot3(a, cross3(b, c)) - 1.0,
            ] {
                m = m.max(e.abs());
            }
        }
        m
    }

    pub fn validate(&self) -> Result<()> {
        for (k, r) in self.r.iter().enumerate() {
            if !(*r > self.tol.geom) {
                return Err(Error::NonImmersed { index: k, speed: *r });
            }
        }
        let e = self.frame_residual();
        if !(e <= self.tol.geom) {
            return Err(Error::BadFrame { index: 0, residual: e });
        }
        Ok(())
    }
}

/// Inverse frame map: `γ(t) = ∫₀ᵗ r·T`, `γ(0) = 0`.
///
/// A closed path whose closure integral does not vanish yields an open curve
/// with the framing repeated at `t = 2`.
pub fn inverse_frame_map(p: &FramePath) -> Result<FramedCurve> {
    p.validate()?;
    Ok(integrate_frames(&p.t, &p.v, &p.r, p.closed, p.tol))
}

pub(crate) fn integrate_frames(
    t: &[Vec3],
    v: &[Vec3],
    r: &[f64],
    closed: bool,
    tol: Tolerances,
) -> FramedCurve {
    let vel: Vec<Vec3> = t.iter().zip(r).map(|(a, s)| scale3(*s, *a)).collect();
    let mut gamma = cumulative3(&vel, closed);
    if closed {
        let n = t.len();
        let len = spectral::integrate_periodic(r);
        let gap = norm3(gamma[n]);
        if gap <= tol.closure * len.max(1.0) {
            gamma.truncate(n);
            return FramedCurve {
                gamma,
                v: v.to_vec(),
                closed: true,
                tol,
            };
        }
        let mut vv = v.to_vec();
        vv.push(v[0]);
        return FramedCurve {
            gamma,
            v: vv,
            closed: false,
            tol,
        };
    }
    FramedCurve {
        gamma,
        v: v.to_vec(),
        closed: false,
        tol,
    }
}

/// Twist rate `tw = ⟨dV/ds, W⟩`.
pub fn twist_rate(c: &FramedCurve) -> Result<Vec<f64>> {
    let p = frame_map(c)?;
    let dv = derivative3(&c.v, c.closed);
    Ok((0..c.len())
        .map(|k| dot3(dv[k], p.w[k]) / p.r[k])
        .collect())
}

/// Total twist `Tw = (1/2π)∫ tw ds`.
pub fn total_twist(c: &FramedCurve) -> Result<f64> {
    let p = frame_map(c)?;
    let dv = derivative3(&c.v, c.closed);
    let integrand: Vec<f64> = (0..c.len()).map(|k| dot3(dv[k], p.w[k])).collect();
    Ok(integrate1(&integrand, c.closed) / (2.0 * PI))
}

/// Frame twist by `e^{iα}`: `V ↦ cos 2α·V − sin 2α·W`.
///
/// `alpha` is sampled on the curve's storage grid.
pub fn apply_frame_twist(c: &FramedCurve, alpha: &[f64]) -> Result<FramedCurve> {
    if alpha.len() != c.len() {
        return Err(Error::GridMismatch {
            left: c.len(),
            right: alpha.len(),
        });
    }
    let p = frame_map(c)?;
    let v = (0..c.len())
        .map(|k| {
            let (s, co) = (2.0 * alpha[k]).sin_cos();
            sub3(scale3(co, p.v[k]), scale3(s, p.w[k]))
        })
        .collect();
    Ok(c.with_v(v))
}

/// Linking parity of a closed framing, read off from its lift.
pub fn parity(c: &FramedCurve) -> Result<Parity> {
    if !c.closed {
        return Err(Error::OpenCurve);
    }
    Ok(match hopf::lift(c)?.periodicity() {
        Periodicity::Periodic => Parity::Odd,
        _ => Parity::Even,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Unit frame twist `α = πt/2` on the storage grid.
fn unit_twist(c: &FramedCurve) -> Vec<f64> {
    c.params().iter().map(|t| 0.5 * PI * t).collect()
}

/// Even-parity representative of the framing of a closed curve.
fn even_framing(c: &FramedCurve) -> Result<FramedCurve> {
    match parity(c)? {
        Parity::Even => Ok(c.clone()),
        Parity::Odd => apply_frame_twist(c, &unit_twist(c)),
    }
}

/// `Tw₂ ∈ [0, 2)`: total twist mod 2 of an even-linking framing.
pub fn tw2(c: &FramedCurve) -> Result<f64> {
    let e = even_framing(c)?;
    let tw = total_twist(&e)?;
    let m = tw - 2.0 * (0.5 * tw).floor();
    Ok(if m >= 2.0 { 0.0 } else { m })
}

/// Constant twist minimizing framing.
pub fn ctmf(c: &FramedCurve) -> Result<FramedCurve> {
    if !c.closed {
        return Err(Error::OpenCurve);
    }
    let t2 = tw2(c)?;
    let tw = twist_rate(c)?;
    let r = c.speed();
    let len = integrate1(&r, true);
    let twr: Vec<f64> = tw.iter().zip(&r).map(|(a, b)| a * b).collect();
    let a = cumulative1(&twr, true);
    let b = cumulative1(&r, true);
    let rate = PI * t2 / len;
    let alpha: Vec<f64> = (0..c.len()).map(|k| 0.5 * a[k] - rate * b[k]).collect();
    apply_frame_twist(c, &alpha)
}

/// Zero-twist framing by parallel transport of `v0` along the base curve.
///
/// For closed curves the result is closed only when the holonomy vanishes
/// within `tol.geom`; otherwise an open framing over `[0, 2]` is returned.
pub fn bishop_framing(
    gamma: &[Vec3],
    closed: bool,
    v0: Vec3,
    tol: Tolerances,
) -> Result<BishopFraming> {
    let n = gamma.len();
    let vel = derivative3(gamma, closed);
    let mut t = Vec::with_capacity(n);
    for (k, g) in vel.iter().enumerate() {
        let s = norm3(*g);
        if !(s > tol.geom) {
            return Err(Error::NonImmersed { index: k, speed: s });
        }
        t.push(scale3(1.0 / s, *g));
    }
    let e = dot3(v0, t[0]).abs();
    if !(e <= tol.geom) || (norm3(v0) - 1.0).abs() > tol.geom {
        return Err(Error::BadFraming {
            what: "initial normal",
            index: 0,
            residual: e,
        });
    }
    let dt = derivative3(&t, closed);
    let (tm, dtm) = if closed {
        let h = 2.0 / n as f64;
        let sh = |x: &[Vec3]| from_columns(columns(x).map(|c| spectral::shift_real(&c, 0.5 * h)));
        (sh(&t), sh(&dt))
    } else {
        let mid = |x: &[Vec3]| from_columns(columns(x).map(|c| spectral::midpoints_open(&c)));
        (mid(&t), mid(&dt))
    };
    let steps = if closed { n } else { n - 1 };
    let h = 2.0 / steps as f64;
    let rhs = |v: Vec3, tt: Vec3, d: Vec3| scale3(-dot3(v, d), tt);
    let mut v = Vec::with_capacity(steps + 1);
    v.push(v0);
    for k in 0..steps {
        let k1n = (k + 1) % n;
        let cur = v[k];
        let k1 = rhs(cur, t[k], dt[k]);
        let k2 = rhs(add3(cur, scale3(0.5 * h, k1)), tm[k], dtm[k]);
        let k3 = rhs(add3(cur, scale3(0.5 * h, k2)), tm[k], dtm[k]);
        let k4 = rhs(add3(cur, scale3(h, k3)), t[k1n], dt[k1n]);
        let step = add3(add3(k1, scale3(2.0, k2)), add3(scale3(2.0, k3), k4));
        let next = add3(cur, scale3(h / 6.0, step));
        v.push(project_normal(next, t[k1n]));
    }
    let w0 = cross3(t[0], v0);
    let end = v[steps];
    let holonomy = if closed {
        dot3(end, w0).atan2(dot3(end, v0))
    } else {
        0.0
    };
    let curve = if !closed {
        FramedCurve::from_parts(gamma.to_vec(), v, false, tol)?
    } else if holonomy.abs() <= tol.geom {
        v.truncate(n);
        FramedCurve::from_parts(gamma.to_vec(), v, true, tol)?
    } else {
        let mut g = gamma.to_vec();
        g.push(gamma[0]);
        let vel = derivative3(&g, false);
        let v = v.iter().zip(&vel).map(|(a, d)| project_normal(*a, normalize3(*d))).collect();
        FramedCurve::from_parts(g, v, false, tol)?
    };
    Ok(BishopFraming { curve, holonomy })
}

/// Writhe of a closed base curve by the discretized Gauss double integral.
pub fn writhe(c: &FramedCurve) -> Result<f64> {
    if !c.closed {
        return Err(Error::OpenCurve);
    }
    Ok(writhe_points(&c.gamma))
}

/// Gauss double sum over sample pairs at cyclic index distance above 2.
pub fn writhe_points(gamma: &[Vec3]) -> f64 {
    let n = gamma.len();
    let d = derivative3(gamma, true);
    let h = 2.0 / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i).min(n - (j - i));
            if gap <= 2 {
                continue;
            }
            let r = sub3(gamma[i], gamma[j]);
            let dist = norm3(r);
            sum += dot3(cross3(d[i], d[j]), r) / (dist * dist * dist);
        }
    }
    2.0 * sum * h * h / (4.0 * PI)
}

/// Linking number `round(Tw + Wr)`.
pub fn linking_number(c: &FramedCurve) -> Result<i64> {
    let value = total_twist(c)? + writhe(c)?;
    let lk = value.round();
    let residual = (value - lk).abs();
    if residual > 0.1 {
        return Err(Error::NonConvergent { value, residual });
    }
    Ok(lk as i64)
}

/// Curvatures `κ₁ = ⟨T_s, V⟩`, `κ₂ = ⟨T_s, W⟩`.
pub fn curvatures(c: &FramedCurve) -> Result<Curvatures> {
    let p = frame_map(c)?;
    let dt = derivative3(&p.t, c.closed);
    let mut kappa1 = Vec::with_capacity(c.len());
    let mut kappa2 = Vec::with_capacity(c.len());
    for k in 0..c.len() {
        kappa1.push(dot3(dt[k], p.v[k]) / p.r[k]);
        kappa2.push(dot3(dt[k], p.w[k]) / p.r[k]);
    }
    Ok(Curvatures { kappa1, kappa2 })
}

/// Translates `γ(0)` to the origin and scales `γ` to length 2.
pub fn normalize(c: &FramedCurve) -> Result<FramedCurve> {
    let len = c.length();
    if !(len > 0.0) {
        return Err(Error::NonImmersed { index: 0, speed: 0.0 });
    }
    let s = 2.0 / len;
    let o = c.gamma[0];
    Ok(FramedCurve {
        gamma: c.gamma.iter().map(|p| scale3(s, sub3(*p, o))).collect(),
        v: c.v.clone(),
        closed: c.closed,
        tol: c.tol,
    })
}

/// Resamples to `m` grid intervals and re-orthonormalizes the framing.
pub fn resample(c: &FramedCurve, m: usize) -> Result<FramedCurve> {
    let (gamma, v) = if c.closed {
        let rs = |x: &[Vec3]| from_columns(columns(x).map(|col| spectral::resample_real(&col, m)));
        (rs(&c.gamma), rs(&c.v))
    } else {
        let xs = c.params();
        let ts: Vec<f64> = (0..=m).map(|k| grid_param(k, m)).collect();
        let sp = |x: &[Vec3]| {
            from_columns(columns(x).map(|col| {
                let s = CubicSpline::new(&xs, &col);
                ts.iter().map(|&t| s.eval(t)).collect()
            }))
        };
        (sp(&c.gamma), sp(&c.v))
    };
    let vel = derivative3(&gamma, c.closed);
    let v = v
        .iter()
        .zip(&vel)
        .map(|(a, g)| project_normal(*a, normalize3(*g)))
        .collect();
    let out = FramedCurve::from_parts(gamma, v, c.closed, c.tol)?;
    frame_map(&out)?;
    Ok(out)
}
