//! Registration of framed loops over U(2), reparameterizations and frame
//! twists.
//!
//! The aligned representative of `P₁` against `P₀` is
//!
//! ```text
//! Y(t) = e^{iα(t)} · √x'(t) · (P₁·U)(x(t)),    x(t) = ρ(t) + s,
//! ```
//!
//! where `ρ` is an orientation-preserving reparameterization of `[0, 2]`,
//! `s` a cyclic shift of the basepoint, `U ∈ U(2)` and `α` a frame-twist
//! loop with `α(2) − α(0) ∈ 2πℤ`. Grassmann distance does not depend on `U`;
//! the unitary only enters the linear functional used by the lattice search.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grassmann::{self, principal_bases, project_stiefel, StiefelPoint};
use crate::hopf::{ComplexCurve, Periodicity, TwistLoop};
use crate::linalg::{svd2, Mat2c};
use crate::spectral;
use crate::{grid_param, C64};

/// Orientation-preserving map `t ↦ ρ(t) + shift` sampled on the `N + 1`
/// grid points of `[0, 2]`, with `ρ(0) = 0` and `ρ(2) = 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reparam {
    values: Vec<f64>,
    derivative: Vec<f64>,
    shift: f64,
}

impl Reparam {
    pub fn identity(n: usize) -> Self {
        Reparam {
            values: (0..=n).map(|k| grid_param(k, n)).collect(),
            derivative: vec![1.0; n + 1],
            shift: 0.0,
        }
    }

    /// Validated samples of `ρ` and `ρ'`.
    pub fn new(values: Vec<f64>, derivative: Vec<f64>, shift: f64) -> Result<Self> {
        let r = Reparam {
            values,
            derivative,
            shift,
        };
        r.validate()?;
        Ok(r)
    }

    /// Samples `ρ` and `ρ'` from closures on a grid with `n` intervals.
    pub fn from_fn(n: usize, shift: f64, rho: impl Fn(f64) -> f64, drho: impl Fn(f64) -> f64) -> Result<Self> {
        let ts: Vec<f64> = (0..=n).map(|k| grid_param(k, n)).collect();
        Reparam::new(
            ts.iter().map(|&t| rho(t)).collect(),
            ts.iter().map(|&t| drho(t)).collect(),
            shift,
        )
    }

    /// Piecewise-linear map through the lattice nodes `(t_i, τ_j)` of a
    /// `size × size` lattice, resampled on `n` intervals.
    pub fn from_lattice_path(path: &[(usize, usize)], size: usize, n: usize, shift: f64) -> Result<Self> {
        let h = 2.0 / size as f64;
        let slope = |a: (usize, usize), b: (usize, usize)| (b.1 - a.1) as f64 / (b.0 - a.0) as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut derivative = Vec::with_capacity(n + 1);
        let mut seg = 0;
        for k in 0..=n {
            let u = grid_param(k, n) / h;
            while seg + 2 < path.len() && (path[seg + 1].0 as f64) <= u {
                seg += 1;
            }
            let (a, b) = (path[seg], path[seg + 1]);
            let m = slope(a, b);
            values.push((a.1 as f64 + m * (u - a.0 as f64)) * h);
            let d = if seg > 0 && (u - a.0 as f64).abs() < 1e-9 {
                0.5 * (m + slope(path[seg - 1], a))
            } else {
                m
            };
            derivative.push(d);
        }
        values[0] = 0.0;
        values[n] = 2.0;
        Reparam::new(values, derivative, shift)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.values.len();
        if n < 2 || self.derivative.len() != n {
            return Err(Error::GridMismatch {
                left: n,
                right: self.derivative.len(),
            });
        }
        if (self.values[0]).abs() > 1e-9 || (self.values[n - 1] - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("reparameterization must fix 0 and 2".into()));
        }
        for k in 0..n {
            if !(self.derivative[k] > 0.0) || (k > 0 && !(self.values[k] > self.values[k - 1])) {
                return Err(Error::NonMonotone { index: k });
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Sup distance between the maps `t ↦ ρ(t) + shift`, with shifts
    /// compared modulo 2.
    pub fn sup_distance(&self, other: &Reparam) -> f64 {
        let mut ds = (self.shift - other.shift).rem_euclid(2.0);
        if ds > 1.0 {
            ds -= 2.0;
        }
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b + ds).abs())
            .fold(0.0, f64::max)
    }
}

fn anti(p: Periodicity) -> Result<bool> {
    match p {
        Periodicity::Periodic => Ok(false),
        Periodicity::Antiperiodic => Ok(true),
        Periodicity::Open => Err(Error::OpenInput),
    }
}

/// `Φ ↦ √ρ'·Φ∘(ρ + s)` without re-projection.
pub fn act_reparam_raw(c: &ComplexCurve, rho: &Reparam) -> Result<ComplexCurve> {
    rho.validate()?;
    let a = anti(c.periodicity())?;
    if rho.n_intervals() != c.len() {
        return Err(Error::GridMismatch {
            left: c.len(),
            right: rho.n_intervals(),
        });
    }
    let n = c.len();
    let ts: Vec<f64> = rho.values[..n].iter().map(|x| x + rho.shift).collect();
    let w: Vec<f64> = rho.derivative[..n].iter().map(|d| d.sqrt()).collect();
    let ev = |f: &[C64]| -> Vec<C64> {
        spectral::evaluate(f, a, &ts)
            .into_iter()
            .zip(&w)
            .map(|(z, s)| z * *s)
            .collect()
    };
    Ok(c.with_values(ev(c.phi()), ev(c.psi())))
}

/// Reparameterization action on a Stiefel point, re-projected onto the
/// Stiefel manifold.
pub fn act_reparam(p: &StiefelPoint, rho: &Reparam) -> Result<StiefelPoint> {
    project_stiefel(&act_reparam_raw(p.curve(), rho)?)
}

/// Unitary `U` making the cross-Gram of `P₀` and `P₁·U` Hermitian positive
/// semidefinite.
pub fn procrustes_u2(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<Mat2c> {
    let b = principal_bases(p0, p1)?;
    Ok(b.v.mul(&b.u.adjoint()))
}

/// Sum of singular values of the cross-Gram, the optimum of
/// `Re tr(P₀*P₁U)` over `U ∈ U(2)`.
pub fn nuclear_objective(p0: &ComplexCurve, p1: &ComplexCurve) -> f64 {
    let s = svd2(&p0.adjoint_mul(p1)).sigma;
    s[0] + s[1]
}

/// Best of `n_seeds` uniform cyclic shifts of `P₁` by the nuclear objective.
pub fn seed_search(p0: &StiefelPoint, p1: &StiefelPoint, n_seeds: usize) -> Result<f64> {
    seed_search_twisted(p0.curve(), p1.curve(), None, n_seeds)
}

fn seed_search_twisted(p0: &ComplexCurve, p1: &ComplexCurve, phase: Option<&[C64]>, n_seeds: usize) -> Result<f64> {
    p0.check_compatible(p1)?;
    let a = anti(p1.periodicity())?;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n_seeds.max(1) {
        let s = grid_param(k, n_seeds.max(1));
        let mut y = p1.with_values(spectral::shift(p1.phi(), a, s), spectral::shift(p1.psi(), a, s));
        if let Some(ph) = phase {
            y = y.mul_pointwise(ph);
        }
        let v = nuclear_objective(p0, &y);
        if v > best.0 + 1e-13 {
            best = (v, s);
        }
    }
    Ok(best.1)
}

/// Default lattice moves `(di, dj)`.
pub const DEFAULT_SLOPES: [(usize, usize); 7] = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)];

/// Monotone lattice paths from `(0, 0)` to `(n, n)` with steps from `slopes`
/// inside the band `|i − j| ≤ band`; maximizes the sum of edge weights.
pub fn lattice_dp(
    n: usize,
    slopes: &[(usize, usize)],
    band: usize,
    weight: impl Fn(usize, usize, usize, usize) -> f64,
) -> Result<(Vec<(usize, usize)>, f64)> {
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    let mut score = vec![f64::NEG_INFINITY; (n + 1) * (n + 1)];
    let mut from = vec![usize::MAX; (n + 1) * (n + 1)];
    score[0] = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            if i.abs_diff(j) > band || (i, j) == (0, 0) {
                continue;
            }
            for &(di, dj) in slopes {
                if di > i || dj > j {
                    continue;
                }
                let (pi, pj) = (i - di, j - dj);
                let prev = score[idx(pi, pj)];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let v = prev + weight(pi, pj, di, dj);
                if v > score[idx(i, j)] {
                    score[idx(i, j)] = v;
                    from[idx(i, j)] = idx(pi, pj);
                }
            }
        }
    }
    if score[idx(n, n)] == f64::NEG_INFINITY {
        return Err(Error::BandTooNarrow);
    }
    let mut path = vec![(n, n)];
    let mut cur = idx(n, n);
    while cur != 0 {
        cur = from[cur];
        path.push((cur / (n + 1), cur % (n + 1)));
    }
    path.reverse();
    Ok((path, score[idx(n, n)]))
}

/// Edge weights of the linearized objective `Re⟨Φ₀, e^{iα}·√m·(Φ₁·U)(τ)⟩`
/// on a lattice, by the trapezoid rule along each edge.
pub struct LatticeWeights {
    size: usize,
    left: Vec<[C64; 2]>,
    right: Vec<[C64; 2]>,
}

const SUB: usize = 6;

impl LatticeWeights {
    /// `phase` holds `e^{iα}` on the grid of `p0`; `p1` is already rotated.
    pub fn new(p0: &ComplexCurve, p1: &ComplexCurve, phase: Option<&[C64]>, size: usize, shift: f64) -> Result<Self> {
        p0.check_compatible(p1)?;
        let a = anti(p0.periodicity())?;
        let tl: Vec<f64> = (0..=size).map(|i| grid_param(i, size)).collect();
        let tr: Vec<f64> = (0..=SUB * size).map(|i| grid_param(i, SUB * size) + shift).collect();
        let l0 = spectral::evaluate(p0.phi(), a, &tl);
        let l1 = spectral::evaluate(p0.psi(), a, &tl);
        let ph = match phase {
            Some(p) => spectral::evaluate(p, false, &tl),
            None => vec![C64::new(1.0, 0.0); size + 1],
        };
        // Fold the twist into the left factor: Re⟨Φ₀, e^{iα}Y⟩ = Re⟨e^{−iα}Φ₀, Y⟩.
        let left = (0..=size)
            .map(|i| {
                let u = ph[i] / ph[i].norm();
                [l0[i] * u.conj(), l1[i] * u.conj()]
            })
            .collect();
        let r0 = spectral::evaluate(p1.phi(), a, &tr);
        let r1 = spectral::evaluate(p1.psi(), a, &tr);
        let right = r0.into_iter().zip(r1).map(|(x, y)| [x, y]).collect();
        Ok(LatticeWeights { size, left, right })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Weight of the edge `(i, j) → (i + di, j + dj)`.
    pub fn edge(&self, i: usize, j: usize, di: usize, dj: usize) -> f64 {
        let h = 2.0 / self.size as f64;
        let m = dj as f64 / di as f64;
        let sm = m.sqrt();
        let mut acc = 0.0;
        for l in 0..=di {
            let r = &self.right[SUB * j + SUB * dj * l / di];
            let x = &self.left[i + l];
            let v = (x[0] * r[0].conj() + x[1] * r[1].conj()).re * sm;
            let w = if l == 0 || l == di { 0.5 } else { 1.0 };
            acc += w * v;
        }
        acc * h
    }
}

/// Lattice DP for the reparameterization of `P₁·U` (with `U` fixed by the
/// caller) maximizing `Re⟨Φ₀, √ρ'·(Φ₁U)∘ρ⟩`.
pub fn reparam_dp(p0: &StiefelPoint, p1: &StiefelPoint, grid_size: usize, strip_width: f64) -> Result<Reparam> {
    reparam_dp_with(p0.curve(), p1.curve(), None, 0.0, grid_size, strip_width, &DEFAULT_SLOPES)
}

fn reparam_dp_with(
    p0: &ComplexCurve,
    p1: &ComplexCurve,
    phase: Option<&[C64]>,
    shift: f64,
    grid_size: usize,
    strip_width: f64,
    slopes: &[(usize, usize)],
) -> Result<Reparam> {
    if grid_size < 1 {
        return Err(Error::InvalidInput("grid size must be positive".into()));
    }
    let w = LatticeWeights::new(p0, p1, phase, grid_size, shift)?;
    let band = (strip_width * grid_size as f64).floor() as usize;
    let (path, _) = lattice_dp(grid_size, slopes, band, |i, j, di, dj| w.edge(i, j, di, dj))?;
    Reparam::from_lattice_path(&path, grid_size, p0.len(), shift)
}

/// Settings for [`full_align`].
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentConfig {
    pub grid_size: usize,
    pub strip_width: f64,
    pub n_seeds: usize,
    pub slopes: Vec<(usize, usize)>,
    pub max_sweeps: usize,
    pub sweep_tol: f64,
    /// Fourier modes of the smooth reparameterization refinement.
    pub reparam_modes: usize,
    pub refine_iterations: usize,
    pub frame_iterations: usize,
    pub frame_tol: f64,
    /// Also try the two neighbouring winding classes of the twist loop.
    pub search_winding: bool,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            grid_size: 128,
            strip_width: 0.5,
            n_seeds: 32,
            slopes: DEFAULT_SLOPES.to_vec(),
            max_sweeps: 20,
            sweep_tol: 1e-8,
            reparam_modes: 16,
            refine_iterations: 200,
            frame_iterations: 500,
            frame_tol: 1e-10,
            search_winding: false,
        }
    }
}

/// Distances after each stage of one sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepReport {
    pub seed: f64,
    pub reparam: f64,
    pub frame: f64,
    pub joint: f64,
}

#[derive(Clone, Debug)]
pub struct AlignmentResult {
    pub u2: Mat2c,
    pub reparam: Reparam,
    pub twist_loop: TwistLoop,
    pub distance: f64,
    pub initial_distance: f64,
    pub iterations: usize,
    pub sweeps: Vec<SweepReport>,
}

impl AlignmentResult {
    /// Aligned representative `e^{iα}·√ρ'·(P₁U)∘(ρ + s)`.
    pub fn apply(&self, p1: &StiefelPoint) -> Result<StiefelPoint> {
        aligned(p1, &self.u2, &self.reparam, &self.twist_loop)
    }
}

pub fn aligned(p1: &StiefelPoint, u: &Mat2c, rho: &Reparam, alpha: &TwistLoop) -> Result<StiefelPoint> {
    let y = act_reparam_raw(&p1.curve().right_mul(u), rho)?;
    project_stiefel(&y.mul_pointwise(&alpha.phases()))
}

/// Smooth alignment state: `x(t) = t + s + q(t)` with `q` a real
/// trigonometric polynomial, and the twist loop `α` on the grid.
#[derive(Clone, Debug)]
struct Smooth {
    s: f64,
    /// `[a₁, b₁, a₂, b₂, …]` for `q = Σ a_m cos πmt + b_m sin πmt`.
    q: Vec<f64>,
    alpha: Vec<f64>,
    winding: i64,
}

impl Smooth {
    fn identity(n: usize, modes: usize) -> Self {
        Smooth {
            s: 0.0,
            q: vec![0.0; 2 * modes],
            alpha: vec![0.0; n],
            winding: 0,
        }
    }

    fn map(&self, ts: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut x = Vec::with_capacity(ts.len());
        let mut dx = Vec::with_capacity(ts.len());
        for &t in ts {
            let (mut v, mut d) = (t + self.s, 1.0);
            for m in 0..self.q.len() / 2 {
                let w = PI * (m + 1) as f64;
                let (sn, cs) = (w * t).sin_cos();
                v += self.q[2 * m] * cs + self.q[2 * m + 1] * sn;
                d += w * (self.q[2 * m + 1] * cs - self.q[2 * m] * sn);
            }
            x.push(v);
            dx.push(d);
        }
        (x, dx)
    }

    fn reparam(&self, n: usize) -> Result<Reparam> {
        let ts: Vec<f64> = (0..=n).map(|k| grid_param(k, n)).collect();
        let (x, dx) = self.map(&ts);
        let x0 = x[0];
        let values: Vec<f64> = x.iter().map(|v| v - x0).collect();
        Reparam::new(values, dx, x0.rem_euclid(2.0))
    }

    fn twist(&self) -> TwistLoop {
        TwistLoop::new(self.alpha.clone(), self.winding)
    }
}

/// Evaluation of `Y` and the distance for a smooth state.
struct Problem<'a> {
    p0: &'a ComplexCurve,
    p1: &'a ComplexCurve,
    c1: [Vec<C64>; 2],
    d1: [Vec<C64>; 2],
    anti: bool,
    ts: Vec<f64>,
}

struct Eval {
    dist: f64,
    /// Aligned curve before orthonormalization.
    y: ComplexCurve,
    /// Unit-twisted `P₁(x)` and `P₁'(x)` on the grid.
    base: ComplexCurve,
    dbase: ComplexCurve,
    dx: Vec<f64>,
    /// `B = V·diag(θ/sin θ)·U*` for the gradient of `d²/2`.
    b: Mat2c,
}

impl<'a> Problem<'a> {
    fn new(p0: &'a ComplexCurve, p1: &'a ComplexCurve) -> Result<Self> {
        p0.check_compatible(p1)?;
        let a = anti(p1.periodicity())?;
        let coef = |f: &[C64]| spectral::coefficients(f, a);
        let dcoef = |f: &[C64]| spectral::coefficients(&spectral::derivative(f, a), a);
        let c1 = [coef(p1.phi()), coef(p1.psi())];
        let d1 = [dcoef(p1.phi()), dcoef(p1.psi())];
        let n = p1.len();
        let ts = (0..n).map(|k| grid_param(k, n)).collect();
        Ok(Problem {
            p0,
            p1,
            c1,
            d1,
            anti: a,
            ts,
        })
    }

    fn eval(&self, st: &Smooth) -> Option<Eval> {
        let (x, dx) = st.map(&self.ts);
        if dx.iter().any(|d| !(*d > 1e-3)) {
            return None;
        }
        let ph: Vec<C64> = st.alpha.iter().map(|a| C64::from_polar(1.0, *a)).collect();
        let ev = |c: &[C64]| -> Vec<C64> {
            spectral::evaluate_coefficients(c, self.anti, &x)
                .into_iter()
                .zip(&ph)
                .map(|(z, p)| z * p)
                .collect()
        };
        let base = self.p1.with_values(ev(&self.c1[0]), ev(&self.c1[1]));
        let dbase = self.p1.with_values(ev(&self.d1[0]), ev(&self.d1[1]));
        let w: Vec<C64> = dx.iter().map(|d| C64::new(d.sqrt(), 0.0)).collect();
        let y = base.mul_pointwise(&w);
        let (dist, b) = self.distance_and_weight(&y)?;
        Some(Eval {
            dist,
            y,
            base,
            dbase,
            dx,
            b,
        })
    }

    fn distance_and_weight(&self, y: &ComplexCurve) -> Option<(f64, Mat2c)> {
        let p0 = StiefelPoint::new_unchecked(self.p0.clone());
        let q = project_stiefel(y).ok()?;
        let pb = principal_bases(&p0, &q).ok()?;
        let c: [f64; 2] = core::array::from_fn(|j| {
            let th = pb.theta[j];
            if th.sin() > 1e-12 {
                th / th.sin()
            } else {
                1.0
            }
        });
        // Gradient weight in the coordinates of the unprojected `y`.
        let (r, _) = crate::linalg::inv_sqrt_hermitian2(&y.gram());
        let b = r
            .mul(&pb.v)
            .mul(&Mat2c::diag(C64::new(c[0], 0.0), C64::new(c[1], 0.0)))
            .mul(&pb.u.adjoint());
        Some((pb.theta[0].hypot(pb.theta[1]), b))
    }

    /// `⟨Z(t)·B, P₀(t)⟩_{ℂ²}` pointwise.
    fn pair(&self, z: &ComplexCurve, b: &Mat2c) -> Vec<C64> {
        let zb = z.right_mul(b);
        (0..z.len())
            .map(|k| zb.phi()[k] * self.p0.phi()[k].conj() + zb.psi()[k] * self.p0.psi()[k].conj())
            .collect()
    }

    /// Gradient of `d²/2` in `(s, q)`.
    fn grad_reparam(&self, st: &Smooth, e: &Eval) -> (f64, Vec<f64>) {
        let pb = self.pair(&e.base, &e.b);
        let pd = self.pair(&e.dbase, &e.b);
        let h = 2.0 / self.ts.len() as f64;
        let g1: Vec<f64> = (0..pb.len()).map(|k| pb[k].re / (2.0 * e.dx[k].sqrt())).collect();
        let g2: Vec<f64> = (0..pd.len()).map(|k| pd[k].re * e.dx[k].sqrt()).collect();
        let gs = -h * g2.iter().sum::<f64>();
        let mut gq = vec![0.0; st.q.len()];
        for m in 0..st.q.len() / 2 {
            let w = PI * (m + 1) as f64;
            let (mut ga, mut gb) = (0.0, 0.0);
            for (k, &t) in self.ts.iter().enumerate() {
                let (sn, cs) = (w * t).sin_cos();
                ga += -w * sn * g1[k] + cs * g2[k];
                gb += w * cs * g1[k] + sn * g2[k];
            }
            gq[2 * m] = -h * ga;
            gq[2 * m + 1] = -h * gb;
        }
        (gs, gq)
    }

    /// L² gradient of `d²/2` in `α`.
    fn grad_alpha(&self, e: &Eval) -> Vec<f64> {
        self.pair(&e.y, &e.b).into_iter().map(|z| z.im).collect()
    }
}

/// Which parameters a refinement moves.
#[derive(Clone, Copy, PartialEq)]
enum Block {
    Reparam,
    Twist,
    Joint,
}

impl Block {
    fn reparam(self) -> bool {
        self != Block::Twist
    }

    fn twist(self) -> bool {
        self != Block::Reparam
    }
}

/// Scaled coordinates in which the Hessian of `d²/2` is roughly isotropic:
/// `s`, `(1 + m)·q_m`, and `√h·α_k`.
fn pack(st: &Smooth, block: Block) -> Vec<f64> {
    let mut x = Vec::new();
    if block.reparam() {
        x.push(st.s);
        x.extend(st.q.iter().enumerate().map(|(m, v)| v * (1.0 + (m / 2 + 1) as f64)));
    }
    if block.twist() {
        let h = (2.0 / st.alpha.len() as f64).sqrt();
        x.extend(st.alpha.iter().map(|a| a * h));
    }
    x
}

fn unpack(x: &[f64], like: &Smooth, block: Block) -> Smooth {
    let mut st = like.clone();
    let mut i = 0;
    if block.reparam() {
        st.s = x[0];
        for m in 0..st.q.len() {
            st.q[m] = x[1 + m] / (1.0 + (m / 2 + 1) as f64);
        }
        i = 1 + st.q.len();
    }
    if block.twist() {
        let h = (2.0 / st.alpha.len() as f64).sqrt();
        for (a, v) in st.alpha.iter_mut().zip(&x[i..]) {
            *a = v / h;
        }
    }
    st
}

fn value_and_grad(pr: &Problem, st: &Smooth, block: Block) -> Option<(f64, Vec<f64>)> {
    let e = pr.eval(st)?;
    let mut g = Vec::new();
    if block.reparam() {
        let (gs, gq) = pr.grad_reparam(st, &e);
        g.push(gs);
        g.extend(gq.iter().enumerate().map(|(m, v)| v / (1.0 + (m / 2 + 1) as f64)));
    }
    if block.twist() {
        let h = 2.0 / st.alpha.len() as f64;
        g.extend(pr.grad_alpha(&e).iter().map(|v| v * h.sqrt()));
    }
    Some((0.5 * e.dist * e.dist, g))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Limited-memory BFGS on `d²/2` with a backtracking Armijo line search.
/// Every accepted step strictly decreases the distance.
fn refine(pr: &Problem, st: Smooth, block: Block, iters: usize, tol: f64) -> (Smooth, f64) {
    let Some((mut f, mut g)) = value_and_grad(pr, &st, block) else {
        return (st, f64::INFINITY);
    };
    let mut x = pack(&st, block);
    let mut hist: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for _ in 0..iters {
        let gn = dot(&g, &g).sqrt();
        if !(gn > 1e-300) || f == 0.0 {
            break;
        }
        // Two-loop recursion.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (sk, yk) in hist.iter().rev() {
            let a = dot(sk, &d) / dot(yk, sk);
            for (di, yi) in d.iter_mut().zip(yk) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match hist.last() {
            Some((sk, yk)) => dot(sk, yk) / dot(yk, yk),
            None => (2.0 * f).sqrt().min(1.0) / gn,
        };
        d.iter_mut().for_each(|v| *v *= gamma);
        for ((sk, yk), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = dot(yk, &d) / dot(yk, sk);
            for (di, si) in d.iter_mut().zip(sk) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = g.iter().map(|v| -v / gn).collect();
            slope = -gn;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            if let Some((fnew, gnew)) = value_and_grad(pr, &unpack(&xn, &st, block), block) {
                if fnew < f && fnew <= f + 1e-4 * step * slope {
                    accepted = Some((xn, fnew, gnew));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let sk: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        if dot(&sk, &yk) > 1e-16 * dot(&sk, &sk).sqrt() * dot(&yk, &yk).sqrt() {
            hist.push((sk, yk));
            if hist.len() > 8 {
                hist.remove(0);
            }
        }
        let rel = (f - fnew) / f;
        x = xn;
        f = fnew;
        g = gnew;
        if rel < tol {
            break;
        }
    }
    let st = unpack(&x, &st, block);
    (st, (2.0 * f).sqrt())
}

/// Unwrapped pointwise phase of `⟨Φ₀(t), Y(t)⟩_{ℂ²}`, or `None` where the
/// overlap vanishes.
fn phase_init(p0: &ComplexCurve, y: &ComplexCurve) -> Option<(Vec<f64>, i64)> {
    let n = p0.len();
    let z: Vec<C64> = (0..n)
        .map(|k| p0.phi()[k] * y.phi()[k].conj() + p0.psi()[k] * y.psi()[k].conj())
        .collect();
    let scale = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || z.iter().any(|v| v.norm() < 1e-8 * scale) {
        return None;
    }
    let mut ang: Vec<f64> = z.iter().map(|v| v.arg()).collect();
    ang.push(ang[0]);
    let mut un = spectral::unwrap_phase(&ang);
    let winding = ((un[n] - un[0]) / (2.0 * PI)).round() as i64;
    un.truncate(n);
    Some((un, 2 * winding))
}

/// Twist loop aligning the fibres of `P₀` and `P₁`: initialized from the
/// pointwise phase and refined by gradient descent on the distance.
pub fn frame_align(p0: &StiefelPoint, p1: &StiefelPoint) -> Result<TwistLoop> {
    let cfg = AlignmentConfig::default();
    let pr = Problem::new(p0.curve(), p1.curve())?;
    let mut st = Smooth::identity(p0.len(), 0);
    if let Some((a, w)) = phase_init(p0.curve(), p1.curve()) {
        st.alpha = a;
        st.winding = w;
    }
    let (st, _) = refine(&pr, st, Block::Twist, cfg.frame_iterations, cfg.frame_tol);
    Ok(st.twist())
}

/// Least-squares fit of `x(t) − t − s` by the trigonometric polynomial.
fn smooth_fit(rho: &Reparam, modes: usize) -> Smooth {
    let n = rho.n_intervals();
    let ts: Vec<f64> = (0..n).map(|k| grid_param(k, n)).collect();
    let resid: Vec<f64> = (0..n).map(|k| rho.values[k] - ts[k]).collect();
    let mean = resid.iter().sum::<f64>() / n as f64;
    let mut q = vec![0.0; 2 * modes];
    for m in 0..modes.min(n / 2 - 1) {
        let w = PI * (m + 1) as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for k in 0..n {
            let (sn, cs) = (w * ts[k]).sin_cos();
            a += resid[k] * cs;
            b += resid[k] * sn;
        }
        q[2 * m] = 2.0 * a / n as f64;
        q[2 * m + 1] = 2.0 * b / n as f64;
    }
    Smooth {
        s: rho.shift + mean,
        q,
        alpha: Vec::new(),
        winding: 0,
    }
}

/// Alternating alignment: seed search, Procrustes, lattice DP with smooth
/// refinement, and frame alignment, repeated until the distance stalls.
pub fn full_align(p0: &StiefelPoint, p1: &StiefelPoint, config: &AlignmentConfig) -> Result<AlignmentResult> {
    if p0.periodicity() != p1.periodicity() {
        return Err(Error::PeriodicityMismatch);
    }
    let n = p0.len();
    let pr = Problem::new(p0.curve(), p1.curve())?;
    let mut st = Smooth::identity(n, config.reparam_modes);
    let initial = pr
        .eval(&st)
        .map(|e| e.dist)
        .ok_or_else(|| Error::InvalidInput("degenerate input planes".into()))?;
    let mut dist = initial;
    let mut sweeps = Vec::new();
    let mut iterations = 0;
    while iterations < config.max_sweeps {
        iterations += 1;
        let start = dist;
        let phase: Vec<C64> = st.alpha.iter().map(|a| C64::from_polar(1.0, *a)).collect();

        // Seed: basepoint shift of P₁ against the twisted P₀.
        let s = seed_search_twisted(p0.curve(), p1.curve(), Some(&phase), config.n_seeds)?;
        let mut seeded = st.clone();
        seeded.s = s;
        seeded.q.iter_mut().for_each(|v| *v = 0.0);
        if let Some(e) = pr.eval(&seeded) {
            if e.dist < dist {
                st = seeded;
                dist = e.dist;
            }
        }
        let d_seed = dist;

        // Procrustes and DP with the current shift and twist.
        let shifted = p1.curve().with_values(
            spectral::shift(p1.curve().phi(), pr.anti, st.s),
            spectral::shift(p1.curve().psi(), pr.anti, st.s),
        );
        let twisted = shifted.mul_pointwise(&phase);
        let u = procrustes_u2(p0, &StiefelPoint::new_unchecked(twisted))?;
        let mut cands = vec![st.clone()];
        let rotated = p1.curve().right_mul(&u);
        if let Ok(r) = reparam_dp_with(
            p0.curve(),
            &rotated,
            Some(&phase),
            st.s,
            config.grid_size,
            config.strip_width,
            &config.slopes,
        ) {
            let mut c = smooth_fit(&r, config.reparam_modes);
            c.alpha = st.alpha.clone();
            c.winding = st.winding;
            cands.push(c);
        }
        for c in cands {
            let (c, d) = refine(&pr, c, Block::Reparam, config.refine_iterations, 1e-12);
            if d < dist {
                st = c;
                dist = d;
            }
        }
        let d_reparam = dist;

        // Frame twist: refine the current loop and a fresh phase start.
        let mut starts = vec![st.clone()];
        if let Some(e) = pr.eval(&Smooth {
            alpha: vec![0.0; n],
            winding: 0,
            ..st.clone()
        }) {
            if let Some((a, w)) = phase_init(p0.curve(), &e.y) {
                let classes: &[i64] = if config.search_winding { &[0, -2, 2] } else { &[0] };
                for dw in classes {
                    let mut c = st.clone();
                    c.alpha = a
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v + 0.5 * PI * *dw as f64 * grid_param(k, n))
                        .collect();
                    c.winding = w + dw;
                    starts.push(c);
                }
            }
        }
        for c in starts {
            let (c, d) = refine(&pr, c, Block::Twist, config.frame_iterations, config.frame_tol);
            if d < dist {
                st = c;
                dist = d;
            }
        }
        let d_frame = dist;

        // Joint polish of shift, reparameterization and twist.
        let (c, d) = refine(&pr, st.clone(), Block::Joint, config.refine_iterations, 1e-12);
        if d < dist {
            st = c;
            dist = d;
        }
        sweeps.push(SweepReport {
            seed: d_seed,
            reparam: d_reparam,
            frame: d_frame,
            joint: dist,
        });
        if start - dist < config.sweep_tol {
            break;
        }
    }

    let rho = st.reparam(n)?;
    let alpha = st.twist();
    let mut result = AlignmentResult {
        u2: Mat2c::identity(),
        reparam: rho,
        twist_loop: alpha,
        distance: dist,
        initial_distance: initial,
        iterations,
        sweeps,
    };
    let y = result.apply(p1)?;
    let u = procrustes_u2(p0, &y)?;
    result.u2 = u;
    result.distance = grassmann::distance(p0, &result.apply(p1)?)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::tests::{random_point, random_unitary};
    use crate::grassmann::{cross_gram, distance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn warp(n: usize, amp: f64) -> Reparam {
        Reparam::from_fn(
            n,
            0.0,
            |t| t + amp * (PI * t).sin() / PI,
            |t| 1.0 + amp * (PI * t).cos(),
        )
        .unwrap()
    }

    #[test]
    fn identity_reparam_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_point(&mut rng, 64, Periodicity::Periodic);
        let q = act_reparam(&p, &Reparam::identity(64)).unwrap();
        assert!(q.curve().max_diff(p.curve()) < 1e-12);
    }

    #[test]
    fn reparam_preserves_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in [Periodicity::Periodic, Periodicity::Antiperiodic] {
            let x = random_point(&mut rng, 128, p);
            let y = act_reparam_raw(x.curve(), &warp(128, 0.4)).unwrap();
            let g = y.gram();
            assert!(g.max_diff(&Mat2c::identity()) < 1e-8, "{g:?}");
        }
    }

    #[test]
    fn reparam_rejects_folds() {
        let bad = Reparam::from_fn(16, 0.0, |t| t + 0.5 * (PI * t).sin(), |t| 1.0 + 0.5 * PI * (PI * t).cos());
        assert!(matches!(bad, Err(Error::NonMonotone { .. })));
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p0 = random_point(&mut rng, 64, Periodicity::Periodic);
        let u0 = random_unitary(&mut rng);
        let p1 = p0.rotate(&u0);
        let u = procrustes_u2(&p0, &p1).unwrap();
        assert!(p1.rotate(&u).curve().max_diff(p0.curve()) < 1e-10);

        let q = random_point(&mut rng, 64, Periodicity::Periodic);
        let u = procrustes_u2(&p0, &q).unwrap();
        let a = cross_gram(&p0, &q.rotate(&u)).unwrap();
        assert!(a.hermitian_residual() < 1e-9);
        let (ev, _) = crate::linalg::hermitian_eig2(&a);
        assert!(ev[1] > -1e-9);
        let d0 = distance(&p0, &q).unwrap();
        let d1 = distance(&p0, &q.rotate(&u)).unwrap();
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn seed_search_finds_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p0 = random_point(&mut rng, 64, Periodicity::Periodic);
        let s0 = grid_param(5, 32);
        let c = p0.curve();
        let shifted = c.with_values(spectral::shift(c.phi(), false, -s0), spectral::shift(c.psi(), false, -s0));
        let p1 = StiefelPoint::new(shifted).unwrap();
        let s = seed_search(&p0, &p1, 32).unwrap();
        assert!((s - s0).abs() < 1e-12, "{s} {s0}");
        assert_eq!(seed_search(&p0, &p1, 1).unwrap(), 0.0);
    }

    fn brute_force(n: usize, slopes: &[(usize, usize)], band: usize, w: &dyn Fn(usize, usize, usize, usize) -> f64) -> f64 {
        fn go(
            i: usize,
            j: usize,
            n: usize,
            slopes: &[(usize, usize)],
            band: usize,
            w: &dyn Fn(usize, usize, usize, usize) -> f64,
        ) -> f64 {
            if (i, j) == (n, n) {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for &(di, dj) in slopes {
                let (a, b) = (i + di, j + dj);
                if a > n || b > n || a.abs_diff(b) > band {
                    continue;
                }
                best = best.max(w(i, j, di, dj) + go(a, b, n, slopes, band, w));
            }
            best
        }
        go(0, 0, n, slopes, band, w)
    }

    #[test]
    fn dp_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p0 = random_point(&mut rng, 64, Periodicity::Periodic);
        let p1 = random_point(&mut rng, 64, Periodicity::Periodic);
        for size in [4, 7, 10] {
            let w = LatticeWeights::new(p0.curve(), p1.curve(), None, size, 0.3).unwrap();
            let f = |i: usize, j: usize, di: usize, dj: usize| w.edge(i, j, di, dj);
            let (_, best) = lattice_dp(size, &DEFAULT_SLOPES, size, f).unwrap();
            let bf = brute_force(size, &DEFAULT_SLOPES, size, &f);
            assert!((best - bf).abs() < 1e-12, "{size}: {best} vs {bf}");
        }
    }

    #[test]
    fn dp_identity_and_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = random_point(&mut rng, 64, Periodicity::Periodic);
        let r = reparam_dp(&p, &p, 32, 0.5).unwrap();
        assert!(r.sup_distance(&Reparam::identity(64)) < 1e-12);
        assert!(matches!(
            lattice_dp(5, &[(2, 1)], 5, |_, _, _, _| 0.0),
            Err(Error::BandTooNarrow)
        ));
    }

    #[test]
    fn dp_recovers_warp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 256;
        let p = random_point(&mut rng, n, Periodicity::Periodic);
        let rho0 = warp(n, 0.5);
        let warped = act_reparam(&p, &rho0).unwrap();
        let size = 64;
        let r = reparam_dp(&warped, &p, size, 0.5).unwrap();
        let err = r.sup_distance(&rho0);
        assert!(err <= 2.0 / size as f64, "{err}");
        let w0 = LatticeWeights::new(warped.curve(), p.curve(), None, size, 0.0).unwrap();
        let ident: f64 = (0..size).map(|i| w0.edge(i, i, 1, 1)).sum();
        let (_, best) = lattice_dp(size, &DEFAULT_SLOPES, size / 2, |i, j, a, b| w0.edge(i, j, a, b)).unwrap();
        assert!(best >= ident);
    }

    #[test]
    fn frame_align_recovers_twist() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p0 = random_point(&mut rng, 128, Periodicity::Periodic);
        let alpha0 = TwistLoop::from_fn(p0.curve(), 2, |t| 0.7 * (PI * t).sin() + 0.2);
        let p1 = StiefelPoint::new_unchecked(p0.curve().mul_pointwise(&alpha0.phases()));
        let a = frame_align(&p0, &p1).unwrap();
        let y = project_stiefel(&p1.curve().mul_pointwise(&a.phases())).unwrap();
        assert!(distance(&p0, &y).unwrap() <= 1e-6);

        let a = frame_align(&p0, &p0).unwrap();
        let m = a.values.iter().sum::<f64>() / a.values.len() as f64;
        assert!(a.values.iter().all(|v| (v - m).abs() < 1e-8));
    }

    #[test]
    fn alpha_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p0 = random_point(&mut rng, 64, Periodicity::Antiperiodic);
        let p1 = random_point(&mut rng, 64, Periodicity::Antiperiodic);
        let pr = Problem::new(p0.curve(), p1.curve()).unwrap();
        let mut st = Smooth::identity(64, 3);
        st.q = vec![0.05, -0.03, 0.02, 0.01, 0.0, 0.01];
        st.s = 0.2;
        st.alpha = (0..64).map(|k| 0.3 * (PI * grid_param(k, 64)).cos()).collect();
        let e = pr.eval(&st).unwrap();
        let f = |s: &Smooth| {
            let d = pr.eval(s).unwrap().dist;
            0.5 * d * d
        };
        let h = 1e-6;
        let ga = pr.grad_alpha(&e);
        let bump: Vec<f64> = (0..64).map(|k| (PI * grid_param(k, 64)).sin()).collect();
        let (mut a, mut b) = (st.clone(), st.clone());
        for k in 0..64 {
            a.alpha[k] += h * bump[k];
            b.alpha[k] -= h * bump[k];
        }
        let fd = (f(&a) - f(&b)) / (2.0 * h);
        let an: f64 = ga.iter().zip(&bump).map(|(g, v)| g * v).sum::<f64>() * 2.0 / 64.0;
        assert!((fd - an).abs() < 1e-6 * (1.0 + fd.abs()), "{fd} {an}");

        let (gs, gq) = pr.grad_reparam(&st, &e);
        let (mut a, mut b) = (st.clone(), st.clone());
        a.s += h;
        b.s -= h;
        let fd = (f(&a) - f(&b)) / (2.0 * h);
        assert!((fd - gs).abs() < 1e-6 * (1.0 + fd.abs()), "{fd} {gs}");
        for m in 0..gq.len() {
            let (mut a, mut b) = (st.clone(), st.clone());
            a.q[m] += h;
            b.q[m] -= h;
            let fd = (f(&a) - f(&b)) / (2.0 * h);
            assert!((fd - gq[m]).abs() < 1e-6 * (1.0 + fd.abs()), "{m}: {fd} {}", gq[m]);
        }
    }

    #[test]
    fn full_align_of_identical_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_point(&mut rng, 64, Periodicity::Periodic);
        let r = full_align(&p, &p, &AlignmentConfig::default()).unwrap();
        assert!(r.distance <= 1e-9, "{}", r.distance);
        assert!(r.reparam.sup_distance(&Reparam::identity(64)) < 1e-9);
        assert!(r.u2.max_diff(&Mat2c::identity()) < 1e-6);
    }

    pub(crate) fn compound(p: &StiefelPoint, rng: &mut ChaCha8Rng) -> StiefelPoint {
        let n = p.len();
        let u0 = random_unitary(rng);
        let rho0 = Reparam::from_fn(
            n,
            0.35,
            |t| t + 0.3 * (PI * t).sin() / PI,
            |t| 1.0 + 0.3 * (PI * t).cos(),
        )
        .unwrap();
        let warped = act_reparam(&p.rotate(&u0), &rho0).unwrap();
        let alpha0 = TwistLoop::from_fn(warped.curve(), 0, |t| 0.4 * (PI * t).cos());
        StiefelPoint::new_unchecked(warped.curve().mul_pointwise(&alpha0.phases()))
    }

    #[test]
    fn full_align_recovers_compound_deformation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for per in [Periodicity::Periodic, Periodicity::Antiperiodic] {
            let p0 = random_point(&mut rng, 256, per);
            let p1 = compound(&p0, &mut rng);
            let r = full_align(&p0, &p1, &AlignmentConfig::default()).unwrap();
            assert!(r.distance <= 1e-3, "{per:?}: {} from {}", r.distance, r.initial_distance);
            assert!(r.distance <= r.initial_distance + 1e-12);
            let y = r.apply(&p1).unwrap();
            assert!((distance(&p0, &y).unwrap() - r.distance).abs() < 1e-9);
            for w in r.sweeps.windows(2) {
                assert!(w[1].seed <= w[0].joint + 1e-15);
            }
            for s in &r.sweeps {
                assert!(s.reparam <= s.seed && s.frame <= s.reparam && s.joint <= s.frame);
            }
        }
    }

    #[test]
    fn full_align_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p0 = random_point(&mut rng, 128, Periodicity::Periodic);
        let noise = random_point(&mut rng, 128, Periodicity::Periodic);
        let p1 = project_stiefel(&compound(&p0, &mut rng).curve().axpy(C64::new(0.15, 0.0), noise.curve())).unwrap();
        let cfg = AlignmentConfig::default();
        let a = full_align(&p0, &p1, &cfg).unwrap();
        let b = full_align(&p1, &p0, &cfg).unwrap();
        assert!(a.distance < a.initial_distance);
        assert!((a.distance - b.distance).abs() <= 2e-3, "{} {}", a.distance, b.distance);
    }
}
