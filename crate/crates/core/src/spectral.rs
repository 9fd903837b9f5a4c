//! Discretization toolkit on the uniform grid over `[0, 2]`.
//!
//! Periodic data holds `N` samples `f(2k/N)`, `k < N`; antiperiodic data uses
//! the same storage with the rule `f(t + 2) = −f(t)`; open data holds `N + 1`
//! samples including both endpoints.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Mul, Sub};

use num_traits::Zero;

use crate::C64;

fn bit_reverse_permute(x: &mut [C64]) {
    let n = x.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            x.swap(i, j);
        }
    }
}

fn fft_pow2(x: &mut [C64], sign: f64) {
    let n = x.len();
    bit_reverse_permute(x);
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let tw: Vec<C64> = (0..half)
            .map(|k| C64::from_polar(1.0, ang * k as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = x[start + k];
                let b = x[start + k + half] * tw[k];
                x[start + k] = a + b;
                x[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

fn fft_bluestein(x: &mut [C64], sign: f64) {
    let n = x.len();
    let m = (2 * n - 1).next_power_of_two();
    let two_n = 2 * n as u64;
    let chirp: Vec<C64> = (0..n)
        .map(|k| {
            let k2 = (k as u64 * k as u64) % two_n;
            C64::from_polar(1.0, sign * PI * k2 as f64 / n as f64)
        })
        .collect();
    let mut a = vec![C64::zero(); m];
    let mut b = vec![C64::zero(); m];
    for k in 0..n {
        a[k] = x[k] * chirp[k];
        b[k] = chirp[k].conj();
        if k > 0 {
            b[m - k] = chirp[k].conj();
        }
    }
    fft_pow2(&mut a, -1.0);
    fft_pow2(&mut b, -1.0);
    for (p, q) in a.iter_mut().zip(b.iter()) {
        *p *= q;
    }
    fft_pow2(&mut a, 1.0);
    let inv = 1.0 / m as f64;
    for k in 0..n {
        x[k] = a[k] * inv * chirp[k];
    }
}

fn transform(x: &mut [C64], sign: f64) {
    let n = x.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(x, sign);
    } else {
        fft_bluestein(x, sign);
    }
}

/// Forward DFT, `X_k = Σ_j x_j e^{−2πijk/n}`.
pub fn fft(x: &mut [C64]) {
    transform(x, -1.0);
}

/// Inverse DFT including the `1/n` normalization.
pub fn ifft(x: &mut [C64]) {
    transform(x, 1.0);
    let inv = 1.0 / x.len() as f64;
    for v in x.iter_mut() {
        *v *= inv;
    }
}

/// Angular frequency (in units of π) of DFT bin `k` for length `n`.
///
/// Periodic bins are integers with the Nyquist bin at `+n/2`; antiperiodic
/// bins are half-integers placed symmetrically about zero.
#[inline]
fn freq(k: usize, n: usize, antiperiodic: bool) -> f64 {
    if antiperiodic {
        let m = if 2 * k < n { k as i64 } else { k as i64 - n as i64 };
        m as f64 + 0.5
    } else if 2 * k <= n {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

#[inline]
fn is_nyquist(k: usize, n: usize) -> bool {
    n % 2 == 0 && 2 * k == n
}

/// Phase `e^{∓iπt/2}` turning antiperiodic samples into periodic ones.
fn half_phase(n: usize, sign: f64) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| C64::from_polar(1.0, sign * PI * k as f64 / n as f64))
}

/// Fourier coefficients `c` of the trigonometric interpolant
/// `f(t) = Σ c_k e^{iπ(k+δ)t}` where `δ = 1/2` for antiperiodic data.
pub fn coefficients(f: &[C64], antiperiodic: bool) -> Vec<C64> {
    let n = f.len();
    let mut c: Vec<C64> = if antiperiodic {
        f.iter().zip(half_phase(n, -1.0)).map(|(a, p)| a * p).collect()
    } else {
        f.to_vec()
    };
    fft(&mut c);
    let inv = 1.0 / n as f64;
    for v in c.iter_mut() {
        *v *= inv;
    }
    c
}

fn synthesize(mut c: Vec<C64>, antiperiodic: bool) -> Vec<C64> {
    let n = c.len();
    for v in c.iter_mut() {
        *v *= n as f64;
    }
    ifft(&mut c);
    if antiperiodic {
        for (v, p) in c.iter_mut().zip(half_phase(n, 1.0)) {
            *v *= p;
        }
    }
    c
}

/// Spectral derivative `d/dt` of periodic or antiperiodic samples.
pub fn derivative(f: &[C64], antiperiodic: bool) -> Vec<C64> {
    let n = f.len();
    let mut c = coefficients(f, antiperiodic);
    for (k, v) in c.iter_mut().enumerate() {
        if !antiperiodic && is_nyquist(k, n) {
            *v = C64::zero();
        } else {
            *v *= C64::new(0.0, PI * freq(k, n, antiperiodic));
        }
    }
    synthesize(c, antiperiodic)
}

/// Spectral derivative of real periodic samples.
pub fn derivative_real(f: &[f64]) -> Vec<f64> {
    let z: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    derivative(&z, false).into_iter().map(|z| z.re).collect()
}

/// Spectral antiderivative `F(t) = ∫₀ᵗ f` of periodic samples, evaluated at
/// all `N + 1` grid points including `t = 2`.
pub fn antiderivative_periodic(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    let c = coefficients(f, false);
    let mut g = vec![C64::zero(); n];
    let mut offset = C64::zero();
    for k in 1..n {
        if is_nyquist(k, n) {
            continue;
        }
        let w = C64::new(0.0, PI * freq(k, n, false));
        g[k] = c[k] / w;
        offset += g[k];
    }
    let vals = synthesize(g, false);
    let mut out = Vec::with_capacity(n + 1);
    for (k, v) in vals.iter().enumerate() {
        out.push(c[0] * crate::grid_param(k, n) + v - offset);
    }
    out.push(c[0] * 2.0);
    out
}

pub fn antiderivative_periodic_real(f: &[f64]) -> Vec<f64> {
    let z: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    antiderivative_periodic(&z)
        .into_iter()
        .map(|z| z.re)
        .collect()
}

/// Trigonometric interpolant evaluated at arbitrary parameters. Values
/// outside `[0, 2)` follow the periodic or antiperiodic continuation.
pub fn evaluate(f: &[C64], antiperiodic: bool, ts: &[f64]) -> Vec<C64> {
    let c = coefficients(f, antiperiodic);
    evaluate_coefficients(&c, antiperiodic, ts)
}

pub fn evaluate_coefficients(c: &[C64], antiperiodic: bool, ts: &[f64]) -> Vec<C64> {
    let n = c.len();
    let lo = -((n / 2) as i64);
    let shift = if antiperiodic { 0.5 } else { 0.0 };
    ts.iter()
        .map(|&t| {
            let step = C64::from_polar(1.0, PI * t);
            let mut w = C64::from_polar(1.0, PI * t * (lo as f64 + shift));
            let mut acc = C64::zero();
            for m in lo..lo + n as i64 {
                let k = m.rem_euclid(n as i64) as usize;
                if !antiperiodic && is_nyquist(k, n) {
                    // Split the Nyquist mode into a cosine.
                    acc += c[k] * (PI * t * (n / 2) as f64).cos();
                } else {
                    acc += c[k] * w;
                }
                w *= step;
            }
            acc
        })
        .collect()
}

pub fn evaluate_real(f: &[f64], ts: &[f64]) -> Vec<f64> {
    let z: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    evaluate(&z, false, ts).into_iter().map(|z| z.re).collect()
}

/// Samples of the trigonometric interpolant on an `m`-point grid.
pub fn resample(f: &[C64], antiperiodic: bool, m: usize) -> Vec<C64> {
    let ts: Vec<f64> = (0..m).map(|k| crate::grid_param(k, m)).collect();
    evaluate(f, antiperiodic, &ts)
}

pub fn resample_real(f: &[f64], m: usize) -> Vec<f64> {
    let ts: Vec<f64> = (0..m).map(|k| crate::grid_param(k, m)).collect();
    evaluate_real(f, &ts)
}

/// Interpolant shifted by `s`: returns samples of `t ↦ f(t_k + s)`.
pub fn shift(f: &[C64], antiperiodic: bool, s: f64) -> Vec<C64> {
    let n = f.len();
    let mut c = coefficients(f, antiperiodic);
    for (k, v) in c.iter_mut().enumerate() {
        let w = freq(k, n, antiperiodic);
        if !antiperiodic && is_nyquist(k, n) {
            *v *= (PI * w * s).cos();
        } else {
            *v *= C64::from_polar(1.0, PI * w * s);
        }
    }
    let mut out = synthesize(c, false);
    if antiperiodic {
        for (k, v) in out.iter_mut().enumerate() {
            *v *= C64::from_polar(1.0, PI * crate::grid_param(k, n) * 0.5);
        }
    }
    out
}

pub fn shift_real(f: &[f64], s: f64) -> Vec<f64> {
    let z: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    shift(&z, false, s).into_iter().map(|z| z.re).collect()
}

/// Values that support the linear operations used by the stencils.
pub trait Sample: Copy + Zero + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T: Copy + Zero + Sub<Output = T> + Mul<f64, Output = T>> Sample for T {}

fn lin<T: Sample>(terms: &[(f64, T)]) -> T {
    terms.iter().fold(T::zero(), |acc, &(w, x)| acc + x * w)
}

/// Fourth-order finite-difference derivative of open samples `f_0..f_N`.
pub fn fd4_derivative<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "fourth-order stencils need at least five samples");
    let s = 1.0 / (12.0 * h);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = if i == 0 {
            lin(&[(-25.0, f[0]), (48.0, f[1]), (-36.0, f[2]), (16.0, f[3]), (-3.0, f[4])])
        } else if i == 1 {
            lin(&[(-3.0, f[0]), (-10.0, f[1]), (18.0, f[2]), (-6.0, f[3]), (1.0, f[4])])
        } else if i == n - 2 {
            lin(&[
                (3.0, f[n - 1]),
                (10.0, f[n - 2]),
                (-18.0, f[n - 3]),
                (6.0, f[n - 4]),
                (-1.0, f[n - 5]),
            ])
        } else if i == n - 1 {
            lin(&[
                (25.0, f[n - 1]),
                (-48.0, f[n - 2]),
                (36.0, f[n - 3]),
                (-16.0, f[n - 4]),
                (3.0, f[n - 5]),
            ])
        } else {
            lin(&[(1.0, f[i - 2]), (-8.0, f[i - 1]), (8.0, f[i + 1]), (-1.0, f[i + 2])])
        };
        out.push(d * s);
    }
    out
}

/// Fourth-order cumulative integral of open samples, starting at 0.
pub fn cumulative_open<T: Sample>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 4, "fourth-order quadrature needs at least four samples");
    let s = h / 24.0;
    let mut out = Vec::with_capacity(n);
    out.push(T::zero());
    for k in 0..n - 1 {
        let piece = if k == 0 {
            lin(&[(9.0, f[0]), (19.0, f[1]), (-5.0, f[2]), (1.0, f[3])])
        } else if k == n - 2 {
            lin(&[(1.0, f[n - 4]), (-5.0, f[n - 3]), (19.0, f[n - 2]), (9.0, f[n - 1])])
        } else {
            lin(&[(-1.0, f[k - 1]), (13.0, f[k]), (13.0, f[k + 1]), (-1.0, f[k + 2])])
        };
        let prev = out[k];
        out.push(prev + piece * s);
    }
    out
}

/// Fourth-order quadrature of open samples over `[0, 2]`.
pub fn integrate_open<T: Sample>(f: &[T], h: f64) -> T {
    *cumulative_open(f, h).last().expect("non-empty")
}

/// Trapezoid rule for periodic samples (spectrally accurate).
pub fn integrate_periodic<T: Sample>(f: &[T]) -> T {
    let h = 2.0 / f.len() as f64;
    f.iter().fold(T::zero(), |acc, &x| acc + x) * h
}

/// Fourth-order interpolation at the interval midpoints of open samples.
pub fn midpoints_open<T: Sample>(f: &[T]) -> Vec<T> {
    let n = f.len();
    assert!(n >= 4);
    let w = 1.0 / 16.0;
    (0..n - 1)
        .map(|i| {
            let v = if i == 0 {
                lin(&[(5.0, f[0]), (15.0, f[1]), (-5.0, f[2]), (1.0, f[3])])
            } else if i == n - 2 {
                lin(&[(1.0, f[n - 4]), (-5.0, f[n - 3]), (15.0, f[n - 2]), (5.0, f[n - 1])])
            } else {
                lin(&[(-1.0, f[i - 1]), (9.0, f[i]), (9.0, f[i + 1]), (-1.0, f[i + 2])])
            };
            v * w
        })
        .collect()
}

/// Natural cubic spline through `(x_i, y_i)` with increasing `x`.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives.
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                a[i] = h0;
                b[i] = 2.0 * (h0 + h1);
                c[i] = h1;
                d[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let w = a[i] / b[i - 1];
                b[i] -= w * c[i - 1];
                d[i] -= w * d[i - 1];
            }
            m[n - 2] = d[n - 2] / b[n - 2];
            for i in (1..n - 2).rev() {
                m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
            }
        }
        CubicSpline {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Piecewise-linear interpolation on the uniform grid `x_k = k·h`.
pub fn lerp_uniform<T: Sample>(f: &[T], h: f64, t: f64) -> T {
    let n = f.len();
    let u = (t / h).clamp(0.0, (n - 1) as f64);
    let i = (u.floor() as usize).min(n - 2);
    let w = u - i as f64;
    f[i] * (1.0 - w) + f[i + 1] * w
}

/// Continuous branch of a sequence of angles.
pub fn unwrap_phase(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    for (k, &a) in angles.iter().enumerate() {
        if k > 0 {
            let prev = angles[k - 1];
            let mut d = a - prev;
            while d > PI {
                d -= 2.0 * PI;
                offset -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
                offset += 2.0 * PI;
            }
        }
        out.push(a + offset);
    }
    out
}
