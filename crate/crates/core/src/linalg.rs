//! Small fixed-size linear algebra: 3-vectors, 2×2 complex matrices with a
//! closed-form SVD, and a complex matrix exponential.

use crate::C64;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[inline]
pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[inline]
pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn normalize3(a: Vec3) -> Vec3 {
    scale3(1.0 / norm3(a), a)
}

pub fn mat3_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat3_det(a: &Mat3) -> f64 {
    dot3(a[0], cross3(a[1], a[2]))
}

/// Matrix with the given vectors as columns.
pub fn mat3_from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
    [
        [c0[0], c1[0], c2[0]],
        [c0[1], c1[1], c2[1]],
        [c0[2], c1[2], c2[2]],
    ]
}

pub fn mat3_col(a: &Mat3, j: usize) -> Vec3 {
    [a[0][j], a[1][j], a[2][j]]
}

/// Rotation about a unit axis by `angle` (right-handed).
pub fn axis_rotation(axis: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let [x, y, z] = axis;
    let t = 1.0 - c;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2c(pub [[C64; 2]; 2]);

impl Mat2c {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2c([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Mat2c([[o, z], [z, o]])
    }

    pub fn zero() -> Self {
        Mat2c([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2c([[a, z], [z, d]])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2c([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2c([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, other: &Mat2c) -> Mat2c {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2c(out)
    }

    pub fn add(&self, other: &Mat2c) -> Mat2c {
        let mut out = self.0;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += other.0[i][j];
            }
        }
        Mat2c(out)
    }

    pub fn sub(&self, other: &Mat2c) -> Mat2c {
        let mut out = self.0;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] -= other.0[i][j];
            }
        }
        Mat2c(out)
    }

    pub fn scale(&self, s: C64) -> Mat2c {
        let mut out = self.0;
        for row in out.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        Mat2c(out)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm_sqr()).sum()
    }

    /// Max-entry distance to another matrix.
    pub fn max_diff(&self, other: &Mat2c) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    /// Max-entry deviation from unitarity, `‖U*U − I‖`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_diff(&Mat2c::identity())
    }

    /// Max-entry deviation from being Hermitian.
    pub fn hermitian_residual(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    pub fn from_cols(c0: [C64; 2], c1: [C64; 2]) -> Mat2c {
        Mat2c([[c0[0], c1[0]], [c0[1], c1[1]]])
    }

    pub fn col(&self, j: usize) -> [C64; 2] {
        [self.0[0][j], self.0[1][j]]
    }
}

fn vnorm2(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Unit vector orthogonal to the unit vector `v` in ℂ².
#[inline]
pub fn complement2(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Eigendecomposition of a Hermitian 2×2 matrix.
///
/// Returns eigenvalues in decreasing order and the unitary matrix whose
/// columns are the corresponding eigenvectors.
pub fn hermitian_eig2(h: &Mat2c) -> ([f64; 2], Mat2c) {
    let a = h.0[0][0].re;
    let d = h.0[1][1].re;
    let b = (h.0[0][1] + h.0[1][0].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = half.hypot(b.norm());
    let l1 = mean + rad;
    let l2 = mean - rad;
    let v1 = if b.norm() == 0.0 {
        if a >= d {
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        } else {
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        }
    } else {
        // Two algebraically equivalent eigenvectors; keep the better scaled one.
        let x = [b, C64::new(l1 - a, 0.0)];
        let y = [C64::new(l1 - d, 0.0), b.conj()];
        let v = if vnorm2(x) >= vnorm2(y) { x } else { y };
        let n = vnorm2(v);
        [v[0] / n, v[1] / n]
    };
    let v2 = complement2(v1);
    ([l1, l2], Mat2c::from_cols(v1, v2))
}

/// Singular value decomposition `A = U·diag(σ)·V*` with `σ₀ ≥ σ₁ ≥ 0`.
#[derive(Clone, Copy, Debug)]
pub struct Svd2 {
    pub u: Mat2c,
    pub sigma: [f64; 2],
    pub v: Mat2c,
}

pub fn svd2(a: &Mat2c) -> Svd2 {
    let f2 = a.frobenius_sq();
    let det = a.det().norm();
    let p = (f2 + 2.0 * det).max(0.0).sqrt();
    let m = (f2 - 2.0 * det).max(0.0).sqrt();
    let s0 = 0.5 * (p + m);
    let s1 = if s0 > 0.0 { det / s0 } else { 0.0 };

    let (_, vm) = hermitian_eig2(&a.adjoint().mul(a));
    let v0 = vm.col(0);
    let v1 = vm.col(1);
    let av0 = a.apply(v0);
    let n0 = vnorm2(av0);
    let u0 = if n0 > 0.0 {
        [av0[0] / n0, av0[1] / n0]
    } else {
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    };
    let mut u1 = complement2(u0);
    let av1 = a.apply(v1);
    let c = u1[0].conj() * av1[0] + u1[1].conj() * av1[1];
    if c.norm() > 0.0 {
        let ph = c / c.norm();
        u1 = [u1[0] * ph, u1[1] * ph];
    }
    Svd2 {
        u: Mat2c::from_cols(u0, u1),
        sigma: [s0, s1],
        v: vm,
    }
}

/// `H^{-1/2}` for a Hermitian positive definite matrix, with its eigenvalues.
pub fn inv_sqrt_hermitian2(h: &Mat2c) -> (Mat2c, [f64; 2]) {
    let (l, q) = hermitian_eig2(h);
    let d = Mat2c::diag(
        C64::new(1.0 / l[0].sqrt(), 0.0),
        C64::new(1.0 / l[1].sqrt(), 0.0),
    );
    (q.mul(&d).mul(&q.adjoint()), l)
}

/// Square complex matrix, row-major.
pub type MatC<const M: usize> = [[C64; M]; M];

pub fn matc_identity<const M: usize>() -> MatC<M> {
    let mut out = [[C64::new(0.0, 0.0); M]; M];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    out
}

pub fn matc_mul<const M: usize>(a: &MatC<M>, b: &MatC<M>) -> MatC<M> {
    let mut out = [[C64::new(0.0, 0.0); M]; M];
    for i in 0..M {
        for k in 0..M {
            let aik = a[i][k];
            for j in 0..M {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn matc_norm1<const M: usize>(a: &MatC<M>) -> f64 {
    (0..M)
        .map(|j| (0..M).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor series.
///
/// The argument is scaled to 1-norm at most 1/2 and the series is summed
/// until terms drop below double-precision resolution of the partial sum.
pub fn expm<const M: usize>(a: &MatC<M>) -> MatC<M> {
    let norm = matc_norm1(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scale = 1.0 / (1u64 << squarings.min(60)) as f64;
    let mut b = *a;
    for row in b.iter_mut() {
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    let mut sum = matc_identity::<M>();
    let mut term = matc_identity::<M>();
    for k in 1..40 {
        term = matc_mul(&term, &b);
        let inv = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv;
            }
        }
        for i in 0..M {
            for j in 0..M {
                sum[i][j] += term[i][j];
            }
        }
        if matc_norm1(&term) <= 1e-17 * matc_norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = matc_mul(&sum, &sum);
    }
    sum
}

pub fn expm2(a: &Mat2c) -> Mat2c {
    Mat2c(expm::<2>(&a.0))
}
