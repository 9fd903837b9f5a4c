//! Wavefront OBJ tube meshes.
//!
//! The tube is a circle of fixed radius swept along `γ` in the normal plane
//! spanned by `(V, W)`. The texture seam follows `V`, so frame twist is
//! visible as a spiralling seam.

use std::fmt::Write;

use framecurve_core::curve::FramedCurve;
use framecurve_core::linalg::{add3, cross3, dot3, norm3, normalize3, scale3, sub3};
use framecurve_core::Error as CoreError;

use crate::error::Result;

pub fn tube_obj(c: &FramedCurve, radius: f64, segments: usize) -> Result<String> {
    let n = c.len();
    // Ring frame from the sampled tangent; small normality errors are
    // projected out rather than rejected.
    let mut ring = Vec::with_capacity(n);
    for (k, vel) in c.velocity().into_iter().enumerate() {
        let speed = norm3(vel);
        if !(speed > c.tolerances().geom) {
            return Err(CoreError::NonImmersed { index: k, speed }.into());
        }
        let t = scale3(1.0 / speed, vel);
        let v = normalize3(sub3(c.v()[k], scale3(dot3(c.v()[k], t), t)));
        ring.push((v, cross3(t, v)));
    }
    let mut out = String::new();
    writeln!(out, "o framed_tube").unwrap();
    for k in 0..n {
        for j in 0..segments {
            let a = std::f64::consts::TAU * j as f64 / segments as f64;
            let off = add3(scale3(radius * a.cos(), ring[k].0), scale3(radius * a.sin(), ring[k].1));
            let x = add3(c.gamma()[k], off);
            writeln!(out, "v {} {} {}", x[0], x[1], x[2]).unwrap();
        }
    }
    let rings = if c.is_closed() { n + 1 } else { n };
    for k in 0..rings {
        for j in 0..=segments {
            writeln!(out, "vt {} {}", k as f64 / (rings - 1) as f64, j as f64 / segments as f64).unwrap();
        }
    }
    let vid = |k: usize, j: usize| (k % n) * segments + (j % segments) + 1;
    let tid = |k: usize, j: usize| k * (segments + 1) + j + 1;
    let quads = if c.is_closed() { n } else { n - 1 };
    for k in 0..quads {
        for j in 0..segments {
            let corners = [(k, j), (k + 1, j), (k + 1, j + 1), (k, j + 1)];
            write!(out, "f").unwrap();
            for (a, b) in corners {
                write!(out, " {}/{}", vid(a, b), tid(a, b)).unwrap();
            }
            writeln!(out).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use framecurve_core::linalg::{norm3, sub3};

    fn circle(n: usize, closed: bool) -> FramedCurve {
        let m = if closed { n } else { n + 1 };
        let t = |k: usize| std::f64::consts::PI * 2.0 * k as f64 / n as f64;
        let g = (0..m).map(|k| [t(k).cos(), t(k).sin(), 0.0]).collect();
        let v = (0..m).map(|_| [0.0, 0.0, 1.0]).collect();
        FramedCurve::new(g, v, closed).unwrap()
    }

    #[test]
    fn closed_tube_counts_and_radius() {
        let c = circle(32, true);
        let obj = tube_obj(&c, 0.1, 8).unwrap();
        let verts: Vec<[f64; 3]> = obj
            .lines()
            .filter_map(|l| l.strip_prefix("v "))
            .map(|l| {
                let x: Vec<f64> = l.split(' ').map(|s| s.parse().unwrap()).collect();
                [x[0], x[1], x[2]]
            })
            .collect();
        assert_eq!(verts.len(), 32 * 8);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 32 * 8);
        for (i, x) in verts.iter().enumerate() {
            assert!((norm3(sub3(*x, c.gamma()[i / 8])) - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn open_tube_has_no_wrap() {
        let obj = tube_obj(&circle(32, false), 0.1, 6).unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 32 * 6);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 33 * 6);
    }
}
