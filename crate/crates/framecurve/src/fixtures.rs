//! Reference framed loops used by the tests and the `fixture` command.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use framecurve_core::curve::FramedCurve;
use framecurve_core::hopf::{reconstruct, ComplexCurve, Periodicity};
use framecurve_core::{grid_param, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    /// Circle of length 2 framed by its binormal.
    PlanarCircle,
    /// Circle of length 2 whose framing links it once.
    LinkedCircle,
    /// Planar figure-eight framed by the plane normal.
    FigureEight,
    /// (2,3) torus knot with the framing normal to its torus.
    Trefoil,
}

pub fn fixture(which: Fixture, n: usize) -> Result<FramedCurve> {
    match which {
        Fixture::PlanarCircle => planar_circle(n),
        Fixture::LinkedCircle => linked_circle(n),
        Fixture::FigureEight => figure_eight(n),
        Fixture::Trefoil => torus_knot_tube(n, 2, 3, 2.0, 1.0),
    }
}

fn ts(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| grid_param(k, n))
}

pub fn planar_circle(n: usize) -> Result<FramedCurve> {
    let g = ts(n).map(|t| [(PI * t).cos() / PI, (PI * t).sin() / PI, 0.0]).collect();
    FramedCurve::new(g, vec![[0.0, 0.0, 1.0]; n], true)
}

/// Reconstruction of `(e^{−iπt}, 1)/√2`.
pub fn linked_circle(n: usize) -> Result<FramedCurve> {
    let phi = ComplexCurve::from_fn(n, Periodicity::Periodic, |t| {
        (C64::from_polar(FRAC_1_SQRT_2, -PI * t), C64::new(FRAC_1_SQRT_2, 0.0))
    });
    reconstruct(&phi)
}

pub fn figure_eight(n: usize) -> Result<FramedCurve> {
    let g = ts(n)
        .map(|t| {
            let s = PI * t;
            [s.cos(), 0.0, s.sin() * s.cos()]
        })
        .collect();
    FramedCurve::new(g, vec![[0.0, 1.0, 0.0]; n], true)
}

/// `(p, q)` torus knot on the torus of radii `big > small`, framed by the
/// outward normal of the torus.
pub fn torus_knot_tube(n: usize, p: u32, q: u32, big: f64, small: f64) -> Result<FramedCurve> {
    let (p, q) = (p as f64, q as f64);
    let mut g = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for t in ts(n) {
        let s = PI * t;
        let (a, b) = (p * s, q * s);
        let nrm = [b.cos() * a.cos(), b.cos() * a.sin(), b.sin()];
        g.push([big * a.cos() + small * nrm[0], big * a.sin() + small * nrm[1], small * nrm[2]]);
        v.push(nrm);
    }
    FramedCurve::new(g, v, true)
}
