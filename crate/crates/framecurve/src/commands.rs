//! Command implementations. Each returns a JSON report; files are written
//! as a side effect when an output path is given.

use std::path::{Path, PathBuf};

use framecurve_core::alignment::{full_align, procrustes_u2, AlignmentConfig, AlignmentResult};
use framecurve_core::curve::{self, FramedCurve, Parity};
use framecurve_core::grassmann::{
    distance, is_real_plane, normalized_distance, project_stiefel, Geodesic, StiefelPoint, DIAMETER_SCALE,
};
use framecurve_core::hopf::{
    closure_residuals, closure_vector, lift, loop_antiloop_transfer, reconstruct, ComplexCurve,
};
use framecurve_core::linalg::{norm3, Mat2c};
use framecurve_core::{grid_param, mechanics, C64};
use serde_json::{json, Value};

use crate::config::{AlignMode, JobConfig};
use crate::error::{Error, Result};
use crate::export::tube_obj;
use crate::fixtures::{fixture, Fixture};
use crate::io::{read_curve, read_input, write_complex, write_curve, write_text, Input};

fn stats(x: &[f64]) -> Value {
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    json!({ "min": min, "max": max, "mean": mean })
}

fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix(m: &Mat2c) -> Value {
    json!([[complex(m.0[0][0]), complex(m.0[0][1])], [complex(m.0[1][0]), complex(m.0[1][1])]])
}

fn resample_curve(c: FramedCurve, n: usize) -> Result<FramedCurve> {
    if c.n_intervals() == n {
        Ok(c)
    } else {
        Ok(curve::resample(&c, n)?)
    }
}

fn resample_complex(c: ComplexCurve, n: usize) -> Result<ComplexCurve> {
    if c.n_intervals() == n {
        return Ok(c);
    }
    if !c.periodicity().is_loop() {
        return Err(Error::Config(format!(
            "open complex coordinates have {} intervals; resampling to {n} needs a loop",
            c.n_intervals()
        )));
    }
    let ts: Vec<f64> = (0..n).map(|k| grid_param(k, n)).collect();
    let e = c.evaluate(&ts)?;
    Ok(ComplexCurve::with_tolerances(
        e.phi().to_vec(),
        e.psi().to_vec(),
        c.periodicity(),
        c.tolerances(),
    )?)
}

fn load_curve(path: &Path, cfg: &JobConfig) -> Result<FramedCurve> {
    let c = match read_input(path, cfg.tolerances())? {
        Input::Curve(c) => c,
        Input::Complex(phi) => reconstruct(&phi)?,
    };
    resample_curve(c, cfg.n_samples)
}

/// Complex coordinates of an input: the lift of a curve, or the stored
/// coordinates.
fn load_lift(path: &Path, cfg: &JobConfig) -> Result<ComplexCurve> {
    match read_input(path, cfg.tolerances())? {
        Input::Curve(c) => Ok(lift(&resample_curve(c, cfg.n_samples)?)?),
        Input::Complex(phi) => resample_complex(phi, cfg.n_samples),
    }
}

fn load_point(path: &Path, cfg: &JobConfig) -> Result<StiefelPoint> {
    let phi = load_lift(path, cfg)?;
    if !phi.periodicity().is_loop() {
        return Err(framecurve_core::Error::OpenCurve.into());
    }
    Ok(project_stiefel(&phi)?)
}

fn load_pair(a: &Path, b: &Path, allow_transfer: bool, cfg: &JobConfig) -> Result<(StiefelPoint, StiefelPoint, bool)> {
    let p0 = load_point(a, cfg)?;
    let mut p1 = load_point(b, cfg)?;
    let mut transferred = false;
    if p0.periodicity() != p1.periodicity() {
        if !allow_transfer {
            return Err(Error::ParityMismatch {
                left: p0.periodicity(),
                right: p1.periodicity(),
            });
        }
        p1 = project_stiefel(&loop_antiloop_transfer(p1.curve())?)?;
        transferred = true;
    }
    Ok((p0, p1, transferred))
}

fn alignment_report(r: &AlignmentResult) -> Value {
    json!({
        "initial_distance": r.initial_distance,
        "distance": r.distance,
        "normalized_distance": r.distance * DIAMETER_SCALE,
        "iterations": r.iterations,
        "shift": r.reparam.shift(),
        "winding": r.twist_loop.winding,
        "u2": matrix(&r.u2),
        "sweeps": r.sweeps.iter().map(|s| json!({
            "seed": s.seed, "reparam": s.reparam, "frame": s.frame, "joint": s.joint,
        })).collect::<Vec<_>>(),
    })
}

fn align_second(p0: &StiefelPoint, p1: &StiefelPoint, cfg: &JobConfig) -> Result<(StiefelPoint, Value)> {
    Ok(match cfg.align {
        AlignMode::None => (p1.clone(), json!({ "mode": "none" })),
        AlignMode::Rotation => {
            let u = procrustes_u2(p0, p1)?;
            (p1.rotate(&u), json!({ "mode": "rotation", "u2": matrix(&u) }))
        }
        AlignMode::Full => {
            let r = full_align(p0, p1, &AlignmentConfig::from(&cfg.alignment))?;
            let mut rep = alignment_report(&r);
            rep["mode"] = json!("full");
            (r.apply(p1)?, rep)
        }
    })
}

pub fn lift_cmd(input: &Path, out: Option<&Path>, cfg: &JobConfig) -> Result<Value> {
    let c = resample_curve(read_curve(input, cfg.tolerances())?, cfg.n_samples)?;
    let phi = lift(&c)?;
    if let Some(o) = out {
        write_complex(o, &phi)?;
    }
    let closure = if phi.periodicity().is_loop() {
        let (d, x) = closure_residuals(&phi)?;
        json!({
            "norm_difference": d,
            "cross_inner": complex(x),
            "gap": norm3(closure_vector(&phi)?),
        })
    } else {
        Value::Null
    };
    let real = is_real_plane(&project_stiefel(&phi)?);
    Ok(json!({
        "periodicity": phi.periodicity().as_str(),
        "n_samples": c.n_intervals(),
        "closure_residuals": closure,
        "real_lift": real.is_real,
        "real_residual": real.residual,
    }))
}

pub struct GeodesicOptions {
    pub normalize_diameter: bool,
    pub allow_parity_transfer: bool,
    pub out: Option<PathBuf>,
}

pub fn geodesic_cmd(a: &Path, b: &Path, opts: &GeodesicOptions, cfg: &JobConfig) -> Result<Value> {
    let (p0, p1, transferred) = load_pair(a, b, opts.allow_parity_transfer, cfg)?;
    let raw_distance = distance(&p0, &p1)?;
    let (p1, align) = align_second(&p0, &p1, cfg)?;
    let geo = Geodesic::new(&p0, &p1)?;
    let len = geo.length();
    let mut steps = Vec::with_capacity(cfg.steps);
    for j in 0..cfg.steps {
        let u = j as f64 / (cfg.steps - 1) as f64;
        let q = geo.at(u);
        let d = distance(&p0, &q)?;
        let mut entry = json!({ "u": u, "distance_from_start": d });
        match reconstruct(q.curve()) {
            Ok(c) => {
                entry["closed"] = json!(c.is_closed());
                entry["length"] = json!(c.length());
                if let Some(dir) = &opts.out {
                    write_complex(&dir.join(format!("step_{j:03}.json")), q.curve())?;
                    if cfg.export.csv {
                        write_curve(&dir.join(format!("step_{j:03}.csv")), &c)?;
                    }
                    if cfg.export.obj {
                        let obj = tube_obj(&c, cfg.export.tube_radius, cfg.export.tube_segments)?;
                        write_text(&dir.join(format!("step_{j:03}.obj")), &obj)?;
                    }
                }
            }
            Err(e) => entry["error"] = json!(e.to_string()),
        }
        steps.push(entry);
    }
    let start = distance(&geo.at(0.0), &p0)?;
    let end = distance(&geo.at(1.0), &p1)?;
    let normalized = len * DIAMETER_SCALE;
    Ok(json!({
        "distance": if opts.normalize_diameter { normalized } else { len },
        "raw_distance": len,
        "normalized_distance": normalized,
        "unaligned_distance": raw_distance,
        "angles": geo.angles(),
        "periodicity": p0.periodicity().as_str(),
        "parity_transfer": transferred,
        "alignment": align,
        "endpoint_error": [start, end],
        "steps": steps,
    }))
}

pub fn invariants_cmd(input: &Path, cfg: &JobConfig) -> Result<Value> {
    let c = load_curve(input, cfg)?;
    let tw = curve::total_twist(&c)?;
    let rate = curve::twist_rate(&c)?;
    let mut rep = json!({
        "closed": c.is_closed(),
        "length": c.length(),
        "tw": tw,
        "speed": stats(&c.speed()),
        "twist_rate": stats(&rate),
    });
    if c.is_closed() {
        let wr = curve::writhe(&c)?;
        let lk = (tw + wr).round();
        rep["wr"] = json!(wr);
        rep["lk"] = json!(lk as i64);
        rep["lk_residual"] = json!((tw + wr - lk).abs());
        rep["tw2"] = json!(curve::tw2(&c)?);
        rep["parity"] = json!(match curve::parity(&c)? {
            Parity::Even => "even",
            Parity::Odd => "odd",
        });
    }
    Ok(rep)
}

pub fn ctmf_cmd(input: &Path, out: Option<&Path>, cfg: &JobConfig) -> Result<Value> {
    let c = load_curve(input, cfg)?;
    let m = curve::ctmf(&c)?;
    if let Some(o) = out {
        write_curve(o, &m)?;
    }
    let rate = curve::twist_rate(&m)?;
    Ok(json!({
        "tw2": curve::tw2(&c)?,
        "tw": curve::total_twist(&m)?,
        "twist_rate": stats(&rate),
    }))
}

pub fn bishop_cmd(input: &Path, out: Option<&Path>, cfg: &JobConfig) -> Result<Value> {
    let c = load_curve(input, cfg)?;
    let b = curve::bishop_framing(c.gamma(), c.is_closed(), c.v()[0], cfg.tolerances())?;
    if let Some(o) = out {
        write_curve(o, &b.curve)?;
    }
    Ok(json!({
        "holonomy": b.holonomy,
        "closed": b.curve.is_closed(),
        "twist_rate": stats(&curve::twist_rate(&b.curve)?),
    }))
}

pub fn torus_knot_cmd(h: u32, k: i64, out: Option<&Path>, cfg: &JobConfig) -> Result<Value> {
    let p = mechanics::torus_knot(cfg.n_samples, h, k)?;
    let c = reconstruct(p.curve())?;
    if let Some(dir) = out {
        write_complex(&dir.join(format!("torus_{h}_{k}.json")), p.curve())?;
        write_curve(&dir.join(format!("torus_{h}_{k}_curve.json")), &c)?;
    }
    Ok(json!({
        "periodicity": p.periodicity().as_str(),
        "length": c.length(),
        "twist_rate": stats(&curve::twist_rate(&c)?),
        "weighted_total_twist": mechanics::weighted_total_twist(&c)?,
        "momentum_s1": mechanics::momentum_s1(&p),
    }))
}

pub fn align_cmd(a: &Path, b: &Path, allow_transfer: bool, out: Option<&Path>, cfg: &JobConfig) -> Result<Value> {
    let (p0, p1, transferred) = load_pair(a, b, allow_transfer, cfg)?;
    let r = full_align(&p0, &p1, &AlignmentConfig::from(&cfg.alignment))?;
    if let Some(o) = out {
        let m = r.reparam.n_intervals();
        let ts: Vec<f64> = (0..r.reparam.values().len()).map(|k| grid_param(k, m)).collect();
        let doc = json!({
            "t": ts,
            "rho": r.reparam.values(),
            "drho": r.reparam.derivative(),
            "shift": r.reparam.shift(),
            "alpha": r.twist_loop.values,
            "winding": r.twist_loop.winding,
            "u2": matrix(&r.u2),
        });
        write_text(o, &serde_json::to_string_pretty(&doc).expect("report serializes"))?;
    }
    let mut rep = alignment_report(&r);
    rep["parity_transfer"] = json!(transferred);
    rep["unaligned_normalized_distance"] = json!(normalized_distance(&p0, &p1)?);
    Ok(rep)
}

pub fn momentum_cmd(input: &Path, cfg: &JobConfig) -> Result<Value> {
    let p = load_point(input, cfg)?;
    let c = reconstruct(p.curve())?;
    Ok(json!({
        "u2": matrix(&mechanics::momentum_u2(p.curve())),
        "loop_group": stats(&mechanics::momentum_loopgroup(&p)),
        "diff": stats(&mechanics::momentum_diff(&p)),
        "s1": mechanics::momentum_s1(&p),
        "weighted_total_twist": mechanics::weighted_total_twist(&c)?,
    }))
}

pub fn curvature_probe_cmd(input: &Path, planes: usize, cfg: &JobConfig) -> Result<Value> {
    let p = load_point(input, cfg)?;
    let k = mechanics::curvature_survey(&p, planes, cfg.seed)?;
    Ok(json!({ "seed": cfg.seed, "curvatures": k, "summary": stats(&k) }))
}

pub fn criticality_cmd(input: &Path, directions: usize, cfg: &JobConfig) -> Result<Value> {
    let p = load_point(input, cfg)?;
    let m = mechanics::criticality_check(&p, directions, cfg.seed, 1e-4)?;
    Ok(json!({
        "seed": cfg.seed,
        "directions": directions,
        "weighted_total_twist": mechanics::weighted_total_twist_of(&p)?,
        "max_derivative": m,
    }))
}

pub fn fixture_cmd(which: Fixture, out: &Path, cfg: &JobConfig) -> Result<Value> {
    let c = fixture(which, cfg.n_samples)?;
    write_curve(out, &c)?;
    Ok(json!({ "n_samples": cfg.n_samples, "length": c.length() }))
}
