//! Curve and complex-coordinate file formats.
//!
//! * Curve JSON: `{"closed": bool, "samples": [{"gamma": [x,y,z], "v": [x,y,z]}, ...]}`
//! * Curve CSV: rows `t,gx,gy,gz,vx,vy,vz`, optional header. A curve is
//!   closed when its last row is before `t = 2`.
//! * Complex JSON: `{"periodicity": "periodic|antiperiodic|open", "phi": [[re,im],...], "psi": [...]}`

use std::fs;
use std::path::Path;

use framecurve_core::curve::FramedCurve;
use framecurve_core::hopf::{ComplexCurve, Periodicity};
use framecurve_core::linalg::Vec3;
use framecurve_core::{grid_param, Tolerances, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct CurveFile {
    closed: bool,
    samples: Vec<Sample>,
}

#[derive(Serialize, Deserialize)]
struct Sample {
    gamma: [f64; 3],
    v: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    periodicity: String,
    phi: Vec<[f64; 2]>,
    psi: Vec<[f64; 2]>,
}

/// Contents of an input file.
#[derive(Clone, Debug)]
pub enum Input {
    Curve(FramedCurve),
    Complex(ComplexCurve),
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a curve or complex-coordinate file, dispatching on extension and
/// on the presence of a `periodicity` key.
pub fn read_input(path: &Path, tol: Tolerances) -> Result<Input> {
    let text = read_text(path)?;
    if is_csv(path) {
        return Ok(Input::Curve(parse_curve_csv(&text, tol).map_err(|m| Error::format(path, m))?));
    }
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    if value.get("periodicity").is_some() {
        let f: ComplexFile = serde_json::from_value(value).map_err(|e| Error::format(path, e.to_string()))?;
        Ok(Input::Complex(complex_from_file(f, tol).map_err(|m| Error::format(path, m))?))
    } else {
        let f: CurveFile = serde_json::from_value(value).map_err(|e| Error::format(path, e.to_string()))?;
        let gamma = f.samples.iter().map(|s| s.gamma).collect();
        let v = f.samples.iter().map(|s| s.v).collect();
        Ok(Input::Curve(FramedCurve::with_tolerances(gamma, v, f.closed, tol)?))
    }
}

pub fn read_curve(path: &Path, tol: Tolerances) -> Result<FramedCurve> {
    match read_input(path, tol)? {
        Input::Curve(c) => Ok(c),
        Input::Complex(_) => Err(Error::format(path, "expected a framed curve, found complex coordinates")),
    }
}

fn parse_curve_csv(text: &str, tol: Tolerances) -> std::result::Result<FramedCurve, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.len() == 7 => rows.push([v[0], v[1], v[2], v[3], v[4], v[5], v[6]]),
            Ok(v) => return Err(format!("line {}: expected 7 columns, found {}", line + 1, v.len())),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(format!("line {}: {e}", line + 1)),
        }
    }
    let last = rows.last().ok_or("no samples")?[0];
    let closed = last < 2.0 - 1e-9;
    let n = if closed { rows.len() } else { rows.len() - 1 };
    for (k, r) in rows.iter().enumerate() {
        if (r[0] - grid_param(k, n)).abs() > 1e-9 {
            return Err(format!("sample {k}: t = {} is off the uniform grid t_k = 2k/{n}", r[0]));
        }
    }
    let gamma = rows.iter().map(|r| [r[1], r[2], r[3]]).collect();
    let v = rows.iter().map(|r| [r[4], r[5], r[6]]).collect();
    FramedCurve::with_tolerances(gamma, v, closed, tol).map_err(|e| e.to_string())
}

fn complex_from_file(f: ComplexFile, tol: Tolerances) -> std::result::Result<ComplexCurve, String> {
    let per = parse_periodicity(&f.periodicity)?;
    let c = |v: &[[f64; 2]]| v.iter().map(|z| C64::new(z[0], z[1])).collect();
    ComplexCurve::with_tolerances(c(&f.phi), c(&f.psi), per, tol).map_err(|e| e.to_string())
}

pub fn parse_periodicity(s: &str) -> std::result::Result<Periodicity, String> {
    match s {
        "periodic" => Ok(Periodicity::Periodic),
        "antiperiodic" => Ok(Periodicity::Antiperiodic),
        "open" => Ok(Periodicity::Open),
        other => Err(format!("unknown periodicity `{other}`")),
    }
}

pub fn curve_json(c: &FramedCurve) -> String {
    let f = CurveFile {
        closed: c.is_closed(),
        samples: c.gamma().iter().zip(c.v()).map(|(g, v)| Sample { gamma: *g, v: *v }).collect(),
    };
    serde_json::to_string_pretty(&f).expect("curve serializes")
}

pub fn curve_csv(c: &FramedCurve) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "gx", "gy", "gz", "vx", "vy", "vz"]).expect("in-memory write");
    let ts = c.params();
    for k in 0..c.len() {
        let (g, v): (Vec3, Vec3) = (c.gamma()[k], c.v()[k]);
        let row = [ts[k], g[0], g[1], g[2], v[0], v[1], v[2]];
        w.write_record(row.iter().map(|x| x.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

pub fn complex_json(c: &ComplexCurve) -> String {
    let pairs = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect();
    let f = ComplexFile {
        periodicity: c.periodicity().as_str().to_string(),
        phi: pairs(c.phi()),
        psi: pairs(c.psi()),
    };
    serde_json::to_string_pretty(&f).expect("complex curve serializes")
}

/// Writes a curve as CSV or JSON according to the extension.
pub fn write_curve(path: &Path, c: &FramedCurve) -> Result<()> {
    let text = if is_csv(path) { curve_csv(c) } else { curve_json(c) };
    write_text(path, &text)
}

pub fn write_complex(path: &Path, c: &ComplexCurve) -> Result<()> {
    write_text(path, &complex_json(c))
}
