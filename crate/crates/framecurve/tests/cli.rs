use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use framecurve::fixtures::{fixture, Fixture};
use framecurve::io::{write_complex, write_curve};
use framecurve_core::alignment::{aligned, Reparam};
use framecurve_core::grassmann::project_stiefel;
use framecurve_core::hopf::{lift, ComplexCurve, Periodicity, TwistLoop};
use framecurve_core::linalg::Mat2c;
use framecurve_core::{grid_param, C64};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_framecurve"));
    c.env_remove("FRAMECURVE_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        for (name, f) in [
            ("trefoil", Fixture::Trefoil),
            ("circle", Fixture::PlanarCircle),
            ("linked", Fixture::LinkedCircle),
            ("eight", Fixture::FigureEight),
        ] {
            write_curve(&dir.path().join(format!("{name}.json")), &fixture(f, 256).unwrap()).unwrap();
        }
        Fixtures { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn lift_reports() {
    let f = Fixtures::new();
    let r = report(&["lift", s(&f.path("linked.json")), "-o", s(&f.path("linked_phi.json"))]);
    assert_eq!(r["periodicity"], "periodic");
    assert!(r["closure_residuals"]["gap"].as_f64().unwrap() < 1e-8);
    assert!(r["closure_residuals"]["norm_difference"].as_f64().unwrap().abs() < 1e-8);
    assert!(f.path("linked_phi.json").exists());
    let r = report(&["lift", s(&f.path("eight.json"))]);
    assert_eq!(r["real_lift"], true);
    assert_eq!(report(&["lift", s(&f.path("trefoil.json"))])["real_lift"], false);
}

#[test]
fn malformed_input_exits_2() {
    let f = Fixtures::new();
    let bad = f.path("bad.json");
    std::fs::write(&bad, r#"{"closed": true, "samples": [{"v": [0, 0, 1]}]}"#).unwrap();
    let out = run(&["lift", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `gamma`"));
    let out = run(&["lift", s(&f.path("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--n-samples", "100", "lift", s(&f.path("linked.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geodesic_sweep_and_export() {
    let f = Fixtures::new();
    let out = f.path("geo");
    let r = report(&[
        "geodesic",
        s(&f.path("trefoil.json")),
        s(&f.path("circle.json")),
        "--align",
        "none",
        "--steps",
        "6",
        "--obj",
        "--tube-radius",
        "0.05",
        "-o",
        s(&out),
    ]);
    let steps = r["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    let d: Vec<f64> = steps.iter().map(|x| x["distance_from_start"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[1] > w[0]));
    let len = r["raw_distance"].as_f64().unwrap();
    for (j, x) in d.iter().enumerate() {
        assert!((x - len * j as f64 / 5.0).abs() < 1e-6);
    }
    for e in r["endpoint_error"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() < 1e-6);
    }
    let norm = r["normalized_distance"].as_f64().unwrap();
    assert!((norm - len * 2.0 * 2f64.sqrt() / PI).abs() < 1e-12);
    for j in 0..6 {
        for ext in ["json", "csv", "obj"] {
            assert!(out.join(format!("step_{j:03}.{ext}")).exists(), "{j} {ext}");
        }
    }
    let nd = report(&["geodesic", s(&f.path("trefoil.json")), s(&f.path("circle.json")), "--normalize-diameter"]);
    assert_eq!(nd["distance"], nd["normalized_distance"]);
}

#[test]
fn geodesic_of_identical_inputs_is_constant() {
    let f = Fixtures::new();
    let out = f.path("same");
    let t = f.path("trefoil.json");
    let r = report(&["geodesic", s(&t), s(&t), "--steps", "4", "-o", s(&out)]);
    assert!(r["raw_distance"].as_f64().unwrap() < 1e-7);
    let first = std::fs::read_to_string(out.join("step_000.csv")).unwrap();
    let a: Vec<f64> = first.lines().skip(1).flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap())).collect();
    for j in 1..4 {
        let other = std::fs::read_to_string(out.join(format!("step_{j:03}.csv"))).unwrap();
        let b: Vec<f64> = other.lines().skip(1).flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap())).collect();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-7));
    }
}

#[test]
fn full_alignment_shortens_geodesic() {
    let f = Fixtures::new();
    let (t, c) = (f.path("trefoil.json"), f.path("circle.json"));
    let none = report(&["geodesic", s(&t), s(&c), "--align", "none"])["raw_distance"].as_f64().unwrap();
    let rot = report(&["geodesic", s(&t), s(&c), "--align", "rotation"])["raw_distance"].as_f64().unwrap();
    let out = f.path("aligned");
    let full = report(&["geodesic", s(&t), s(&c), "--align", "full", "--steps", "3", "--obj", "-o", s(&out)]);
    let d = full["raw_distance"].as_f64().unwrap();
    for j in 0..3 {
        assert!(out.join(format!("step_{j:03}.obj")).exists());
    }
    assert!((rot - none).abs() < 1e-10);
    assert!(d < none, "{d} vs {none}");
    let sweeps = full["alignment"]["sweeps"].as_array().unwrap();
    assert!(!sweeps.is_empty());
}

#[test]
fn lifted_files_give_identical_reports() {
    let f = Fixtures::new();
    let (t, c) = (f.path("trefoil.json"), f.path("circle.json"));
    let (tp, cp) = (f.path("t_phi.json"), f.path("c_phi.json"));
    report(&["lift", s(&t), "-o", s(&tp)]);
    report(&["lift", s(&c), "-o", s(&cp)]);
    let a = run(&["geodesic", s(&t), s(&c), "--json"]);
    let b = run(&["geodesic", s(&tp), s(&cp), "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let again = run(&["geodesic", s(&t), s(&c), "--json"]);
    assert_eq!(a.stdout, again.stdout);
    let csv = f.path("trefoil.csv");
    write_curve(&csv, &fixture(Fixture::Trefoil, 256).unwrap()).unwrap();
    let from_csv = run(&["geodesic", s(&csv), s(&c), "--json"]);
    assert_eq!(a.stdout, from_csv.stdout);
}

#[test]
fn parity_mismatch() {
    let f = Fixtures::new();
    let (t, l) = (f.path("trefoil.json"), f.path("linked.json"));
    let out = run(&["geodesic", s(&t), s(&l)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
    let r = report(&["geodesic", s(&t), s(&l), "--allow-parity-transfer"]);
    assert_eq!(r["parity_transfer"], true);
}

#[test]
fn orthogonal_planes_exit_3() {
    let f = Fixtures::new();
    let n = 64;
    let e = |m: i32| move |t: f64| C64::from_polar(1.0 / 2f64.sqrt(), PI * m as f64 * t);
    let p = ComplexCurve::from_fn(n, Periodicity::Periodic, |t| (e(0)(t), e(1)(t)));
    let q = ComplexCurve::from_fn(n, Periodicity::Periodic, |t| (e(2)(t), e(3)(t)));
    write_complex(&f.path("p.json"), &p).unwrap();
    write_complex(&f.path("q.json"), &q).unwrap();
    let out = run(&["--n-samples", "64", "geodesic", s(&f.path("p.json")), s(&f.path("q.json"))]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invariants_of_fixtures() {
    let f = Fixtures::new();
    let r = report(&["invariants", s(&f.path("circle.json"))]);
    assert!(r["tw"].as_f64().unwrap().abs() < 1e-8);
    assert!(r["wr"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(r["lk"], 0);
    assert_eq!(r["parity"], "even");
    let r = report(&["invariants", s(&f.path("linked.json"))]);
    assert_eq!(r["lk"], 1);
    assert_eq!(r["parity"], "odd");
    let r = report(&["--n-samples", "512", "invariants", s(&f.path("trefoil.json"))]);
    assert!(r["lk_residual"].as_f64().unwrap() < 0.05);
}

#[test]
fn framing_commands() {
    let f = Fixtures::new();
    let t = f.path("trefoil.json");
    let r = report(&["ctmf", s(&t), "-o", s(&f.path("ctmf.csv"))]);
    let rate = &r["twist_rate"];
    assert!((rate["max"].as_f64().unwrap() - rate["min"].as_f64().unwrap()).abs() < 1e-6);
    let again = report(&["invariants", s(&f.path("ctmf.csv"))]);
    assert!((again["tw2"].as_f64().unwrap() - r["tw2"].as_f64().unwrap()).abs() < 1e-6);
    let b = report(&["--n-samples", "1024", "bishop", s(&t), "-o", s(&f.path("bishop.json"))]);
    assert!(b["twist_rate"]["max"].as_f64().unwrap().abs() < 1e-6);
    assert!(b["holonomy"].is_number());
}

#[test]
fn torus_knot_and_momentum() {
    let f = Fixtures::new();
    let dir = f.path("tk");
    let r = report(&["torus-knot", "1", "1", "-o", s(&dir)]);
    assert_eq!(r["periodicity"], "periodic");
    assert!((r["weighted_total_twist"].as_f64().unwrap() + 1.0).abs() < 1e-8);
    let phi = dir.join("torus_1_1.json");
    assert!(phi.exists() && dir.join("torus_1_1_curve.json").exists());
    let m = report(&["momentum", s(&phi)]);
    for k in ["min", "max"] {
        assert!((m["loop_group"][k].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    assert!((m["s1"].as_f64().unwrap() - PI).abs() < 1e-8);
    let r = report(&["torus-knot", "2", "-3"]);
    assert_eq!(r["periodicity"], "antiperiodic");
    let c = report(&["criticality", s(&phi), "--directions", "8"]);
    assert!(c["max_derivative"].as_f64().unwrap() < 1e-5);
    let k = report(&["curvature-probe", s(&phi), "--planes", "3", "--seed", "4"]);
    assert!(k["summary"]["min"].as_f64().unwrap() >= -1e-3);
}

#[test]
fn align_recovers_synthetic_warp() {
    let f = Fixtures::new();
    let n = 256;
    let p = project_stiefel(&lift(&fixture(Fixture::Trefoil, n).unwrap()).unwrap()).unwrap();
    let rho = Reparam::from_fn(n, grid_param(20, n), |t| t + 0.25 / PI * (PI * t).sin(), |t| 1.0 + 0.25 * (PI * t).cos()).unwrap();
    let (sn, cs) = 0.4f64.sin_cos();
    let u = Mat2c([[C64::new(cs, 0.0), C64::new(-sn, 0.0)], [C64::new(sn, 0.0), C64::new(cs, 0.0)]]);
    let alpha = TwistLoop::from_fn(p.curve(), 0, |t| 0.3 * (PI * t).cos());
    let q = aligned(&p, &u, &rho, &alpha).unwrap();
    write_complex(&f.path("p.json"), p.curve()).unwrap();
    write_complex(&f.path("q.json"), q.curve()).unwrap();
    let out = f.path("warp.json");
    let r = report(&["align", s(&f.path("p.json")), s(&f.path("q.json")), "-o", s(&out)]);
    assert!(r["initial_distance"].as_f64().unwrap() > 0.1);
    assert!(r["distance"].as_f64().unwrap() < 1e-3, "{}", r["distance"]);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["rho"].as_array().unwrap().len(), doc["t"].as_array().unwrap().len());
}

#[test]
fn config_file_from_env() {
    let f = Fixtures::new();
    let cfg = f.path("cfg.json");
    std::fs::write(&cfg, r#"{"n_samples": 64, "steps": 3}"#).unwrap();
    let out = bin()
        .env("FRAMECURVE_CONFIG", &cfg)
        .args(["lift", s(&f.path("linked.json")), "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["n_samples"], 64);
    std::fs::write(&cfg, r#"{"n_samples": 48}"#).unwrap();
    let out = bin().env("FRAMECURVE_CONFIG", &cfg).args(["lift", s(&f.path("linked.json"))]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
