use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::commands::{self, GeodesicOptions};
use crate::config::{AlignMode, JobConfig};
use crate::error::Result;
use crate::fixtures::Fixture;

/// Shape analysis of framed loops through their frame-Hopf coordinates.
#[derive(Debug, Parser)]
#[command(name = "framecurve", version)]
pub struct Cli {
    /// Grid intervals; inputs on other grids are resampled.
    #[arg(long, global = true)]
    pub n_samples: Option<usize>,
    /// Geometric validation tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lift a framed curve to complex coordinates.
    Lift {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample the geodesic between two framed loops.
    Geodesic {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        align: Option<AlignMode>,
        /// Report distances scaled so the diameter is 2.
        #[arg(long)]
        normalize_diameter: bool,
        /// Write an OBJ tube mesh per step.
        #[arg(long)]
        obj: bool,
        #[arg(long)]
        tube_radius: Option<f64>,
        #[arg(long)]
        allow_parity_transfer: bool,
        /// Output directory for per-step files.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Length, twist, writhe, linking number and parity.
    Invariants { input: PathBuf },
    /// Replace the framing by the constant twist minimizing framing.
    Ctmf {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replace the framing by parallel transport of the initial frame.
    Bishop {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Clifford torus knot with `h` turns and twist `k`.
    TorusKnot {
        h: u32,
        #[arg(allow_hyphen_values = true)]
        k: i64,
        /// Output directory.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Align the second loop to the first over rotations, reparameterizations and frame twists.
    Align {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        allow_parity_transfer: bool,
        /// Write the recovered reparameterization and twist loop.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Momentum maps of the unitary, loop, reparameterization and basepoint actions.
    Momentum { input: PathBuf },
    /// Sectional curvature on random horizontal planes.
    CurvatureProbe {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        planes: usize,
    },
    /// Directional derivatives of the weighted total twist.
    Criticality {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
    /// Write a reference framed loop.
    Fixture {
        #[arg(value_enum)]
        name: Fixture,
        out: PathBuf,
    },
}

impl Cli {
    /// Applies global and command flags on top of `base`.
    pub fn config(&self, base: JobConfig) -> Result<JobConfig> {
        let mut cfg = base;
        if let Some(n) = self.n_samples {
            cfg.n_samples = n;
        }
        if let Some(t) = self.tol {
            cfg.tolerances.geom = t;
            cfg.tolerances.field = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Command::Geodesic {
            steps,
            align,
            obj,
            tube_radius,
            ..
        } = &self.command
        {
            if let Some(s) = steps {
                cfg.steps = *s;
            }
            if let Some(a) = align {
                cfg.align = *a;
            }
            if *obj {
                cfg.export.obj = true;
            }
            if let Some(r) = tube_radius {
                cfg.export.tube_radius = *r;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(cli: &Cli, base: JobConfig) -> Result<Value> {
    let cfg = cli.config(base)?;
    match &cli.command {
        Command::Lift { input, out } => commands::lift_cmd(input, out.as_deref(), &cfg),
        Command::Geodesic {
            first,
            second,
            normalize_diameter,
            allow_parity_transfer,
            out,
            ..
        } => {
            let opts = GeodesicOptions {
                normalize_diameter: *normalize_diameter,
                allow_parity_transfer: *allow_parity_transfer,
                out: out.clone().or_else(|| cfg.output_dir.clone()),
            };
            commands::geodesic_cmd(first, second, &opts, &cfg)
        }
        Command::Invariants { input } => commands::invariants_cmd(input, &cfg),
        Command::Ctmf { input, out } => commands::ctmf_cmd(input, out.as_deref(), &cfg),
        Command::Bishop { input, out } => commands::bishop_cmd(input, out.as_deref(), &cfg),
        Command::TorusKnot { h, k, out } => commands::torus_knot_cmd(*h, *k, out.as_deref(), &cfg),
        Command::Align {
            first,
            second,
            allow_parity_transfer,
            out,
        } => commands::align_cmd(first, second, *allow_parity_transfer, out.as_deref(), &cfg),
        Command::Momentum { input } => commands::momentum_cmd(input, &cfg),
        Command::CurvatureProbe { input, planes } => commands::curvature_probe_cmd(input, *planes, &cfg),
        Command::Criticality { input, directions } => commands::criticality_cmd(input, *directions, &cfg),
        Command::Fixture { name, out } => commands::fixture_cmd(*name, out, &cfg),
    }
}

/// Indented `key: value` rendering of a report.
pub fn render_text(v: &Value) -> String {
    fn walk(v: &Value, indent: usize, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    match x {
                        Value::Object(_) => {
                            out.push_str(&format!("{:indent$}{k}:\n", ""));
                            walk(x, indent + 2, out);
                        }
                        Value::Array(a) if a.iter().any(Value::is_object) => {
                            out.push_str(&format!("{:indent$}{k}:\n", ""));
                            for (i, e) in a.iter().enumerate() {
                                out.push_str(&format!("{:w$}[{i}]\n", "", w = indent + 2));
                                walk(e, indent + 4, out);
                            }
                        }
                        _ => out.push_str(&format!("{:indent$}{k}: {x}\n", "")),
                    }
                }
            }
            other => out.push_str(&format!("{:indent$}{other}\n", "")),
        }
    }
    let mut s = String::new();
    walk(v, 0, &mut s);
    s
}
