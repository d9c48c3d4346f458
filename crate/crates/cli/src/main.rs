use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nil3::geometry::{go_criterion, ComplexStructure, FrameVector, PregeodesicFamily};
use nil3::integrator::{integrate, StepConfig};
use nil3::lie::{Decomposition, NilPoint, OscVector};
use nil3::report::{write_csv, write_json, TrajectoryRow};
use nil3::trajectories::{
    arc_length_grid, closed_form_samples, homogeneous_generator, orbit_samples, InitialData,
    TrajectorySample,
};
use nil3::verify::{self, VerifyConfig};

/// How far from unit length an initial velocity may be before it is rejected
/// instead of normalized.
const UNIT_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "nil3",
    version,
    about = "Magnetic geodesics of the Heisenberg group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a contact magnetic geodesic.
    Emit {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
    },
    /// Sample the homogeneous orbit exp(sV)·p0 representing the geodesic.
    Orbit {
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Run the verification sweep and print its JSON report.
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Test whether exp(sW)·o is a pre-geodesic.
    Criterion {
        /// Components W1,W2,W3,W4.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value = "nil3")]
        decomposition: Decomposition,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Rk4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    q: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    z0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    s_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Upper bound on the RK4 step.
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    h: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl CurveArgs {
    fn initial_data(&self) -> Result<InitialData, Failure> {
        let values = [self.a, self.b, self.c, self.q, self.x0, self.y0, self.z0];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(usage("a, b, c, q, x0, y0, z0 must be finite"));
        }
        if !(self.s_max.is_finite() && self.s_max > 0.0) {
            return Err(usage(format!(
                "--s-max must be positive, got {}",
                self.s_max
            )));
        }
        if self.steps < 1 {
            return Err(usage("--steps must be at least 1"));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(usage(format!("--h must be positive, got {}", self.h)));
        }
        let v = FrameVector::new(self.a, self.b, self.c);
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_SLACK {
            return Err(usage(format!(
                "initial velocity ({}, {}, {}) has norm {norm}, expected 1",
                self.a, self.b, self.c
            )));
        }
        let start = NilPoint::new(self.x0, self.y0, self.z0);
        InitialData::new(start, (1.0 / norm) * v, self.q).map_err(|e| usage(e.to_string()))
    }

    fn grid(&self) -> Vec<f64> {
        arc_length_grid(self.s_max, self.steps)
    }
}

fn closed_samples(curve: &CurveArgs) -> Result<Vec<TrajectorySample>, Failure> {
    let init = curve.initial_data()?;
    Ok(closed_form_samples(&init, &curve.grid()))
}

/// RK4 with the largest step not above `--h` that divides the grid spacing.
fn rk4_samples(curve: &CurveArgs) -> Result<Vec<TrajectorySample>, Failure> {
    let init = curve.initial_data()?;
    let spacing = curve.s_max / curve.steps as f64;
    let per_row = (spacing / curve.h).ceil().max(1.0) as usize;
    let cfg = StepConfig::new(spacing / per_row as f64, per_row * curve.steps)
        .map_err(|e| usage(e.to_string()))?;
    let samples = integrate(&init, &cfg).map_err(|e| usage(e.to_string()))?;
    Ok(samples.into_iter().step_by(per_row).collect())
}

fn orbit(curve: &CurveArgs) -> Result<Vec<TrajectorySample>, Failure> {
    let init = curve.initial_data()?;
    let v = init.velocity;
    let generator = homogeneous_generator(v.a, v.b, v.c, init.charge);
    let samples = orbit_samples(&generator, &curve.grid()).map_err(|e| usage(e.to_string()))?;
    Ok(samples
        .into_iter()
        .map(|s| TrajectorySample::new(s.s, init.start * s.point, s.velocity))
        .collect())
}

fn render_rows(samples: &[TrajectorySample], format: Format) -> Result<String, Failure> {
    let rows: Vec<TrajectoryRow> = samples.iter().map(TrajectoryRow::from_sample).collect();
    match format {
        Format::Csv => Ok(write_csv(&rows)),
        Format::Json => Ok(write_json(&rows)),
        Format::Text => Err(usage("trajectories are written as csv or json")),
    }
}

fn output(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write to stdout: {e}"))),
    }
}

fn parse_w(text: &str) -> Result<OscVector, Failure> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("--w `{text}`: {e}")))?;
    match parts.as_slice() {
        [w1, w2, w3, w4] if parts.iter().all(|p| p.is_finite()) => {
            Ok(OscVector::new(*w1, *w2, *w3, *w4))
        }
        _ => Err(usage(format!(
            "--w expects four finite components, got `{text}`"
        ))),
    }
}

fn criterion(w: &str, decomposition: Decomposition, format: Format) -> Result<String, Failure> {
    let w = parse_w(w)?;
    let result = go_criterion(&w, decomposition);
    let family = PregeodesicFamily::classify(&w).map(|f| f.formula());
    Ok(match format {
        Format::Json => {
            let value = serde_json::json!({
                "is_pregeodesic": result.is_pregeodesic,
                "k": result.k,
                "family": family,
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&value).expect("json value")
            )
        }
        _ => {
            let k = result.k.map_or("none".to_string(), |k| format!("{k:?}"));
            format!(
                "is_pregeodesic: {}\nk: {k}\nfamily: {}\n",
                result.is_pregeodesic,
                family.unwrap_or("none")
            )
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Emit { curve, method } => {
            let samples = match method {
                Method::Closed => closed_samples(&curve)?,
                Method::Rk4 => rk4_samples(&curve)?,
            };
            output(&render_rows(&samples, curve.format)?, curve.out.as_ref())
        }
        Command::Orbit { curve } => output(
            &render_rows(&orbit(&curve)?, curve.format)?,
            curve.out.as_ref(),
        ),
        Command::Verify {
            seed,
            out,
            inject_fault,
        } => {
            let mut config = VerifyConfig::with_seed(seed);
            if inject_fault {
                config.j = ComplexStructure::perturbed(verify::FAULT_PERTURBATION);
            }
            let report = verify::run(&config);
            output(&report.to_json(), out.as_ref())?;
            if report.pass {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(Failure {
                    code: 1,
                    message: format!("verification failed: {}", failed.join(", ")),
                })
            }
        }
        Command::Criterion {
            w,
            decomposition,
            format,
        } => output(&criterion(&w, decomposition, format)?, None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("nil3: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
