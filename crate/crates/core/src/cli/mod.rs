//! Command-line front end.
//!
//! Every file argument is one of the JSON documents of the library: a cone
//! (`{"dim", "generators"}`), a measure (`{"atoms": [{"u", "mass"}]}`) or a body
//! (`{"cone"?, "atoms": [{"u", "h"}]}`). Exit codes: 0 success, 2 invalid input,
//! 3 solver non-convergence, 4 geometric certification failure.

mod stability;

pub use stability::{run_stability, StabilityRecord, StabilityRun, LADDER_RUNGS, MIN_TRIALS};

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::coconvex::{hausdorff_cfull, BodyDoc, CFullSet, VolumeMethod};
use crate::cone::{Cone, ConeDoc};
use crate::error::Error;
use crate::measures::{lp_distance, DiscreteMeasure, MeasureDoc};
use crate::solver::{
    dyadic_margins, gen_orthant_example, necessary_profile, solve, solve_exhaustion, SolveOptions,
};

#[derive(Debug, Parser)]
#[command(name = "coconvex", version, about = "Computations with coconvex sets in polyhedral cones")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Integral,
    Direct,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the C-full set with the given surface area measure.
    Solve {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        init_scale: f64,
    },
    /// Write the surface area measure of a body.
    Sam {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the Lévy–Prokhorov distance of two measures.
    LpDist { a: PathBuf, b: PathBuf },
    /// Print the Hausdorff distance of two bodies.
    Hausdorff {
        #[arg(long)]
        cone: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Print the coconvex volume of a body.
    Volume {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Integral)]
        method: MethodArg,
    },
    /// Print the a-priori bounds of a body over its own normals, as JSON.
    Bounds {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        bound: f64,
    },
    /// Solve on restrictions of the measure to decreasing boundary margins; CSV on stdout.
    Exhaust {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        margins: Vec<f64>,
    },
    /// Perturbation experiment; writes one CSV row per trial and rung.
    Stability {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        jitter: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the two band-area series of the orthant example.
    OrthantSeries {
        #[arg(long)]
        n: usize,
    },
    /// Print the boundary growth profile of a measure over dyadic margins, as JSON.
    NecessaryProfile {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        decades: u32,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => 3,
            Error::CertificationFailed(_)
            | Error::Degenerate
            | Error::Unbounded
            | Error::EmptyIntersection => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: String) -> Failure {
    Failure { code: 2, message }
}

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    rounded.to_string()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_cone(path: &Path) -> Result<Cone, Failure> {
    Ok(Cone::from_doc(&read_json::<ConeDoc>(path)?)?)
}

fn load_measure(path: &Path) -> Result<DiscreteMeasure, Failure> {
    Ok(DiscreteMeasure::from_doc(&read_json::<MeasureDoc>(path)?)?)
}

fn load_body(path: &Path, cone: &Cone) -> Result<CFullSet, Failure> {
    Ok(CFullSet::from_doc(&read_json::<BodyDoc>(path)?, Some(cone))?)
}

/// Runs one command, writing printed results to `out`.
pub fn execute(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| input(e.to_string());
    match command {
        Command::Solve {
            cone,
            measure,
            out: path,
            tol,
            max_iter,
            seed,
            init_scale,
        } => {
            let cone = load_cone(&cone)?;
            let phi = load_measure(&measure)?;
            if !(tol > 0.0 && init_scale > 0.0 && init_scale.is_finite()) {
                return Err(input("tol and init-scale must be positive".into()));
            }
            let opts = SolveOptions {
                tol,
                max_iter,
                seed,
                init_scale,
            };
            let rep = solve(&cone, &phi, &opts)?;
            write_json(&path, &rep.to_doc())?;
            if !rep.converged {
                return Err(Error::NoConvergence {
                    residual: rep.residual_inf,
                    iterations: rep.iterations,
                }
                .into());
            }
        }
        Command::Sam { cone, body, out: path } => {
            let cone = load_cone(&cone)?;
            let body = load_body(&body, &cone)?;
            write_json(&path, &body.surface_area_measure().to_doc())?;
        }
        Command::LpDist { a, b } => {
            let (a, b) = (load_measure(&a)?, load_measure(&b)?);
            writeln!(out, "{}", sig12(lp_distance(&a, &b))).map_err(io)?;
        }
        Command::Hausdorff { cone, a, b } => {
            let cone = load_cone(&cone)?;
            let (a, b) = (load_body(&a, &cone)?, load_body(&b, &cone)?);
            writeln!(out, "{}", sig12(hausdorff_cfull(&a, &b)?)).map_err(io)?;
        }
        Command::Volume { cone, body, method } => {
            let cone = load_cone(&cone)?;
            let body = load_body(&body, &cone)?;
            match method {
                MethodArg::Integral => {
                    let v = body.coconvex_volume(VolumeMethod::Integral)?;
                    writeln!(out, "{}", sig12(v)).map_err(io)?;
                }
                MethodArg::Direct => {
                    let v = body.coconvex_volume(VolumeMethod::Direct)?;
                    writeln!(out, "{}", sig12(v)).map_err(io)?;
                }
                MethodArg::Both => {
                    let i = body.coconvex_volume(VolumeMethod::Integral)?;
                    let d = body.coconvex_volume(VolumeMethod::Direct)?;
                    writeln!(out, "integral {}\ndirect {}", sig12(i), sig12(d)).map_err(io)?;
                }
            }
        }
        Command::Bounds { cone, body, bound } => {
            let cone = load_cone(&cone)?;
            let body = load_body(&body, &cone)?;
            let report = body.bounds_report(body.normals(), bound)?;
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            writeln!(out, "{text}").map_err(io)?;
        }
        Command::Exhaust { cone, measure, margins } => {
            let cone = load_cone(&cone)?;
            let phi = load_measure(&measure)?;
            let stages = solve_exhaustion(&cone, &phi, &margins, &SolveOptions::default())?;
            writeln!(
                out,
                "delta,atoms,converged,residual_inf,volume,volume_bound,bound_holds,clearance,hausdorff_to_previous"
            )
            .map_err(io)?;
            for s in &stages {
                let prev = s.hausdorff_to_previous.map(sig12).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    sig12(s.delta),
                    s.atom_count,
                    s.converged,
                    sig12(s.residual_inf),
                    sig12(s.volume),
                    sig12(s.volume_bound),
                    s.bound_holds,
                    sig12(s.clearance),
                    prev
                )
                .map_err(io)?;
            }
            if let Some(s) = stages.iter().find(|s| !s.converged) {
                return Err(Error::NoConvergence {
                    residual: s.residual_inf,
                    iterations: 0,
                }
                .into());
            }
        }
        Command::Stability {
            cone,
            measure,
            jitter,
            trials,
            seed,
            out: path,
        } => {
            let cone = load_cone(&cone)?;
            let phi = load_measure(&measure)?;
            let run = run_stability(&cone, &phi, jitter, trials, seed)?;
            let file = fs::File::create(&path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            let mut file = std::io::BufWriter::new(file);
            run.write_csv(&mut file).and_then(|_| file.flush()).map_err(io)?;
            let slope = run.slope.map(sig12).unwrap_or_else(|| "undefined".into());
            writeln!(out, "c_hat {}\nslope {slope}", sig12(run.c_hat)).map_err(io)?;
        }
        Command::OrthantSeries { n } => {
            let ex = gen_orthant_example(n)?;
            writeln!(
                out,
                "paper_series {}\nexact_series {}",
                sig12(ex.paper_series),
                sig12(ex.exact_series)
            )
            .map_err(io)?;
        }
        Command::NecessaryProfile { cone, measure, decades } => {
            let cone = load_cone(&cone)?;
            let phi = load_measure(&measure)?;
            let profile = necessary_profile(&phi, &cone, &dyadic_margins(decades))?;
            let text = serde_json::to_string_pretty(&profile).expect("serializable");
            writeln!(out, "{text}").map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `argv`, runs the command and maps failures to exit codes.
pub fn main_with_args<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
