//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse error, 3 numerical
//! failure, 4 usage error.

pub mod choi_file;
pub mod csv;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::channel::validate;
use crate::error::{Error, Result};
use crate::fidelity::{
    self, average_fidelity_choi, average_fidelity_via_kraus, compression_difference,
    constant_fidelity, constant_fidelity_necessary, decompose_qubit, equal_fidelity,
    min_gate_fidelity_with, MinFidelityMethod, MinFidelityOptions,
};
use crate::s1norm;
use crate::sampling::{random_channel, RngStream};
use crate::sdp;

use self::choi_file::{read_choi, write_choi};
use self::csv::{format_histogram, format_samples, SampleRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "gatefid",
    version,
    about = "Gate fidelity of quantum channels from Choi matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Sdp,
    Seesaw,
    Grid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Upper,
    Lower,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check complete positivity, trace preservation and unitality
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Average gate fidelity by the Choi and Kraus routes
    AvgFid { file: PathBuf },
    /// Minimum gate fidelity with a certified interval
    MinFid {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Sdp)]
        method: MethodArg,
        /// Target duality gap of the SDP
        #[arg(long, default_value_t = sdp::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Seed for see-saw restarts
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether two channels have the same gate fidelity everywhere
    EqualFid {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Decide whether the gate fidelity is constant
    ConstFid {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Write C_Q − C_R = r (C_E − C_E†) for equal-fidelity qubit channels
    Decompose {
        file_q: PathBuf,
        file_r: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// S(1)-norm of the operator stored in FILE
    S1norm {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample random channels and write average and minimum fidelities
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write a histogram of both columns
        #[arg(long)]
        hist: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

/// Runs the CLI, printing to stdout/stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io(_) => EXIT_PARSE,
        Error::NonConvergence { .. } | Error::Breakdown(_) => EXIT_NUMERICAL,
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::DimensionMismatch(_)
        | Error::NonFinite
        | Error::NotHermitian { .. }
        | Error::NotSymmetric { .. }
        | Error::NotPsd { .. }
        | Error::InvalidChannel(_)
        | Error::InvalidState(_)
        | Error::PatternViolation { .. } => EXIT_VALIDATION,
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.12}")
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate { file, tol } => {
            let c = read_choi(file)?;
            let rep = validate(&c, tol)?;
            writeln!(out, "n: {}", c.n())?;
            writeln!(out, "cp: {}", rep.cp)?;
            writeln!(out, "tp: {}", rep.tp)?;
            writeln!(out, "unital: {}", rep.unital)?;
            writeln!(out, "min_eigenvalue: {:.6e}", rep.min_eigenvalue)?;
            writeln!(out, "channel: {}", rep.is_channel())?;
            Ok(if rep.is_channel() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Command::AvgFid { file } => {
            let c = read_choi(file)?;
            writeln!(out, "choi: {}", fmt(average_fidelity_choi(&c)?))?;
            writeln!(out, "kraus: {}", fmt(average_fidelity_via_kraus(&c)?))?;
            writeln!(out, "chi00: {}", fmt(fidelity::chi00(&c)))?;
            Ok(EXIT_OK)
        }
        Command::MinFid {
            file,
            method,
            tol,
            seed,
        } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
            let c = read_choi(file)?;
            let method = match method {
                MethodArg::Sdp => MinFidelityMethod::SdpExact,
                MethodArg::Seesaw => MinFidelityMethod::PptAndSeesaw,
                MethodArg::Grid => MinFidelityMethod::Grid,
            };
            let rep = min_gate_fidelity_with(
                &c,
                &MinFidelityOptions {
                    method,
                    tolerance: tol,
                    seed,
                    ..Default::default()
                },
            )?;
            let (lo, hi) = rep.certified_interval;
            writeln!(out, "minimum: {}", fmt(rep.minimum))?;
            writeln!(out, "interval: [{}, {}]", fmt(lo), fmt(hi))?;
            writeln!(out, "width: {:.3e}", hi - lo)?;
            writeln!(out, "average: {}", fmt(rep.average))?;
            writeln!(out, "lambda1: {}", fmt(rep.lambda1))?;
            writeln!(out, "method: {}", rep.method)?;
            Ok(EXIT_OK)
        }
        Command::EqualFid {
            file_a,
            file_b,
            tol,
        } => {
            let a = read_choi(file_a)?;
            let b = read_choi(file_b)?;
            let eq = equal_fidelity(&a, &b, tol)?;
            writeln!(out, "{eq}")?;
            writeln!(out, "difference: {:.6e}", compression_difference(&a, &b)?)?;
            Ok(EXIT_OK)
        }
        Command::ConstFid { file, tol } => {
            let c = read_choi(file)?;
            match constant_fidelity(&c, tol) {
                Some(v) => writeln!(out, "constant: {}", fmt(v))?,
                None => writeln!(out, "non-constant")?,
            }
            writeln!(
                out,
                "necessary condition: {}",
                constant_fidelity_necessary(&c, tol)?
            )?;
            Ok(EXIT_OK)
        }
        Command::Decompose {
            file_q,
            file_r,
            out: path,
        } => {
            let q = read_choi(file_q)?;
            let r = read_choi(file_r)?;
            let d = decompose_qubit(&q, &r)?;
            write_choi(path, &d.e)?;
            writeln!(out, "r: {}", fmt(d.r))?;
            writeln!(out, "c1: {} {:+.12}i", fmt(d.c1.re), d.c1.im)?;
            writeln!(out, "c2: {} {:+.12}i", fmt(d.c2.re), d.c2.im)?;
            Ok(EXIT_OK)
        }
        Command::S1norm { file, mode, seed } => {
            let c = read_choi(file)?;
            let n = c.n();
            let x = c.mat();
            match mode {
                ModeArg::Exact => {
                    if n != 2 {
                        return Err(Error::InvalidArgument(
                            "exact mode needs a 4x4 operator (CHOI 2)".into(),
                        ));
                    }
                    let r = s1norm::s1_exact_qubit(x)?;
                    writeln!(out, "value: {}", fmt(r.value))?;
                    writeln!(out, "interval: [{}, {}]", fmt(r.lower), fmt(r.upper))?;
                }
                ModeArg::Upper => {
                    writeln!(out, "upper: {}", fmt(s1norm::s1_ppt_upper(x, n)?))?;
                }
                ModeArg::Lower => {
                    let r = s1norm::s1_seesaw_default(x, n, seed)?;
                    writeln!(out, "lower: {}", fmt(r.lower))?;
                    if let Some((phi, psi)) = &r.witness {
                        writeln!(out, "phi: {}", format_vector(phi.amplitudes()))?;
                        writeln!(out, "psi: {}", format_vector(psi.amplitudes()))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Sample {
            n,
            count,
            seed,
            out: path,
            threads,
            hist,
            bins,
        } => {
            if n < 1 {
                return Err(Error::InvalidArgument("--n must be at least 1".into()));
            }
            let rows = sample_rows(n, count, seed, threads)?;
            std::fs::write(&path, format_samples(&rows))?;
            if let Some(h) = hist {
                std::fs::write(h, format_histogram(&rows, bins))?;
            }
            let k = rows.len().max(1) as f64;
            let mean_avg = rows.iter().map(|r| r.avg_fidelity).sum::<f64>() / k;
            let mean_min = rows.iter().map(|r| r.min_fidelity).sum::<f64>() / k;
            writeln!(out, "rows: {}", rows.len())?;
            writeln!(out, "mean avg_fidelity: {}", fmt(mean_avg))?;
            writeln!(out, "mean min_fidelity: {}", fmt(mean_min))?;
            Ok(EXIT_OK)
        }
    }
}

fn format_vector(v: &[crate::linalg::C64]) -> String {
    v.iter()
        .map(|z| format!("{},{}", fmt(z.re), fmt(z.im)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Channel `i` is drawn from stream `i` of `seed`, so rows do not depend on
/// the thread count.
pub fn sample_rows(
    n: usize,
    count: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<SampleRow>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| sample_one(n, seed, i))
            .collect()
    })
}

pub fn sample_one(n: usize, seed: u64, index: u64) -> Result<SampleRow> {
    let mut rng = RngStream::new(seed, index);
    let c = random_channel(n, &mut rng);
    let rep = min_gate_fidelity_with(
        &c,
        &MinFidelityOptions {
            seed: seed ^ index,
            ..Default::default()
        },
    )?;
    Ok(SampleRow {
        index,
        avg_fidelity: rep.average,
        min_fidelity: rep.minimum,
    })
}
