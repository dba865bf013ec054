//! Batch front end for momlab: parses argv, runs the requested computations
//! on a worker pool and writes one record per result as JSON lines or CSV.

pub mod args;
pub mod record;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use momlab::asymptotics::{classify_phase, fit_scaling_exponent, i_hn_numeric, integral_quad, predict_joint_moment_separated};
use momlab::mom::{mom_exact_log, mom_mc, MoMParams, QuadSpec, DEFAULT_NODES_PER_PANEL};
use momlab::sampling::Seed;
use momlab::{joint_moment_exact, Group};
use rayon::prelude::*;
use thiserror::Error;

pub use args::{parse_group, parse_n_list, parse_points, parse_theta, Cli};
use args::{Command, FitArgs, JointArgs, JointMethod, McArgs, MomMethod, Spec};
pub use record::{write_records, ResultRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] momlab::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Io(_) => 1,
            _ => EXIT_USAGE,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Runs one invocation and returns the process exit code. Records go to
/// `stdout` (or `--out`) only once every computation has succeeded.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(stdout, "{e}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(&cli.command))).and_then(|records| emit(&cli, &records, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, records: &[ResultRecord], stdout: &mut dyn Write) -> Result<()> {
    match &cli.out {
        Some(path) => write_records(BufWriter::new(File::create(path)?), records, cli.format)?,
        None => write_records(stdout, records, cli.format)?,
    }
    Ok(())
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("MOMLAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => b = b.num_threads(k),
            _ => return Err(CliError::Usage(format!("MOMLAB_THREADS must be a positive integer, got '{v}'"))),
        }
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

/// Evaluates `f` for every size in parallel, keeping input order.
fn per_size<F>(ns: &[usize], f: F) -> Result<Vec<ResultRecord>>
where
    F: Fn(usize) -> Result<Vec<ResultRecord>> + Sync,
{
    let chunks: Vec<Result<Vec<ResultRecord>>> = ns
        .par_iter()
        .map(|&n| {
            let t = Instant::now();
            let mut recs = f(n)?;
            let ms = t.elapsed().as_millis() as u64;
            for r in &mut recs {
                r.runtime_ms = ms;
            }
            Ok(recs)
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn base(command: &str, method: &str, group: Group, m: u32, alpha: f64, n: Option<usize>) -> ResultRecord {
    ResultRecord { group: Some(group.name().into()), m: Some(m), alpha: Some(alpha), n, ..ResultRecord::new(command, method) }
}

fn quad(nodes: Option<usize>) -> QuadSpec {
    let q = QuadSpec::default();
    QuadSpec { nodes_per_panel: nodes.unwrap_or(q.nodes_per_panel), ..q }
}

fn exact_record(command: &str, s: &Spec, n: usize, nodes: Option<usize>) -> Result<ResultRecord> {
    let p = MoMParams::new(s.group, s.m, s.alpha)?;
    let v = mom_exact_log(p, n, quad(nodes))?;
    Ok(base(command, "exact", s.group, s.m, s.alpha, Some(n)).with_log_value(v.log_abs))
}

fn mc_record(command: &str, a: &McArgs, n: usize) -> Result<ResultRecord> {
    let s = &a.spec;
    let p = MoMParams::new(s.group, s.m, s.alpha)?;
    let est = mom_mc(p, n, a.samples, Seed::new(a.seed), a.quad_nodes.unwrap_or(DEFAULT_NODES_PER_PANEL))?;
    let mut r = base(command, "mc", s.group, s.m, s.alpha, Some(n)).with_value(est.mean);
    r.stderr = Some(est.stderr);
    r.seed = Some(a.seed);
    Ok(r)
}

fn predict_record(s: &Spec, n: Option<usize>) -> Result<ResultRecord> {
    let rep = classify_phase(s.group, s.m, s.alpha)?;
    let mut r = base("", "predict", s.group, s.m, s.alpha, n);
    r.phase = Some(rep.phase.name().into());
    r.exponent = Some(rep.exponent);
    r.log_power = Some(rep.log_power);
    r.constant = rep.constant;
    match (rep.constant, n) {
        (Some(c), Some(n)) => Ok(r.with_log_value(c.ln() + rep.exponent * (n as f64).ln())),
        (Some(c), None) => Ok(r.with_value(c)),
        _ => Ok(r),
    }
}

fn joint(a: &JointArgs, exact: bool) -> Result<Vec<ResultRecord>> {
    let m = a.theta.0.len() as u32;
    let (command, method) = ("joint", if exact { "exact" } else { "predict" });
    per_size(&a.sizes.values(), |n| {
        let r = base(command, method, a.group, m, a.alpha, Some(n));
        let r = if exact {
            let v = joint_moment_exact(a.group, n, a.alpha, &a.theta.0)?;
            if v.sign != 1 {
                return Err(momlab::Error::Consistency(format!("joint moment is not positive at n={n}")).into());
            }
            r.with_log_value(v.log_abs)
        } else {
            r.with_value(predict_joint_moment_separated(a.group, n, a.alpha, &a.theta.0)?)
        };
        Ok(vec![r])
    })
}

fn fit(a: &FitArgs) -> Result<Vec<ResultRecord>> {
    let t = Instant::now();
    let (mut records, points) = match (&a.points, a.group, a.alpha, &a.n_list) {
        (Some(p), _, _, _) => (Vec::new(), p.0.clone()),
        (None, Some(group), Some(alpha), Some(ns)) => {
            let s = Spec { group, m: a.m, alpha };
            let recs = per_size(&ns.0, |n| Ok(vec![exact_record("fit", &s, n, a.quad_nodes)?]))?;
            let pts = recs.iter().map(|r| (r.n.unwrap_or(0) as f64, r.log_value.unwrap_or(f64::NAN).exp())).collect();
            (recs, pts)
        }
        _ => return Err(CliError::Usage("fit needs either --points or --group, --alpha and --n-list".into())),
    };
    let (slope, _) = fit_scaling_exponent(&points)?;
    let mut r = ResultRecord::new("fit", "fit");
    if let (Some(g), Some(alpha)) = (a.group, a.alpha) {
        r = base("fit", "fit", g, a.m, alpha, None);
    }
    r.value = Some(slope);
    r.exponent = Some(slope);
    r.runtime_ms = t.elapsed().as_millis() as u64;
    records.push(r);
    Ok(records)
}

/// Runs a parsed command and collects its records in input order.
pub fn execute(command: &Command) -> Result<Vec<ResultRecord>> {
    match command {
        Command::Mom { method } => match method {
            MomMethod::Exact(a) => per_size(&a.sizes.values(), |n| Ok(vec![exact_record("mom", &a.spec, n, a.quad_nodes)?])),
            MomMethod::Mc(a) => per_size(&a.sizes.values(), |n| Ok(vec![mc_record("mom", a, n)?])),
            MomMethod::Predict(a) => per_size(&a.sizes.values(), |n| {
                Ok(vec![ResultRecord { command: "mom".into(), ..predict_record(&a.spec, Some(n))? }])
            }),
        },
        Command::Joint { method } => match method {
            JointMethod::Exact(a) => joint(a, true),
            JointMethod::Predict(a) => joint(a, false),
        },
        Command::Phase(s) => {
            let t = Instant::now();
            let r = predict_record(s, None)?;
            Ok(vec![ResultRecord { command: "phase".into(), runtime_ms: t.elapsed().as_millis() as u64, ..r }])
        }
        Command::Integral(a) => per_size(&a.sizes.values(), |n| {
            let s = &a.spec;
            let q = integral_quad();
            let q = QuadSpec { nodes_per_panel: a.quad_nodes.unwrap_or(q.nodes_per_panel), ..q };
            let v = i_hn_numeric(s.group, s.m, s.alpha, n, q)?;
            Ok(vec![base("integral", "integral", s.group, s.m, s.alpha, Some(n)).with_value(v)])
        }),
        Command::Fit(a) => fit(a),
        Command::Crosscheck(a) => per_size(&a.sizes.values(), |n| {
            Ok(vec![exact_record("crosscheck", &a.spec, n, a.quad_nodes)?, mc_record("crosscheck", a, n)?])
        }),
    }
}

/// Parses argv as a whole; the entry point exercised by the argv fuzz target.
pub fn parse_argv<I, T>(argv: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(argv)
}
