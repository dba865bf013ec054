//! Command-line grammar and the value parsers behind it.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use momlab::Group;

#[derive(Debug, Parser)]
#[command(name = "momlab", version, about = "Moments of moments of characteristic polynomials of orthogonal and symplectic matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write records to FILE instead of standard output.
    #[arg(long, value_name = "FILE", global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments of moments MoM(m, α).
    Mom {
        #[command(subcommand)]
        method: MomMethod,
    },
    /// E∏|p(θ_j)|^{2α} at fixed angles.
    Joint {
        #[command(subcommand)]
        method: JointMethod,
    },
    /// Phase, growth exponent and (subcritical) constant.
    Phase(Spec),
    /// The integral I_{H(n)}(α, (0,π)^m).
    Integral(IntegralArgs),
    /// Log-log slope of given points, or of exact MoM over --n-list.
    Fit(FitArgs),
    /// Exact and Monte Carlo MoM side by side.
    Crosscheck(McArgs),
}

#[derive(Debug, Subcommand)]
pub enum MomMethod {
    /// Toeplitz+Hankel determinants under a graded quadrature.
    Exact(ExactArgs),
    /// Monte Carlo over Haar samples.
    Mc(McArgs),
    /// Leading-order growth law.
    Predict(PredictArgs),
}

#[derive(Debug, Subcommand)]
pub enum JointMethod {
    Exact(JointArgs),
    /// Leading order for separated angles.
    Predict(JointArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Spec {
    #[arg(long, value_parser = parse_group)]
    pub group: Group,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Sizes {
    /// Half-size parameter of the group.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated sizes, e.g. 50,100,200.
    #[arg(long = "n-list", value_parser = parse_n_list)]
    pub n_list: Option<NList>,
}

impl Sizes {
    pub fn values(&self) -> Vec<usize> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => vec![*n],
            (None, Some(l)) => l.0.clone(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub spec: Spec,
    #[command(flatten)]
    pub sizes: Sizes,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    pub quad_nodes: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub spec: Spec,
    #[command(flatten)]
    pub sizes: Sizes,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gauss-Legendre nodes per panel, for the inner integral and the exact route.
    #[arg(long)]
    pub quad_nodes: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub spec: Spec,
    #[command(flatten)]
    pub sizes: Sizes,
}

#[derive(Debug, Clone, Args)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub spec: Spec,
    #[command(flatten)]
    pub sizes: Sizes,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct JointArgs {
    #[arg(long, value_parser = parse_group)]
    pub group: Group,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Comma-separated angles in (0, π).
    #[arg(long, value_parser = parse_theta)]
    pub theta: Thetas,
    #[command(flatten)]
    pub sizes: Sizes,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Comma-separated n:value pairs.
    #[arg(long, value_parser = parse_points, conflicts_with_all = ["group", "alpha", "n_list"])]
    pub points: Option<Points>,
    #[arg(long, value_parser = parse_group, requires_all = ["alpha", "n_list"])]
    pub group: Option<Group>,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long = "n-list", value_parser = parse_n_list)]
    pub n_list: Option<NList>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NList(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct Thetas(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct Points(pub Vec<(f64, f64)>);

pub fn parse_group(s: &str) -> Result<Group, String> {
    s.parse::<Group>().map_err(|_| {
        let names: Vec<&str> = Group::ALL.iter().map(|g| g.name()).collect();
        format!("unknown group '{s}', expected one of {}", names.join("|"))
    })
}

fn items(s: &str) -> Result<Vec<&str>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("empty item in list '{s}'"));
    }
    Ok(parts)
}

fn real(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !x.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(x)
}

pub fn parse_n_list(s: &str) -> Result<NList, String> {
    items(s)?
        .into_iter()
        .map(|p| match p.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("'{p}' is not a positive integer")),
        })
        .collect::<Result<_, _>>()
        .map(NList)
}

pub fn parse_theta(s: &str) -> Result<Thetas, String> {
    let v = items(s)?.into_iter().map(real).collect::<Result<Vec<_>, _>>()?;
    if let Some(t) = v.iter().find(|&&t| !(t > 0.0 && t < PI)) {
        return Err(format!("angle {t} is outside (0, pi)"));
    }
    Ok(Thetas(v))
}

pub fn parse_points(s: &str) -> Result<Points, String> {
    let pts = items(s)?
        .into_iter()
        .map(|p| {
            let (n, v) = p.split_once(':').ok_or_else(|| format!("'{p}' is not of the form n:value"))?;
            Ok((real(n.trim())?, real(v.trim())?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    if pts.len() < 3 {
        return Err(format!("need at least 3 points, got {}", pts.len()));
    }
    Ok(Points(pts))
}
