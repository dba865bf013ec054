//! Moments of moments E[((1/2π)∫|p(θ;U)|^{2α}dθ)^m], by Monte Carlo over
//! Haar samples and by integrating exact joint moments over (0,π)^m.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::determinant::{joint_moment_from_coeffs, required_order, Group};
use crate::error::{Error, Result};
pub use crate::quadrature::QuadSpec;
use crate::quadrature::{graded_breakpoints, simplex_nodes, GaussLegendre, Grading};
use crate::sampling::{eigenangles, sample_group, EigenAngles, Seed};
use crate::specfun::LogValue;
use crate::symbol::{fourier_coeffs_graded, SingularitySet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoMParams {
    pub group: Group,
    pub m: u32,
    pub alpha: f64,
}

impl MoMParams {
    pub fn new(group: Group, m: u32, alpha: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("moment order m must be at least 1".into()));
        }
        if !(alpha > -0.5) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be finite and > -1/2, got {alpha}")));
        }
        Ok(MoMParams { group, m, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: Seed,
}

pub const DEFAULT_NODES_PER_PANEL: usize = 16;

// refinement toward both ends of every panel of the inner integral
const INNER_GRADING: usize = 2;

/// (1/2π)∫₀^{2π}|p(θ;U)|^{2α}dθ for a matrix with the given spectrum.
///
/// The integrand is even in θ, so the integral runs over [0, π] with panels
/// split at every eigenangle.
pub fn inner_integral(angles: &EigenAngles, alpha: f64, nodes_per_panel: usize) -> f64 {
    let rule = GaussLegendre::new(nodes_per_panel.max(4));
    inner_integral_with(angles, alpha, &rule)
}

fn inner_integral_with(angles: &EigenAngles, alpha: f64, rule: &GaussLegendre) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let mut ends = Vec::with_capacity(angles.free_angles.len() + 2);
    ends.push(0.0);
    ends.extend(angles.free_angles.iter().copied().filter(|&t| t > 0.0 && t < PI));
    ends.push(PI);
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    // (2−2cos(θ−t))(2−2cos(θ+t)) = (2cos t − 2cos θ)²
    let cs: Vec<f64> = angles.free_angles.iter().map(|t| 2.0 * t.cos()).collect();
    let fp = 2 * angles.fixed_plus as i32;
    let fm = 2 * angles.fixed_minus as i32;
    let mut total = 0.0;
    for w in ends.windows(2) {
        let breaks = graded_breakpoints(w[0], w[1], Grading::both(INNER_GRADING), f64::INFINITY);
        total += rule.integrate_panels(&breaks, |theta| {
            let x = 2.0 * theta.cos();
            let edge = (2.0 * (0.5 * theta).sin()).powi(fp) * (2.0 * (0.5 * theta).cos()).powi(fm);
            if cs.len() <= 32 {
                let p: f64 = cs.iter().map(|c| c - x).product();
                (p * p * edge).powf(alpha)
            } else {
                // chunked so the running product stays far from overflow
                let ln: f64 = cs.chunks(32).map(|ch| ch.iter().map(|c| (c - x).abs()).product::<f64>().ln()).sum();
                (alpha * (2.0 * ln + edge.ln())).exp()
            }
        });
    }
    total / PI
}

/// Monte Carlo estimate of MoM for a single power m.
pub fn mom_mc(p: MoMParams, n: usize, samples: usize, seed: Seed, nodes_per_panel: usize) -> Result<MCEstimate> {
    Ok(mom_mc_powers(p.group, p.alpha, &[p.m as f64], n, samples, seed, nodes_per_panel)?[0])
}

/// Monte Carlo estimates of E[X^m] for several powers m from one set of
/// samples of the inner integral X. Real m > 0 is accepted.
///
/// O(N) mixtures are stratified: half the samples come from each component
/// and the two means are averaged.
pub fn mom_mc_powers(
    group: Group,
    alpha: f64,
    powers: &[f64],
    n: usize,
    samples: usize,
    seed: Seed,
    nodes_per_panel: usize,
) -> Result<Vec<MCEstimate>> {
    if samples < 100 {
        return Err(Error::Precondition(format!("need at least 100 samples, got {samples}")));
    }
    if n == 0 {
        return Err(Error::Precondition("group size n must be at least 1".into()));
    }
    if let Some(&bad) = powers.iter().find(|&&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::Precondition(format!("moment order must be positive, got {bad}")));
    }
    if !(alpha > -0.5) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and > -1/2, got {alpha}")));
    }
    let rule = GaussLegendre::new(nodes_per_panel.max(4));
    let estimate = |g: Group, range: std::ops::Range<u64>| -> Result<Vec<(f64, f64)>> {
        let xs: Vec<f64> = range
            .into_par_iter()
            .map(|i| {
                let mut rng = seed.rng(i);
                let u = sample_group(g, n, &mut rng)?;
                let ea = eigenangles(&u, g)?;
                Ok(inner_integral_with(&ea, alpha, &rule))
            })
            .collect::<Result<_>>()?;
        Ok(powers.iter().map(|&m| mean_and_stderr(xs.iter().map(|x| x.powf(m)))).collect())
    };
    let stats = match group.components() {
        None => estimate(group, 0..samples as u64)?,
        Some((plus, minus)) => {
            let half = (samples / 2) as u64;
            let a = estimate(plus, 0..half)?;
            let b = estimate(minus, half..samples as u64)?;
            a.iter()
                .zip(&b)
                .map(|(&(m1, s1), &(m2, s2))| (0.5 * (m1 + m2), 0.5 * (s1 * s1 + s2 * s2).sqrt()))
                .collect()
        }
    };
    Ok(stats.into_iter().map(|(mean, stderr)| MCEstimate { mean, stderr, samples, seed }).collect())
}

// sequential two-pass mean and standard error; order fixed by the sample index
fn mean_and_stderr<I: Iterator<Item = f64> + Clone>(xs: I) -> (f64, f64) {
    let (count, sum) = xs.clone().fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
    let mean = sum / count as f64;
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    let var = ss / (count as f64 - 1.0);
    (mean, (var / count as f64).sqrt())
}

/// MoM through the Fubini reduction: m! ∫_{θ₁<…<θ_m} E∏|p(θ_j)|^{2α} ∏dθ_j/π.
pub fn mom_exact(p: MoMParams, n: usize, quad: QuadSpec) -> Result<f64> {
    Ok(mom_exact_log(p, n, quad)?.to_f64())
}

/// [`mom_exact`] in log-domain.
pub fn mom_exact_log(p: MoMParams, n: usize, quad: QuadSpec) -> Result<LogValue> {
    if p.m == 0 || p.m > 3 {
        return Err(Error::Precondition(format!("exact route needs 1 <= m <= 3, got m={}", p.m)));
    }
    if n == 0 {
        return Err(Error::Precondition("group size n must be at least 1".into()));
    }
    if quad.nodes_per_panel < 2 {
        return Err(Error::Precondition("need at least 2 quadrature nodes per panel".into()));
    }
    let base = simplex_integral(p, n, &quad)?;
    if !quad.verify {
        return Ok(base);
    }
    let fine = simplex_integral(p, n, &quad.refined())?;
    let rel = ((base.log_abs - fine.log_abs).exp() - 1.0).abs();
    if !(rel <= quad.rel_tol) {
        return Err(Error::Accuracy(format!(
            "quadrature not converged for {} n={n} m={} alpha={}: relative change {rel:.2e} under refinement",
            p.group, p.m, p.alpha
        )));
    }
    Ok(fine)
}

fn simplex_integral(p: MoMParams, n: usize, quad: &QuadSpec) -> Result<LogValue> {
    let m = p.m as usize;
    let rule = GaussLegendre::new(quad.nodes_per_panel);
    let nodes = simplex_nodes(m, &rule, quad.depth(n), quad.max_width(n));
    let k = required_order(n);
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|(thetas, w)| {
            let s = SingularitySet::new(p.alpha, thetas.clone())?;
            let fs = fourier_coeffs_graded(&s, k);
            let j = joint_moment_from_coeffs(p.group, n, &s, &fs)?;
            Ok(if j.is_zero() { f64::NEG_INFINITY } else { j.log_abs + w.ln() })
        })
        .collect::<Result<_>>()?;
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(LogValue::ZERO);
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    let ln_fact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
    Ok(LogValue::from_ln(max + sum.ln() + ln_fact - m as f64 * PI.ln()))
}
