//! Large-n predictions: the subcritical constants C±(m,α), Selberg's
//! integral, the phase diagram, pointwise and uniform asymptotics of the
//! joint moments, and the regularised integrals I_{H(n)}.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use rayon::prelude::*;

use crate::determinant::{Family, Group, ThKind};
use crate::error::{Error, Result};
use crate::quadrature::{simplex_nodes, GaussLegendre, QuadSpec};
use crate::specfun::{log_barnes_g, log_gamma, LogValue};

/// The ± of the closed forms: + for the orthogonal family, − for Sp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl From<Family> for Sign {
    fn from(f: Family) -> Self {
        match f {
            Family::Orthogonal => Sign::Plus,
            Family::Symplectic => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Subcritical,
    Critical,
    Intermediate,
    SecondCritical,
    Supercritical,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Subcritical => "Subcritical",
            Phase::Critical => "Critical",
            Phase::Intermediate => "Intermediate",
            Phase::SecondCritical => "SecondCritical",
            Phase::Supercritical => "Supercritical",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Growth law MoM ≈ constant · n^exponent · (log n)^log_power, with n the
/// half-size parameter of the group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReport {
    pub phase: Phase,
    pub exponent: f64,
    pub log_power: u8,
    /// Known only in the subcritical phase.
    pub constant: Option<f64>,
}

/// (√(8m−3) ± 1)/(4m−2): where the integral I_{H(n)} starts to diverge.
pub fn critical_threshold(m: u32, sign: Sign) -> f64 {
    let m = m as f64;
    ((8.0 * m - 3.0).sqrt() + sign.value()) / (4.0 * m - 2.0)
}

/// Largest α for which C±(m,α) and I∞± are finite.
///
/// For m = 1 the Gamma factor Γ(1−α²)/Γ(1−α²) cancels and the bound is
/// (√5 ± 1)/2 rather than 1.
pub fn subcritical_threshold(m: u32, sign: Sign) -> f64 {
    let t = critical_threshold(m, sign);
    if m <= 1 {
        t
    } else {
        t.min(1.0 / (m as f64).sqrt())
    }
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    Ok(())
}

fn check_subcritical(m: u32, alpha: f64, sign: Sign) -> Result<()> {
    check_m(m)?;
    let t = subcritical_threshold(m, sign);
    if !(alpha >= 0.0 && alpha < t) {
        return Err(Error::Divergence(format!(
            "alpha={alpha} is outside [0, {t}) where the m={m} closed form with sign {} avoids the poles of Gamma",
            sign.symbol()
        )));
    }
    Ok(())
}

/// Selberg's integral
/// ∫_{[0,1]^m} ∏_{j<k}|x_j−x_k|^{2c} ∏_j x_j^{b−1}(1−x_j)^{a−1} dx
/// = ∏_{j=0}^{m−1} Γ(1+c+jc)Γ(a+jc)Γ(b+jc) / (Γ(1+c)Γ(a+b+c(m+j−1))).
pub fn selberg(m: u32, a: f64, b: f64, c: f64) -> Result<LogValue> {
    check_m(m)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Divergence(format!("Selberg integral needs a, b > 0 (a={a}, b={b})")));
    }
    if m > 1 {
        let mm = m as f64 - 1.0;
        let bound = (1.0 / m as f64).min(a / mm).min(b / mm);
        if !(c > -bound) {
            return Err(Error::Divergence(format!("Selberg integral diverges: c={c} <= -{bound}")));
        }
    }
    let mut ln = 0.0;
    let ln_g1c = if m > 1 { log_gamma(1.0 + c)? } else { 0.0 };
    for j in 0..m {
        let jf = j as f64;
        // the j = 0 ratio Γ(1+c)/Γ(1+c) is 1 for every c
        if j > 0 {
            ln += log_gamma(1.0 + c + jf * c)? - ln_g1c;
        }
        ln += log_gamma(a + jf * c)? + log_gamma(b + jf * c)?;
        ln -= log_gamma(a + b + c * (m as f64 + jf - 1.0))?;
    }
    Ok(LogValue::from_ln(ln))
}

/// I∞±(α,(0,π)^m) = ∫ ∏_{j<k}|2cosθ_j−2cosθ_k|^{−2α²} ∏_j(2sinθ_j)^{−α²±α} ∏dθ_j/π.
pub fn i_infinity(m: u32, alpha: f64, sign: Sign) -> Result<f64> {
    Ok(ln_i_infinity(m, alpha, sign)?.exp())
}

fn ln_i_infinity(m: u32, alpha: f64, sign: Sign) -> Result<f64> {
    check_subcritical(m, alpha, sign)?;
    let mf = m as f64;
    let a2 = alpha * alpha;
    let e = (1.0 - a2 + sign.value() * alpha) / 2.0;
    let s = selberg(m, e, e, -a2)?;
    Ok((-a2 * mf * mf + sign.value() * alpha * mf) * 4f64.ln() - mf * PI.ln() + s.log_abs)
}

/// ln(G(1+α)^{2m}/G(1+2α)^m)
pub fn ln_barnes_ratio(m: u32, alpha: f64) -> Result<f64> {
    let mf = m as f64;
    Ok(2.0 * mf * log_barnes_g(1.0 + alpha)? - mf * log_barnes_g(1.0 + 2.0 * alpha)?)
}

/// C±(m,α) = G(1+α)^{2m}/G(1+2α)^m · I∞±(α,(0,π)^m), written out as a
/// product of Gamma functions.
pub fn c_constant(m: u32, alpha: f64, sign: Sign) -> Result<f64> {
    check_subcritical(m, alpha, sign)?;
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let mf = m as f64;
    let a2 = alpha * alpha;
    let pm = sign.value() * alpha;
    let mut ln = ln_barnes_ratio(m, alpha)? + (-a2 * mf * mf + pm * mf) * 4f64.ln() - mf * PI.ln();
    let ln_g0 = log_gamma(1.0 - a2).ok();
    for j in 0..m {
        let jf = j as f64;
        if j > 0 {
            let g0 = ln_g0.ok_or_else(|| Error::Divergence(format!("Gamma(1-alpha^2) at alpha={alpha}")))?;
            ln += log_gamma(1.0 - a2 - jf * a2)? - g0;
        }
        ln += 2.0 * log_gamma((1.0 - a2 + pm) / 2.0 - jf * a2)?;
        ln -= log_gamma(1.0 + pm - a2 * (mf + jf))?;
    }
    Ok(ln.exp())
}

// |α − t| below this counts as sitting on the breakpoint t
const BREAKPOINT_TOL: f64 = 1e-11;

/// Phase, growth exponent and (subcritical) constant of MoM_{G}(m,α).
///
/// The constant is 2^{mα²}·C±(m,α), so that MoM ≈ constant · n^{mα²} with n
/// the half-size parameter for every group.
pub fn classify_phase(group: Group, m: u32, alpha: f64) -> Result<PhaseReport> {
    check_m(m)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be positive and finite, got {alpha}")));
    }
    let sign = Sign::from(group.family());
    let mf = m as f64;
    let a2 = alpha * alpha;
    let at = |t: f64| (alpha - t).abs() <= BREAKPOINT_TOL * t.max(1.0);
    let sub = |exponent: f64| -> Result<PhaseReport> {
        let c = c_constant(m, alpha, sign)?;
        Ok(PhaseReport { phase: Phase::Subcritical, exponent, log_power: 0, constant: Some(2f64.powf(mf * a2) * c) })
    };
    let report = |phase, exponent, log_power| Ok(PhaseReport { phase, exponent, log_power, constant: None });
    if sign == Sign::Plus && m == 2 {
        let t1 = 1.0 / SQRT_2;
        let t2 = (5f64.sqrt() + 1.0) / 4.0;
        return if at(t1) {
            report(Phase::Critical, 2.0 * a2, 1)
        } else if alpha < t1 {
            sub(2.0 * a2)
        } else if at(t2) {
            report(Phase::SecondCritical, 4.0 * a2 - 1.0, 1)
        } else if alpha < t2 {
            report(Phase::Intermediate, 4.0 * a2 - 1.0, 0)
        } else {
            report(Phase::Supercritical, 8.0 * a2 - 2.0 * alpha - 2.0, 0)
        };
    }
    let t = critical_threshold(m, sign);
    if at(t) {
        report(Phase::Critical, mf * a2, 1)
    } else if alpha < t {
        sub(mf * a2)
    } else {
        report(Phase::Supercritical, 2.0 * mf * mf * a2 - sign.value() * mf * alpha - mf, 0)
    }
}

/// Growth n^exponent (log n)^log_power of the integral I_{H(n)}(α,(0,π)^m).
pub fn integral_growth(group: Group, m: u32, alpha: f64) -> Result<(f64, u8)> {
    let r = classify_phase(group, m, alpha)?;
    let mf = m as f64;
    Ok((r.exponent - mf * alpha * alpha, r.log_power))
}

/// Leading order of E∏|p(θ_j)|^{2α} when the θ_j are apart from each other
/// and from {0, π}:
/// (2n)^{mα²} G(1+α)^{2m}/G(1+2α)^m ∏_{j<k}|2cosθ_j−2cosθ_k|^{−2α²} ∏_j(2sinθ_j)^{−α²±α}.
pub fn predict_joint_moment_separated(group: Group, n: usize, alpha: f64, thetas: &[f64]) -> Result<f64> {
    if thetas.is_empty() {
        return Err(Error::Precondition("need at least one angle".into()));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let m = thetas.len() as u32;
    let a2 = alpha * alpha;
    let pm = Sign::from(group.family()).value() * alpha;
    let mut ln = m as f64 * a2 * (2.0 * n as f64).ln() + ln_barnes_ratio(m, alpha)?;
    for (j, &tj) in thetas.iter().enumerate() {
        ln += (-a2 + pm) * (2.0 * tj.sin()).ln();
        for &tk in &thetas[j + 1..] {
            ln -= 2.0 * a2 * (2.0 * tj.cos() - 2.0 * tk.cos()).abs().ln();
        }
    }
    Ok(ln.exp())
}

/// ln F_n(θ) = −2α² Σ_{j<k} [ln(2sin|θ_j−θ_k|/2 + 1/n) + ln(2sin|θ_j+θ_k|/2 + 1/n)]
pub fn ln_f_n(alpha: f64, thetas: &[f64], n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let a2 = alpha * alpha;
    let mut ln = 0.0;
    for (j, &tj) in thetas.iter().enumerate() {
        for &tk in &thetas[j + 1..] {
            ln += (2.0 * (0.5 * (tj - tk).abs()).sin() + h).ln();
            ln += (2.0 * (0.5 * (tj + tk)).sin().abs() + h).ln();
        }
    }
    -2.0 * a2 * ln
}

// ln of the per-angle factors of the uniform asymptotics of D_n^{T+H,κ}
fn ln_kind_factor(kind: ThKind, alpha: f64, theta: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let a2 = alpha * alpha;
    let s = (2.0 * theta.sin() + h).ln();
    let sh = (2.0 * (0.5 * theta).sin() + h).ln();
    let ch = (2.0 * (0.5 * theta).cos() + h).ln();
    match kind {
        ThKind::One => (-a2 + alpha) * s,
        ThKind::Two => (-a2 - alpha) * s,
        ThKind::Three => (-a2 - alpha) * sh + (-a2 + alpha) * ch,
        ThKind::Four => (-a2 + alpha) * sh + (-a2 - alpha) * ch,
    }
}

/// n^{mα²} F_n(θ) ∏_j (per-kind factors): D_n^{T+H,κ}(f) up to a factor
/// bounded above and below uniformly in θ.
pub fn envelope_uniform(kind: ThKind, alpha: f64, thetas: &[f64], n: usize) -> f64 {
    let m = thetas.len() as f64;
    let mut ln = m * alpha * alpha * (n as f64).ln() + ln_f_n(alpha, thetas, n);
    for &t in thetas {
        ln += ln_kind_factor(kind, alpha, t, n);
    }
    ln.exp()
}

// ln of the integrand of I_{H(n)} at one point, without the 1/π^m
fn ln_i_integrand(group: Group, alpha: f64, thetas: &[f64], n: usize) -> f64 {
    let mut ln = ln_f_n(alpha, thetas, n);
    for &t in thetas {
        ln += match group {
            Group::SoEven => ln_kind_factor(ThKind::One, alpha, t, n),
            Group::Sp => ln_kind_factor(ThKind::Two, alpha, t, n),
            Group::SoMinusEven => ln_kind_factor(ThKind::Two, alpha, t, n) + 2.0 * alpha * (2.0 * t.sin()).ln(),
            Group::SoOdd => ln_kind_factor(ThKind::Three, alpha, t, n) + 2.0 * alpha * (2.0 * (0.5 * t).sin()).ln(),
            Group::SoMinusOdd => ln_kind_factor(ThKind::Four, alpha, t, n) + 2.0 * alpha * (2.0 * (0.5 * t).cos()).ln(),
            Group::OEven | Group::OOdd => unreachable!("mixtures are split before integration"),
        };
    }
    ln
}

/// Quadrature settings for [`i_hn_numeric`]: grading depth ⌈log₂ n⌉ + 4.
pub fn integral_quad() -> QuadSpec {
    QuadSpec { extra_depth: 4, ..QuadSpec::default() }
}

/// I_{H(n)}(α,(0,π)^m) by graded tensor quadrature over the ordered simplex.
/// O(N) mixtures give the mean of their two components.
pub fn i_hn_numeric(group: Group, m: u32, alpha: f64, n: usize, quad: QuadSpec) -> Result<f64> {
    if m == 0 || m > 3 {
        return Err(Error::Precondition(format!("tensor quadrature needs 1 <= m <= 3, got m={m}")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if !(alpha > -0.5) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be finite and > -1/2, got {alpha}")));
    }
    if let Some((plus, minus)) = group.components() {
        return Ok(0.5 * (i_hn_numeric(plus, m, alpha, n, quad)? + i_hn_numeric(minus, m, alpha, n, quad)?));
    }
    let base = i_hn_pass(group, m, alpha, n, &quad);
    if !quad.verify {
        return Ok(base);
    }
    let fine = i_hn_pass(group, m, alpha, n, &quad.refined());
    let rel = (base / fine - 1.0).abs();
    if !(rel <= quad.rel_tol) {
        return Err(Error::Accuracy(format!(
            "I_H(n) quadrature not converged for {group} n={n} m={m} alpha={alpha}: relative change {rel:.2e}"
        )));
    }
    Ok(fine)
}

fn i_hn_pass(group: Group, m: u32, alpha: f64, n: usize, quad: &QuadSpec) -> f64 {
    let rule = GaussLegendre::new(quad.nodes_per_panel);
    let nodes = simplex_nodes(m as usize, &rule, quad.depth(n), std::f64::consts::PI);
    let terms: Vec<f64> = nodes.par_iter().map(|(t, w)| w * ln_i_integrand(group, alpha, t, n).exp()).collect();
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    terms.iter().sum::<f64>() * fact / PI.powi(m as i32)
}

/// Least-squares slope of ln value against ln n, with its standard error.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 points, got {}", points.len())));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(points[0].0 > 0.0) {
        return Err(Error::Precondition("n values must be positive and strictly increasing".into()));
    }
    if let Some(&(n, v)) = points.iter().find(|p| !(p.1 > 0.0) || !p.1.is_finite()) {
        return Err(Error::Domain(format!("value at n={n} is not positive: {v}")));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / k;
    let ym = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let icpt = ym - slope * xm;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    Ok((slope, (ssr / (k - 2.0) / sxx).sqrt()))
}
