//! The even Fisher–Hartwig symbol
//! f(e^{iθ}) = ∏_j |e^{iθ} − e^{iθ_j}|^{2α} |e^{iθ} − e^{−iθ_j}|^{2α}
//! and its Fourier coefficients.
//!
//! Three coefficient routes are provided:
//! * [`fourier_coeffs_graded`]: composite Gauss–Legendre on panels graded
//!   toward every singularity. This is the route used for determinants.
//! * [`fourier_coeffs_quadrature`]: the uniform-grid discrete transform.
//! * [`fourier_coeffs_convolution`]: closed-form single-factor coefficients
//!   convolved together.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quadrature::{graded_breakpoints, GaussLegendre, Grading};
use crate::specfun::log_gamma;

/// Strictly increasing singularity angles in (0, π) together with the
/// exponent α.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySet {
    alpha: f64,
    thetas: Vec<f64>,
}

impl SingularitySet {
    pub fn new(alpha: f64, thetas: Vec<f64>) -> Result<Self> {
        if alpha.is_nan() || alpha <= -0.5 {
            return Err(Error::Precondition(format!("alpha must exceed -1/2, got {alpha}")));
        }
        if thetas.is_empty() {
            return Err(Error::Precondition("at least one singularity is required".into()));
        }
        if thetas.iter().any(|t| !(*t > 0.0 && *t < PI)) {
            return Err(Error::Precondition("singularities must lie in (0, pi)".into()));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition(
                "singularities must be strictly increasing (coincident angles are not allowed)".into(),
            ));
        }
        Ok(SingularitySet { alpha, thetas })
    }

    /// Sorts the angles first; still rejects coincident ones.
    pub fn from_unsorted(alpha: f64, mut thetas: Vec<f64>) -> Result<Self> {
        thetas.sort_by(f64::total_cmp);
        Self::new(alpha, thetas)
    }

    pub fn m(&self) -> usize {
        self.thetas.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    // ln f(e^{iθ}); -inf at a singularity.
    fn ln_symbol(&self, theta: f64) -> f64 {
        let mut prod = 1.0;
        for &t in &self.thetas {
            // (2 - 2cos(θ-t))(2 - 2cos(θ+t)) = (4 sin((θ-t)/2) sin((θ+t)/2))^2
            prod *= 4.0 * (0.5 * (theta - t)).sin() * (0.5 * (theta + t)).sin();
        }
        2.0 * self.alpha * prod.abs().ln()
    }
}

/// Even real coefficient sequence f_0..f_K (f_{−j} = f_j).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<f64>,
}

impl FourierSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Fourier series needs f_0");
        FourierSeries { coeffs }
    }

    /// Coefficients of the constant symbol 1.
    pub fn delta(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[0] = 1.0;
        FourierSeries { coeffs }
    }

    /// Truncation order K.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// f_j for any integer j with |j| ≤ K.
    pub fn get(&self, j: i64) -> f64 {
        self.coeffs[j.unsigned_abs() as usize]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Partial Fourier sum at θ.
    pub fn eval(&self, theta: f64) -> f64 {
        self.coeffs[0] + 2.0 * self.coeffs[1..].iter().enumerate().map(|(j, c)| c * ((j + 1) as f64 * theta).cos()).sum::<f64>()
    }
}

/// Pointwise value of the symbol; exactly 0 at θ = ±θ_j (α > 0).
pub fn symbol_eval(s: &SingularitySet, theta: f64) -> f64 {
    if s.alpha == 0.0 {
        return 1.0;
    }
    s.ln_symbol(theta).exp()
}

/// Which route produces the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FourierMethod {
    #[default]
    Graded,
    Uniform { grid_size: usize },
    Convolution,
}

pub fn fourier_coeffs(s: &SingularitySet, k: usize, method: FourierMethod) -> Result<FourierSeries> {
    match method {
        FourierMethod::Graded => Ok(fourier_coeffs_graded(s, k)),
        FourierMethod::Uniform { grid_size } => fourier_coeffs_quadrature(s, k, grid_size),
        FourierMethod::Convolution => fourier_coeffs_convolution(s, k),
    }
}

const GRADED_POINTS: usize = 10;

// Smallest panel next to a singularity: a zero of order 2α on a panel of
// width h costs about h^{1+2α} in the integral.
fn graded_min_width(alpha: f64) -> f64 {
    if alpha > 0.0 {
        1e-16f64.powf(1.0 / (1.0 + 2.0 * alpha)).min(1e-4)
    } else {
        1e-18
    }
}

/// f_j = (1/π) ∫₀^π f(θ) cos(jθ) dθ on panels graded toward each θ_j.
///
/// Panels are at most 8/K wide so that cos(jθ) is resolved for j ≤ K.
pub fn fourier_coeffs_graded(s: &SingularitySet, k: usize) -> FourierSeries {
    if s.alpha == 0.0 {
        return FourierSeries::delta(k);
    }
    let rule = GaussLegendre::new(GRADED_POINTS);
    let max_width = (8.0 / k.max(1) as f64).min(PI / 8.0);
    let mut ends = Vec::with_capacity(s.m() + 2);
    ends.push(0.0);
    ends.extend_from_slice(&s.thetas);
    ends.push(PI);

    let mut coeffs = vec![0.0; k + 1];
    let mut comp = vec![0.0; k + 1];
    let mut rot = Vec::with_capacity(k + 1);
    let min_width = graded_min_width(s.alpha);
    for (i, w) in ends.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let depth = (half / min_width).log2().ceil().clamp(1.0, 60.0) as usize;
        let grading = Grading {
            toward_start: i > 0,
            toward_end: i + 1 < ends.len() - 1,
            ratio: 0.5,
            depth,
        };
        let breaks = graded_breakpoints(a, b, grading, max_width);
        for p in breaks.windows(2) {
            for (theta, wt) in rule.mapped(p[0], p[1]) {
                let v = wt * s.ln_symbol(theta).exp() / PI;
                accumulate_cos(&mut coeffs, &mut comp, &mut rot, theta, v);
            }
        }
    }
    for (c, e) in coeffs.iter_mut().zip(&comp) {
        *c += e;
    }
    FourierSeries { coeffs }
}

// coeffs[j] += v cos(jθ) with Neumaier compensation in `comp`; cos(jθ) comes
// from a complex rotation re-seeded every 16 steps.
fn accumulate_cos(coeffs: &mut [f64], comp: &mut [f64], scratch: &mut Vec<f64>, theta: f64, v: f64) {
    let k = coeffs.len();
    scratch.clear();
    let step = Complex64::new(theta.cos(), theta.sin());
    let mut z = Complex64::new(1.0, 0.0);
    for j in 0..k {
        if j % 16 == 0 && j > 0 {
            let a = j as f64 * theta;
            z = Complex64::new(a.cos(), a.sin());
        }
        scratch.push(z.re);
        z *= step;
    }
    for ((c, e), cs) in coeffs.iter_mut().zip(comp.iter_mut()).zip(scratch.iter()) {
        let x = v * cs;
        let t = *c + x;
        *e += if c.abs() >= x.abs() { (*c - t) + x } else { (x - t) + *c };
        *c = t;
    }
}

/// Uniform-grid discrete transform of the sampled symbol.
///
/// `grid_size` must be a power of two and at least 8·max(K, ⌈16m(1+α)⌉).
/// The transform of an even real sample set is real; imaginary parts above
/// 1e-8 are reported as an accuracy error.
pub fn fourier_coeffs_quadrature(s: &SingularitySet, k: usize, grid_size: usize) -> Result<FourierSeries> {
    let need = 8 * k.max((16.0 * s.m() as f64 * (1.0 + s.alpha)).ceil() as usize);
    if !grid_size.is_power_of_two() || grid_size < need {
        return Err(Error::Precondition(format!(
            "grid size {grid_size} must be a power of two and at least {need}"
        )));
    }
    let n = grid_size;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(symbol_eval(s, 2.0 * PI * i as f64 / n as f64), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let max_imag = buf[..=k].iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    if max_imag > 1e-8 {
        return Err(Error::Accuracy(format!("imaginary residual {max_imag:.3e} in uniform-grid transform")));
    }
    Ok(FourierSeries { coeffs: buf[..=k].iter().map(|c| c.re * scale).collect() })
}

/// Coefficients g_0..g_L of (2 − 2cos x)^α = |1 − e^{ix}|^{2α}.
///
/// g_k = (−1)^k Γ(1+2α) / (Γ(1+α+k) Γ(1+α−k)), evaluated through the ratio
/// g_{k+1}/g_k = (k − α)/(k + 1 + α).
pub fn single_factor_coeffs(alpha: f64, len: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(len + 1);
    let g0 = (log_gamma(1.0 + 2.0 * alpha).unwrap_or(f64::NAN) - 2.0 * log_gamma(1.0 + alpha).unwrap_or(f64::NAN)).exp();
    g.push(g0);
    for k in 0..len {
        let kf = k as f64;
        let next = g[k] * (kf - alpha) / (kf + 1.0 + alpha);
        g.push(next);
    }
    g
}

const CONVOLUTION_TOL: f64 = 1e-10;
const CONVOLUTION_MAX_TAIL: usize = 1 << 21;

/// Convolution of the 2m single-singularity sequences.
///
/// Each factor |z − e^{iφ}|^{2α} has coefficients g_k e^{−ikφ}. The factors
/// are truncated at |k| ≤ L, with L doubled until the estimated truncation
/// loss drops below 1e-10.
pub fn fourier_coeffs_convolution(s: &SingularitySet, k: usize) -> Result<FourierSeries> {
    if k < 1 {
        return Err(Error::Precondition("convolution route needs K >= 1".into()));
    }
    if s.alpha == 0.0 {
        return Ok(FourierSeries::delta(k));
    }
    let alpha = s.alpha;
    let factors = 2 * s.m();
    let mut tail = (4 * k).max(1024).next_power_of_two();
    let g = loop {
        let g = single_factor_coeffs(alpha, tail + 1);
        let l1: f64 = g[0].abs() + 2.0 * g[1..=tail].iter().map(|x| x.abs()).sum::<f64>();
        let gl = g[tail + 1].abs();
        // loss ≈ Σ_{|k|>L} |g_k||g_{j-k}| across factor pairs
        let est = (factors - 1) as f64 * 2.0 * gl * gl * tail as f64 / (1.0 + 4.0 * alpha).max(1e-3)
            * l1.powi(factors as i32 - 2);
        if est <= CONVOLUTION_TOL {
            break g;
        }
        // the estimate decays like L^{-(1+4α)}; give up early if even the largest tail cannot make it
        let best = est * (CONVOLUTION_MAX_TAIL as f64 / tail as f64).powf(-(1.0 + 4.0 * alpha));
        if tail >= CONVOLUTION_MAX_TAIL || best > CONVOLUTION_TOL {
            return Err(Error::Accuracy(format!("convolution truncation loss {est:.3e} above tolerance")));
        }
        tail *= 2;
    };
    let len = 2 * tail + 1;
    let fft_len = (2 * len).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);

    // sequence index i stores coefficient i - tail
    let factor_seq = |phi: f64| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); fft_len];
        for (i, slot) in v.iter_mut().take(len).enumerate() {
            let kk = i as i64 - tail as i64;
            let mag = g[kk.unsigned_abs() as usize];
            let ph = -(kk as f64) * phi;
            *slot = Complex64::new(mag * ph.cos(), mag * ph.sin());
        }
        v
    };

    let mut phis = Vec::with_capacity(factors);
    for &t in &s.thetas {
        phis.push(t);
        phis.push(-t);
    }
    let mut acc = factor_seq(phis[0]);
    for &phi in &phis[1..] {
        let mut b = factor_seq(phi);
        fwd.process(&mut acc);
        fwd.process(&mut b);
        for (x, y) in acc.iter_mut().zip(&b) {
            *x *= y;
        }
        inv.process(&mut acc);
        // product index i holds coefficient i - 2*tail; keep the centred window
        let scale = 1.0 / fft_len as f64;
        let mut next = vec![Complex64::new(0.0, 0.0); fft_len];
        for (i, slot) in next.iter_mut().take(len).enumerate() {
            *slot = acc[i + tail] * scale;
        }
        acc = next;
    }
    let coeffs: Vec<f64> = (0..=k).map(|j| acc[j + tail].re).collect();
    let max_imag = (0..=k).map(|j| acc[j + tail].im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-8 {
        return Err(Error::Accuracy(format!("imaginary residual {max_imag:.3e} in convolution")));
    }
    Ok(FourierSeries { coeffs })
}
