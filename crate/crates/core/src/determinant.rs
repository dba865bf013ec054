//! Toeplitz+Hankel determinants and the exact finite-n joint moments of
//! characteristic polynomials over the orthogonal and symplectic ensembles.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::log_det_in_place;
use crate::specfun::LogValue;
use crate::symbol::{fourier_coeffs, FourierMethod, FourierSeries, SingularitySet};

/// The four Toeplitz+Hankel entry rules, indices j, k = 0..n−1:
/// 1: f_{j−k} + f_{j+k}, 2: f_{j−k} − f_{j+k+2}, 3: f_{j−k} − f_{j+k+1},
/// 4: f_{j−k} + f_{j+k+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThKind {
    One,
    Two,
    Three,
    Four,
}

impl ThKind {
    pub const ALL: [ThKind; 4] = [ThKind::One, ThKind::Two, ThKind::Three, ThKind::Four];

    pub fn from_index(k: u8) -> Option<Self> {
        match k {
            1 => Some(ThKind::One),
            2 => Some(ThKind::Two),
            3 => Some(ThKind::Three),
            4 => Some(ThKind::Four),
            _ => None,
        }
    }

    // (sign of the Hankel part, Hankel index shift)
    fn rule(self) -> (f64, usize) {
        match self {
            ThKind::One => (1.0, 0),
            ThKind::Two => (-1.0, 2),
            ThKind::Three => (-1.0, 1),
            ThKind::Four => (1.0, 1),
        }
    }

    /// Largest Fourier index touched by an order-n matrix.
    pub fn max_index(self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        2 * (n - 1) + self.rule().1
    }
}

/// Which side of the phase diagram a group sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// SO(N), SO⁻(N), O(N): the "+" sign in the closed forms.
    Orthogonal,
    /// Sp(2n): the "−" sign.
    Symplectic,
}

impl Family {
    /// +1 for the orthogonal family, −1 for symplectic.
    pub fn sign(self) -> f64 {
        match self {
            Family::Orthogonal => 1.0,
            Family::Symplectic => -1.0,
        }
    }
}

/// Ensembles parameterised by the half-size n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// Sp(2n)
    Sp,
    /// SO(2n)
    SoEven,
    /// SO⁻(2n)
    SoMinusEven,
    /// SO(2n+1)
    SoOdd,
    /// SO⁻(2n+1)
    SoMinusOdd,
    /// O(2n), the equal mixture of SO(2n) and SO⁻(2n)
    OEven,
    /// O(2n+1), the equal mixture of SO(2n+1) and SO⁻(2n+1)
    OOdd,
}

impl Group {
    pub const BASE: [Group; 5] = [Group::Sp, Group::SoEven, Group::SoMinusEven, Group::SoOdd, Group::SoMinusOdd];
    pub const ALL: [Group; 7] =
        [Group::Sp, Group::SoEven, Group::SoMinusEven, Group::SoOdd, Group::SoMinusOdd, Group::OEven, Group::OOdd];

    pub fn family(self) -> Family {
        match self {
            Group::Sp => Family::Symplectic,
            _ => Family::Orthogonal,
        }
    }

    /// Matrix dimension for half-size n.
    pub fn dimension(self, n: usize) -> usize {
        match self {
            Group::Sp | Group::SoEven | Group::SoMinusEven | Group::OEven => 2 * n,
            Group::SoOdd | Group::SoMinusOdd | Group::OOdd => 2 * n + 1,
        }
    }

    /// The two determinant-sign components of an O(N) mixture.
    pub fn components(self) -> Option<(Group, Group)> {
        match self {
            Group::OEven => Some((Group::SoEven, Group::SoMinusEven)),
            Group::OOdd => Some((Group::SoOdd, Group::SoMinusOdd)),
            _ => None,
        }
    }

    pub fn is_base(self) -> bool {
        self.components().is_none()
    }

    /// Determinant of the group elements (orthogonal base groups only).
    pub fn determinant_sign(self) -> Option<i8> {
        match self {
            Group::SoEven | Group::SoOdd => Some(1),
            Group::SoMinusEven | Group::SoMinusOdd => Some(-1),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Sp => "sp",
            Group::SoEven => "so-even",
            Group::SoMinusEven => "sominus-even",
            Group::SoOdd => "so-odd",
            Group::SoMinusOdd => "sominus-odd",
            Group::OEven => "o-even",
            Group::OOdd => "o-odd",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Group::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown group '{s}'")))
    }
}

/// Order-n Toeplitz+Hankel matrix of the given kind.
pub fn build_th_matrix(fs: &FourierSeries, n: usize, kind: ThKind) -> Result<DMatrix<f64>> {
    if n > 0 && fs.order() < kind.max_index(n) {
        return Err(Error::Precondition(format!(
            "Fourier truncation K={} too small for order {n} kind {kind:?} (needs {})",
            fs.order(),
            kind.max_index(n)
        )));
    }
    let (sign, shift) = kind.rule();
    Ok(DMatrix::from_fn(n, n, |j, k| {
        fs.get(j as i64 - k as i64) + sign * fs.get((j + k + shift) as i64)
    }))
}

/// D_n^{T+H,κ}(f) in log form.
pub fn th_determinant(fs: &FourierSeries, n: usize, kind: ThKind) -> Result<LogValue> {
    let mut m = build_th_matrix(fs, n, kind)?;
    Ok(log_det_in_place(&mut m))
}

/// Fourier order needed to build every matrix used for a group at half-size n.
pub fn required_order(n: usize) -> usize {
    (2 * n).max(1)
}

// (kind, matrix order, fixed-eigenvalue factor g(θ) raised to 2α, 1/2 prefactor)
fn dispatch(group: Group, n: usize) -> (ThKind, usize, Option<fn(f64) -> f64>, bool) {
    match group {
        Group::SoEven => (ThKind::One, n, None, true),
        Group::SoMinusEven => (ThKind::Two, n.saturating_sub(1), Some(|t: f64| 2.0 * t.sin()), false),
        Group::SoOdd => (ThKind::Three, n, Some(|t: f64| 2.0 * (0.5 * t).sin()), false),
        Group::SoMinusOdd => (ThKind::Four, n, Some(|t: f64| 2.0 * (0.5 * t).cos()), false),
        Group::Sp => (ThKind::Two, n, None, false),
        Group::OEven | Group::OOdd => unreachable!("mixtures are resolved before dispatch"),
    }
}

const NEGATIVE_CLAMP: f64 = 1e-8;

/// E_{U∈G}[∏_j |p(θ_j; U)|^{2α}] assembled from the Toeplitz+Hankel identities.
///
/// The angles may come in any order; coincident angles are rejected.
pub fn joint_moment_exact(group: Group, n: usize, alpha: f64, thetas: &[f64]) -> Result<LogValue> {
    joint_moment_exact_with(group, n, alpha, thetas, FourierMethod::Graded)
}

pub fn joint_moment_exact_with(
    group: Group,
    n: usize,
    alpha: f64,
    thetas: &[f64],
    method: FourierMethod,
) -> Result<LogValue> {
    if n == 0 {
        return Err(Error::Precondition("group size n must be at least 1".into()));
    }
    let s = SingularitySet::from_unsorted(alpha, thetas.to_vec())?;
    let k = match method {
        FourierMethod::Convolution => required_order(n) + 64,
        _ => required_order(n),
    };
    let fs = fourier_coeffs(&s, k, method)?;
    joint_moment_from_coeffs(group, n, &s, &fs)
}

/// Same as [`joint_moment_exact`] with precomputed coefficients of the symbol.
pub fn joint_moment_from_coeffs(group: Group, n: usize, s: &SingularitySet, fs: &FourierSeries) -> Result<LogValue> {
    if let Some((plus, minus)) = group.components() {
        let a = joint_moment_from_coeffs(plus, n, s, fs)?;
        let b = joint_moment_from_coeffs(minus, n, s, fs)?;
        return Ok(a.add(&b) * LogValue::from_f64(0.5));
    }
    let (kind, order, fixed, half) = dispatch(group, n);
    let mut m = build_th_matrix(fs, order, kind)?;
    let det = log_det_in_place(&mut m);
    let det = match det.sign {
        1 => det,
        0 => det,
        _ => {
            let hadamard: f64 = (0..order).map(|i| m_row_norm_ln(fs, order, kind, i)).sum();
            if det.log_abs - hadamard < NEGATIVE_CLAMP.ln() {
                LogValue::from_ln(det.log_abs)
            } else {
                return Err(Error::Consistency(format!(
                    "negative Toeplitz+Hankel determinant {det} for {group} n={n}"
                )));
            }
        }
    };
    let mut out = det;
    if half {
        out = out * LogValue::from_f64(0.5);
    }
    if let Some(g) = fixed {
        if s.alpha() != 0.0 {
            let ln: f64 = s.thetas().iter().map(|&t| g(t).ln()).sum();
            out = out * LogValue::from_ln(2.0 * s.alpha() * ln);
        }
    }
    Ok(out)
}

fn m_row_norm_ln(fs: &FourierSeries, order: usize, kind: ThKind, row: usize) -> f64 {
    let (sign, shift) = kind.rule();
    let sq: f64 = (0..order)
        .map(|k| {
            let v = fs.get(row as i64 - k as i64) + sign * fs.get((row + k + shift) as i64);
            v * v
        })
        .sum();
    0.5 * sq.ln()
}

/// Contribution ∏_j g(θ_j)^{2α} of the eigenvalues forced to ±1.
pub fn fixed_eigenvalue_factor(group: Group, alpha: f64, thetas: &[f64]) -> f64 {
    match group {
        Group::SoMinusEven => thetas.iter().map(|t| (2.0 * t.sin()).powf(2.0 * alpha)).product(),
        Group::SoOdd => thetas.iter().map(|t| (2.0 * (0.5 * t).sin()).powf(2.0 * alpha)).product(),
        Group::SoMinusOdd => thetas.iter().map(|t| (2.0 * (0.5 * t).cos()).powf(2.0 * alpha)).product(),
        _ => 1.0,
    }
}
