//! Real special functions: log-Gamma, log-Beta and the log of the Barnes
//! G-function, plus the [`LogValue`] carrier used for quantities that span
//! hundreds of orders of magnitude.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul};

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// ζ'(−1) = 1/12 − ln A, with A the Glaisher–Kinkelin constant.
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

/// ζ(k) for k = 2..=27, used by the Taylor expansion of ln Γ around 1 and 2.
const ZETA: [f64; 26] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
];

/// Sign plus natural log of the absolute value.
///
/// `sign == 0` is an exact zero and `log_abs` is then meaningless
/// (stored as `-inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub sign: i8,
    pub log_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { sign: 1, log_abs: 0.0 };

    pub fn new(sign: i8, log_abs: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            LogValue { sign: sign.signum(), log_abs }
        }
    }

    /// Positive value `exp(log_abs)`.
    pub fn from_ln(log_abs: f64) -> Self {
        LogValue { sign: 1, log_abs }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue { sign: if x > 0.0 { 1 } else { -1 }, log_abs: x.abs().ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Converts back to a float; overflows to ±inf, underflows to ±0.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp(),
        }
    }

    /// Raises a positive value to a real power.
    pub fn powf(&self, p: f64) -> Self {
        match self.sign {
            0 if p > 0.0 => Self::ZERO,
            0 => LogValue::from_ln(f64::INFINITY),
            1 => LogValue::from_ln(self.log_abs * p),
            _ => LogValue::new(1, f64::NAN),
        }
    }

    pub fn recip(&self) -> Self {
        match self.sign {
            0 => LogValue::from_ln(f64::INFINITY),
            s => LogValue { sign: s, log_abs: -self.log_abs },
        }
    }

    /// Sum of two values, computed without leaving the log domain.
    pub fn add(&self, other: &LogValue) -> LogValue {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_abs >= other.log_abs { (self, other) } else { (other, self) };
        let r = (small.log_abs - big.log_abs).exp();
        let t = if big.sign == small.sign { 1.0 + r } else { 1.0 - r };
        if t == 0.0 {
            return Self::ZERO;
        }
        LogValue { sign: big.sign, log_abs: big.log_abs + t.ln() }
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue { sign: self.sign * rhs.sign, log_abs: self.log_abs + rhs.log_abs }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.recip()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_abs),
        }
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::Domain("NaN argument".into()));
    }
    Ok(())
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

// Stirling series, valid for z >= 15.
fn ln_gamma_stirling(z: f64) -> f64 {
    // B_{2k} / (2k (2k-1))
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * zi2 + c;
    }
    (z - 0.5) * z.ln() - z + 0.5 * LN_2PI + series * zi
}

// ln Γ(1 + e) for |e| <= 0.25.
fn ln_gamma_1p(e: f64) -> f64 {
    let mut acc = 0.0;
    for (i, z) in ZETA.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if (i + 2) % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc * e + sign * z / k;
    }
    // acc holds Σ (-1)^k ζ(k)/k e^{k-2}
    -EULER_GAMMA * e + acc * e * e
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_finite(x)?;
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}; use gamma_signed")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if (x - 1.0).abs() <= 0.25 {
        return ln_gamma_1p(x - 1.0);
    }
    if (x - 2.0).abs() <= 0.25 {
        let e = x - 2.0;
        return ln_gamma_1p(e) + e.ln_1p();
    }
    if x >= 15.0 {
        return ln_gamma_stirling(x);
    }
    let mut z = x;
    let mut prod = 1.0;
    while z < 15.0 {
        prod *= z;
        z += 1.0;
    }
    ln_gamma_stirling(z) - prod.ln()
}

/// Which part of the real line [`gamma_signed`] is allowed to touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaDomain {
    /// x > 0 only.
    Positive,
    /// Negative non-integers as well, through the reflection formula.
    Reflect,
}

/// Γ(x) as a [`LogValue`]; negative arguments need [`GammaDomain::Reflect`].
pub fn gamma_signed(x: f64, domain: GammaDomain) -> Result<LogValue> {
    check_finite(x)?;
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok(LogValue::from_ln(ln_gamma_pos(x)));
    }
    if domain == GammaDomain::Positive {
        return Err(Error::Domain(format!("negative argument {x} without reflection")));
    }
    // Γ(x) Γ(1-x) = π / sin(πx)
    let frac = x - x.floor();
    let s = (PI * frac).sin() * if (x.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let sign = if s > 0.0 { 1 } else { -1 };
    Ok(LogValue::new(sign, PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x)))
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b), for a, b > 0.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

// ln G(z + 1) for z >= 19.
fn ln_barnes_g_asymptotic(z: f64) -> f64 {
    // B_{2k+2} / (4k(k+1))
    const C: [f64; 7] = [
        -1.0 / 240.0,
        1.0 / 1008.0,
        -1.0 / 1440.0,
        1.0 / 1056.0,
        -691.0 / 327_600.0,
        1.0 / 144.0,
        -3617.0 / 114_240.0,
    ];
    let zi2 = 1.0 / (z * z);
    let mut series = 0.0;
    for c in C.iter().rev() {
        series = series * zi2 + c;
    }
    let lz = z.ln();
    0.5 * z * z * lz - 0.75 * z * z + 0.5 * z * LN_2PI - lz / 12.0
        + ZETA_PRIME_MINUS_ONE
        + series * zi2
}

/// ln G(x) for x > 0, with G the Barnes G-function.
///
/// Shifts upward through `G(x+1) = Γ(x) G(x)` until x ≥ 20 and then uses the
/// asymptotic expansion.
pub fn log_barnes_g(x: f64) -> Result<f64> {
    check_finite(x)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("log_barnes_g needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut z = x;
    let mut shift = 0.0;
    while z < 20.0 {
        shift += ln_gamma_pos(z);
        z += 1.0;
    }
    Ok(ln_barnes_g_asymptotic(z - 1.0) - shift)
}

/// G(x) as a [`LogValue`]; exact zero at non-positive integers.
///
/// Non-integer negative arguments are not supported.
pub fn barnes_g(x: f64) -> Result<LogValue> {
    check_finite(x)?;
    if is_nonpositive_integer(x) {
        return Ok(LogValue::ZERO);
    }
    log_barnes_g(x).map(LogValue::from_ln)
}
