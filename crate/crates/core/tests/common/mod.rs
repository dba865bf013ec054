#![allow(dead_code)]

// Double-exponential (tanh-sinh) rule, independent of the library's
// Gauss-Legendre machinery. Handles algebraic endpoint singularities.

use std::f64::consts::{FRAC_PI_2, PI};

use momlab::asymptotics::Sign;

pub struct TanhSinh {
    // (offset from the left end as a fraction, offset from the right end, weight), all on (0, 1)
    nodes: Vec<(f64, f64, f64)>,
}

impl TanhSinh {
    pub fn new(h: f64, t_max: f64) -> Self {
        let mut nodes = Vec::new();
        let k = (t_max / h).ceil() as i64;
        for i in -k..=k {
            let t = i as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            // fraction from left = 1/(1+e^{-2u}), from right = 1/(1+e^{2u})
            let left = 1.0 / (1.0 + (-2.0 * u).exp());
            let right = 1.0 / (1.0 + (2.0 * u).exp());
            let w = h * FRAC_PI_2 * t.cosh() / (2.0 * u.cosh().powi(2));
            if left > 0.0 && right > 0.0 && w > 0.0 && w.is_finite() {
                nodes.push((left, right, w));
            }
        }
        TanhSinh { nodes }
    }

    /// ∫_a^b f(x, x−a, b−x) dx
    pub fn integrate<F: FnMut(f64, f64, f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let len = b - a;
        let mut acc = 0.0;
        for &(l, r, w) in &self.nodes {
            let dl = len * l;
            let dr = len * r;
            let x = if l < 0.5 { a + dl } else { b - dr };
            if x <= a || x >= b {
                continue;
            }
            acc += w * f(x, dl, dr);
        }
        acc * len
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

// ∫ over 0 < x₁ < … < x_m < hi of f(x, gaps), where gaps[j] = x_j − x_{j−1}
// (x_{−1} = 0) and gaps[m] = hi − x_m, computed without cancellation.
pub fn ordered_simplex<F: FnMut(&[f64], &[f64]) -> f64>(ts: &TanhSinh, m: usize, hi: f64, f: &mut F) -> f64 {
    fn rec<F: FnMut(&[f64], &[f64]) -> f64>(
        ts: &TanhSinh,
        m: usize,
        hi: f64,
        xs: &mut Vec<f64>,
        gaps: &mut Vec<f64>,
        f: &mut F,
    ) -> f64 {
        let lo = xs.last().copied().unwrap_or(0.0);
        ts.integrate(lo, hi, |x, dl, dr| {
            xs.push(x);
            gaps.push(dl);
            let v = if xs.len() == m {
                gaps.push(dr);
                let v = f(xs, gaps);
                gaps.pop();
                v
            } else {
                rec(ts, m, hi, xs, gaps, f)
            };
            xs.pop();
            gaps.pop();
            v
        })
    }
    rec(ts, m, hi, &mut Vec::new(), &mut Vec::new(), f)
}

pub fn i_infinity_quadrature(m: usize, alpha: f64, sign: Sign, h: f64) -> f64 {
    let ts = TanhSinh::new(h, 3.5);
    let a2 = alpha * alpha;
    let e = -a2 + sign.value() * alpha;
    let mut f = |th: &[f64], gaps: &[f64]| -> f64 {
        let mut ln = 0.0;
        for j in 0..m {
            // distances to 0 and π, exact
            let s = 2.0 * gaps[..=j].iter().sum::<f64>().min(gaps[j + 1..].iter().sum::<f64>()).sin();
            ln += e * s.ln();
            for k in j + 1..m {
                let d: f64 = gaps[j + 1..=k].iter().sum();
                // 2cosθ_j − 2cosθ_k = 4 sin((θ_j+θ_k)/2) sin((θ_k−θ_j)/2)
                ln -= 2.0 * a2 * (4.0 * (0.5 * (th[j] + th[k])).sin() * (0.5 * d).sin()).ln();
            }
        }
        ln.exp()
    };
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    fact * ordered_simplex(&ts, m, PI, &mut f) / PI.powi(m as i32)
}

pub fn selberg_quadrature(a: f64, b: f64, c: f64) -> f64 {
    let ts = TanhSinh::new(1.0 / 48.0, 3.5);
    let f = |x: &[f64], gaps: &[f64]| -> f64 {
        let (x1, x2) = (x[0], x[1]);
        let (d, r2) = (gaps[1], gaps[2]);
        let r1 = d + r2;
        (b - 1.0) * (x1.ln() + x2.ln()) + (a - 1.0) * (r1.ln() + r2.ln()) + 2.0 * c * d.ln()
    };
    2.0 * ordered_simplex(&ts, 2, 1.0, &mut |x, g| f(x, g).exp())
}
