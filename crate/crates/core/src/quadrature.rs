//! Gauss–Legendre rules and geometrically graded panel partitions.

use std::f64::consts::PI;

/// An n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from the Chebyshev guesses.
    pub fn new(points: usize) -> Self {
        assert!(points >= 1, "Gauss-Legendre rule needs at least one point");
        let n = points;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive breakpoints.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        breaks.windows(2).map(|p| self.integrate(p[0], p[1], &mut f)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Where a panel partition of [a, b] is refined geometrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grading {
    pub toward_start: bool,
    pub toward_end: bool,
    /// Ratio between consecutive panel widths (0 < ratio < 1).
    pub ratio: f64,
    /// Number of refinement levels at each graded end.
    pub depth: usize,
}

impl Grading {
    pub fn both(depth: usize) -> Self {
        Grading { toward_start: true, toward_end: true, ratio: 0.5, depth }
    }
}

/// Breakpoints of a partition of [a, b], graded toward the requested ends
/// and with no panel wider than `max_width`.
pub fn graded_breakpoints(a: f64, b: f64, grading: Grading, max_width: f64) -> Vec<f64> {
    debug_assert!(b > a);
    let mut pts = Vec::with_capacity(2 * grading.depth + 4);
    pts.push(a);
    match (grading.toward_start, grading.toward_end) {
        (false, false) => {}
        (true, false) => push_graded_from(&mut pts, a, b, grading),
        (false, true) => push_graded_to(&mut pts, a, b, grading),
        (true, true) => {
            let mid = 0.5 * (a + b);
            push_graded_from(&mut pts, a, mid, grading);
            pts.push(mid);
            push_graded_to(&mut pts, mid, b, grading);
        }
    }
    pts.push(b);
    pts.dedup_by(|x, y| *x <= *y);
    split_wide(&pts, max_width)
}

// interior points a + (b-a) r^k for k = depth..=1, increasing
fn push_graded_from(pts: &mut Vec<f64>, a: f64, b: f64, g: Grading) {
    let h = b - a;
    for k in (1..=g.depth).rev() {
        pts.push(a + h * g.ratio.powi(k as i32));
    }
}

// interior points b - (b-a) r^k for k = 1..=depth, increasing
fn push_graded_to(pts: &mut Vec<f64>, a: f64, b: f64, g: Grading) {
    let h = b - a;
    for k in 1..=g.depth {
        pts.push(b - h * g.ratio.powi(k as i32));
    }
}

fn split_wide(pts: &[f64], max_width: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(pts.len());
    out.push(pts[0]);
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = if max_width.is_finite() && max_width > 0.0 {
            ((hi - lo) / max_width).ceil().max(1.0) as usize
        } else {
            1
        };
        for i in 1..pieces {
            out.push(lo + (hi - lo) * i as f64 / pieces as f64);
        }
        out.push(hi);
    }
    out
}

/// Tensor-product nodes over the ordered simplex 0 < θ₁ < … < θ_m < π.
///
/// Every coordinate is graded toward both ends of its range (the previous
/// coordinate and π), which puts refinement at the diagonals and at the
/// edges {0, π}. No panel is wider than `max_width` (capped at π/8).
/// Weights integrate against dθ₁⋯dθ_m on the simplex.
pub fn simplex_nodes(m: usize, rule: &GaussLegendre, depth: usize, max_width: f64) -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::new();
    let mut point = Vec::with_capacity(m);
    let max_width = max_width.min(PI / 8.0);
    simplex_rec(m, rule, depth, max_width, 0.0, 1.0, &mut point, &mut out);
    out
}

fn simplex_rec(
    m: usize,
    rule: &GaussLegendre,
    depth: usize,
    max_width: f64,
    lo: f64,
    weight: f64,
    point: &mut Vec<f64>,
    out: &mut Vec<(Vec<f64>, f64)>,
) {
    if point.len() == m {
        out.push((point.clone(), weight));
        return;
    }
    if lo >= PI {
        return;
    }
    let breaks = graded_breakpoints(lo, PI, Grading::both(depth), max_width);
    for p in breaks.windows(2) {
        for (x, w) in rule.mapped(p[0], p[1]) {
            point.push(x);
            simplex_rec(m, rule, depth, max_width, x, weight * w, point, out);
            point.pop();
        }
    }
}

/// Tensor-product Gauss–Legendre over the ordered simplex, graded toward
/// the diagonals and the edges {0, π}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Gauss–Legendre points per panel and coordinate.
    pub nodes_per_panel: usize,
    /// Grading depth beyond ⌈log₂ n⌉.
    pub extra_depth: usize,
    /// Allowed relative change between the base and the refined rule.
    pub rel_tol: f64,
    /// Run the refined rule and compare.
    pub verify: bool,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { nodes_per_panel: 8, extra_depth: 3, rel_tol: 1e-6, verify: true }
    }
}

impl QuadSpec {
    pub(crate) fn refined(&self) -> QuadSpec {
        QuadSpec { nodes_per_panel: self.nodes_per_panel + 4, extra_depth: self.extra_depth + 2, verify: false, ..*self }
    }

    pub(crate) fn depth(&self, n: usize) -> usize {
        (n.max(1) as f64).log2().ceil() as usize + self.extra_depth
    }

    /// Widest panel allowed: one period of e^{2inθ}.
    pub(crate) fn max_width(&self, n: usize) -> f64 {
        PI / n.max(1) as f64
    }
}
