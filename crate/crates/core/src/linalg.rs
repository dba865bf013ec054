//! Dense kernels: log-determinant by partial-pivoting LU, and sorted
//! eigenvalues of symmetric and Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::specfun::LogValue;

/// Sign and log-magnitude of det(M) via row-pivoted LU.
///
/// Returns an exact zero when a pivot is exactly 0 (singular matrix).
pub fn log_det(m: &DMatrix<f64>) -> LogValue {
    assert!(m.is_square(), "log_det needs a square matrix");
    let mut a = m.clone();
    log_det_in_place(&mut a)
}

/// Same as [`log_det`], destroying the argument.
pub fn log_det_in_place(a: &mut DMatrix<f64>) -> LogValue {
    let n = a.nrows();
    let data = a.as_mut_slice();
    // column-major: entry (i, j) at j * n + i
    let mut sign: i8 = 1;
    let mut log_abs = 0.0;
    for k in 0..n {
        let col = k * n;
        let mut piv = k;
        let mut best = data[col + k].abs();
        for i in k + 1..n {
            let v = data[col + i].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return if best == 0.0 { LogValue::ZERO } else { LogValue::new(1, f64::NAN) };
        }
        if piv != k {
            for j in 0..n {
                data.swap(j * n + k, j * n + piv);
            }
            sign = -sign;
        }
        let p = data[col + k];
        if p < 0.0 {
            sign = -sign;
        }
        log_abs += p.abs().ln();
        let inv = 1.0 / p;
        for i in k + 1..n {
            data[col + i] *= inv;
        }
        for j in k + 1..n {
            let f = data[j * n + k];
            if f == 0.0 {
                continue;
            }
            let (left, right) = data.split_at_mut(j * n);
            let lcol = &left[col + k + 1..col + n];
            let rcol = &mut right[k + 1..n];
            for (r, l) in rcol.iter_mut().zip(lcol) {
                *r -= f * l;
            }
        }
    }
    LogValue::new(sign, log_abs)
}

/// Eigenvalues of a real symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    assert!(m.is_square(), "symmetric_eigenvalues needs a square matrix");
    sorted(m.clone().symmetric_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a complex Hermitian matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    assert!(m.is_square(), "hermitian_eigenvalues needs a square matrix");
    sorted(m.clone().symmetric_eigenvalues().iter().copied().collect())
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}
