//! Haar sampling of SO(N), SO⁻(N) and Sp(2n), and eigenangle extraction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::determinant::Group;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, log_det, symmetric_eigenvalues};

/// Reproducible random source: `master` and `stream` select a ChaCha key,
/// and each sample index runs on its own ChaCha stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed { master, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Seed { stream, ..self }
    }

    /// Generator for sample `index`; independent of how work is scheduled.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}

/// A sampled group element.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupMatrix {
    Orthogonal(DMatrix<f64>),
    Symplectic(DMatrix<Complex64>),
}

const RANK_TOL: f64 = 1e-10;

/// Haar-distributed orthogonal matrix of size `dim` with determinant `want_det`.
pub fn sample_orthogonal(dim: usize, want_det: i8, seed: Seed) -> Result<DMatrix<f64>> {
    sample_orthogonal_with(dim, want_det, &mut seed.rng(0))
}

/// Gram–Schmidt (twice) on a Gaussian matrix gives Haar measure on O(N),
/// since the triangular factor has a positive diagonal by construction. A
/// wrong determinant is fixed by negating the first row, which maps the Haar
/// measure on one coset onto the other.
pub fn sample_orthogonal_with<R: Rng + ?Sized>(dim: usize, want_det: i8, rng: &mut R) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::Precondition("matrix size must be at least 1".into()));
    }
    if want_det != 1 && want_det != -1 {
        return Err(Error::Precondition(format!("determinant must be +1 or -1, got {want_det}")));
    }
    let mut q = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let mut ok = false;
        for _attempt in 0..2 {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let start = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for _pass in 0..2 {
                for j in 0..k {
                    let col = q.column(j);
                    let d: f64 = col.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (x, c) in v.iter_mut().zip(col.iter()) {
                        *x -= d * c;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > RANK_TOL * start {
                for (i, x) in v.iter().enumerate() {
                    q[(i, k)] = x / norm;
                }
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Construction("rank-deficient Gaussian draw".into()));
        }
    }
    if log_det(&q).sign != want_det {
        q.row_mut(0).neg_mut();
    }
    Ok(q)
}

/// Haar-distributed element of Sp(2n) ⊂ U(2n), with J = [[0, I], [−I, 0]].
pub fn sample_symplectic(n: usize, seed: Seed) -> Result<DMatrix<Complex64>> {
    sample_symplectic_with(n, &mut seed.rng(0))
}

// quaternionic partner of a column: [x; y] -> [-conj(y); conj(x)]
fn partner(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len() / 2;
    let mut p = Vec::with_capacity(v.len());
    p.extend(v[n..].iter().map(|y| -y.conj()));
    p.extend(v[..n].iter().map(|x| x.conj()));
    p
}

/// Columns k < n are Gram–Schmidt orthonormalised against all earlier
/// columns and their quaternionic partners; column n + k is the partner of
/// column k. This is quaternionic QR of a quaternionic Ginibre matrix.
pub fn sample_symplectic_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DMatrix<Complex64>> {
    if n == 0 {
        return Err(Error::Precondition("symplectic size n must be at least 1".into()));
    }
    let dim = 2 * n;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _k in 0..n {
        let mut done = None;
        for _attempt in 0..2 {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let start = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for _pass in 0..2 {
                for c in &cols {
                    let d: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, ci) in v.iter_mut().zip(c) {
                        *x -= d * ci;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > RANK_TOL * start {
                v.iter_mut().for_each(|x| *x /= norm);
                done = Some(v);
                break;
            }
        }
        let v = done.ok_or_else(|| Error::Construction("rank-deficient quaternionic draw".into()))?;
        let p = partner(&v);
        cols.push(v);
        cols.push(p);
    }
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    // cols alternates (column k, partner of column k)
    for k in 0..n {
        for i in 0..dim {
            u[(i, k)] = cols[2 * k][i];
            u[(i, n + k)] = cols[2 * k + 1][i];
        }
    }
    let (sym, unit) = symplectic_residuals(&u);
    if sym > 1e-10 || unit > 1e-10 {
        return Err(Error::Construction(format!(
            "symplectic structure residual {sym:.2e}, unitarity residual {unit:.2e}"
        )));
    }
    Ok(u)
}

/// (‖U J Uᵀ − J‖_max, ‖U†U − I‖_max)
pub fn symplectic_residuals(u: &DMatrix<Complex64>) -> (f64, f64) {
    let dim = u.nrows();
    let n = dim / 2;
    let mut j = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..n {
        j[(i, n + i)] = Complex64::new(1.0, 0.0);
        j[(n + i, i)] = Complex64::new(-1.0, 0.0);
    }
    let ujut = u * &j * u.transpose();
    let sym = (ujut - &j).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let uu = u.adjoint() * u;
    let unit = (uu - DMatrix::<Complex64>::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (sym, unit)
}

/// Spectrum of an orthogonal or symplectic matrix: free angles θ'_k ∈ [0, π]
/// carrying the pairs e^{±iθ'_k}, plus eigenvalues fixed at +1 and −1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EigenAngles {
    pub free_angles: Vec<f64>,
    pub fixed_plus: usize,
    pub fixed_minus: usize,
}

impl EigenAngles {
    pub fn dimension(&self) -> usize {
        2 * self.free_angles.len() + self.fixed_plus + self.fixed_minus
    }
}

// a free pair at angle φ has cosine 1 − φ²/2; 1e-12 keeps φ ≳ 1.4e-6 free
const CLUSTER_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-8;

/// Eigenangles from the Hermitian part (U + U†)/2, whose eigenvalues are
/// cos θ' (twice per conjugate pair) and ±1 (once per fixed eigenvalue).
///
/// Values within 1e-12 of ±1 are counted as fixed eigenvalues; their counts
/// must have the parity forced by the group.
pub fn eigenangles(u: &GroupMatrix, group: Group) -> Result<EigenAngles> {
    let cosines = match u {
        GroupMatrix::Orthogonal(q) => {
            if group == Group::Sp {
                return Err(Error::Precondition("real orthogonal matrix given for Sp".into()));
            }
            let qtq = q.transpose() * q;
            let dev = (qtq - DMatrix::<f64>::identity(q.nrows(), q.nrows())).amax();
            if dev > UNITARY_TOL {
                return Err(Error::Precondition(format!("matrix is not orthogonal (residual {dev:.2e})")));
            }
            symmetric_eigenvalues(&((q + q.transpose()) * 0.5))
        }
        GroupMatrix::Symplectic(s) => {
            if group != Group::Sp {
                return Err(Error::Precondition(format!("complex matrix given for {group}")));
            }
            let unit = (s.adjoint() * s - DMatrix::<Complex64>::identity(s.nrows(), s.nrows())).camax();
            if unit > UNITARY_TOL {
                return Err(Error::Precondition(format!("matrix is not unitary (residual {unit:.2e})")));
            }
            hermitian_eigenvalues(&((s + s.adjoint()) * Complex64::new(0.5, 0.0)))
        }
    };
    classify_spectrum(&cosines, group)
}

/// Splits sorted Hermitian-part eigenvalues into fixed ±1 counts and free
/// angles, enforcing the parities of the group.
pub fn classify_spectrum(cosines: &[f64], group: Group) -> Result<EigenAngles> {
    let mut sorted = cosines.to_vec();
    sorted.sort_by(f64::total_cmp);
    let fixed_minus = sorted.iter().filter(|&&c| c < -1.0 + CLUSTER_TOL).count();
    let fixed_plus = sorted.iter().filter(|&&c| c > 1.0 - CLUSTER_TOL).count();
    let (plus_parity, minus_parity) = match group {
        Group::Sp | Group::SoEven => (0, 0),
        Group::SoMinusEven => (1, 1),
        Group::SoOdd => (1, 0),
        Group::SoMinusOdd => (0, 1),
        Group::OEven | Group::OOdd => {
            return Err(Error::Precondition("eigenangles need a base group".into()));
        }
    };
    if fixed_plus % 2 != plus_parity || fixed_minus % 2 != minus_parity {
        return Err(Error::Extraction(format!(
            "{group}: {fixed_plus} eigenvalues at +1 and {fixed_minus} at -1 contradict the group structure"
        )));
    }
    let free = &sorted[fixed_minus..sorted.len() - fixed_plus];
    if free.len() % 2 != 0 {
        return Err(Error::Extraction(format!("{} unpaired eigenvalues", free.len())));
    }
    let free_angles = free.chunks(2).map(|p| (0.5 * (p[0] + p[1])).clamp(-1.0, 1.0).acos()).collect();
    Ok(EigenAngles { free_angles, fixed_plus, fixed_minus })
}

/// Samples one element of a base group at half-size n.
pub fn sample_group<R: Rng + ?Sized>(group: Group, n: usize, rng: &mut R) -> Result<GroupMatrix> {
    match group {
        Group::Sp => sample_symplectic_with(n, rng).map(GroupMatrix::Symplectic),
        g => match g.determinant_sign() {
            Some(det) => sample_orthogonal_with(g.dimension(n), det, rng).map(GroupMatrix::Orthogonal),
            None => Err(Error::Precondition(format!("{g} is a mixture; sample its components"))),
        },
    }
}
