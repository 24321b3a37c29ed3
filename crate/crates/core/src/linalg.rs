//! Dense Hermitian eigen-kernel and the matrix functions built on it.
//!
//! Every matrix square root, logarithm and absolute value in the crate goes
//! through [`eigh`]. Two-by-two inputs use a closed form (no allocation in
//! the eigenvalue-only path); larger inputs go to nalgebra's
//! `SymmetricEigen`, which handles complex Hermitian matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::POLICY;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Rebuild `V f(Λ) V†`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Rejects non-square or non-Hermitian input. The tolerance scales with the
/// matrix norm so large Choi matrices are not penalised.
pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    check_square(m)?;
    let dev = hermiticity_deviation(m);
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    if dev > POLICY.structural * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Closed-form eigenvalues of `[[a, b], [conj b, d]]`, ascending.
#[inline]
pub fn eigvalsh2(a: f64, b: Complex64, d: f64) -> (f64, f64) {
    if b.re == 0.0 && b.im == 0.0 {
        return if a <= d { (a, d) } else { (d, a) };
    }
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    let det = a * d - b.norm_sqr();
    // Recover the smaller-magnitude eigenvalue from the determinant to avoid
    // cancellation in mean - r.
    if mean >= 0.0 {
        let hi = mean + r;
        let lo = if hi != 0.0 { det / hi } else { mean - r };
        (lo.min(hi), hi)
    } else {
        let lo = mean - r;
        let hi = if lo != 0.0 { det / lo } else { mean + r };
        (lo, hi.max(lo))
    }
}

fn eigh2(m: &CMatrix) -> HermitianEigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    if b.re == 0.0 && b.im == 0.0 {
        let vectors = if a <= d {
            CMatrix::identity(2, 2)
        } else {
            CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
        };
        let values = if a <= d { vec![a, d] } else { vec![d, a] };
        return HermitianEigen { values, vectors };
    }
    let (lo, hi) = eigvalsh2(a, b, d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b.norm());
    // Eigenvector of the upper eigenvalue, built from whichever row of
    // (A - hi) keeps its components away from cancellation.
    let (v0, v1) = if half >= 0.0 {
        (Complex64::new(half + r, 0.0), b.conj())
    } else {
        (b, Complex64::new(r - half, 0.0))
    };
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    let (v0, v1) = (v0 / norm, v1 / norm);
    let (w0, w1) = (-v1.conj(), v0.conj());
    HermitianEigen {
        values: vec![lo, hi],
        vectors: CMatrix::from_row_slice(2, 2, &[w0, v0, w1, v1]),
    }
}

/// Eigen-decomposition of a Hermitian matrix (only the Hermitian part of the
/// input is used).
pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    match n {
        0 => HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        },
        1 => HermitianEigen {
            values: vec![m[(0, 0)].re],
            vectors: CMatrix::identity(1, 1),
        },
        2 => eigh2(m),
        _ => {
            let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(sym);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let mut vectors = CMatrix::zeros(n, n);
            for (k, &src) in order.iter().enumerate() {
                vectors.set_column(k, &eig.eigenvectors.column(src));
            }
            HermitianEigen { values, vectors }
        }
    }
}

/// Eigenvalues only, ascending. Allocation-free for 2x2 apart from `out`.
pub fn eigvalsh_into(m: &CMatrix, out: &mut Vec<f64>) {
    out.clear();
    if m.nrows() == 2 {
        let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
        let (lo, hi) = eigvalsh2(m[(0, 0)].re, b, m[(1, 1)].re);
        out.push(lo);
        out.push(hi);
    } else {
        out.extend(eigh(m).values);
    }
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    eigvalsh_into(m, &mut out);
    out
}

/// Clamp an eigenvalue in `[-slack, 0)` to zero; anything lower is an error.
#[inline]
pub fn clamp_eigenvalue(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -POLICY.psd_slack {
        Ok(0.0)
    } else {
        Err(Error::NegativeEigenvalue { value })
    }
}

/// Principal square root of a PSD Hermitian matrix.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = eigh(m);
    for v in &eig.values {
        clamp_eigenvalue(*v)?;
    }
    Ok(eig.map(|v| v.max(0.0).sqrt()))
}

/// `|H| = sqrt(H† H)` for Hermitian `H`, i.e. `V |Λ| V†`.
pub fn hermitian_abs(m: &CMatrix) -> CMatrix {
    eigh(m).map(f64::abs)
}

/// Trace norm `Tr|H|` of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(h: &CMatrix) -> Result<f64> {
    check_hermitian(h)?;
    Ok(eigvalsh(h).iter().map(|v| v.abs()).sum())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Frobenius norm of the difference of two matrices.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `V† A V` written into `out`, using `tmp` as scratch. All square, same size.
pub fn adjoint_sandwich_into(v: &CMatrix, a: &CMatrix, tmp: &mut CMatrix, out: &mut CMatrix) {
    let n = v.nrows();
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += a[(i, k)] * v[(k, j)];
            }
            tmp[(i, j)] = acc;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += v[(k, i)].conj() * tmp[(k, j)];
            }
            out[(i, j)] = acc;
        }
    }
}

/// Real matrix-vector product into a caller-owned buffer.
#[inline]
pub fn matvec_into(m: &RMatrix, x: &[f64], out: &mut [f64]) {
    let (rows, cols) = m.shape();
    debug_assert_eq!(cols, x.len());
    debug_assert_eq!(rows, out.len());
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            acc += m[(i, j)] * xj;
        }
        *o = acc;
    }
}

/// Spectral condition number of a real square matrix.
pub fn condition_number(m: &RMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
