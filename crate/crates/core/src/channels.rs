//! Quantum channels as Kraus sets, transfer matrices, affine pairs and Choi
//! matrices.
//!
//! The transfer matrix `T_μν = Tr(λ_μ E(λ_ν))` is the canonical form. With
//! `λ_0 = 𝟙/√d` first it has the block structure
//!
//! ```text
//! T = [ 1      0 ]
//!     [ √d·c   M ]
//! ```
//!
//! and acts on Bloch vectors as `r ↦ M r + c`.

use num_complex::Complex64;

use crate::basis::HermitianBasis;
use crate::error::{Error, Result};
use crate::linalg::{check_square, eigvalsh, hermiticity_deviation, matvec_into, CMatrix, RMatrix, RVector};
use crate::policy::POLICY;
use crate::states::{density_from_bloch, BlochState};

pub use crate::linalg::trace_norm;

#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausSet {
    /// Requires `Σ E_i† E_i = 𝟙` within the PSD slack.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidInput("empty Kraus set".into()));
        };
        let dim = check_square(first)?;
        let mut sum = CMatrix::zeros(dim, dim);
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.nrows(),
                });
            }
            sum += op.adjoint() * op;
        }
        let deviation = (sum - CMatrix::identity(dim, dim))
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.norm()));
        if deviation > POLICY.psd_slack {
            return Err(Error::KrausNotTracePreserving { deviation });
        }
        Ok(KrausSet { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `Σ_i E_i ρ E_i†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.ops
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, e| acc + e * rho * e.adjoint())
    }

    /// Kraus set of `self ∘ first` (apply `first`, then `self`).
    pub fn after(&self, first: &KrausSet) -> Result<KrausSet> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: first.dim,
            });
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|a| first.ops.iter().map(move |b| a * b))
            .collect();
        KrausSet::new(ops)
    }
}

/// Real `d² × d²` matrix of a trace-preserving map in the Hermitian basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    dim: usize,
    t: RMatrix,
}

impl TransferMatrix {
    /// Checks shape and that the first row is `(1, 0, …, 0)` within the
    /// in-memory trace-preservation tolerance.
    pub fn new(dim: usize, t: RMatrix) -> Result<Self> {
        Self::with_tolerance(dim, t, POLICY.trace_preservation)
    }

    pub fn with_tolerance(dim: usize, t: RMatrix, tol: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.nrows().max(t.ncols()),
            });
        }
        let deviation = first_row_deviation(&t);
        if !(deviation <= tol) {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(TransferMatrix { dim, t })
    }

    pub fn identity(dim: usize) -> Self {
        TransferMatrix {
            dim,
            t: RMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.t
    }

    pub fn into_matrix(self) -> RMatrix {
        self.t
    }

    /// The `M` block (rows and columns `1..d²`).
    pub fn m_block(&self) -> RMatrix {
        let n = self.t.nrows() - 1;
        self.t.view((1, 1), (n, n)).into_owned()
    }

    /// The `c` vector, `(first column tail)/√d`.
    pub fn c_vector(&self) -> RVector {
        let n = self.t.nrows() - 1;
        self.t.view((1, 0), (n, 1)).column(0).into_owned() / (self.dim as f64).sqrt()
    }
}

fn first_row_deviation(t: &RMatrix) -> f64 {
    t.row(0)
        .iter()
        .enumerate()
        .map(|(j, &v)| if j == 0 { (v - 1.0).abs() } else { v.abs() })
        .fold(0.0, |acc, v| if v.is_nan() { f64::NAN } else { acc.max(v) })
}

/// Affine action `r ↦ M r + c` on Bloch vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub dim: usize,
    pub m: RMatrix,
    pub c: RVector,
}

impl AffineMap {
    pub fn new(dim: usize, m: RMatrix, c: RVector) -> Result<Self> {
        let n = dim * dim - 1;
        if m.nrows() != n || m.ncols() != n || c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if c.len() != n { c.len() } else { m.nrows() },
            });
        }
        Ok(AffineMap { dim, m, c })
    }
}

/// Choi-Jamiołkowski matrix `(E ⊗ 1)(|Ω⟩⟨Ω|)`, unit trace, output factor first.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub c: CMatrix,
}

impl ChoiMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.c)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).sum()
    }
}

pub fn transfer_from_kraus(k: &KrausSet, basis: &HermitianBasis) -> Result<TransferMatrix> {
    if k.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: k.dim(),
        });
    }
    let n = basis.len();
    let mut t = RMatrix::zeros(n, n);
    for nu in 0..n {
        let image = k.apply(basis.op(nu));
        let col = basis.expand_complex(&image)?;
        for mu in 0..n {
            t[(mu, nu)] = col[mu].re;
        }
    }
    TransferMatrix::new(basis.dim(), t)
}

pub fn affine_from_transfer(t: &TransferMatrix) -> Result<AffineMap> {
    let deviation = first_row_deviation(&t.t);
    if !(deviation <= POLICY.trace_preservation) {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok(AffineMap {
        dim: t.dim,
        m: t.m_block(),
        c: t.c_vector(),
    })
}

pub fn transfer_from_affine(a: &AffineMap) -> TransferMatrix {
    let n = a.m.nrows();
    let mut t = RMatrix::zeros(n + 1, n + 1);
    t[(0, 0)] = 1.0;
    let sqrt_d = (a.dim as f64).sqrt();
    for i in 0..n {
        t[(i + 1, 0)] = sqrt_d * a.c[i];
        for j in 0..n {
            t[(i + 1, j + 1)] = a.m[(i, j)];
        }
    }
    TransferMatrix { dim: a.dim, t }
}

/// `r ↦ M r + c`. No positivity check: the result may leave the state
/// space when `t` is not a positive map.
pub fn apply_channel(t: &TransferMatrix, s: &BlochState) -> Result<BlochState> {
    if t.dim != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim,
            found: s.dim(),
        });
    }
    let n = t.t.nrows() - 1;
    let mut out = vec![0.0; n];
    apply_affine_into(t, s.bloch().as_slice(), &mut out);
    BlochState::from_vector(t.dim, RVector::from_vec(out))
}

/// [`apply_channel`] followed by a PSD check; a failure signals a
/// non-positive map.
pub fn apply_channel_checked(
    t: &TransferMatrix,
    s: &BlochState,
    basis: &HermitianBasis,
) -> Result<BlochState> {
    let out = apply_channel(t, s)?;
    density_from_bloch(&out, basis)?;
    Ok(out)
}

/// Allocation-free affine action on raw Bloch slices.
pub(crate) fn apply_affine_into(t: &TransferMatrix, bloch: &[f64], out: &mut [f64]) {
    let sqrt_d = (t.dim as f64).sqrt();
    let n = out.len();
    for i in 0..n {
        let mut acc = t.t[(i + 1, 0)] / sqrt_d;
        for j in 0..n {
            acc += t.t[(i + 1, j + 1)] * bloch[j];
        }
        out[i] = acc;
    }
}

/// Linear part only: `M x`.
pub(crate) fn apply_linear_into(m: &RMatrix, x: &[f64], out: &mut [f64]) {
    matvec_into(m, x, out);
}

/// `T(E1 ∘ E2) = T(E1) T(E2)`.
pub fn compose(t1: &TransferMatrix, t2: &TransferMatrix) -> Result<TransferMatrix> {
    if t1.dim != t2.dim {
        return Err(Error::DimensionMismatch {
            expected: t1.dim,
            found: t2.dim,
        });
    }
    Ok(TransferMatrix {
        dim: t1.dim,
        t: &t1.t * &t2.t,
    })
}

/// `C = (1/d) Σ_μν T_μν λ_μ ⊗ λ_νᵀ`.
pub fn choi_from_transfer(t: &TransferMatrix, basis: &HermitianBasis) -> Result<ChoiMatrix> {
    if t.dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: t.dim,
        });
    }
    let d = basis.dim();
    let n = basis.len();
    let mut c = CMatrix::zeros(n, n);
    let inv_d = 1.0 / d as f64;
    for mu in 0..n {
        for nu in 0..n {
            let w = t.t[(mu, nu)] * inv_d;
            if w == 0.0 {
                continue;
            }
            for &(i, j, a) in basis.entries(mu) {
                // (λ_νᵀ)_{lk} = (λ_ν)_{kl}
                for &(k, l, b) in basis.entries(nu) {
                    c[(i * d + l, j * d + k)] += a * b * w;
                }
            }
        }
    }
    Ok(ChoiMatrix { dim: d, c })
}

/// Reduced Choi formula for unital maps,
/// `C = (𝟙 + d Σ_{μ,ν≥1} M_μν λ_μ ⊗ λ_νᵀ)/d²`.
pub fn choi_from_unital_affine(a: &AffineMap, basis: &HermitianBasis) -> Result<ChoiMatrix> {
    let d = basis.dim();
    let n = basis.len();
    let mut c = CMatrix::identity(n, n);
    for mu in 1..n {
        for nu in 1..n {
            let w = a.m[(mu - 1, nu - 1)] * d as f64;
            let kron = basis.op(mu).kronecker(&basis.op(nu).transpose());
            c += kron * Complex64::new(w, 0.0);
        }
    }
    c /= Complex64::new((d * d) as f64, 0.0);
    Ok(ChoiMatrix { dim: d, c })
}

/// `c = 0` within `tol` (max norm).
pub fn is_unital(a: &AffineMap, tol: f64) -> bool {
    a.c.iter().all(|x| x.abs() <= tol)
}

/// Smallest Choi eigenvalue at least `-tol·max(1, ‖C‖₂)`.
pub fn is_cp(c: &ChoiMatrix, tol: f64) -> bool {
    let eig = c.eigenvalues();
    let spectral = eig.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    hermiticity_deviation(&c.c) <= POLICY.structural * spectral.max(1.0)
        && eig.first().copied().unwrap_or(0.0) >= -tol * spectral.max(1.0)
}
