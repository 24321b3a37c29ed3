//! Orthonormal Hermitian operator basis.
//!
//! `λ_0 = 𝟙/√d` comes first, followed by the generalized Gell-Mann matrices
//! normalized to `Tr(λ_μ λ_ν) = δ_μν`, in three blocks:
//!
//! 1. symmetric pairs `(|j⟩⟨k| + |k⟩⟨j|)/√2` for `j < k`, lexicographic;
//! 2. antisymmetric pairs `(-i|j⟩⟨k| + i|k⟩⟨j|)/√2`, same pair order;
//! 3. diagonal `(Σ_{m<l} |m⟩⟨m| - l|l⟩⟨l|)/√(l(l+1))` for `l = 1..d-1`.
//!
//! For `d = 2` this is `{𝟙, σ_x, σ_y, σ_z}/√2`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, CMatrix, ZERO};
use crate::policy::POLICY;

/// Nonzero entry `(row, col, value)` of a basis element.
type Entry = (usize, usize, Complex64);

#[derive(Debug, Clone)]
pub struct HermitianBasis {
    dim: usize,
    ops: Vec<CMatrix>,
    entries: Vec<Vec<Entry>>,
}

/// Coordinates of an operator: real when the operator is Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinates {
    Real(DVector<f64>),
    Complex(DVector<Complex64>),
}

impl Coordinates {
    pub fn len(&self) -> usize {
        match self {
            Coordinates::Real(v) => v.len(),
            Coordinates::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> DVector<Complex64> {
        match self {
            Coordinates::Real(v) => v.map(|x| Complex64::new(x, 0.0)),
            Coordinates::Complex(v) => v.clone(),
        }
    }

    pub fn as_real(&self) -> Option<&DVector<f64>> {
        match self {
            Coordinates::Real(v) => Some(v),
            Coordinates::Complex(_) => None,
        }
    }
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let mut entries: Vec<Vec<Entry>> = Vec::with_capacity(dim * dim);
        let c = |re: f64, im: f64| Complex64::new(re, im);

        let s = 1.0 / (dim as f64).sqrt();
        entries.push((0..dim).map(|i| (i, i, c(s, 0.0))).collect());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pairs: Vec<(usize, usize)> = (0..dim)
            .flat_map(|j| ((j + 1)..dim).map(move |k| (j, k)))
            .collect();
        for &(j, k) in &pairs {
            entries.push(vec![(j, k, c(h, 0.0)), (k, j, c(h, 0.0))]);
        }
        for &(j, k) in &pairs {
            entries.push(vec![(j, k, c(0.0, -h)), (k, j, c(0.0, h))]);
        }
        for l in 1..dim {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut e: Vec<Entry> = (0..l).map(|m| (m, m, c(norm, 0.0))).collect();
            e.push((l, l, c(-(l as f64) * norm, 0.0)));
            entries.push(e);
        }

        let ops = entries
            .iter()
            .map(|e| {
                let mut m = CMatrix::zeros(dim, dim);
                for &(i, j, v) in e {
                    m[(i, j)] = v;
                }
                m
            })
            .collect();
        Ok(HermitianBasis { dim, ops, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `d²`.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn op(&self, mu: usize) -> &CMatrix {
        &self.ops[mu]
    }

    pub(crate) fn entries(&self, mu: usize) -> &[Entry] {
        &self.entries[mu]
    }

    fn check_operator(&self, o: &CMatrix) -> Result<()> {
        if o.nrows() != self.dim || o.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: if o.nrows() != self.dim { o.nrows() } else { o.ncols() },
            });
        }
        Ok(())
    }

    /// `r_μ = Tr(λ_μ† O)` as complex numbers.
    pub fn expand_complex(&self, o: &CMatrix) -> Result<DVector<Complex64>> {
        self.check_operator(o)?;
        Ok(DVector::from_iterator(
            self.len(),
            self.entries.iter().map(|e| {
                e.iter()
                    .map(|&(i, j, v)| v.conj() * o[(i, j)])
                    .sum::<Complex64>()
            }),
        ))
    }

    /// Coordinates of `O`; real when `O` is Hermitian within tolerance.
    pub fn expand(&self, o: &CMatrix) -> Result<Coordinates> {
        let r = self.expand_complex(o)?;
        let max_im = r.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
        if max_im <= POLICY.structural && hermiticity_deviation(o) <= POLICY.structural {
            Ok(Coordinates::Real(r.map(|z| z.re)))
        } else {
            Ok(Coordinates::Complex(r))
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// `Σ_μ r_μ λ_μ`.
    pub fn reconstruct(&self, r: &Coordinates) -> Result<CMatrix> {
        match r {
            Coordinates::Real(v) => self.reconstruct_real(v.as_slice()),
            Coordinates::Complex(v) => {
                self.check_len(v.len())?;
                let mut out = CMatrix::zeros(self.dim, self.dim);
                for (mu, e) in self.entries.iter().enumerate() {
                    for &(i, j, val) in e {
                        out[(i, j)] += v[mu] * val;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn reconstruct_real(&self, r: &[f64]) -> Result<CMatrix> {
        self.check_len(r.len())?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        self.accumulate_into(r, 0, &mut out);
        Ok(out)
    }

    /// `offset·𝟙 + Σ_{μ≥1} bloch[μ-1] λ_μ` written into `out` (no allocation).
    pub(crate) fn bloch_operator_into(&self, offset: f64, bloch: &[f64], out: &mut CMatrix) {
        debug_assert_eq!(bloch.len() + 1, self.len());
        out.fill(ZERO);
        for i in 0..self.dim {
            out[(i, i)] = Complex64::new(offset, 0.0);
        }
        self.accumulate_into(bloch, 1, out);
    }

    fn accumulate_into(&self, coeffs: &[f64], first: usize, out: &mut CMatrix) {
        for (k, &x) in coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for &(i, j, v) in &self.entries[first + k] {
                out[(i, j)] += v * x;
            }
        }
    }
}

/// Convenience for [`HermitianBasis::new`].
pub fn build_basis(dim: usize) -> Result<HermitianBasis> {
    HermitianBasis::new(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, trace};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pauli(which: char) -> CMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let entries = match which {
            'i' => [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
            'x' => [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
            'y' => [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
            _ => [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
        };
        CMatrix::from_row_slice(2, 2, &entries)
    }

    #[test]
    fn qubit_basis_is_scaled_pauli() {
        let b = build_basis(2).unwrap();
        for (mu, p) in ['i', 'x', 'y', 'z'].iter().enumerate() {
            let expected = pauli(*p) * Complex64::new(FRAC_1_SQRT_2, 0.0);
            assert!(frobenius_distance(b.op(mu), &expected) < 1e-15, "element {mu}");
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert_eq!(build_basis(1).unwrap_err(), Error::InvalidDimension(1));
        assert_eq!(build_basis(0).unwrap_err(), Error::InvalidDimension(0));
    }

    #[test]
    fn structure_for_small_dimensions() {
        for d in 2..=6 {
            let b = build_basis(d).unwrap();
            assert_eq!(b.len(), d * d);
            for (mu, op) in b.ops().iter().enumerate() {
                assert!(hermiticity_deviation(op) <= 1e-14);
                if mu > 0 {
                    assert!(trace(op).norm() <= 1e-12);
                }
                for (nu, other) in b.ops().iter().enumerate() {
                    let ip = trace(&(op * other));
                    let delta = if mu == nu { 1.0 } else { 0.0 };
                    assert!((ip - delta).norm() <= 1e-12, "d={d} <{mu},{nu}> = {ip}");
                }
            }
            let id = CMatrix::identity(d, d) * Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
            assert!(frobenius_distance(b.op(0), &id) < 1e-15);
        }
    }

    #[test]
    fn expand_identity_and_sigma_z() {
        let b = build_basis(2).unwrap();
        let r = b.expand(&CMatrix::identity(2, 2)).unwrap();
        let r = r.as_real().unwrap();
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.iter().skip(1).all(|x| x.abs() < 1e-15));

        let z = pauli('z') * Complex64::new(FRAC_1_SQRT_2, 0.0);
        let r = b.expand(&z).unwrap();
        let r = r.as_real().unwrap();
        assert_eq!(r.as_slice().len(), 4);
        assert!((r[3] - 1.0).abs() < 1e-15 && r[0].abs() + r[1].abs() + r[2].abs() < 1e-15);
    }

    #[test]
    fn reconstruct_ground_state() {
        let b = build_basis(2).unwrap();
        let m = b.reconstruct_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(m[(1, 1)].norm() < 1e-15 && m[(0, 1)].norm() < 1e-15);
        let id = b.reconstruct_real(&[2f64.sqrt(), 0.0, 0.0, 0.0]).unwrap();
        assert!(frobenius_distance(&id, &CMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn non_hermitian_operator_gives_complex_coordinates() {
        let b = build_basis(2).unwrap();
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(1.0, 0.0), ZERO, ZERO]);
        let r = b.expand(&m).unwrap();
        assert!(matches!(r, Coordinates::Complex(_)));
        assert!(frobenius_distance(&b.reconstruct(&r).unwrap(), &m) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let b = build_basis(3).unwrap();
        assert!(matches!(
            b.expand(&CMatrix::identity(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            b.reconstruct_real(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 9, found: 2 })
        ));
    }
}
