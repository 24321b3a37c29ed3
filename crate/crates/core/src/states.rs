//! Density operators in generalized Bloch coordinates, `ρ = 𝟙/d + r·λ`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::basis::HermitianBasis;
use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, eigvalsh, trace, CMatrix, RVector};
use crate::policy::POLICY;

/// A state as its Bloch vector `r` (length `d² - 1`). The component along
/// `λ_0` is fixed at `1/√d` and not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochState {
    dim: usize,
    #[serde(serialize_with = "serialize_vector")]
    bloch: RVector,
}

fn serialize_vector<S: serde::Serializer>(v: &RVector, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

impl BlochState {
    /// Checked constructor: the reconstructed operator must be PSD.
    pub fn new(bloch: RVector, basis: &HermitianBasis) -> Result<Self> {
        let state = Self::from_vector(basis.dim(), bloch)?;
        density_from_bloch(&state, basis)?;
        Ok(state)
    }

    /// Length check only. Used for intermediate results that are validated
    /// later, or deliberately not at all (non-positive map probes).
    pub fn from_vector(dim: usize, bloch: RVector) -> Result<Self> {
        if bloch.len() + 1 != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                found: bloch.len(),
            });
        }
        Ok(BlochState { dim, bloch })
    }

    /// The maximally mixed state `𝟙/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        BlochState {
            dim,
            bloch: RVector::zeros(dim * dim - 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bloch(&self) -> &RVector {
        &self.bloch
    }

    pub fn into_bloch(self) -> RVector {
        self.bloch
    }

    /// `1/d + |r|²`.
    pub fn purity(&self) -> f64 {
        1.0 / self.dim as f64 + self.bloch.norm_squared()
    }

    /// Full coordinate vector `(1/√d, r)`.
    pub fn coordinates(&self) -> RVector {
        let mut v = RVector::zeros(self.bloch.len() + 1);
        v[0] = 1.0 / (self.dim as f64).sqrt();
        v.rows_mut(1, self.bloch.len()).copy_from(&self.bloch);
        v
    }
}

/// Checks trace one, Hermiticity and PSD within the policy slack.
pub fn check_density(rho: &CMatrix) -> Result<()> {
    check_hermitian(rho).map_err(|e| Error::NotAState(e.to_string()))?;
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > POLICY.trace || tr.im.abs() > POLICY.trace {
        return Err(Error::NotAState(format!("trace {tr} differs from one")));
    }
    let min = eigvalsh(rho).first().copied().unwrap_or(0.0);
    if min < -POLICY.psd_slack {
        return Err(Error::NotAState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

pub fn bloch_from_density(rho: &CMatrix, basis: &HermitianBasis) -> Result<BlochState> {
    check_density(rho)?;
    let r = basis.expand_complex(rho)?;
    let bloch = DVector::from_iterator(r.len() - 1, r.iter().skip(1).map(|z| z.re));
    BlochState::from_vector(basis.dim(), bloch)
}

/// `𝟙/d + Σ_{μ≥1} r_μ λ_μ` with no validity check.
pub fn density_from_bloch_unchecked(s: &BlochState, basis: &HermitianBasis) -> CMatrix {
    let d = basis.dim();
    let mut out = CMatrix::zeros(d, d);
    basis.bloch_operator_into(1.0 / d as f64, s.bloch.as_slice(), &mut out);
    out
}

pub fn density_from_bloch(s: &BlochState, basis: &HermitianBasis) -> Result<CMatrix> {
    if s.dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: s.dim,
        });
    }
    let rho = density_from_bloch_unchecked(s, basis);
    let min = eigvalsh(&rho).first().copied().unwrap_or(0.0);
    if min < -POLICY.psd_slack {
        return Err(Error::NotAState(format!(
            "Bloch vector of length {:.6} gives eigenvalue {min:.3e}",
            s.bloch.norm()
        )));
    }
    Ok(rho)
}

/// `Tr ρ²` of a valid density operator.
pub fn purity(rho: &CMatrix) -> Result<f64> {
    check_density(rho)?;
    Ok(rho.iter().map(|z| z.norm_sqr()).sum())
}

/// Random full-rank state `GG†/Tr(GG†)` from a complex Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = &g * g.adjoint();
    let tr = trace(&gg).re;
    let mut rho = gg / Complex64::new(tr, 0.0);
    // Remove the rounding-level anti-Hermitian part.
    rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    rho
}

/// Random state vector, uniform on the unit sphere of `C^d`.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
pub fn pure_density(psi: &DVector<Complex64>) -> CMatrix {
    let n = psi.norm_squared();
    psi * psi.adjoint() / Complex64::new(n, 0.0)
}

/// Qubit pure state on the Bloch sphere at polar angle `theta`, azimuth `phi`,
/// in the `σ/√2` normalization (radius `1/√2`).
pub fn qubit_bloch_from_angles(theta: f64, phi: f64, radius_fraction: f64) -> RVector {
    let r = radius_fraction * std::f64::consts::FRAC_1_SQRT_2;
    RVector::from_vec(vec![
        r * theta.sin() * phi.cos(),
        r * theta.sin() * phi.sin(),
        r * theta.cos(),
    ])
}
