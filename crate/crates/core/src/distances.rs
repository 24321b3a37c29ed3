//! Monotone distances and fidelity between density operators.
//!
//! The Bures distance is evaluated through the fidelity deficit `1 - F`,
//! computed in the eigenbasis of the first state so that nearly identical
//! states do not lose their separation to cancellation in `1 - F`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    adjoint_sandwich_into, check_hermitian, clamp_eigenvalue, eigh, eigvalsh_into,
    frobenius_distance, psd_sqrt, trace_norm, CMatrix, HermitianEigen,
};
use crate::states::check_density;

/// Eigenvalue below which a direction counts as outside the support.
const SUPPORT_CUTOFF: f64 = 1e-12;
/// Weight of the first state on a missing direction that makes the
/// relative entropy infinite.
const SUPPORT_OVERLAP: f64 = 1e-10;

fn same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// `½ Tr|ρ1 - ρ2|`.
pub fn trace_distance(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    same_dim(rho1, rho2)?;
    Ok(0.5 * trace_norm(&(rho1 - rho2))?)
}

/// Uhlmann fidelity `Tr √(√ρ1 ρ2 √ρ1)`.
pub fn fidelity(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    same_dim(rho1, rho2)?;
    check_density(rho1)?;
    check_density(rho2)?;
    if rho1 == rho2 {
        return Ok(1.0);
    }
    let s = psd_sqrt(rho1)?;
    let x = &s * rho2 * &s;
    let mut eig = Vec::new();
    eigvalsh_into(&x, &mut eig);
    let mut f = 0.0;
    for v in eig {
        f += clamp_eigenvalue(v)?.sqrt();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `√(2(1 - F))`.
pub fn bures_distance(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    Ok((2.0 * fidelity_deficit(rho1, rho2)?).sqrt())
}

/// `1 - F(ρ1, ρ2)`, evaluated without forming `F` first.
pub fn fidelity_deficit(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    same_dim(rho1, rho2)?;
    check_density(rho1)?;
    check_density(rho2)?;
    let prepared = PreparedState::new(rho1)?;
    let mut scratch = Scratch::new(rho1.nrows());
    prepared.deficit(rho2, &mut scratch)
}

/// `S(ρ1‖ρ2) = Tr ρ1(ln ρ1 - ln ρ2)` in nats; `+∞` when the support of
/// `ρ1` is not contained in that of `ρ2`.
pub fn relative_entropy(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    same_dim(rho1, rho2)?;
    check_density(rho1)?;
    check_density(rho2)?;
    if rho1 == rho2 {
        return Ok(0.0);
    }
    let e1 = eigh(rho1);
    let e2 = eigh(rho2);
    Ok(relative_entropy_from(&e1, rho1, &e2))
}

fn relative_entropy_from(e1: &HermitianEigen, rho1: &CMatrix, e2: &HermitianEigen) -> f64 {
    let neg_entropy: f64 = e1
        .values
        .iter()
        .filter(|&&a| a > 0.0)
        .map(|&a| a * a.ln())
        .sum();
    let n = rho1.nrows();
    let mut cross = 0.0;
    for (k, &b) in e2.values.iter().enumerate() {
        // ⟨w_k|ρ1|w_k⟩
        let mut weight = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                weight += e2.vectors[(i, k)].conj() * rho1[(i, j)] * e2.vectors[(j, k)];
            }
        }
        let w = weight.re;
        if b < SUPPORT_CUTOFF {
            if w > SUPPORT_OVERLAP {
                return f64::INFINITY;
            }
            continue;
        }
        cross += w * b.ln();
    }
    (neg_entropy - cross).max(0.0)
}

/// `S(ρ1‖ρ2) + S(ρ2‖ρ1)`.
pub fn symmetric_relative_entropy(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    Ok(relative_entropy(rho1, rho2)? + relative_entropy(rho2, rho1)?)
}

/// `√(2(1 - Tr √ρ1 √ρ2))`, which equals `‖√ρ1 - √ρ2‖_F` for unit-trace
/// inputs; the Frobenius form is what gets evaluated.
pub fn hellinger_distance(rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
    same_dim(rho1, rho2)?;
    check_density(rho1)?;
    check_density(rho2)?;
    Ok(frobenius_distance(&psd_sqrt(rho1)?, &psd_sqrt(rho2)?))
}

/// Distances selectable for the non-unital non-Markovianity measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    #[default]
    Bures,
    BuresSquared,
    /// `1 - F`.
    OneMinusFidelity,
    Hellinger,
    SymmetricRelativeEntropy,
    /// Trace distance. Only for verification: it cannot see the non-unital
    /// part of the dynamics, so the CLI does not offer it.
    Trace,
}

impl Distance {
    pub const USER_CHOICES: [Distance; 5] = [
        Distance::Bures,
        Distance::BuresSquared,
        Distance::OneMinusFidelity,
        Distance::Hellinger,
        Distance::SymmetricRelativeEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distance::Bures => "bures",
            Distance::BuresSquared => "bures-sq",
            Distance::OneMinusFidelity => "fidelity",
            Distance::Hellinger => "hellinger",
            Distance::SymmetricRelativeEntropy => "sym-rel-ent",
            Distance::Trace => "trace",
        }
    }

    pub fn evaluate(self, rho1: &CMatrix, rho2: &CMatrix) -> Result<f64> {
        match self {
            Distance::Bures => bures_distance(rho1, rho2),
            Distance::BuresSquared => Ok(2.0 * fidelity_deficit(rho1, rho2)?),
            Distance::OneMinusFidelity => fidelity_deficit(rho1, rho2),
            Distance::Hellinger => hellinger_distance(rho1, rho2),
            Distance::SymmetricRelativeEntropy => symmetric_relative_entropy(rho1, rho2),
            Distance::Trace => trace_distance(rho1, rho2),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distance {
    type Err = Error;

    /// Parses the user-facing names; `trace` is rejected.
    fn from_str(s: &str) -> Result<Self> {
        Distance::USER_CHOICES
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown distance '{s}'")))
    }
}

/// Per-evaluation scratch buffers for [`PreparedState`].
#[derive(Debug, Clone)]
pub struct Scratch {
    tmp: CMatrix,
    rotated: CMatrix,
    eig: Vec<f64>,
}

impl Scratch {
    pub fn new(dim: usize) -> Self {
        Scratch {
            tmp: CMatrix::zeros(dim, dim),
            rotated: CMatrix::zeros(dim, dim),
            eig: Vec::with_capacity(dim),
        }
    }
}

/// A first argument decomposed once and reused against many second
/// arguments.
#[derive(Debug, Clone)]
pub struct PreparedState {
    rho: CMatrix,
    eig: HermitianEigen,
    sqrt_values: Vec<f64>,
    sqrt: Option<CMatrix>,
}

impl PreparedState {
    pub fn new(rho: &CMatrix) -> Result<Self> {
        check_hermitian(rho)?;
        let eig = eigh(rho);
        let sqrt_values = eig
            .values
            .iter()
            .map(|&v| clamp_eigenvalue(v).map(f64::sqrt))
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedState {
            rho: rho.clone(),
            eig,
            sqrt_values,
            sqrt: None,
        })
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    fn sqrt_matrix(&self) -> CMatrix {
        match &self.sqrt {
            Some(s) => s.clone(),
            None => self.eig.map(|v| v.max(0.0).sqrt()),
        }
    }

    /// Precompute `√ρ1` for distances that need it as a matrix.
    pub fn with_sqrt(mut self) -> Self {
        self.sqrt = Some(self.eig.map(|v| v.max(0.0).sqrt()));
        self
    }

    /// `1 - F(ρ1, ρ2)`. In the eigenbasis of `ρ1` (eigenvalues `a_i`), with
    /// `ρ2' = V† ρ2 V` and `X = diag(√a) ρ2' diag(√a)`:
    ///
    /// `1 - F = ½ Σ_i (√a_i - √ρ2'_ii)² + (Tr √diag X - Tr √X)`.
    ///
    /// Both terms are non-negative and vanish for commuting inputs without
    /// any cancellation.
    pub fn deficit(&self, rho2: &CMatrix, scratch: &mut Scratch) -> Result<f64> {
        if *rho2 == self.rho {
            return Ok(0.0);
        }
        let n = self.rho.nrows();
        adjoint_sandwich_into(&self.eig.vectors, rho2, &mut scratch.tmp, &mut scratch.rotated);
        let rot = &mut scratch.rotated;
        let mut diagonal = 0.0;
        let mut sqrt_diag = 0.0;
        for i in 0..n {
            let b = clamp_eigenvalue(rot[(i, i)].re)?;
            let sa = self.sqrt_values[i];
            diagonal += (sa - b.sqrt()).powi(2);
            sqrt_diag += sa * b.sqrt();
        }
        // X = diag(√a) ρ2' diag(√a), in place.
        for i in 0..n {
            for j in 0..n {
                rot[(i, j)] *= self.sqrt_values[i] * self.sqrt_values[j];
            }
        }
        let off = if n == 2 {
            let p = rot[(0, 0)].re.max(0.0);
            let s = rot[(1, 1)].re.max(0.0);
            let q2 = rot[(0, 1)].norm_sqr();
            if q2 == 0.0 {
                0.0
            } else {
                // (Tr√diag X)² - (Tr√X)² = 2|q|²/(√(ps) + √(ps - |q|²))
                let ps = p * s;
                let det = (ps - q2).max(0.0);
                let denom = ps.sqrt() + det.sqrt();
                if denom == 0.0 {
                    0.0
                } else {
                    let diff_sq = 2.0 * q2 / denom;
                    let sum_diag = p.sqrt() + s.sqrt();
                    let sum_eig = (p + s + 2.0 * det.sqrt()).sqrt();
                    diff_sq / (sum_diag + sum_eig)
                }
            }
        } else {
            eigvalsh_into(rot, &mut scratch.eig);
            let mut tr_sqrt = 0.0;
            for &v in &scratch.eig {
                tr_sqrt += clamp_eigenvalue(v)?.sqrt();
            }
            (sqrt_diag - tr_sqrt).max(0.0)
        };
        Ok((0.5 * diagonal + off).max(0.0))
    }

    /// Distance from this state to `rho2`.
    pub fn distance(&self, kind: Distance, rho2: &CMatrix, scratch: &mut Scratch) -> Result<f64> {
        match kind {
            Distance::Bures => Ok((2.0 * self.deficit(rho2, scratch)?).sqrt()),
            Distance::BuresSquared => Ok(2.0 * self.deficit(rho2, scratch)?),
            Distance::OneMinusFidelity => self.deficit(rho2, scratch),
            Distance::Hellinger => {
                if *rho2 == self.rho {
                    return Ok(0.0);
                }
                Ok(frobenius_distance(&self.sqrt_matrix(), &psd_sqrt(rho2)?))
            }
            Distance::SymmetricRelativeEntropy => {
                if *rho2 == self.rho {
                    return Ok(0.0);
                }
                let e2 = eigh(rho2);
                Ok(relative_entropy_from(&self.eig, &self.rho, &e2)
                    + relative_entropy_from(&e2, rho2, &self.eig))
            }
            Distance::Trace => {
                let diff = &self.rho - rho2;
                eigvalsh_into(&diff, &mut scratch.eig);
                Ok(0.5 * scratch.eig.iter().map(|v| v.abs()).sum::<f64>())
            }
        }
    }
}
