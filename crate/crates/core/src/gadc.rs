//! Generalized amplitude damping channel, the time-dependent GADC process
//! with `p_t = cos²(ωt)`, `η_t = e^{-t}`, and closed-form reference values
//! for it.
//!
//! The `oracle_*` functions are written directly from the closed forms and
//! share no code with the state/channel pipeline.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channels::{transfer_from_affine, AffineMap, KrausSet, TransferMatrix};
use crate::error::{Error, Result};
use crate::processes::QuantumProcess;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadcParams {
    p: f64,
    eta: f64,
}

impl GadcParams {
    pub fn new(p: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("GADC p must lie in [0, 1], got {p}")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange(format!("GADC eta must lie in [0, 1], got {eta}")));
        }
        Ok(GadcParams { p, eta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

pub fn gadc_kraus(g: GadcParams) -> Result<KrausSet> {
    let (p, eta) = (g.p, g.eta);
    let m = |a: f64, b: f64, c: f64, d: f64| {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d].map(|x| Complex64::new(x, 0.0)))
    };
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (se, sl) = (eta.sqrt(), (1.0 - eta).sqrt());
    KrausSet::new(vec![
        m(sp, 0.0, 0.0, sp * se),
        m(0.0, sp * sl, 0.0, 0.0),
        m(sq * se, 0.0, 0.0, sq),
        m(0.0, 0.0, sq * sl, 0.0),
    ])
}

/// `M = diag(√η, √η, η)`, `c = (0, 0, (2p-1)(1-η)/√2)`.
pub fn gadc_affine(g: GadcParams) -> AffineMap {
    let se = g.eta.sqrt();
    AffineMap {
        dim: 2,
        m: DMatrix::from_diagonal(&DVector::from_vec(vec![se, se, g.eta])),
        c: DVector::from_vec(vec![0.0, 0.0, (2.0 * g.p - 1.0) * (1.0 - g.eta) / 2f64.sqrt()]),
    }
}

pub fn gadc_transfer(g: GadcParams) -> TransferMatrix {
    transfer_from_affine(&gadc_affine(g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadcProcessParams {
    omega: f64,
}

impl GadcProcessParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::OutOfRange(format!("omega must be finite and >= 0, got {omega}")));
        }
        Ok(GadcProcessParams { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// GADC with `η_t = e^{-t}` and a caller-supplied `p_t`.
pub fn gadc_process_with<F>(label: impl Into<String>, p_of_t: F) -> QuantumProcess
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    QuantumProcess::closed_form(2, label, move |t| {
        Ok(gadc_transfer(GadcParams::new(p_of_t(t), (-t).exp())?))
    })
}

/// `p_t = cos²(ωt)`, `η_t = e^{-t}`.
pub fn gadc_process(gp: GadcProcessParams) -> QuantumProcess {
    let omega = gp.omega;
    gadc_process_with(format!("gadc(omega={omega})"), move |t| (omega * t).cos().powi(2))
}

/// `W_t = cos(2ωt)(1 - e^{-t})`.
pub fn oracle_w(gp: GadcProcessParams, t: f64) -> f64 {
    (2.0 * gp.omega * t).cos() * (1.0 - (-t).exp())
}

/// `e^{-t/2}/√2 · √(x² + y² + e^{-t} z²)` with `(x, y, z) = r1 - r2`.
pub fn oracle_trace_distance(_gp: GadcProcessParams, bloch1: &[f64], bloch2: &[f64], t: f64) -> f64 {
    let x = bloch1[0] - bloch2[0];
    let y = bloch1[1] - bloch2[1];
    let z = bloch1[2] - bloch2[2];
    (-t / 2.0).exp() / 2f64.sqrt() * (x * x + y * y + (-t).exp() * z * z).sqrt()
}

/// Trace distance between `E_t(𝟙/2)` and `E_t(ϱ_τ)`:
/// `e^{-t}/2 · |cos 2ωτ| (1 - e^{-τ})`.
pub fn oracle_trajectory_distance(gp: GadcProcessParams, tau: f64, t: f64) -> f64 {
    (-t).exp() / 2.0 * (2.0 * gp.omega * tau).cos().abs() * (1.0 - (-tau).exp())
}

/// Fidelity between `E_t(𝟙/2)` and `E_t(ϱ_τ)`: `½(h₊ + h₋)` with
/// `h± = √((1 ± W_t)(1 ± W_t ± η_t W_τ))`.
pub fn oracle_fidelity(gp: GadcProcessParams, tau: f64, t: f64) -> Result<f64> {
    let wt = oracle_w(gp, t);
    let wtau = oracle_w(gp, tau);
    let shift = (-t).exp() * wtau;
    let h = |sign: f64| -> Result<f64> {
        let radicand = (1.0 + sign * wt) * (1.0 + sign * wt + sign * shift);
        if radicand < -1e-12 {
            return Err(Error::OutOfRange(format!(
                "fidelity radicand {radicand:.3e} is negative at t = {t}, tau = {tau}"
            )));
        }
        Ok(radicand.max(0.0).sqrt())
    };
    Ok(0.5 * (h(1.0)? + h(-1.0)?))
}

/// `f(t) = -ω sin(2ωt)(1 - e^{-t}) + cos²(ωt)`.
pub fn oracle_f(gp: GadcProcessParams, t: f64) -> f64 {
    let w = gp.omega;
    -w * (2.0 * w * t).sin() * (1.0 - (-t).exp()) + (w * t).cos().powi(2)
}

/// `g(t) = ½(|1 - f| + |f| - 1)`; zero exactly when `f ∈ [0, 1]`.
pub fn oracle_g(gp: GadcProcessParams, t: f64) -> f64 {
    let f = oracle_f(gp, t);
    0.5 * ((1.0 - f).abs() + f.abs() - 1.0)
}
