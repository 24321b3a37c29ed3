//! Time-parameterized channel families `t ↦ E_{t,0}`, intermediate maps and
//! the divisibility witness `g(t)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::HermitianBasis;
use crate::channels::{choi_from_transfer, is_cp, TransferMatrix};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, RMatrix};
use crate::measures::{positive_part_integral, Maximizer, MeasureReport, Series};
use crate::policy::POLICY;

/// Default finite-difference step for `g(t)`.
pub const DEFAULT_RATE_STEP: f64 = 1e-5;

/// Uniform grid `0 = t_0 < … < t_{n-1} = t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    t_max: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!("t_max must be positive, got {t_max}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        Ok(TimeGrid { t_max, n })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.t_max / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t_max
        } else {
            self.t_max * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

type TransferFn = dyn Fn(f64) -> Result<TransferMatrix> + Send + Sync;

/// Transfer matrices sampled at ascending times starting at `t = 0`,
/// linearly interpolated entrywise in between.
#[derive(Debug, Clone)]
pub struct TabulatedProcess {
    dim: usize,
    times: Vec<f64>,
    transfers: Vec<TransferMatrix>,
}

impl TabulatedProcess {
    /// Validates ordering, identity at `t = 0`, trace preservation (file
    /// tolerance) and complete positivity of every sample.
    pub fn new(dim: usize, times: Vec<f64>, transfers: Vec<RMatrix>, basis: &HermitianBasis) -> Result<Self> {
        if basis.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: dim,
            });
        }
        if times.is_empty() || times.len() != transfers.len() {
            return Err(Error::InvalidInput(format!(
                "{} times but {} transfer matrices",
                times.len(),
                transfers.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidProcess {
                t: times[0],
                reason: "first sample must be at t = 0".into(),
            });
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidProcess {
                    t: w[1],
                    reason: "times must be strictly ascending".into(),
                });
            }
        }
        let tol = POLICY.file_trace_preservation;
        let mut checked = Vec::with_capacity(transfers.len());
        for (&t, m) in times.iter().zip(transfers) {
            let tm = TransferMatrix::with_tolerance(dim, m, tol).map_err(|e| Error::InvalidProcess {
                t,
                reason: e.to_string(),
            })?;
            let choi = choi_from_transfer(&tm, basis)?;
            if !is_cp(&choi, POLICY.psd_slack) {
                return Err(Error::InvalidProcess {
                    t,
                    reason: format!(
                        "map is not completely positive (Choi eigenvalue {:.3e})",
                        choi.min_eigenvalue()
                    ),
                });
            }
            checked.push(tm);
        }
        let id_dev = (checked[0].matrix() - RMatrix::identity(dim * dim, dim * dim)).amax();
        if id_dev > tol {
            return Err(Error::InvalidProcess {
                t: 0.0,
                reason: format!("map at t = 0 is not the identity (deviation {id_dev:.3e})"),
            });
        }
        Ok(TabulatedProcess {
            dim,
            times,
            transfers: checked,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn transfers(&self) -> &[TransferMatrix] {
        &self.transfers
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("validated non-empty")
    }

    pub fn eval(&self, t: f64) -> Result<TransferMatrix> {
        let end = self.t_end();
        if !(0.0..=end).contains(&t) {
            return Err(Error::OutsideDomain { t, t_end: end });
        }
        let i = self.times.partition_point(|&s| s <= t);
        if i == self.times.len() {
            return Ok(self.transfers[i - 1].clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        if w == 0.0 {
            return Ok(self.transfers[i - 1].clone());
        }
        let m = self.transfers[i - 1].matrix() * (1.0 - w) + self.transfers[i].matrix() * w;
        TransferMatrix::with_tolerance(self.dim, m, POLICY.file_trace_preservation)
    }
}

#[derive(Clone)]
enum ProcessKind {
    ClosedForm(Arc<TransferFn>),
    Tabulated(Arc<TabulatedProcess>),
}

/// A quantum process `t ↦ T(E_{t,0})`, closed-form or tabulated.
#[derive(Clone)]
pub struct QuantumProcess {
    dim: usize,
    label: String,
    kind: ProcessKind,
}

impl fmt::Debug for QuantumProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            ProcessKind::ClosedForm(_) => "closed-form",
            ProcessKind::Tabulated(_) => "tabulated",
        };
        f.debug_struct("QuantumProcess")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("kind", &kind)
            .finish()
    }
}

impl QuantumProcess {
    pub fn closed_form<F>(dim: usize, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> Result<TransferMatrix> + Send + Sync + 'static,
    {
        QuantumProcess {
            dim,
            label: label.into(),
            kind: ProcessKind::ClosedForm(Arc::new(eval)),
        }
    }

    pub fn tabulated(label: impl Into<String>, table: TabulatedProcess) -> Self {
        QuantumProcess {
            dim: table.dim,
            label: label.into(),
            kind: ProcessKind::Tabulated(Arc::new(table)),
        }
    }

    /// The identity process, `T(t) = 𝟙` for all `t`.
    pub fn identity(dim: usize) -> Self {
        Self::closed_form(dim, "identity", move |_| Ok(TransferMatrix::identity(dim)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Last time at which the process is defined, if bounded.
    pub fn t_end(&self) -> Option<f64> {
        match &self.kind {
            ProcessKind::ClosedForm(_) => None,
            ProcessKind::Tabulated(t) => Some(t.t_end()),
        }
    }

    /// `T(E_{t,0})`.
    pub fn eval(&self, t: f64) -> Result<TransferMatrix> {
        if !(t >= 0.0) {
            return Err(Error::OutOfRange(format!("time must be non-negative, got {t}")));
        }
        match &self.kind {
            ProcessKind::ClosedForm(f) => f(t),
            ProcessKind::Tabulated(table) => table.eval(t),
        }
    }

    /// `eval` at every grid point.
    pub fn sample(&self, grid: &TimeGrid) -> Result<Vec<TransferMatrix>> {
        (0..grid.len())
            .into_par_iter()
            .map(|i| self.eval(grid.point(i)))
            .collect()
    }
}

/// `T(E_{t2,t1}) = T(E_{t2,0}) T(E_{t1,0})⁻¹`. The result is trace
/// preserving but need not be completely positive.
pub fn intermediate_map(p: &QuantumProcess, t1: f64, t2: f64) -> Result<TransferMatrix> {
    if !(t1 >= 0.0 && t2 >= t1) {
        return Err(Error::OutOfRange(format!(
            "need 0 <= t1 <= t2, got t1 = {t1}, t2 = {t2}"
        )));
    }
    if t1 == t2 {
        return Ok(TransferMatrix::identity(p.dim()));
    }
    let first = p.eval(t1)?;
    let second = p.eval(t2)?;
    intermediate_from(&first, &second, t1)
}

fn intermediate_from(first: &TransferMatrix, second: &TransferMatrix, t1: f64) -> Result<TransferMatrix> {
    let condition = condition_number(first.matrix());
    if !(condition <= POLICY.max_condition) {
        return Err(Error::NonInvertibleProcess { t: t1, condition });
    }
    // X = T1⁻ᵀ T2ᵀ, so Xᵀ = T2 T1⁻¹.
    let lu = first.matrix().transpose().full_piv_lu();
    let x = lu
        .solve(&second.matrix().transpose())
        .ok_or(Error::NonInvertibleProcess { t: t1, condition })?;
    TransferMatrix::with_tolerance(first.dim(), x.transpose(), POLICY.file_trace_preservation)
}

/// Finite-difference estimate of `g(t) = lim (Tr|C(E_{t+ε,t})| - 1)/ε`
/// with one Richardson step, `2q(ε/2) - q(ε)`. Values at or below the
/// policy's rate floor (negative ones included) are reported as zero.
///
/// Tabulated processes are probed at `t_end - eps` when `t + eps` would
/// leave their domain.
pub fn rhp_g(p: &QuantumProcess, t: f64, eps: f64, basis: &HermitianBasis) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange(format!("eps must be positive, got {eps}")));
    }
    let t = match p.t_end() {
        Some(end) if t + eps > end => (end - eps).max(0.0),
        _ => t,
    };
    let base = p.eval(t)?;
    let rate = |e: f64| -> Result<f64> {
        let step = intermediate_from(&base, &p.eval(t + e)?, t)?;
        let choi = choi_from_transfer(&step, basis)?;
        Ok((choi.trace_norm() - 1.0) / e)
    };
    let g = 2.0 * rate(0.5 * eps)? - rate(eps)?;
    Ok(if g <= POLICY.rate_floor { 0.0 } else { g })
}

/// `g(t)` at every grid point.
pub fn rhp_g_trace(p: &QuantumProcess, grid: &TimeGrid, eps: f64, basis: &HermitianBasis) -> Result<Vec<f64>> {
    (0..grid.len())
        .into_par_iter()
        .map(|i| rhp_g(p, grid.point(i), eps, basis))
        .collect()
}

/// `N_RHP = ∫_0^{t_max} g(t) dt` by trapezoid on the grid.
pub fn rhp_measure(p: &QuantumProcess, grid: &TimeGrid, eps: f64, basis: &HermitianBasis) -> Result<MeasureReport> {
    let g = rhp_g_trace(p, grid, eps, basis)?;
    let times = grid.points();
    let integral = positive_part_integral(&times, &g);
    Ok(MeasureReport {
        measure: "rhp".into(),
        value: integral.value,
        contributions: integral.contributions,
        maximizer: Maximizer::None,
        times,
        trace: vec![Series::new("g", g)],
        caveats: vec![format!(
            "integral truncated at t_max = {}; g(t) from finite differences with eps = {eps:e} and one Richardson step",
            grid.t_max()
        )],
    })
}
