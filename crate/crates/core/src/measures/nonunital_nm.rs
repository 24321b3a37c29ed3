//! Non-unital non-Markovianity: increases of a fidelity-type distance
//! between `E_t(𝟙/d)` and `E_t(ϱ_τ)`, where `ϱ_τ = E_τ(𝟙/d)` runs over the
//! trajectory of the maximally mixed state.

use rayon::prelude::*;

use super::{central_difference, increase_integral, positive_part_integral, Maximizer, MeasureReport, Series};
use crate::basis::HermitianBasis;
use crate::channels::{apply_affine_into, TransferMatrix};
use crate::distances::{Distance, PreparedState, Scratch};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RVector};
use crate::optimize::golden_section_max;
use crate::processes::{QuantumProcess, TimeGrid};
use crate::states::BlochState;

/// `ϱ_{τ_i} = E_{τ_i}(𝟙/d)` for every grid point, with `ϱ_0 = 𝟙/d` exactly.
pub fn trajectory_states(p: &QuantumProcess, grid: &TimeGrid) -> Result<Vec<BlochState>> {
    let d = p.dim();
    let transfers = p.sample(grid)?;
    let centers = centers(&transfers, d);
    centers
        .into_iter()
        .map(|c| BlochState::from_vector(d, c))
        .collect()
}

fn center(t: &TransferMatrix, d: usize) -> RVector {
    let zeros = vec![0.0; d * d - 1];
    let mut c = vec![0.0; d * d - 1];
    apply_affine_into(t, &zeros, &mut c);
    RVector::from_vec(c)
}

fn centers(transfers: &[TransferMatrix], d: usize) -> Vec<RVector> {
    let mut out: Vec<RVector> = transfers.iter().map(|t| center(t, d)).collect();
    if let Some(first) = out.first_mut() {
        first.fill(0.0);
    }
    out
}

struct TrajectorySweep<'a> {
    dim: usize,
    kind: Distance,
    times: Vec<f64>,
    transfers: Vec<TransferMatrix>,
    centers: Vec<RVector>,
    /// `E_{t_i}(𝟙/d)`, decomposed once.
    prepared: Vec<PreparedState>,
    basis: &'a HermitianBasis,
}

impl<'a> TrajectorySweep<'a> {
    fn new(p: &QuantumProcess, grid: &TimeGrid, kind: Distance, basis: &'a HermitianBasis) -> Result<Self> {
        let d = p.dim();
        if d != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: d,
            });
        }
        let transfers = p.sample(grid)?;
        let centers = centers(&transfers, d);
        let prepared = centers
            .par_iter()
            .map(|c| {
                let mut rho = CMatrix::zeros(d, d);
                basis.bloch_operator_into(1.0 / d as f64, c.as_slice(), &mut rho);
                let s = PreparedState::new(&rho)?;
                Ok(if kind == Distance::Hellinger { s.with_sqrt() } else { s })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrajectorySweep {
            dim: d,
            kind,
            times: grid.points(),
            transfers,
            centers,
            prepared,
            basis,
        })
    }

    /// `D(E_{t_i}(𝟙/d), E_{t_i}(ϱ))` for the state with Bloch vector `r`.
    fn distances(&self, r: &[f64], tau: f64, out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        let mut r2 = vec![0.0; r.len()];
        let mut rho2 = CMatrix::zeros(self.dim, self.dim);
        let offset = 1.0 / self.dim as f64;
        for (i, t) in self.transfers.iter().enumerate() {
            apply_affine_into(t, r, &mut r2);
            self.basis.bloch_operator_into(offset, &r2, &mut rho2);
            let v = self.prepared[i].distance(self.kind, &rho2, scratch)?;
            if !v.is_finite() {
                return Err(Error::SingularDistance { t: self.times[i], tau });
            }
            out[i] = v;
        }
        Ok(())
    }

    fn objective(&self, r: &[f64], tau: f64, scratch: &mut Scratch) -> Result<f64> {
        let n = self.times.len();
        let mut dist = vec![0.0; n];
        let mut deriv = vec![0.0; n];
        self.distances(r, tau, &mut dist, scratch)?;
        Ok(increase_integral(&self.times, &dist, &mut deriv))
    }

    /// Bloch vector of `ϱ_τ` for an arbitrary `τ`.
    fn probe(&self, p: &QuantumProcess, tau: f64) -> Result<RVector> {
        Ok(center(&p.eval(tau)?, self.dim))
    }
}

/// `D(E_t(ϱ_0), E_t(ϱ_τ))` on the grid for one trajectory time `τ`.
pub fn distance_trace_at_tau(
    p: &QuantumProcess,
    grid: &TimeGrid,
    tau: f64,
    dist: Distance,
    basis: &HermitianBasis,
) -> Result<Vec<f64>> {
    let sweep = TrajectorySweep::new(p, grid, dist, basis)?;
    let r = if tau == 0.0 { RVector::zeros(p.dim() * p.dim() - 1) } else { sweep.probe(p, tau)? };
    let mut out = vec![0.0; grid.len()];
    sweep.distances(r.as_slice(), tau, &mut out, &mut Scratch::new(p.dim()))?;
    Ok(out)
}

/// `𝒩_nu = max_τ ∫_{σ_nu>0} σ_nu dt` with `σ_nu = d/dt D(E_t(ϱ_0), E_t(ϱ_τ))`.
///
/// `τ` runs over the same grid as `t`; the best grid point is refined by
/// golden-section search over its two neighbouring cells.
pub fn nonunital_nm_measure(
    p: &QuantumProcess,
    grid: &TimeGrid,
    dist: Distance,
    basis: &HermitianBasis,
) -> Result<MeasureReport> {
    let sweep = TrajectorySweep::new(p, grid, dist, basis)?;
    let d = sweep.dim;
    let n = grid.len();

    let by_tau: Vec<f64> = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(d),
            |scratch, j| sweep.objective(sweep.centers[j].as_slice(), sweep.times[j], scratch),
        )
        .collect::<Result<_>>()?;

    // First maximum wins on ties.
    let mut best = 0;
    for (j, &v) in by_tau.iter().enumerate() {
        if v > by_tau[best] {
            best = j;
        }
    }
    let mut tau = sweep.times[best];
    let mut r = sweep.centers[best].clone();

    if by_tau[best] > 0.0 {
        let lo = sweep.times[best.saturating_sub(1)];
        let hi = sweep.times[(best + 1).min(n - 1)];
        let mut scratch = Scratch::new(d);
        let mut failure = None;
        let m = golden_section_max(
            |x| match sweep.probe(p, x).and_then(|r| sweep.objective(r.as_slice(), x, &mut scratch)) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            lo,
            hi,
            1e-10 * grid.t_max().max(1.0),
            200,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if m.value > by_tau[best] {
            tau = m.x[0];
            r = sweep.probe(p, tau)?;
        }
    }

    let mut distance = vec![0.0; n];
    sweep.distances(r.as_slice(), tau, &mut distance, &mut Scratch::new(d))?;
    let sigma = central_difference(&sweep.times, &distance);
    let integral = positive_part_integral(&sweep.times, &sigma);
    Ok(MeasureReport {
        measure: "nonunital-nm".into(),
        value: integral.value,
        contributions: integral.contributions,
        maximizer: Maximizer::TrajectoryTime { tau },
        times: sweep.times,
        trace: vec![
            Series::new("distance", distance),
            Series::new("sigma_nu", sigma),
            Series::new("objective_by_tau", by_tau),
        ],
        caveats: vec![
            format!("time integral truncated at t_max = {}", grid.t_max()),
            format!("trajectory time tau restricted to [0, {}]", grid.t_max()),
            format!("distance: {dist}"),
        ],
    })
}
