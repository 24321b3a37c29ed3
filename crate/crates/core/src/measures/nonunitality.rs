//! Non-unitality measure: the largest total purity increase
//! `∫_{dP/dt>0} |dP/dt| dt` over initial states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::blp::{bloch_of, ket_from_params, ket_params};
use super::{central_difference, heuristic_caveats, increase_integral, positive_part_integral, Maximizer, MeasureReport, Series};
use crate::basis::HermitianBasis;
use crate::channels::{apply_affine_into, TransferMatrix};
use crate::error::{Error, Result};
use crate::linalg::RVector;
use crate::optimize::{nelder_mead_max, sphere_grid, OptimizerConfig};
use crate::processes::{QuantumProcess, TimeGrid};
use crate::states::{pure_density, qubit_bloch_from_angles, random_density, random_ket, BlochState};

struct PuritySweep {
    dim: usize,
    times: Vec<f64>,
    transfers: Vec<TransferMatrix>,
}

impl PuritySweep {
    fn new(p: &QuantumProcess, grid: &TimeGrid) -> Result<Self> {
        Ok(PuritySweep {
            dim: p.dim(),
            times: grid.points(),
            transfers: p.sample(grid)?,
        })
    }

    /// `P(E_t(ρ0)) = 1/d + |M r0 + c|²` on the grid.
    fn purities(&self, r0: &[f64], out: &mut [f64]) {
        let mut r = vec![0.0; r0.len()];
        let base = 1.0 / self.dim as f64;
        for (k, t) in self.transfers.iter().enumerate() {
            apply_affine_into(t, r0, &mut r);
            out[k] = base + r.iter().map(|x| x * x).sum::<f64>();
        }
    }

    fn objective(&self, r0: &[f64]) -> f64 {
        let n = self.times.len();
        let mut pur = vec![0.0; n];
        let mut deriv = vec![0.0; n];
        self.purities(r0, &mut pur);
        increase_integral(&self.times, &pur, &mut deriv)
    }
}

/// Purity of `E_t(ρ0)` on the grid.
pub fn purity_trace(p: &QuantumProcess, grid: &TimeGrid, rho0: &BlochState) -> Result<Vec<f64>> {
    if rho0.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho0.dim(),
        });
    }
    let sweep = PuritySweep::new(p, grid)?;
    let mut out = vec![0.0; grid.len()];
    sweep.purities(rho0.bloch().as_slice(), &mut out);
    Ok(out)
}

/// Qubit state from `(θ, φ, s)` with the radius fraction `s` clamped to `[0, 1]`.
fn qubit_candidate(x: &[f64]) -> RVector {
    qubit_bloch_from_angles(x[0], x[1], x[2].clamp(0.0, 1.0))
}

/// `N_nu = max_{ρ0} ∫_{dP/dt>0} |dP/dt| dt`, heuristic maximization.
///
/// The maximally mixed state is always evaluated. Qubits add a pure-state
/// sphere grid and simplex refinement over `(θ, φ, s)`; larger `d` adds
/// random pure states refined over the ket. Random mixed states are added in
/// both cases.
pub fn nonunitality_measure(
    p: &QuantumProcess,
    grid: &TimeGrid,
    opt: &OptimizerConfig,
    basis: &HermitianBasis,
) -> Result<MeasureReport> {
    let d = p.dim();
    if d != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: d,
        });
    }
    let sweep = PuritySweep::new(p, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
    let nb = d * d - 1;

    let mut candidates: Vec<RVector> = vec![RVector::zeros(nb)];
    let mut kets: Vec<Vec<f64>> = Vec::new();
    let structured_start = candidates.len();
    if d == 2 {
        candidates.extend(
            sphere_grid(opt.grid_theta, opt.grid_phi)
                .into_iter()
                .map(|(t, f)| qubit_bloch_from_angles(t, f, 1.0)),
        );
    } else {
        for _ in 0..opt.random_pure {
            let psi = random_ket(d, &mut rng);
            candidates.push(bloch_of(&pure_density(&psi), basis)?);
            kets.push(ket_params(&psi));
        }
    }
    let structured_end = candidates.len();
    for _ in 0..opt.random_mixed {
        candidates.push(bloch_of(&random_density(d, &mut rng), basis)?);
    }

    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|r| sweep.objective(r.as_slice()))
        .collect();

    // Ties keep the earliest candidate, so the maximally mixed state wins
    // whenever nothing beats it.
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    let mut best_r = candidates[best].clone();
    let best_score = scores[best];

    if opt.simplex_iterations > 0 && structured_end > structured_start {
        let start = (structured_start..structured_end)
            .max_by(|&a, &b| scores[a].total_cmp(&scores[b]))
            .unwrap();
        let refined = if d == 2 {
            let (t0, f0) = sphere_grid(opt.grid_theta, opt.grid_phi)[start - structured_start];
            let step = std::f64::consts::PI / opt.grid_theta.max(2) as f64;
            let m = nelder_mead_max(
                |x| sweep.objective(qubit_candidate(x).as_slice()),
                &[t0, f0, 1.0],
                step,
                opt.simplex_iterations,
                opt.simplex_tolerance,
            );
            (qubit_candidate(&m.x), m.value)
        } else {
            let to_bloch = |x: &[f64]| bloch_of(&pure_density(&ket_from_params(x)), basis);
            let m = nelder_mead_max(
                |x| to_bloch(x).map(|r| sweep.objective(r.as_slice())).unwrap_or(f64::NAN),
                &kets[start - structured_start],
                0.1,
                opt.simplex_iterations,
                opt.simplex_tolerance,
            );
            (to_bloch(&m.x)?, m.value)
        };
        if refined.1 > best_score {
            best_r = refined.0;
        }
    }

    let mut pur = vec![0.0; grid.len()];
    sweep.purities(best_r.as_slice(), &mut pur);
    let rate = central_difference(&sweep.times, &pur);
    // The literal integrand |dP/dt| restricted to dP/dt > 0.
    let integrand: Vec<f64> = rate.iter().map(|&v| if v > 0.0 { v.abs() } else { v }).collect();
    let integral = positive_part_integral(&sweep.times, &integrand);
    Ok(MeasureReport {
        measure: "nonunitality".into(),
        value: integral.value,
        contributions: integral.contributions,
        maximizer: Maximizer::InitialState {
            bloch: best_r.iter().copied().collect(),
        },
        times: sweep.times,
        trace: vec![Series::new("purity", pur), Series::new("purity_rate", rate)],
        caveats: heuristic_caveats(grid.t_max(), "initial states"),
    })
}
