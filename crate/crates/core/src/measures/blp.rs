//! Trace-distance (BLP) non-Markovianity: the largest total increase of
//! `D_tr(E_t(ρ1), E_t(ρ2))` over initial pairs.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{central_difference, heuristic_caveats, increase_integral, positive_part_integral, Maximizer, MeasureReport, Series};
use crate::basis::HermitianBasis;
use crate::channels::{apply_channel, apply_linear_into};
use crate::distances::trace_distance;
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh_into, CMatrix, RMatrix, RVector};
use crate::optimize::{nelder_mead_max, sphere_grid, OptimizerConfig};
use crate::processes::{QuantumProcess, TimeGrid};
use crate::states::{bloch_from_density, density_from_bloch, pure_density, qubit_bloch_from_angles, random_density, random_ket, BlochState};

/// `σ(t) = d/dt D_tr(E_t(ρ1), E_t(ρ2))` on the grid, evaluated through the
/// full state pipeline (evolve both states, rebuild the density matrices,
/// take the trace distance).
pub fn blp_sigma(
    p: &QuantumProcess,
    rho1: &BlochState,
    rho2: &BlochState,
    grid: &TimeGrid,
    basis: &HermitianBasis,
) -> Result<Vec<f64>> {
    let times = grid.points();
    let d: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let tm = p.eval(t)?;
            let a = density_from_bloch(&apply_channel(&tm, rho1)?, basis)?;
            let b = density_from_bloch(&apply_channel(&tm, rho2)?, basis)?;
            trace_distance(&a, &b)
        })
        .collect::<Result<_>>()?;
    Ok(central_difference(&times, &d))
}

/// Linear blocks `M(t_i)` of a sampled process. Trace distances between
/// evolved states only depend on `M(t)(r1 - r2)`.
pub(crate) struct LinearSweep<'a> {
    pub times: Vec<f64>,
    pub blocks: Vec<RMatrix>,
    pub basis: &'a HermitianBasis,
}

impl<'a> LinearSweep<'a> {
    pub fn new(p: &QuantumProcess, grid: &TimeGrid, basis: &'a HermitianBasis) -> Result<Self> {
        let blocks = p.sample(grid)?.iter().map(|t| t.m_block()).collect();
        Ok(LinearSweep {
            times: grid.points(),
            blocks,
            basis,
        })
    }

    /// `½ Tr|(M(t_i) Δ)·λ|` for every grid point.
    pub fn trace_distances(&self, delta: &[f64], out: &mut [f64]) {
        let d = self.basis.dim();
        let mut v = vec![0.0; delta.len()];
        let mut op = CMatrix::zeros(d, d);
        let mut eig = Vec::with_capacity(d);
        for (k, m) in self.blocks.iter().enumerate() {
            apply_linear_into(m, delta, &mut v);
            if d == 2 {
                // v·σ/√2 has eigenvalues ±|v|/√2.
                out[k] = v.iter().map(|x| x * x).sum::<f64>().sqrt() * std::f64::consts::FRAC_1_SQRT_2;
                continue;
            }
            self.basis.bloch_operator_into(0.0, &v, &mut op);
            eigvalsh_into(&op, &mut eig);
            out[k] = 0.5 * eig.iter().map(|x| x.abs()).sum::<f64>();
        }
    }

    pub fn objective(&self, delta: &[f64]) -> f64 {
        let n = self.times.len();
        let mut dist = vec![0.0; n];
        let mut deriv = vec![0.0; n];
        self.trace_distances(delta, &mut dist);
        increase_integral(&self.times, &dist, &mut deriv)
    }
}

/// `D_tr(E_t(ρ1), E_t(ρ2))` on the grid via the Bloch-difference route.
pub fn trace_distance_trace(
    p: &QuantumProcess,
    rho1: &BlochState,
    rho2: &BlochState,
    grid: &TimeGrid,
    basis: &HermitianBasis,
) -> Result<Vec<f64>> {
    let sweep = LinearSweep::new(p, grid, basis)?;
    let delta = rho1.bloch() - rho2.bloch();
    let mut out = vec![0.0; grid.len()];
    sweep.trace_distances(delta.as_slice(), &mut out);
    Ok(out)
}

/// Candidate pair as two Bloch vectors.
#[derive(Clone)]
struct Pair {
    rho1: RVector,
    rho2: RVector,
}

impl Pair {
    fn delta(&self) -> RVector {
        &self.rho1 - &self.rho2
    }
}

fn antipodal(theta: f64, phi: f64) -> Pair {
    let r = qubit_bloch_from_angles(theta, phi, 1.0);
    // Negate without producing signed zeros in reports.
    Pair {
        rho2: r.map(|x| 0.0 - x),
        rho1: r,
    }
}

/// `2d` real parameters to a normalized ket.
pub(crate) fn ket_from_params(params: &[f64]) -> DVector<Complex64> {
    let d = params.len() / 2;
    let v = DVector::from_fn(d, |i, _| Complex64::new(params[2 * i], params[2 * i + 1]));
    let n = v.norm();
    if n == 0.0 {
        let mut e = DVector::zeros(d);
        e[0] = Complex64::new(1.0, 0.0);
        return e;
    }
    v / Complex64::new(n, 0.0)
}

pub(crate) fn ket_params(psi: &DVector<Complex64>) -> Vec<f64> {
    psi.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub(crate) fn bloch_of(rho: &CMatrix, basis: &HermitianBasis) -> Result<RVector> {
    Ok(bloch_from_density(rho, basis)?.into_bloch())
}

/// `N_BLP = max_{ρ1,ρ2} ∫_{σ>0} σ dt`, heuristic maximization.
///
/// Qubits: antipodal pure pairs on a `grid_theta × grid_phi` sphere grid,
/// simplex refinement in `(θ, φ)` from the best grid pair, plus random
/// mixed pairs. Larger `d`: random pure pairs with simplex refinement over
/// the two kets, plus random mixed pairs.
pub fn blp_measure(
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
    let sweep = LinearSweep::new(p, grid, basis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);

    // Coarse candidates.
    let mut coarse: Vec<Pair> = Vec::new();
    let mut ket_pairs: Vec<Vec<f64>> = Vec::new();
    if d == 2 {
        coarse.extend(sphere_grid(opt.grid_theta, opt.grid_phi).into_iter().map(|(t, f)| antipodal(t, f)));
    } else {
        for _ in 0..opt.random_pure {
            let a = random_ket(d, &mut rng);
            let b = random_ket(d, &mut rng);
            coarse.push(Pair {
                rho1: bloch_of(&pure_density(&a), basis)?,
                rho2: bloch_of(&pure_density(&b), basis)?,
            });
            let mut params = ket_params(&a);
            params.extend(ket_params(&b));
            ket_pairs.push(params);
        }
    }
    let n_coarse = coarse.len();
    for _ in 0..opt.random_mixed {
        coarse.push(Pair {
            rho1: bloch_of(&random_density(d, &mut rng), basis)?,
            rho2: bloch_of(&random_density(d, &mut rng), basis)?,
        });
    }

    let scores: Vec<f64> = coarse
        .par_iter()
        .map(|pair| sweep.objective(pair.delta().as_slice()))
        .collect();

    let mut best: Option<(Pair, f64)> = None;
    let mut consider = |pair: Pair, score: f64| {
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((pair, score));
        }
    };
    for (pair, &score) in coarse.iter().zip(&scores) {
        consider(pair.clone(), score);
    }

    // Local refinement from the best structured candidate.
    if opt.simplex_iterations > 0 && n_coarse > 0 {
        let (start, _) = scores[..n_coarse]
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        if d == 2 {
            let (t0, f0) = sphere_grid(opt.grid_theta, opt.grid_phi)[start];
            let step = std::f64::consts::PI / opt.grid_theta.max(2) as f64;
            let m = nelder_mead_max(
                |x| sweep.objective(antipodal(x[0], x[1]).delta().as_slice()),
                &[t0, f0],
                step,
                opt.simplex_iterations,
                opt.simplex_tolerance,
            );
            consider(antipodal(m.x[0], m.x[1]), m.value);
        } else {
            let half = ket_pairs[start].len() / 2;
            let to_pair = |x: &[f64]| -> Result<Pair> {
                Ok(Pair {
                    rho1: bloch_of(&pure_density(&ket_from_params(&x[..half])), basis)?,
                    rho2: bloch_of(&pure_density(&ket_from_params(&x[half..])), basis)?,
                })
            };
            let m = nelder_mead_max(
                |x| to_pair(x).map(|p| sweep.objective(p.delta().as_slice())).unwrap_or(f64::NAN),
                &ket_pairs[start],
                0.1,
                opt.simplex_iterations,
                opt.simplex_tolerance,
            );
            consider(to_pair(&m.x)?, m.value);
        }
    }

    let (pair, _) = best.ok_or_else(|| Error::InvalidInput("optimizer has no candidates".into()))?;
    let mut dist = vec![0.0; grid.len()];
    sweep.trace_distances(pair.delta().as_slice(), &mut dist);
    let sigma = central_difference(&sweep.times, &dist);
    let integral = positive_part_integral(&sweep.times, &sigma);
    Ok(MeasureReport {
        measure: "blp".into(),
        value: integral.value,
        contributions: integral.contributions,
        maximizer: Maximizer::StatePair {
            rho1: pair.rho1.iter().copied().collect(),
            rho2: pair.rho2.iter().copied().collect(),
        },
        times: sweep.times,
        trace: vec![Series::new("trace_distance", dist), Series::new("sigma", sigma)],
        caveats: heuristic_caveats(grid.t_max(), "initial state pairs"),
    })
}
