//! Derivative-free maximizers used by the state searches.

use serde::{Deserialize, Serialize};

/// Search budget for the heuristic maximization over initial states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Polar-angle samples of the qubit coarse grid.
    pub grid_theta: usize,
    /// Azimuthal samples of the qubit coarse grid.
    pub grid_phi: usize,
    /// Random mixed (Ginibre) candidates added as a safeguard.
    pub random_mixed: usize,
    /// Random pure candidates; the only coarse search for `d > 2`.
    pub random_pure: usize,
    pub simplex_iterations: usize,
    pub simplex_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_theta: 64,
            grid_phi: 128,
            random_mixed: 100,
            random_pure: 256,
            simplex_iterations: 200,
            simplex_tolerance: 1e-8,
            seed: 1,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Default::default()
        }
    }

    /// No search at all: only the candidates a measure always evaluates.
    pub fn mandatory_only() -> Self {
        OptimizerConfig {
            grid_theta: 0,
            grid_phi: 0,
            random_mixed: 0,
            random_pure: 0,
            simplex_iterations: 0,
            ..Default::default()
        }
    }
}

/// Result of a maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder-Mead maximization of `f` from `x0` with an axis-aligned initial
/// simplex of size `step`. Stops after `max_iter` iterations or once the
/// spread of simplex values drops below `tol`.
pub fn nelder_mead_max<F>(mut f: F, x0: &[f64], step: f64, max_iter: usize, tol: f64) -> Maximum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    // Minimize -f; NaN is treated as worst.
    let mut cost = |x: &[f64]| {
        evaluations += 1;
        let v = -f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let c0 = cost(x0);
    simplex.push((x0.to_vec(), c0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let c = cost(&x);
        simplex.push((x, c));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (simplex[n].1 - simplex[0].1).abs();
        if spread <= tol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let xr = along(alpha, &worst);
        let cr = cost(&xr);
        if cr < simplex[0].1 {
            let xe = along(gamma, &worst);
            let ce = cost(&xe);
            simplex[n] = if ce < cr { (xe, ce) } else { (xr, cr) };
        } else if cr < simplex[n - 1].1 {
            simplex[n] = (xr, cr);
        } else {
            let (xc, cc) = if cr < simplex[n].1 {
                let xc = along(rho, &worst);
                let cc = cost(&xc);
                (xc, cc)
            } else {
                let xc = along(-rho, &worst);
                let cc = cost(&xc);
                (xc, cc)
            };
            if cc < simplex[n].1.min(cr) {
                simplex[n] = (xc, cc);
            } else {
                let best = simplex[0].0.clone();
                for (x, c) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *c = cost(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, c) = simplex.swap_remove(0);
    Maximum {
        x,
        value: -c,
        evaluations,
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum {
        x: vec![x],
        value,
        evaluations,
    }
}

/// Coarse `(θ, φ)` grid over the sphere: `θ` spans `[0, π]` inclusive,
/// `φ` spans `[0, 2π)`.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = if n_theta > 1 {
            PI * i as f64 / (n_theta - 1) as f64
        } else {
            0.5 * PI
        };
        for j in 0..n_phi {
            out.push((theta, 2.0 * PI * j as f64 / n_phi as f64));
        }
    }
    out
}
