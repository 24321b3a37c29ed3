//! Test-side reference implementations. Nothing here calls into the
//! library's channel or distance code.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C = DMatrix<Complex64>;

fn gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> C {
    C::from_fn(rows, cols, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Random CPT map with `k` Kraus operators from a random isometry
/// `V = G (G†G)^{-1/2}`, split into `d × d` blocks.
pub fn random_kraus<R: Rng>(d: usize, k: usize, rng: &mut R) -> Vec<C> {
    let g = gaussian(d * k, d, rng);
    let gram = g.adjoint() * &g;
    let eig = gram.clone().symmetric_eigen();
    let inv_sqrt = &eig.eigenvectors
        * C::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(1.0 / v.sqrt(), 0.0)))
        * eig.eigenvectors.adjoint();
    let v = g * inv_sqrt;
    (0..k).map(|i| v.rows(i * d, d).into_owned()).collect()
}

pub fn apply_kraus(ops: &[C], rho: &C) -> C {
    ops.iter().map(|e| e * rho * e.adjoint()).fold(C::zeros(rho.nrows(), rho.nrows()), |a, b| a + b)
}

/// `(1/d) Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first.
pub fn kraus_choi(ops: &[C]) -> C {
    let d = ops[0].nrows();
    let mut out = C::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut unit = C::zeros(d, d);
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let img = apply_kraus(ops, &unit);
            for a in 0..d {
                for b in 0..d {
                    out[(a * d + i, b * d + j)] += img[(a, b)] / d as f64;
                }
            }
        }
    }
    out
}

/// Trapezoid rule on the positive part of sampled `f`, with each sign
/// change placed at the linear-interpolation root.
pub fn positive_trapezoid(t: &[f64], f: &[f64]) -> f64 {
    let mut total = 0.0;
    for k in 0..t.len() - 1 {
        let (a, b) = (f[k], f[k + 1]);
        let h = t[k + 1] - t[k];
        if a >= 0.0 && b >= 0.0 {
            total += 0.5 * h * (a + b);
        } else if a > 0.0 {
            total += 0.5 * a * h * a / (a - b);
        } else if b > 0.0 {
            total += 0.5 * b * h * b / (b - a);
        }
    }
    total
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Pauli-basis Bloch vector `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)/√2` of a qubit state.
pub fn qubit_bloch(rho: &C) -> [f64; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        2.0 * rho[(0, 1)].re * s,
        2.0 * rho[(1, 0)].im * s,
        (rho[(0, 0)].re - rho[(1, 1)].re) * s,
    ]
}

/// Fidelity `Σ √(a_i b_i)` of two diagonal density matrices.
pub fn diagonal_fidelity(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum()
}
