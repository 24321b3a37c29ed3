//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{diagonal_fidelity, kraus_choi, linspace, positive_trapezoid, qubit_bloch, random_kraus};
use nonmarkov::basis::HermitianBasis;
use nonmarkov::channels::{
    affine_from_transfer, apply_channel, choi_from_transfer, compose, transfer_from_affine, transfer_from_kraus,
    KrausSet,
};
use nonmarkov::distances::{bures_distance, fidelity, trace_distance, Distance};
use nonmarkov::gadc::{
    gadc_process, gadc_process_with, oracle_fidelity, oracle_g, oracle_trace_distance, oracle_w, GadcProcessParams,
};
use nonmarkov::linalg::{eigvalsh, RMatrix};
use nonmarkov::measures::{
    blp_measure, distance_trace_at_tau, nonunital_nm_measure, nonunitality_measure, trajectory_states, Maximizer,
};
use nonmarkov::optimize::OptimizerConfig;
use nonmarkov::processes::{rhp_g, rhp_measure, QuantumProcess, TabulatedProcess, TimeGrid};
use nonmarkov::states::{bloch_from_density, density_from_bloch, random_density, BlochState};

type Outcome = Result<String, String>;

fn gadc(omega: f64) -> QuantumProcess {
    gadc_process(GadcProcessParams::new(omega).unwrap())
}

fn params(omega: f64) -> GadcProcessParams {
    GadcProcessParams::new(omega).unwrap()
}

fn qubit() -> HermitianBasis {
    HermitianBasis::new(2).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn criterion_1() -> Outcome {
    let basis = qubit();
    let p = gadc(5.0);
    let gp = params(5.0);
    let grid = TimeGrid::new(20.0, 200).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = random_density(2, &mut rng);
        let b = random_density(2, &mut rng);
        let (ra, rb) = (qubit_bloch(&a), qubit_bloch(&b));
        let sa = bloch_from_density(&a, &basis).map_err(|e| e.to_string())?;
        let sb = bloch_from_density(&b, &basis).map_err(|e| e.to_string())?;
        for t in grid.points() {
            let tm = p.eval(t).map_err(|e| e.to_string())?;
            let ea = density_from_bloch(&apply_channel(&tm, &sa).unwrap(), &basis).map_err(|e| e.to_string())?;
            let eb = density_from_bloch(&apply_channel(&tm, &sb).unwrap(), &basis).map_err(|e| e.to_string())?;
            let pipeline = trace_distance(&ea, &eb).map_err(|e| e.to_string())?;
            worst = worst.max((pipeline - oracle_trace_distance(gp, &ra, &rb, t)).abs());
        }
    }
    check(worst <= 1e-10, format!("max |D_tr - closed form| = {worst:.3e} (tol 1e-10, 100 pairs x 200 times)"))
}

fn criterion_2() -> Outcome {
    let basis = qubit();
    let grid = TimeGrid::new(20.0, 4001).unwrap();
    let mut worst = 0.0f64;
    for omega in [0.0, 2.0, 5.0] {
        let p = gadc(omega);
        for seed in [1, 2, 3] {
            let r = blp_measure(&p, &grid, &OptimizerConfig::with_seed(seed), &basis).map_err(|e| e.to_string())?;
            worst = worst.max(r.value);
        }
    }
    check(worst <= 1e-8, format!("max N_BLP over omega in {{0,2,5}}, seeds {{1,2,3}} = {worst:.3e} (tol 1e-8)"))
}

fn criterion_3() -> Outcome {
    let basis = qubit();
    let p5 = gadc(5.0);
    let gp = params(5.0);
    let mut worst = 0.0f64;
    for t in linspace(0.0, 10.0, 2001) {
        let g = rhp_g(&p5, t, 1e-5, &basis).map_err(|e| e.to_string())?;
        worst = worst.max((g - oracle_g(gp, t)).abs());
    }
    let grid = TimeGrid::new(20.0, 4001).unwrap();
    let n5 = rhp_measure(&p5, &grid, 1e-5, &basis).map_err(|e| e.to_string())?.value;
    let n0 = rhp_measure(&gadc(0.0), &grid, 1e-5, &basis).map_err(|e| e.to_string())?.value;
    check(
        worst <= 1e-3 && n5 > 0.01 && n0 <= 1e-6,
        format!("max |g - closed form| on [0,10] = {worst:.3e} (tol 1e-3); N_RHP(omega=5) = {n5:.6} (> 0.01); N_RHP(omega=0) = {n0:.3e} (<= 1e-6)"),
    )
}

fn criterion_4() -> Outcome {
    let basis = qubit();
    let p = gadc(5.0);
    let gp = params(5.0);
    let half = linspace(0.0, 10.0, 21);
    let mixed = BlochState::maximally_mixed(2);
    let mut worst = 0.0f64;
    for &tau in &half {
        let probe = apply_channel(&p.eval(tau).unwrap(), &mixed).unwrap();
        for &t in &half {
            let tm = p.eval(t).unwrap();
            let a = density_from_bloch(&apply_channel(&tm, &mixed).unwrap(), &basis).map_err(|e| e.to_string())?;
            let b = density_from_bloch(&apply_channel(&tm, &probe).unwrap(), &basis).map_err(|e| e.to_string())?;
            let f = fidelity(&a, &b).map_err(|e| e.to_string())?;
            let oracle = oracle_fidelity(gp, tau, t).map_err(|e| e.to_string())?;
            worst = worst.max((f - oracle).abs());
        }
    }
    check(worst <= 1e-10, format!("max |F - (h+ + h-)/2| over tau, t in {{0, 0.5, ..., 10}} = {worst:.3e} (tol 1e-10)"))
}

fn criterion_5() -> Outcome {
    let basis = qubit();
    let p = gadc(5.0);
    let grid = TimeGrid::new(20.0, 4001).unwrap();
    let d_tr = distance_trace_at_tau(&p, &grid, 10.0, Distance::Trace, &basis).map_err(|e| e.to_string())?;
    let d_b = distance_trace_at_tau(&p, &grid, 10.0, Distance::Bures, &basis).map_err(|e| e.to_string())?;
    let max_step = d_tr.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let rising = d_b.windows(2).filter(|w| w[1] > w[0]).count();

    let report = nonunital_nm_measure(&p, &grid, Distance::Bures, &basis).map_err(|e| e.to_string())?;
    let sigma = report.series("sigma_nu").unwrap();
    let times = &report.times;
    let mut checked = 0;
    let mut min_g = f64::INFINITY;
    for i in 0..times.len() - 1 {
        if 0.5 * (sigma[i] + sigma[i + 1]) > 1e-6 {
            let mid = 0.5 * (times[i] + times[i + 1]);
            min_g = min_g.min(rhp_g(&p, mid, 1e-5, &basis).map_err(|e| e.to_string())?);
            checked += 1;
        }
    }
    let tau = match report.maximizer {
        Maximizer::TrajectoryTime { tau } => tau,
        _ => f64::NAN,
    };
    check(
        max_step <= 1e-12 && rising > 0 && checked > 0 && min_g > -1e-6,
        format!(
            "tau=10: max D_tr step = {max_step:.3e} (<= 1e-12), D_B rising cells = {rising} (> 0); \
             tau*={tau:.4}: {checked} midpoints with sigma_nu > 1e-6, min g there = {min_g:.3e} (> -1e-6)"
        ),
    )
}

/// `M(t) = diag(e^{-t/2}, e^{-t/2}, e^{-t})`, `c = 0`, sampled every 0.25.
fn unital_tabulated(basis: &HermitianBasis) -> QuantumProcess {
    let times = linspace(0.0, 20.0, 81);
    let transfers = times
        .iter()
        .map(|&t| RMatrix::from_diagonal(&DVector::from_vec(vec![1.0, (-t / 2.0).exp(), (-t / 2.0).exp(), (-t).exp()])))
        .collect();
    QuantumProcess::tabulated("unital", TabulatedProcess::new(2, times, transfers, basis).unwrap())
}

fn criterion_6() -> Outcome {
    let basis = qubit();
    let grid = TimeGrid::new(20.0, 4001).unwrap();
    let opt = OptimizerConfig::default();
    let half = gadc_process_with("gadc(p=1/2)", |_| 0.5);
    let table = unital_tabulated(&basis);
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, p) in [("GADC p=1/2", &half), ("unital tabulated", &table)] {
        let nu = nonunitality_measure(p, &grid, &opt, &basis).map_err(|e| e.to_string())?.value;
        let nnm = nonunital_nm_measure(p, &grid, Distance::Bures, &basis).map_err(|e| e.to_string())?.value;
        ok &= nu <= 1e-10 && nnm <= 1e-10;
        lines.push(format!("{name}: N_nu = {nu:.3e}, nonunital NM = {nnm:.3e}"));
    }
    let div = nonunital_nm_measure(&gadc(0.0), &grid, Distance::Bures, &basis).map_err(|e| e.to_string())?.value;
    ok &= div <= 1e-8;
    lines.push(format!("GADC omega=0: nonunital NM = {div:.3e} (tol 1e-8)"));
    check(ok, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_ortho = 0.0f64;
    for d in 2..=6 {
        let b = HermitianBasis::new(d).map_err(|e| e.to_string())?;
        for (m, lm) in b.ops().iter().enumerate() {
            for (n, ln) in b.ops().iter().enumerate() {
                let ip = (lm * ln).trace();
                let target = if m == n { 1.0 } else { 0.0 };
                worst_ortho = worst_ortho.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
    }

    let mut worst_round = 0.0f64;
    let mut worst_compose = 0.0f64;
    let mut min_choi = f64::INFINITY;
    let mut worst_dpi = f64::NEG_INFINITY;
    for draw in 0..100 {
        let d = 2 + draw % 2;
        let basis = HermitianBasis::new(d).unwrap();
        let k1 = random_kraus(d, 1 + draw % 4, &mut rng);
        let k2 = random_kraus(d, 2, &mut rng);
        let set1 = KrausSet::new(k1.clone()).map_err(|e| e.to_string())?;
        let set2 = KrausSet::new(k2.clone()).map_err(|e| e.to_string())?;
        let t1 = transfer_from_kraus(&set1, &basis).map_err(|e| e.to_string())?;
        let t2 = transfer_from_kraus(&set2, &basis).map_err(|e| e.to_string())?;

        // Kraus -> transfer -> affine -> transfer.
        let back = transfer_from_affine(&affine_from_transfer(&t1).map_err(|e| e.to_string())?);
        worst_round = worst_round.max((back.matrix() - t1.matrix()).amax());
        // Transfer -> Choi against the Kraus-side Choi matrix.
        let choi = choi_from_transfer(&t1, &basis).map_err(|e| e.to_string())?;
        worst_round = worst_round.max((&choi.c - kraus_choi(&k1)).iter().fold(0.0f64, |m, z| m.max(z.norm())));
        // Choi -> transfer: T_mn = d Re Tr(C (λ_m ⊗ λ_nᵀ)).
        for m in 0..d * d {
            for n in 0..d * d {
                let lm = basis.op(m);
                let ln = basis.op(n).transpose();
                let prod = lm.kronecker(&ln);
                let v = d as f64 * (&choi.c * prod).trace().re;
                worst_round = worst_round.max((v - t1.matrix()[(m, n)]).abs());
            }
        }
        min_choi = min_choi.min(choi.min_eigenvalue());

        // T(E1 ∘ E2) = T(E1) T(E2).
        let composed = transfer_from_kraus(&set1.after(&set2).map_err(|e| e.to_string())?, &basis).unwrap();
        let product = compose(&t1, &t2).map_err(|e| e.to_string())?;
        worst_compose = worst_compose.max((composed.matrix() - product.matrix()).amax());
        worst_compose = worst_compose.max((product.matrix() - t1.matrix() * t2.matrix()).amax());

        // Data processing for trace and Bures distances.
        let a = random_density(d, &mut rng);
        let b = random_density(d, &mut rng);
        let ea = common::apply_kraus(&k1, &a);
        let eb = common::apply_kraus(&k1, &b);
        let tr_gain = trace_distance(&ea, &eb).unwrap() - trace_distance(&a, &b).unwrap();
        let bu_gain = bures_distance(&ea, &eb).unwrap() - bures_distance(&a, &b).unwrap();
        worst_dpi = worst_dpi.max(tr_gain).max(bu_gain);
    }
    check(
        worst_ortho <= 1e-12 && worst_round <= 1e-12 && worst_compose <= 1e-12 && min_choi >= -1e-12 && worst_dpi <= 1e-10,
        format!(
            "orthonormality (d=2..6) {worst_ortho:.3e}; round trips {worst_round:.3e}; composition {worst_compose:.3e}; \
             min Choi eigenvalue {min_choi:.3e}; max distance gain under a channel {worst_dpi:.3e}"
        ),
    )
}

/// `d/dt (1 + W_t²)/2 = W_t W_t'` in closed form.
fn purity_rate_oracle(gp: GadcProcessParams, t: f64) -> f64 {
    let w = 2.0 * gp.omega();
    let dw = -w * (w * t).sin() * (1.0 - (-t).exp()) + (w * t).cos() * (-t).exp();
    oracle_w(gp, t) * dw
}

fn criterion_8() -> Outcome {
    let basis = qubit();
    let gp = params(5.0);
    let p = gadc(5.0);
    let run = |n: usize| -> Result<(f64, f64, bool), String> {
        let grid = TimeGrid::new(20.0, n).unwrap();
        let report = nonunitality_measure(&p, &grid, &OptimizerConfig::mandatory_only(), &basis)
            .map_err(|e| e.to_string())?;
        let is_mixed =
            matches!(&report.maximizer, Maximizer::InitialState { bloch } if bloch.iter().all(|&x| x == 0.0));
        let t = grid.points();
        let rate: Vec<f64> = t.iter().map(|&s| purity_rate_oracle(gp, s)).collect();
        Ok((report.value, positive_trapezoid(&t, &rate), is_mixed))
    };
    // The grid is not fixed by the criterion. Central differences carry an
    // O((4ωh)²) relative error, about 2e-3 at n = 4001, so the comparison
    // runs on a grid fine enough for the 1e-4 tolerance; the default grid
    // is reported alongside.
    let (coarse, coarse_oracle, _) = run(4001)?;
    let (value, oracle, is_mixed) = run(200_001)?;
    let err = (value - oracle).abs();
    check(
        err <= 1e-4 && is_mixed,
        format!(
            "n=200001: N_nu(1/2 candidate) = {value:.8}, closed form = {oracle:.8}, |diff| = {err:.3e} (tol 1e-4); \
             n=4001: {coarse:.6} vs {coarse_oracle:.6}"
        ),
    )
}

/// Trajectory states of the GADC are `diag((1 ± W_τ)/2)`; a cheap check
/// that ties the trajectory construction to the fidelity oracle above.
fn trajectory_sanity() -> bool {
    let basis = qubit();
    let p = gadc(5.0);
    let grid = TimeGrid::new(10.0, 21).unwrap();
    let states = trajectory_states(&p, &grid).unwrap();
    states.iter().zip(grid.points()).all(|(s, tau)| {
        let rho = density_from_bloch(s, &basis).unwrap();
        let w = oracle_w(params(5.0), tau);
        let diag = [(1.0 + w) / 2.0, (1.0 - w) / 2.0];
        let ev = eigvalsh(&rho);
        (diagonal_fidelity(&diag, &[rho[(0, 0)].re, rho[(1, 1)].re]) - 1.0).abs() < 1e-12
            && rho[(0, 1)].norm() < 1e-15
            && ev.iter().all(|&v| v >= -1e-15)
    })
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("trace-distance oracle equivalence", criterion_1),
        ("BLP vanishing on GADC", criterion_2),
        ("g(t) oracle equivalence and RHP measure", criterion_3),
        ("fidelity oracle equivalence", criterion_4),
        ("Fig. 2 qualitative reproduction", criterion_5),
        ("unitality gates", criterion_6),
        ("representation property suite", criterion_7),
        ("non-unitality positivity", criterion_8),
    ];
    let start = Instant::now();
    let setup_ok = trajectory_sanity();
    if !setup_ok {
        println!("setup: FAIL  trajectory states disagree with diag((1 +- W)/2)");
    }
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed in {:.1}s", 8 - failed, start.elapsed().as_secs_f64());
    if failed > 0 || !setup_ok {
        std::process::exit(1);
    }
}
