use serde::{Deserialize, Serialize};

use crate::cayley::EulerianOA;
use crate::error::{Error, Result};
use crate::matrix::{distance_mod_phase, expm_hermitian, identity, kron, zeros, ComplexMatrix};
use crate::weyl::{embed, weyl};

use super::drift::DriftHamiltonian;
use super::schedule::{euler_schedule, Schedule, ScheduleMode};

/// Cycle propagator of `H` under `sched`.
///
/// Bang-bang schedules are propagated in the toggling frame,
/// `Π_j U_j† e^{−iHΔ} U_j`; Eulerian schedules in the lab frame with
/// `H + Σ_k h_kj` held over each segment and split into `substeps` steps.
pub fn exact_evolution(h: &DriftHamiltonian, sched: &Schedule, substeps: usize) -> Result<ComplexMatrix> {
    if sched.n != h.n || sched.d != h.d {
        return Err(Error::InvalidParameter("schedule and drift disagree on n or d".into()));
    }
    if substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be positive".into()));
    }
    let drift = h.full_operator()?;
    let dim = drift.nrows();
    let env = identity(h.d_env);
    let mut u = identity(dim);
    match sched.mode {
        ScheduleMode::BangBang => {
            let free = expm_hermitian(&drift, sched.delta);
            for seg in &sched.segments {
                let v = kron(&seg.labels.iter().map(|&l| weyl(h.d, l)).reduce(|a, b| kron(&a, &b)).unwrap(), &env);
                u = v.adjoint() * &free * v * u;
            }
        }
        ScheduleMode::Eulerian => {
            let dt = sched.delta / substeps as f64;
            for seg in &sched.segments {
                let mut hc = zeros(h.d.pow(h.n as u32));
                for (k, hk) in seg.hamiltonians.iter().enumerate() {
                    hc += embed(hk, &[k], h.n, h.d)?;
                }
                let step = expm_hermitian(&(&drift + kron(&hc, &env)), dt);
                for _ in 0..substeps {
                    u = &step * u;
                }
            }
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub cycle_time: f64,
    pub delta: f64,
    /// ‖U(T_c) − e^{iφ} exp(−i (I ⊗ H_E) T_c)‖_F minimized over φ.
    pub error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of log(error) against log(T_c).
    pub slope: f64,
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Runs the Eulerian schedule at Δ, Δ/2, …, (`points` values) and fits the
/// log–log slope of the deviation from pure environment evolution.
pub fn convergence_sweep(h: &DriftHamiltonian, eoa: &EulerianOA, delta: f64, points: usize, substeps: usize) -> Result<ConvergenceReport> {
    if points < 2 {
        return Err(Error::InvalidParameter("a slope needs at least two points".into()));
    }
    let env = kron(&identity(h.d.pow(h.n as u32)), &h.env_only);
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let step = delta / f64::powi(2.0, i as i32);
        let sched = euler_schedule(eoa, step)?;
        let u = exact_evolution(h, &sched, substeps)?;
        let tc = sched.cycle_time();
        let error = distance_mod_phase(&u, &expm_hermitian(&env, tc));
        out.push(ConvergencePoint { cycle_time: tc, delta: step, error });
    }
    let xs: Vec<f64> = out.iter().map(|p| p.cycle_time.ln()).collect();
    let ys: Vec<f64> = out.iter().map(|p| p.error.ln()).collect();
    Ok(ConvergenceReport { slope: fit_slope(&xs, &ys), points: out })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cayley::{euler_cycle_full, eulerian_oa_from_code};
    use crate::code::hamming_code;
    use crate::decoupling::drift::random_drift;
    use crate::decoupling::schedule::bangbang_schedule;
    use crate::field::gf_new;
    use crate::matrix::frobenius;
    use crate::oa::{OrthogonalArray, SymbolMatrix};

    fn two_qubit_eoa() -> EulerianOA {
        let code = hamming_code(Arc::new(gf_new(2, 2).unwrap()), 2).unwrap().dual();
        let eoa = eulerian_oa_from_code(&code, &euler_cycle_full(4, 2).unwrap(), 2).unwrap();
        EulerianOA::new(eoa.entries().select_rows(&[0, 1]), 4, 2).unwrap()
    }

    #[test]
    fn zero_drift_identity_schedule() {
        let mut h = random_drift(2, 2, 1, 1, 1).unwrap();
        h.terms.clear();
        let oa = OrthogonalArray::new(SymbolMatrix::from_rows(vec![vec![0], vec![0]]).unwrap(), 4, 0).unwrap();
        let u = exact_evolution(&h, &bangbang_schedule(&oa, 0.1).unwrap(), 1).unwrap();
        assert!(frobenius(&(u - identity(4))) < 1e-14);
    }

    #[test]
    fn substep_refinement_is_stable() {
        let h = random_drift(2, 2, 2, 2, 3).unwrap();
        let sched = euler_schedule(&two_qubit_eoa(), 1e-3).unwrap();
        let a = exact_evolution(&h, &sched, 1).unwrap();
        let b = exact_evolution(&h, &sched, 2).unwrap();
        assert!(frobenius(&(a - b)) < 1e-8);
    }

    #[test]
    fn cap_is_enforced() {
        let h = random_drift(8, 2, 1, 2, 3).unwrap();
        let oa = OrthogonalArray::new(SymbolMatrix::from_rows(vec![vec![0]; 8]).unwrap(), 4, 0).unwrap();
        assert!(matches!(
            exact_evolution(&h, &bangbang_schedule(&oa, 0.1).unwrap(), 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0];
        assert!((fit_slope(&xs, &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
