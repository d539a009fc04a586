//! Steady-state solver, time evolution oracle, and truncation convergence.
//!
//! The steady state is the unit-trace null vector of the Liouvillian. It is
//! found by the replace-row method: one redundant row of L (a diagonal row;
//! those are linearly dependent through trace preservation) is overwritten
//! with the trace constraint and the resulting nonsingular sparse system is
//! LU-factorized. Two independent row choices are solved and compared, so a
//! null space of dimension > 1 is reported as [`SolveError::NullSpaceDegenerate`]
//! instead of silently collapsing to an arbitrary mixture.

use crate::model::Liouvillian;
use crate::observables;
use crate::operator::{DensityMatrix, DensityMatrixError};
use crate::params::SystemParams;
use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

/// Largest acceptable ‖L·vec(ρ)‖_max for a delivered steady state.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Default ceiling for the truncation scan.
pub const NCUT_HARD_CAP: usize = 30;

/// Two independently solved row replacements must agree to this tolerance,
/// entrywise, or the null space is considered degenerate.
const AGREEMENT_TOL: f64 = 1e-6;

/// Solutions with entries beyond this magnitude are garbage: physical
/// density-matrix entries are bounded by 1.
const BLOWUP_LIMIT: f64 = 1e6;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("numerical null space has dimension > 1: independent row replacements disagree ({detail})")]
    NullSpaceDegenerate { detail: String },
    #[error("sparse LU factorization failed: {0}")]
    SingularSolve(String),
    #[error("steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}")]
    Residual { residual: f64 },
    #[error("solution is not a physical state: {0}")]
    State(#[from] DensityMatrixError),
    #[error("time step underflow at t = {t:.6}")]
    StepSizeUnderflow { t: f64 },
    #[error("truncation scan exceeded the hard cap Ncut = {cap}")]
    CutoffLimitExceeded { cap: usize },
}

/// A solved steady state with its quality indicators.
#[derive(Clone, Debug)]
pub struct SteadyStateSolution {
    pub rho: DensityMatrix,
    /// ‖L·vec(ρ)‖_max against the unmodified Liouvillian.
    pub residual: f64,
    /// Population of the two highest Fock levels.
    pub tail_population: f64,
}

fn ensure_sequential_solver() {
    use std::sync::Once;
    static ONCE: Once = Once::new();
    // one sweep point per worker thread; the factorization itself stays
    // sequential so repeated runs are bit-identical
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Solve the replace-row system for one choice of replaced diagonal row.
/// Returns the raw solution vector.
fn solve_with_replaced_row(
    l: &Liouvillian,
    replace_row: usize,
) -> Result<Vec<Complex64>, SolveError> {
    let d = l.dim();
    let n = d * d;
    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = Vec::new();
    for (r, c, v) in l.matrix().iter() {
        if r != replace_row {
            triplets.push(Triplet::new(r, c, v));
        }
    }
    for i in 0..d {
        triplets.push(Triplet::new(replace_row, i * (d + 1), Complex64::new(1.0, 0.0)));
    }
    let m = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .expect("triplet indices are in range");
    let lu = m.sp_lu().map_err(|e| SolveError::SingularSolve(format!("{e:?}")))?;
    let mut rhs = faer::Mat::<Complex64>::zeros(n, 1);
    rhs[(replace_row, 0)] = Complex64::new(1.0, 0.0);
    let sol = lu.solve(&rhs);
    Ok((0..n).map(|i| sol[(i, 0)]).collect())
}

/// Quick sanity screen on a raw replace-row solution.
fn solution_usable(x: &[Complex64]) -> bool {
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
        && x.iter().map(|v| v.norm()).fold(0.0, f64::max) <= BLOWUP_LIMIT
}

/// Steady state of the generator: Lρ = 0, tr ρ = 1.
///
/// Two replace-row systems (first and last diagonal row) are solved
/// independently; disagreement, blowup, or dual factorization failure is
/// reported as a degenerate null space. The returned state is Hermitized,
/// exactly normalized, and validated; its residual is measured against the
/// unmodified L.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyStateSolution, SolveError> {
    ensure_sequential_solver();
    let d = l.dim();
    let rows = [0usize, d * d - 1];
    let attempts: Vec<Result<Vec<Complex64>, SolveError>> =
        rows.iter().map(|&r| solve_with_replaced_row(l, r)).collect();

    let usable: Vec<Option<&Vec<Complex64>>> = attempts
        .iter()
        .map(|a| a.as_ref().ok().filter(|x| solution_usable(x)))
        .collect();

    let (x0, x1) = match (usable[0], usable[1]) {
        (Some(x0), Some(x1)) => (x0, x1),
        (None, None) => {
            let detail = attempts
                .iter()
                .map(|a| match a {
                    Ok(_) => "solution blew up".to_string(),
                    Err(e) => e.to_string(),
                })
                .collect::<Vec<_>>()
                .join("; ");
            // a singular factorization on BOTH diagonal rows is the signature
            // of extra null directions, not of one unlucky pivot
            return Err(SolveError::NullSpaceDegenerate { detail });
        }
        _ => {
            return Err(SolveError::NullSpaceDegenerate {
                detail: "one row replacement solvable, the other singular".into(),
            });
        }
    };

    let disagreement = x0
        .iter()
        .zip(x1.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if disagreement > AGREEMENT_TOL {
        return Err(SolveError::NullSpaceDegenerate {
            detail: format!("solutions differ by {disagreement:.3e}"),
        });
    }

    // Hermitize and normalize the primary solution
    let mut rho = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] = (x0[i + j * d] + x0[j + i * d].conj()) * 0.5;
        }
    }
    let trace: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    if trace.re.abs() < 1e-6 {
        return Err(SolveError::SingularSolve(format!(
            "trace of raw solution is {:.3e}, constraint row lost",
            trace.re
        )));
    }
    rho.scale_mut(1.0 / trace.re);

    let vec: Vec<Complex64> = rho.as_slice().to_vec();
    let residual = l.apply(&vec).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(SolveError::Residual { residual });
    }

    let rho = DensityMatrix::from_matrix(l.space(), rho)?;
    let tail_population = rho.fock_tail_population();
    Ok(SteadyStateSolution { rho, residual, tail_population })
}

// Dormand-Prince 5(4) tableau. Stage times are irrelevant here because the
// generator is time-independent.
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights (row 7 of A) and the embedded 4th-order weights
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Local error budget per unit time for the adaptive integrator.
pub const EVOLVE_ERROR_DENSITY: f64 = 1e-10;

const MIN_STEP: f64 = 1e-12;

fn hermitize_vec(x: &mut [Complex64], d: usize) {
    for j in 0..d {
        for i in 0..=j {
            let avg = (x[i + j * d] + x[j + i * d].conj()) * 0.5;
            x[i + j * d] = avg;
            x[j + i * d] = avg.conj();
        }
    }
}

/// Integrate dvec(ρ)/dt = L·vec(ρ) from `rho0` to `t_final` with an adaptive
/// Dormand-Prince 5(4) scheme, local error at most
/// [`EVOLVE_ERROR_DENSITY`]·h per step of size h. Accepted states are
/// re-Hermitized; the final state is renormalized and validated.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    t_final: f64,
    dt_max: f64,
) -> Result<DensityMatrix, SolveError> {
    assert!(t_final > 0.0, "t_final must be positive");
    assert!(dt_max > 0.0, "dt_max must be positive");
    assert_eq!(rho0.space(), l.space(), "state and generator on different spaces");

    let d = l.dim();
    let n = d * d;
    let mut x = rho0.vectorized();
    let mut t = 0.0;
    let mut h = dt_max.min(t_final);
    let mut stages: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut work = vec![Complex64::new(0.0, 0.0); n];

    while t < t_final {
        h = h.min(t_final - t).min(dt_max);
        if h < MIN_STEP {
            return Err(SolveError::StepSizeUnderflow { t });
        }
        for s in 0..7 {
            for i in 0..n {
                let mut acc = x[i];
                for (k, stage) in stages.iter().enumerate().take(s) {
                    let a = DP_A[s][k];
                    if a != 0.0 {
                        acc += stage[i] * Complex64::new(a * h, 0.0);
                    }
                }
                work[i] = acc;
            }
            stages[s] = l.apply(&work);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut diff = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                let w = DP_B5[s] - DP_B4[s];
                if w != 0.0 {
                    diff += stages[s][i] * Complex64::new(w * h, 0.0);
                }
            }
            err = err.max(diff.norm());
        }
        let tol = EVOLVE_ERROR_DENSITY * h;
        if err <= tol {
            for i in 0..n {
                let mut acc = x[i];
                for s in 0..7 {
                    if DP_B5[s] != 0.0 {
                        acc += stages[s][i] * Complex64::new(DP_B5[s] * h, 0.0);
                    }
                }
                x[i] = acc;
            }
            hermitize_vec(&mut x, d);
            t += h;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * (tol / err).powf(0.2) };
        h *= factor.clamp(0.2, 5.0);
    }

    let mut rho = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] = x[i + j * d];
        }
    }
    let trace: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-8 {
        return Err(SolveError::State(DensityMatrixError::Trace { trace: trace.re }));
    }
    rho.scale_mut(1.0 / trace.re);
    Ok(DensityMatrix::from_matrix(l.space(), rho)?)
}

/// Observables probed by the truncation scan at one cutoff.
#[derive(Clone, Copy, Debug)]
struct Probe {
    mean_n: f64,
    g2: Option<f64>,
    g3: Option<f64>,
    tail: f64,
}

fn probe_at(params: &SystemParams, ncut: usize) -> Result<Probe, SolveError> {
    let p = SystemParams { ncut, ..*params };
    let solution = steady_state(&crate::model::liouvillian(&p))?;
    let m = observables::photon_moments(&solution.rho);
    Ok(Probe { mean_n: m.mean_n, g2: m.g2, g3: m.g3, tail: solution.tail_population })
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

fn rel_diff_opt(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(a), Some(b)) => rel_diff(a, b),
        _ => f64::INFINITY,
    }
}

/// Smallest cutoff whose observables are stable against adding two more Fock
/// levels (relative change < `observable_tol` in ⟨a†a⟩, g², g³) with a
/// negligible tail population.
pub fn converge_ncut(params: &SystemParams, observable_tol: f64) -> Result<usize, SolveError> {
    converge_ncut_capped(params, observable_tol, NCUT_HARD_CAP)
}

/// [`converge_ncut`] with an explicit hard cap on the scan.
pub fn converge_ncut_capped(
    params: &SystemParams,
    observable_tol: f64,
    cap: usize,
) -> Result<usize, SolveError> {
    assert!(observable_tol > 0.0, "observable_tol must be positive");
    let mut memo: HashMap<usize, Probe> = HashMap::new();
    let probe = |ncut: usize, memo: &mut HashMap<usize, Probe>| -> Result<Probe, SolveError> {
        if let Some(p) = memo.get(&ncut) {
            return Ok(*p);
        }
        let p = probe_at(params, ncut)?;
        memo.insert(ncut, p);
        Ok(p)
    };
    for candidate in 1..=cap {
        let here = probe(candidate, &mut memo)?;
        let above = probe(candidate + 2, &mut memo)?;
        let converged = here.tail < 1e-8
            && rel_diff(here.mean_n, above.mean_n) < observable_tol
            && rel_diff_opt(here.g2, above.g2) < observable_tol
            && rel_diff_opt(here.g3, above.g3) < observable_tol;
        if converged {
            return Ok(candidate);
        }
    }
    Err(SolveError::CutoffLimitExceeded { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{liouvillian, liouvillian_with_cavity_drive};
    use crate::observables::{g2_zero, g3_zero, mean_photon_number};
    use crate::space::Level;
    use approx::assert_relative_eq;

    #[test]
    fn undriven_system_relaxes_to_ground() {
        let params = SystemParams { eta: 0.0, omega_l: 2.0, ncut: 2, ..Default::default() };
        let space = params.space().unwrap();
        let sol = steady_state(&liouvillian(&params)).unwrap();
        let ground_index = space.basis_index(&[Level::G, Level::G], 0);
        assert_relative_eq!(sol.rho.matrix()[(ground_index, ground_index)].re, 1.0, epsilon = 1e-9);
        assert!(sol.residual <= RESIDUAL_TOL);
        assert!(sol.tail_population <= 1e-12);
    }

    #[test]
    fn decoupled_cavity_stays_empty() {
        let params = SystemParams {
            atom_count: 1,
            g: 0.0,
            eta: 1.5,
            ncut: 2,
            ..Default::default()
        };
        let sol = steady_state(&liouvillian(&params)).unwrap();
        assert!(mean_photon_number(&sol.rho) <= 1e-12);
        // the atom itself is visibly excited
        assert!(sol.rho.atomic_population(0, Level::M) > 1e-3);
    }

    #[test]
    fn driven_empty_cavity_matches_coherent_state() {
        // decoupled atom, pure cavity drive: analytic coherent steady state
        let eta_c = 0.8;
        for delta in [0.0, 1.0, 5.0] {
            let params = SystemParams {
                atom_count: 1,
                g: 0.0,
                eta: 0.0,
                omega_l: 0.0,
                delta_cav: delta,
                ncut: 14,
                ..Default::default()
            };
            let l = liouvillian_with_cavity_drive(&params, eta_c);
            let sol = steady_state(&l).unwrap();
            let expected = eta_c * eta_c / (params.kappa * params.kappa + delta * delta);
            let mean = mean_photon_number(&sol.rho);
            assert_relative_eq!(mean, expected, max_relative = 1e-8);
            assert_relative_eq!(g2_zero(&sol.rho).unwrap(), 1.0, max_relative = 1e-8);
            assert_relative_eq!(g3_zero(&sol.rho).unwrap(), 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn degenerate_null_space_is_reported() {
        // fully decoupled, undamped atom: any atomic state is stationary,
        // giving a 9-dimensional null space
        let params = SystemParams {
            atom_count: 1,
            g: 0.0,
            eta: 0.0,
            omega_l: 0.0,
            gamma_gm: 0.0,
            gamma_me: 0.0,
            ncut: 1,
            ..Default::default()
        };
        match steady_state(&liouvillian(&params)) {
            Err(SolveError::NullSpaceDegenerate { .. }) => {}
            other => panic!("expected NullSpaceDegenerate, got {other:?}"),
        }
    }

    #[test]
    fn resolve_is_idempotent() {
        let params = SystemParams { ncut: 3, ..Default::default() };
        let l = liouvillian(&params);
        let a = steady_state(&l).unwrap();
        let b = steady_state(&l).unwrap();
        let diff = (a.rho.matrix() - b.rho.matrix())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-10, "re-solve drifted by {diff:.3e}");
    }

    #[test]
    fn evolve_holds_steady_state_fixed() {
        let params = SystemParams { ncut: 2, ..Default::default() };
        let l = liouvillian(&params);
        let sol = steady_state(&l).unwrap();
        let evolved = evolve(&sol.rho, &l, 3.0, 0.05).unwrap();
        assert!(evolved.trace_distance(&sol.rho) <= 1e-8);
    }

    #[test]
    fn intermediate_level_decays_at_twice_gamma() {
        // single undriven atom prepared in |m⟩: the (γ, C) convention decays
        // populations as exp(−2γt)
        let gamma = 0.3;
        let params = SystemParams {
            atom_count: 1,
            g: 0.0,
            eta: 0.0,
            omega_l: 0.0,
            gamma_gm: gamma,
            gamma_me: 0.0,
            ncut: 1,
            ..Default::default()
        };
        let space = params.space().unwrap();
        let l = liouvillian(&params);
        let rho0 = DensityMatrix::pure(space, space.basis_index(&[Level::M], 0));
        let t = 1.25;
        let rho_t = evolve(&rho0, &l, t, 0.05).unwrap();
        let expected = (-2.0 * gamma * t).exp();
        assert_relative_eq!(rho_t.atomic_population(0, Level::M), expected, epsilon = 1e-8);
    }

    #[test]
    fn evolve_agrees_with_direct_solve() {
        let params = SystemParams { ncut: 3, ..Default::default() };
        let l = liouvillian(&params);
        let direct = steady_state(&l).unwrap();
        let relaxed = evolve(
            &DensityMatrix::ground(params.space().unwrap()),
            &l,
            50.0,
            0.05,
        )
        .unwrap();
        let dist = relaxed.trace_distance(&direct.rho);
        assert!(dist <= 1e-6, "oracle disagreement: trace distance {dist:.3e}");
    }

    #[test]
    fn converge_ncut_vacuum_is_minimal() {
        let params = SystemParams { eta: 0.0, ..Default::default() };
        assert_eq!(converge_ncut(&params, 1e-6).unwrap(), 1);
    }

    #[test]
    fn converge_ncut_tracks_drive_strength() {
        let weak = SystemParams { eta: 0.5, ..Default::default() };
        let strong = SystemParams { eta: 3.0, ..Default::default() };
        let n_weak = converge_ncut(&weak, 1e-4).unwrap();
        let n_strong = converge_ncut(&strong, 1e-4).unwrap();
        assert!(n_weak <= n_strong, "stronger drive converged earlier: {n_strong} < {n_weak}");
        assert!(n_strong <= 12, "unexpectedly deep scan: {n_strong}");
    }

    #[test]
    fn cutoff_cap_is_enforced() {
        // an impossible tolerance exhausts the scan quickly at a tiny cap
        let params = SystemParams { ..Default::default() };
        match converge_ncut_capped(&params, 1e-300, 2) {
            Err(SolveError::CutoffLimitExceeded { cap: 2 }) => {}
            other => panic!("expected CutoffLimitExceeded, got {other:?}"),
        }
    }
}
