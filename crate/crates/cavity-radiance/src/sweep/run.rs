//! Parallel sweep execution.

use super::config::{NcutPolicy, SweepAxis, SweepConfig};
use crate::model::liouvillian;
use crate::observables::{
    classify_blockade, classify_radiance, detect_blockade_windows, photon_moments,
    radiance_ratio, BlockadeWindow, ObservableError, ObservableRecord, Regime,
    RADIANCE_CLASS_TOL,
};
use crate::params::SystemParams;
use crate::steady::{converge_ncut, steady_state};
use std::time::Instant;
use thiserror::Error;

/// Everything a finished (or aborted) sweep reports besides the records.
#[derive(Clone, Debug)]
pub struct SweepMetadata {
    /// The fully resolved configuration the run used.
    pub config: SweepConfig,
    /// Cutoff actually applied to every point (after auto resolution).
    pub ncut_used: usize,
    pub residual_max: f64,
    pub residual_mean: f64,
    pub wall_time_s: f64,
    /// Present when the sweep aborted; records then hold the clean prefix.
    pub error_note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<ObservableRecord>,
    pub windows: Vec<BlockadeWindow>,
    pub metadata: SweepMetadata,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("solve failed at {axis} = {value:.6}: {message}")]
    Solve {
        axis: &'static str,
        value: f64,
        message: String,
        /// Records completed before the failing grid point, already
        /// window-scanned, ready to flush.
        partial: Box<SweepResult>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("CSV files not comparable: {0}")]
    GridMismatch(String),
}

/// Parameters of one grid point.
pub fn point_params(base: &SystemParams, axis: SweepAxis, value: f64) -> SystemParams {
    let mut p = *base;
    match axis {
        SweepAxis::Delta => {
            p.delta_m = value;
            p.delta_cav = value;
        }
        SweepAxis::DeltaM => p.delta_m = value,
        SweepAxis::DeltaCav => p.delta_cav = value,
        SweepAxis::OmegaL => p.omega_l = value,
        SweepAxis::PhiZ => p.phi_z = value,
    }
    p
}

/// Detunings worth probing when picking a cutoff for a detuning sweep: the
/// grid edges, the center, the one- and two-photon dressed resonances, and
/// their multiphoton subharmonics. The subharmonics matter: g³ converges
/// slowest between the peaks, where the detuning is a fraction of a dressed
/// energy and high Fock levels fill through multiphoton steps.
fn probe_values(config: &SweepConfig) -> Vec<f64> {
    let (lo, hi) = (config.range.lo, config.range.hi);
    let mut probes = vec![lo, hi, 0.5 * (lo + hi)];
    if matches!(config.axis, SweepAxis::Delta | SweepAxis::DeltaM | SweepAxis::DeltaCav) {
        let g = config.base.g;
        let one_photon = std::f64::consts::SQRT_2 * g;
        let two_photon = crate::manifold::control_resonance_detuning(g);
        for peak in [
            one_photon,
            two_photon,
            one_photon / 2.0,
            two_photon * 2.0 / 3.0,
        ] {
            for signed in [peak, -peak] {
                if signed > lo && signed < hi {
                    probes.push(signed);
                }
            }
        }
    }
    probes
}

/// Resolve the cutoff for an auto-policy sweep: the largest converged cutoff
/// over the probe set, including the single-atom reference systems when the
/// witness is requested.
pub fn auto_ncut(config: &SweepConfig, observable_tol: f64) -> Result<usize, SweepError> {
    let mut best = 1usize;
    for value in probe_values(config) {
        let p = point_params(&config.base, config.axis, value);
        let ncut = converge_ncut(&p, observable_tol).map_err(|e| solve_error(
            config.axis.as_str(),
            value,
            e.to_string(),
            empty_result(config, config.base.ncut),
        ))?;
        best = best.max(ncut);
        if config.compute_r {
            let r = p.single_atom_reference();
            let ncut = converge_ncut(&r, observable_tol).map_err(|e| solve_error(
                config.axis.as_str(),
                value,
                e.to_string(),
                empty_result(config, config.base.ncut),
            ))?;
            best = best.max(ncut);
        }
    }
    Ok(best)
}

fn solve_error(
    axis: &'static str,
    value: f64,
    message: String,
    partial: SweepResult,
) -> SweepError {
    SweepError::Solve { axis, value, message, partial: Box::new(partial) }
}

fn empty_result(config: &SweepConfig, ncut_used: usize) -> SweepResult {
    SweepResult {
        records: Vec::new(),
        windows: Vec::new(),
        metadata: SweepMetadata {
            config: config.clone(),
            ncut_used,
            residual_max: 0.0,
            residual_mean: 0.0,
            wall_time_s: 0.0,
            error_note: None,
        },
    }
}

struct PointOutcome {
    record: ObservableRecord,
    residuals: Vec<f64>,
}

fn compute_point(
    base: &SystemParams,
    axis: SweepAxis,
    value: f64,
    ncut: usize,
    compute_r: bool,
) -> Result<PointOutcome, ObservableError> {
    let p = SystemParams { ncut, ..point_params(base, axis, value) };
    let sol = steady_state(&liouvillian(&p))?;
    let m = photon_moments(&sol.rho);
    let mut residuals = vec![sol.residual];
    let r_witness = if compute_r {
        let reference = p.single_atom_reference();
        let ref_sol = steady_state(&liouvillian(&reference))?;
        residuals.push(ref_sol.residual);
        let mean_one = crate::observables::mean_photon_number(&ref_sol.rho);
        match radiance_ratio(m.mean_n, mean_one) {
            Ok(r) => Some(r),
            Err(ObservableError::ReferenceVacuous) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let regime = match r_witness {
        Some(r) => classify_radiance(r, RADIANCE_CLASS_TOL),
        None => Regime::Undefined,
    };
    let record = ObservableRecord {
        delta: value,
        mean_n: m.mean_n,
        g2: m.g2,
        g3: m.g3,
        r_witness,
        regime,
        blockade: classify_blockade(m.g2, m.g3),
    };
    Ok(PointOutcome { record, residuals })
}

/// Run the sweep described by `config`. Grid points execute in parallel on a
/// pool of `config.threads` workers (0 = all cores); records come back in
/// grid order regardless of scheduling. On the first failing point the sweep
/// aborts and the error carries the clean prefix of records for flushing.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, SweepError> {
    let start = Instant::now();
    let ncut_used = match config.ncut_policy {
        NcutPolicy::Fixed => config.base.ncut,
        NcutPolicy::Auto => auto_ncut(config, 1e-6)?,
    };
    let values = config.range.values();

    let work = || -> Vec<(f64, Result<PointOutcome, ObservableError>)> {
        use rayon::prelude::*;
        values
            .par_iter()
            .map(|&v| {
                (v, compute_point(&config.base, config.axis, v, ncut_used, config.compute_r))
            })
            .collect()
    };
    let outcomes = if config.threads == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .expect("worker pool construction cannot fail for positive sizes");
        pool.install(work)
    };

    let mut records = Vec::with_capacity(values.len());
    let mut residuals = Vec::new();
    let mut failure: Option<(f64, String)> = None;
    for (value, outcome) in outcomes {
        match outcome {
            Ok(p) => {
                records.push(p.record);
                residuals.extend(p.residuals);
            }
            Err(e) => {
                failure = Some((value, e.to_string()));
                break;
            }
        }
    }

    let windows = if records.is_empty() {
        Vec::new()
    } else {
        detect_blockade_windows(&records).expect("nonempty, sorted by construction")
    };
    let residual_max = residuals.iter().copied().fold(0.0, f64::max);
    let residual_mean = if residuals.is_empty() {
        0.0
    } else {
        residuals.iter().sum::<f64>() / residuals.len() as f64
    };
    let result = SweepResult {
        records,
        windows,
        metadata: SweepMetadata {
            config: config.clone(),
            ncut_used,
            residual_max,
            residual_mean,
            wall_time_s: start.elapsed().as_secs_f64(),
            error_note: failure.as_ref().map(|(v, m)| {
                format!("aborted at {} = {v:.6}: {m}", config.axis.as_str())
            }),
        },
    };
    match failure {
        None => Ok(result),
        Some((value, message)) => {
            Err(solve_error(config.axis.as_str(), value, message, result))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::Blockade;
    use crate::sweep::config::{parse_config, SweepRange};
    use approx::assert_relative_eq;

    fn tiny_config(extra: &str) -> SweepConfig {
        let text = format!(
            "[system]\nncut = 3\n[sweep]\nlo = -30\nhi = 30\npoints = 5\n{extra}[output]\npath = unused.csv\n"
        );
        parse_config(&text).unwrap()
    }

    #[test]
    fn sweep_returns_sorted_complete_records() {
        let cfg = tiny_config("");
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.records.len(), 5);
        assert!(result.records.windows(2).all(|w| w[0].delta < w[1].delta));
        assert!(result.records.iter().all(|r| r.mean_n >= 0.0));
        assert!(result.metadata.residual_max <= crate::steady::RESIDUAL_TOL);
        assert!(result.metadata.error_note.is_none());
        assert_eq!(result.metadata.ncut_used, 3);
        // no witness requested: regimes undefined
        assert!(result.records.iter().all(|r| r.r_witness.is_none()));
        assert!(result.records.iter().all(|r| r.regime == Regime::Undefined));
    }

    #[test]
    fn parallel_and_serial_agree_exactly() {
        let mut cfg = tiny_config("");
        cfg.compute_r = true;
        let parallel = run_sweep(&cfg).unwrap();
        cfg.threads = 1;
        let serial = run_sweep(&cfg).unwrap();
        assert_eq!(parallel.records.len(), serial.records.len());
        for (a, b) in parallel.records.iter().zip(serial.records.iter()) {
            assert_eq!(a.delta, b.delta);
            assert_eq!(a.mean_n, b.mean_n, "bitwise determinism at Δ = {}", a.delta);
            assert_eq!(a.g2, b.g2);
            assert_eq!(a.g3, b.g3);
            assert_eq!(a.r_witness, b.r_witness);
        }
    }

    #[test]
    fn witness_fills_regime_labels() {
        let mut cfg = tiny_config("");
        cfg.compute_r = true;
        cfg.range = SweepRange { lo: -25.0, hi: 25.0, points: 3 };
        let result = run_sweep(&cfg).unwrap();
        assert!(result.records.iter().all(|r| r.r_witness.is_some()));
        assert!(result.records.iter().all(|r| r.regime != Regime::Undefined));
    }

    #[test]
    fn failing_point_aborts_with_prefix() {
        // an undamped decoupled system has a degenerate null space; make the
        // FIRST grid point degenerate by sweeping omega_l for a g = 0 system
        // with no pump: at every point the atomic sector is stationary
        let text = "[system]\ng = 0\neta = 0\ngamma_gm = 0\ngamma_me = 0\natom_count = 1\nncut = 1\n[sweep]\naxis = omega_l\nlo = 0\nhi = 1\npoints = 3\n[output]\npath = unused.csv\n";
        let cfg = parse_config(text).unwrap();
        match run_sweep(&cfg) {
            Err(SweepError::Solve { axis, partial, .. }) => {
                assert_eq!(axis, "omega_l");
                assert!(partial.records.is_empty(), "no point can have succeeded");
                assert!(partial.metadata.error_note.is_some());
            }
            other => panic!("expected Solve error, got {other:?}"),
        }
    }

    #[test]
    fn point_params_lock_and_unlock_detunings() {
        let base = SystemParams::default();
        let p = point_params(&base, SweepAxis::Delta, 3.0);
        assert_eq!((p.delta_m, p.delta_cav), (3.0, 3.0));
        let p = point_params(&base, SweepAxis::DeltaM, 3.0);
        assert_eq!((p.delta_m, p.delta_cav), (3.0, 0.0));
        let p = point_params(&base, SweepAxis::OmegaL, 3.0);
        assert_eq!(p.omega_l, 3.0);
        let p = point_params(&base, SweepAxis::PhiZ, 1.5);
        assert_eq!(p.phi_z, 1.5);
    }

    #[test]
    fn blockade_and_windows_appear_on_resonance_interval() {
        // a short high-resolution stretch across the two-photon resonance of
        // the in-phase system shows the narrow three-photon window
        let resonance = crate::manifold::control_resonance_detuning(20.0);
        let text = format!(
            "preset = fig2a\n[system]\nncut = 7\n[sweep]\nlo = {}\nhi = {}\npoints = 9\n[output]\npath = unused.csv\ncompute_r = false\n",
            resonance - 1.0,
            resonance + 1.0
        );
        let cfg = parse_config(&text).unwrap();
        let result = run_sweep(&cfg).unwrap();
        let three: Vec<_> = result
            .windows
            .iter()
            .filter(|w| w.kind == Blockade::ThreePhoton)
            .collect();
        assert!(
            !three.is_empty(),
            "no three-photon window found near the two-photon resonance; records: {:?}",
            result
                .records
                .iter()
                .map(|r| (r.delta, r.g2, r.g3))
                .collect::<Vec<_>>()
        );
        for w in &result.windows {
            assert!(w.delta_lo < w.delta_hi);
        }
    }

    #[test]
    fn auto_policy_resolves_cutoff() {
        let text = "[system]\neta = 0.5\n[sweep]\nlo = -30\nhi = 30\npoints = 3\nncut_policy = auto\n[output]\npath = unused.csv\n";
        let cfg = parse_config(text).unwrap();
        let result = run_sweep(&cfg).unwrap();
        assert!(result.metadata.ncut_used >= 1);
        assert!(result.metadata.ncut_used <= crate::steady::NCUT_HARD_CAP);
        assert_relative_eq!(result.records[1].delta, 0.0, epsilon = 1e-12);
    }
}
