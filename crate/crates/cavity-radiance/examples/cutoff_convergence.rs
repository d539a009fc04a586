//! Fock-cutoff convergence scan and run comparison.
//!
//! Picks a cutoff for a detuning sweep with the auto policy (a convergence
//! scan over grid edges, dressed resonances, and their subharmonics), then
//! reruns the sweep at that cutoff and at cutoff + 2 and diffs the CSV
//! outputs numerically. A single-point scan is not enough here: g³ converges
//! slowest between the resonance peaks, so the probe set has to cover the
//! whole grid before the two runs agree everywhere.
//!
//!     cargo run --example cutoff_convergence

use cavity_radiance::sweep::auto_ncut;
use cavity_radiance::{
    compare_runs, converge_ncut, emit_csv, preset, run_sweep, NcutPolicy, SweepAxis,
    SweepConfig, SweepRange, SystemParams,
};

fn config_at(base: SystemParams, ncut: usize, path: &std::path::Path) -> SweepConfig {
    SweepConfig {
        base: SystemParams { ncut, ..base },
        axis: SweepAxis::Delta,
        range: SweepRange { lo: -40.0, hi: 40.0, points: 21 },
        output_path: path.to_path_buf(),
        compute_r: false,
        ncut_policy: NcutPolicy::Fixed,
        threads: 0,
    }
}

fn main() {
    let (base, _) = preset("fig2a").expect("known preset");
    let tol = 1e-6;

    let at_center = converge_ncut(&base, tol).expect("scan terminates below the cap");
    println!("cutoff converged at the sweep center alone: {at_center}");

    let dir = std::env::temp_dir();
    let path_a = dir.join("cutoff_convergence_a.csv");
    let path_b = dir.join("cutoff_convergence_b.csv");
    let probe_config = config_at(base, base.ncut, &path_a);
    let ncut = auto_ncut(&probe_config, tol).expect("scan terminates below the cap");
    println!("cutoff converged over the sweep probe set:  {ncut}\n");

    for (n, path) in [(ncut, &path_a), (ncut + 2, &path_b)] {
        let result = run_sweep(&config_at(base, n, path)).expect("sweep succeeds");
        emit_csv(&result, path).expect("writable output");
        println!("wrote {} (ncut = {n}, {} records)", path.display(), result.records.len());
    }

    let report = compare_runs(&path_a, &path_b, tol).expect("comparable grids");
    println!("\n{}", report.summary());
    assert!(report.pass, "truncation error above tolerance");
}
