//! Dressed-state ladder of the undriven atom-cavity exchange.
//!
//! Prints the N = 1 and N = 2 excitation-manifold spectra for both atomic
//! phase configurations and verifies the analytic eigenstates against the
//! numerics. Pass `--csv PATH` to also dump the table as CSV.
//!
//!     cargo run --example dressed_spectra [-- --csv spectra.csv]

use cavity_radiance::manifold::{
    control_resonance_detuning, eigenstate_overlap, manifold_eigen, ManifoldSpectrum,
    TargetState,
};
use std::fmt::Write as _;
use std::f64::consts::PI;

const G: f64 = 20.0;

fn describe(spectrum: &ManifoldSpectrum, out: &mut String) {
    println!("  basis: {}", join(spectrum.basis_labels.iter().map(|l| l.to_string())));
    for (k, e) in spectrum.eigenvalues.iter().enumerate() {
        let col = spectrum.eigenvectors.column(k);
        let comps = spectrum
            .basis_labels
            .iter()
            .zip(col.iter())
            .filter(|(_, a)| a.abs() > 1e-9)
            .map(|(l, a)| format!("{a:+.4} {l}"))
            .collect::<Vec<_>>();
        println!("  E = {e:+9.4}  {}", comps.join("  "));
        writeln!(out, "{},{},{:.12e}", spectrum.excitation_number, k, e).unwrap();
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(" ")
}

fn check(spectrum: &ManifoldSpectrum, target: &TargetState) {
    let overlap = eigenstate_overlap(spectrum, target).unwrap();
    let ok = if (overlap - 1.0).abs() < 1e-10 { "ok" } else { "MISMATCH" };
    println!("  |<{}|numerics>|^2 = {overlap:.12}  {ok}", target.name);
}

fn main() {
    let csv_path = std::env::args()
        .skip_while(|a| a != "--csv")
        .nth(1)
        .map(std::path::PathBuf::from);
    let mut csv = String::from("excitation_number,index,eigenvalue\n");

    println!("coupling g = {G} kappa, eigenvalues relative to the manifold zero\n");

    println!("in phase (phi_z = 0):");
    let s1 = manifold_eigen(G, 0.0, 1);
    describe(&s1, &mut csv);
    check(&s1, &TargetState::psi_pm_1(G, 1.0));
    check(&s1, &TargetState::psi_pm_1(G, -1.0));

    let s2 = manifold_eigen(G, 0.0, 2);
    describe(&s2, &mut csv);
    check(&s2, &TargetState::psi_pm_2(G, 1.0));
    check(&s2, &TargetState::psi_pm_2(G, -1.0));
    check(&s2, &TargetState::psi_0_2_in_phase());

    println!("\nout of phase (phi_z = pi):");
    let s1 = manifold_eigen(G, PI, 1);
    describe(&s1, &mut csv);
    check(&s1, &TargetState::plus_0());

    let s2 = manifold_eigen(G, PI, 2);
    describe(&s2, &mut csv);
    check(&s2, &TargetState::phi_0_2());
    check(&s2, &TargetState::psi_0_2_out_of_phase());

    println!(
        "\ntwo-photon resonance sits at delta = sqrt(6) g / 2 = {:.6}",
        control_resonance_detuning(G)
    );

    if let Some(path) = csv_path {
        std::fs::write(&path, csv).unwrap();
        println!("wrote eigenvalue table to {}", path.display());
    }
}
