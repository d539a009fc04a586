//! Steady state at a single parameter point.
//!
//! Solves the two-atom system right on the two-photon resonance
//! delta = sqrt(6) g / 2 and prints the photon statistics next to an
//! off-resonance comparison point.
//!
//!     cargo run --example steady_point

use cavity_radiance::manifold::control_resonance_detuning;
use cavity_radiance::{liouvillian, photon_moments, steady_state, SystemParams};

fn report(label: &str, delta: f64, ncut: usize) {
    let params = SystemParams {
        delta_m: delta,
        delta_cav: delta,
        ncut,
        ..SystemParams::default()
    };
    let solution = steady_state(&liouvillian(&params)).expect("point is regular");
    let m = photon_moments(&solution.rho);
    println!("{label} (delta = {delta:.4}, ncut = {ncut}):");
    println!("  <a'a>    = {:.6e}", m.mean_n);
    println!("  g2(0)    = {}", fmt_opt(m.g2));
    println!("  g3(0)    = {}", fmt_opt(m.g3));
    println!("  residual = {:.3e}, fock tail = {:.3e}", solution.residual, solution.tail_population);
    let p = solution.rho.photon_distribution();
    let head = p.iter().take(5).map(|v| format!("{v:.3e}")).collect::<Vec<_>>();
    println!("  photon distribution: [{}] ...\n", head.join(", "));
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined (cavity empty)".into(), |x| format!("{x:.6}"))
}

fn main() {
    let resonance = control_resonance_detuning(20.0);
    report("two-photon resonance", resonance, 6);
    report("off resonance", 10.0, 6);
}
