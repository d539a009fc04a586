//! Relaxation toward the steady state under the full Lindblad generator.
//!
//! Integrates the master equation from the vacuum with an adaptive
//! Dormand-Prince stepper, printing the transient photon number, and checks
//! that the long-time state agrees with the direct null-space solve.
//!
//!     cargo run --example time_evolution

use cavity_radiance::{
    evolve, liouvillian, mean_photon_number, steady_state, DensityMatrix, SystemParams,
};

fn main() {
    let params = SystemParams { ncut: 4, ..SystemParams::default() };
    let l = liouvillian(&params);
    let space = params.space().expect("valid parameters");

    let mut state = DensityMatrix::ground(space);
    let mut t = 0.0;
    println!("kappa t    <a'a>");
    println!("{t:7.2}  {:.6e}", mean_photon_number(&state));
    for chunk in [0.5, 1.5, 3.0, 5.0, 10.0, 30.0] {
        state = evolve(&state, &l, chunk, 0.05).expect("integration succeeds");
        t += chunk;
        println!("{t:7.2}  {:.6e}", mean_photon_number(&state));
    }

    let direct = steady_state(&l).expect("unique steady state");
    let dist = state.trace_distance(&direct.rho);
    println!("\nsteady <a'a> = {:.6e}", mean_photon_number(&direct.rho));
    println!("trace distance after kappa t = {t}: {dist:.3e}");
    assert!(dist <= 1e-6, "integrator drifted away from the fixed point");
}
