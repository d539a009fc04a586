//! Physical parameters of the driven atom-cavity system.
//!
//! All rates and frequencies are quoted in units of the cavity decay κ, and
//! the Hamiltonian lives in the rotating frame, so detunings are the only
//! frequencies that appear.

use crate::space::{SpaceDescriptor, SpaceError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("kappa must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Inputs of the master equation: couplings, drives, detunings, decay rates,
/// and the truncation.
///
/// `delta_l` is the control detuning; the pump detuning of |e⟩ is derived as
/// Δe = Δm + ΔL. Atom 0 sits at an antinode (coupling g); atom 1 couples at
/// g·cos φz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Antinode atom-cavity coupling g.
    pub g: f64,
    /// Position phase of the second atom; sets g₂ = g·cos φz.
    pub phi_z: f64,
    /// Control Rabi frequency Ω_L on the m↔e transition.
    pub omega_l: f64,
    /// Pump Rabi frequency η on the g↔m transition.
    pub eta: f64,
    /// Pump detuning Δm of |m⟩.
    pub delta_m: f64,
    /// Control detuning Δ_L.
    pub delta_l: f64,
    /// Cavity detuning Δcav.
    pub delta_cav: f64,
    /// Cavity decay rate; the unit of every other parameter.
    pub kappa: f64,
    /// Spontaneous decay rate |m⟩ → |g⟩.
    pub gamma_gm: f64,
    /// Spontaneous decay rate |e⟩ → |m⟩.
    pub gamma_me: f64,
    pub atom_count: usize,
    /// Fock truncation; photons above ncut are dropped.
    pub ncut: usize,
}

impl Default for SystemParams {
    /// Two in-phase atoms at the strong-coupling working point g = 20κ,
    /// Γgm = κ, Γme = κ/100, pumped at η = 2κ with the control field off.
    fn default() -> Self {
        Self {
            g: 20.0,
            phi_z: 0.0,
            omega_l: 0.0,
            eta: 2.0,
            delta_m: 0.0,
            delta_l: 0.0,
            delta_cav: 0.0,
            kappa: 1.0,
            gamma_gm: 1.0,
            gamma_me: 0.01,
            atom_count: 2,
            ncut: 6,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let floats = [
            ("g", self.g),
            ("phi_z", self.phi_z),
            ("omega_l", self.omega_l),
            ("eta", self.eta),
            ("delta_m", self.delta_m),
            ("delta_l", self.delta_l),
            ("delta_cav", self.delta_cav),
            ("kappa", self.kappa),
            ("gamma_gm", self.gamma_gm),
            ("gamma_me", self.gamma_me),
        ];
        for (name, value) in floats {
            if !value.is_finite() {
                return Err(ParamsError::NotFinite { name, value });
            }
        }
        if self.kappa <= 0.0 {
            return Err(ParamsError::NonPositiveKappa(self.kappa));
        }
        for (name, value) in [
            ("eta", self.eta),
            ("omega_l", self.omega_l),
            ("gamma_gm", self.gamma_gm),
            ("gamma_me", self.gamma_me),
        ] {
            if value < 0.0 {
                return Err(ParamsError::Negative { name, value });
            }
        }
        SpaceDescriptor::new(self.atom_count, self.ncut)?;
        Ok(())
    }

    pub fn space(&self) -> Result<SpaceDescriptor, ParamsError> {
        Ok(SpaceDescriptor::new(self.atom_count, self.ncut)?)
    }

    /// Derived detuning of the upper level: Δe = Δm + ΔL.
    pub fn delta_e(&self) -> f64 {
        self.delta_m + self.delta_l
    }

    /// Coupling of one atom: g for atom 0, g·cos φz for atom 1.
    pub fn coupling(&self, atom_index: usize) -> f64 {
        assert!(atom_index < self.atom_count, "atom index out of range");
        if atom_index == 0 {
            self.g
        } else {
            self.g * self.phi_z.cos()
        }
    }

    /// The single-atom companion system used by the radiance witness: one
    /// atom at the antinode, everything else unchanged.
    pub fn single_atom_reference(&self) -> SystemParams {
        SystemParams { atom_count: 1, phi_z: 0.0, ..*self }
    }

    /// Lock the control field onto the two-photon resonance Δ_L = √6·g/2.
    pub fn with_resonant_control(mut self) -> Self {
        self.delta_l = crate::manifold::control_resonance_detuning(self.g);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_is_valid() {
        assert_eq!(SystemParams::default().validate(), Ok(()));
    }

    #[test]
    fn rejects_nonpositive_kappa_and_negative_rates() {
        let mut p = SystemParams::default();
        p.kappa = 0.0;
        assert_eq!(p.validate(), Err(ParamsError::NonPositiveKappa(0.0)));
        let mut p = SystemParams::default();
        p.gamma_gm = -0.5;
        assert_eq!(p.validate(), Err(ParamsError::Negative { name: "gamma_gm", value: -0.5 }));
        let mut p = SystemParams::default();
        p.eta = f64::NAN;
        assert!(matches!(p.validate(), Err(ParamsError::NotFinite { name: "eta", .. })));
        let mut p = SystemParams::default();
        p.atom_count = 3;
        assert!(matches!(p.validate(), Err(ParamsError::Space(_))));
    }

    #[test]
    fn derived_quantities() {
        let p = SystemParams { delta_m: 2.0, delta_l: 3.5, phi_z: std::f64::consts::PI, ..Default::default() };
        assert_relative_eq!(p.delta_e(), 5.5);
        assert_relative_eq!(p.coupling(0), 20.0);
        assert_relative_eq!(p.coupling(1), -20.0, epsilon = 1e-12);
    }

    #[test]
    fn single_atom_reference_keeps_drive_and_rates() {
        let p = SystemParams { phi_z: 1.3, omega_l: 4.8, ..Default::default() }
            .with_resonant_control();
        let r = p.single_atom_reference();
        assert_eq!(r.atom_count, 1);
        assert_eq!(r.g, p.g);
        assert_eq!(r.eta, p.eta);
        assert_eq!(r.omega_l, p.omega_l);
        assert_eq!(r.delta_l, p.delta_l);
        assert_eq!(r.ncut, p.ncut);
        assert_eq!(r.phi_z, 0.0);
    }

    #[test]
    fn resonant_control_matches_manifold_gap() {
        let p = SystemParams::default().with_resonant_control();
        assert_relative_eq!(2.0 * p.delta_l, 6f64.sqrt() * p.g, epsilon = 1e-12);
    }
}
