//! Excitation-manifold spectra of the undriven two-atom Hamiltonian.
//!
//! With the pump and control fields treated as perturbations, the atom-cavity
//! exchange conserves N̂ = a†a + Σ_j S^j_mm and never populates |e⟩, so the
//! dressed states organize into finite blocks labeled by N. Diagonalizing a
//! block gives the anharmonic ladder responsible for the multiphoton
//! resonances: ±√2 g at N = 1, ±√6 g and two zero modes at N = 2.

use crate::space::Level;
use nalgebra::DMatrix;
use thiserror::Error;

/// One basis vector of a manifold: atomic levels (only g and m occur) plus a
/// photon number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldLabel {
    pub levels: Vec<Level>,
    pub photons: usize,
}

impl std::fmt::Display for ManifoldLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|")?;
        for l in &self.levels {
            write!(f, "{}", match l {
                Level::G => 'g',
                Level::M => 'm',
                Level::E => 'e',
            })?;
        }
        write!(f, ",{}⟩", self.photons)
    }
}

/// Eigendecomposition of one excitation manifold. Eigenvalues are sorted
/// ascending and quoted relative to the manifold's rotating-frame zero;
/// column k of `eigenvectors` belongs to `eigenvalues[k]`.
#[derive(Clone, Debug)]
pub struct ManifoldSpectrum {
    pub excitation_number: usize,
    pub basis_labels: Vec<ManifoldLabel>,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ManifoldError {
    #[error("target state uses {label} which is outside this manifold")]
    OutsideManifold { label: String },
    #[error("target state has zero norm")]
    ZeroNorm,
}

/// Product states with total excitation N: the atoms contribute one unit per
/// |m⟩, the cavity one per photon. Ordering is by m-count ascending (photon
/// number descending), the atom-0 excitation listed first within a tie.
pub fn manifold_basis(n: usize, atom_count: usize) -> Vec<ManifoldLabel> {
    assert!((1..=2).contains(&atom_count), "atom count must be 1 or 2");
    let configs: Vec<Vec<Level>> = match atom_count {
        1 => vec![vec![Level::G], vec![Level::M]],
        _ => vec![
            vec![Level::G, Level::G],
            vec![Level::M, Level::G],
            vec![Level::G, Level::M],
            vec![Level::M, Level::M],
        ],
    };
    let mut labels = Vec::new();
    for m_count in 0..=n.min(atom_count) {
        let photons = n - m_count;
        for config in &configs {
            if config.iter().filter(|&&l| l == Level::M).count() == m_count {
                labels.push(ManifoldLabel { levels: config.clone(), photons });
            }
        }
    }
    labels
}

/// Diagonalize the two-atom exchange block of manifold N at zero detunings,
/// couplings g₁ = g and g₂ = g·cos φz.
pub fn manifold_eigen(g: f64, phi_z: f64, n: usize) -> ManifoldSpectrum {
    let basis = manifold_basis(n, 2);
    let dim = basis.len();
    let couplings = [g, g * phi_z.cos()];
    let mut h = DMatrix::from_element(dim, dim, 0.0);
    // ⟨…m_j…, p−1 | HI | …g_j…, p⟩ = g_j √p
    for (col, from) in basis.iter().enumerate() {
        if from.photons == 0 {
            continue;
        }
        for (j, &gj) in couplings.iter().enumerate() {
            if from.levels[j] != Level::G {
                continue;
            }
            let mut to_levels = from.levels.clone();
            to_levels[j] = Level::M;
            let to = ManifoldLabel { levels: to_levels, photons: from.photons - 1 };
            let row = basis.iter().position(|l| *l == to).expect("image stays in manifold");
            let amp = gj * (from.photons as f64).sqrt();
            h[(row, col)] += amp;
            h[(col, row)] += amp;
        }
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::from_element(dim, dim, 0.0);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigenvectors.set_column(new_col, &eig.eigenvectors.column(old_col));
    }
    ManifoldSpectrum { excitation_number: n, basis_labels: basis, eigenvalues, eigenvectors }
}

/// The control detuning √6·g/2 that tunes Ψ₊⁽²⁾ → |ee,0⟩ into two-photon
/// resonance with the upper N = 2 dressed state.
pub fn control_resonance_detuning(g: f64) -> f64 {
    6f64.sqrt() * g / 2.0
}

/// A reference state expressed in a manifold basis, tagged with the
/// eigenvalue it is expected to sit at.
#[derive(Clone, Debug)]
pub struct TargetState {
    pub name: &'static str,
    /// Expected eigenvalue (relative to the manifold zero); selects the
    /// eigenvector the overlap is taken against.
    pub energy: f64,
    /// (label, amplitude) pairs; need not be normalized.
    pub amplitudes: Vec<(ManifoldLabel, f64)>,
}

fn label(levels: &[Level], photons: usize) -> ManifoldLabel {
    ManifoldLabel { levels: levels.to_vec(), photons }
}

impl TargetState {
    /// Ψ±⁽¹⁾ = |gg,1⟩/√2 ± |+,0⟩/√2 at energy ±√2 g (in-phase atoms).
    pub fn psi_pm_1(g: f64, sign: f64) -> Self {
        let s = sign.signum();
        Self {
            name: if s > 0.0 { "Psi+1" } else { "Psi-1" },
            energy: s * 2f64.sqrt() * g,
            amplitudes: vec![
                (label(&[Level::G, Level::G], 1), 1.0 / 2f64.sqrt()),
                (label(&[Level::M, Level::G], 0), s / 2.0),
                (label(&[Level::G, Level::M], 0), s / 2.0),
            ],
        }
    }

    /// Ψ±⁽²⁾ = |gg,2⟩/√3 ± |+,1⟩/√2 + |mm,0⟩/√6 at energy ±√6 g (in-phase).
    pub fn psi_pm_2(g: f64, sign: f64) -> Self {
        let s = sign.signum();
        Self {
            name: if s > 0.0 { "Psi+2" } else { "Psi-2" },
            energy: s * 6f64.sqrt() * g,
            amplitudes: vec![
                (label(&[Level::G, Level::G], 2), 1.0 / 3f64.sqrt()),
                (label(&[Level::M, Level::G], 1), s / 2.0),
                (label(&[Level::G, Level::M], 1), s / 2.0),
                (label(&[Level::M, Level::M], 0), 1.0 / 6f64.sqrt()),
            ],
        }
    }

    /// Ψ₀⁽²⁾ ∝ −|gg,2⟩ + √2|mm,0⟩, the two-photon zero mode when the atoms
    /// couple in phase (φz = 0).
    pub fn psi_0_2_in_phase() -> Self {
        Self {
            name: "Psi0(2)",
            energy: 0.0,
            amplitudes: vec![
                (label(&[Level::G, Level::G], 2), -1.0 / 3f64.sqrt()),
                (label(&[Level::M, Level::M], 0), (2f64 / 3.0).sqrt()),
            ],
        }
    }

    /// Ψ₀⁽²⁾ ∝ |gg,2⟩ + √2|mm,0⟩, the two-photon zero mode when the atoms
    /// couple out of phase (φz = π). The relative sign between |gg,2⟩ and
    /// |mm,0⟩ tracks the sign of g₁g₂.
    pub fn psi_0_2_out_of_phase() -> Self {
        Self {
            name: "Psi0(2)",
            energy: 0.0,
            amplitudes: vec![
                (label(&[Level::G, Level::G], 2), 1.0 / 3f64.sqrt()),
                (label(&[Level::M, Level::M], 0), (2f64 / 3.0).sqrt()),
            ],
        }
    }

    /// |+,0⟩, the out-of-phase one-photon zero mode Ψ₀⁽¹⁾.
    pub fn plus_0() -> Self {
        Self {
            name: "Psi0(1)=|+,0>",
            energy: 0.0,
            amplitudes: vec![
                (label(&[Level::M, Level::G], 0), 1.0 / 2f64.sqrt()),
                (label(&[Level::G, Level::M], 0), 1.0 / 2f64.sqrt()),
            ],
        }
    }

    /// Φ₀⁽²⁾ = |+,1⟩, the extra out-of-phase two-photon zero mode.
    pub fn phi_0_2() -> Self {
        Self {
            name: "Phi0(2)=|+,1>",
            energy: 0.0,
            amplitudes: vec![
                (label(&[Level::M, Level::G], 1), 1.0 / 2f64.sqrt()),
                (label(&[Level::G, Level::M], 1), 1.0 / 2f64.sqrt()),
            ],
        }
    }
}

/// |⟨target|v⟩|² against the normalized target, where v is the eigenvector
/// whose eigenvalue lies closest to the target's nominal energy. For a
/// degenerate eigenvalue the overlap is taken with the projection onto the
/// whole degenerate subspace, so the basis choice inside it cannot matter.
pub fn eigenstate_overlap(
    spectrum: &ManifoldSpectrum,
    target: &TargetState,
) -> Result<f64, ManifoldError> {
    let mut vec = vec![0.0; spectrum.basis_labels.len()];
    for (lbl, amp) in &target.amplitudes {
        match spectrum.basis_labels.iter().position(|b| b == lbl) {
            Some(k) => vec[k] += amp,
            None => {
                return Err(ManifoldError::OutsideManifold { label: lbl.to_string() });
            }
        }
    }
    let norm: f64 = vec.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(ManifoldError::ZeroNorm);
    }
    let nearest = spectrum
        .eigenvalues
        .iter()
        .map(|e| (e - target.energy).abs())
        .fold(f64::INFINITY, f64::min);
    let mut overlap = 0.0;
    for (k, &e) in spectrum.eigenvalues.iter().enumerate() {
        if (e - target.energy).abs() <= nearest + 1e-9 {
            let dot: f64 = spectrum
                .eigenvectors
                .column(k)
                .iter()
                .zip(vec.iter())
                .map(|(a, b)| a * b)
                .sum();
            overlap += (dot / norm).powi(2);
        }
    }
    Ok(overlap)
}
