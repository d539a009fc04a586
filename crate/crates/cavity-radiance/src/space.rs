//! Composite Hilbert space of ladder atoms coupled to one truncated cavity mode.
//!
//! Basis ordering is fixed throughout the crate: atom 1, atom 2, cavity, with
//! the photon index varying fastest. A product state |l₁ l₂, n⟩ lives at
//! flat index (l₁·3 + l₂)·(Ncut+1) + n.

use thiserror::Error;

/// Number of levels per atom (ground, intermediate, upper).
pub const ATOM_LEVELS: usize = 3;

/// One level of the three-level ladder: |g⟩, |m⟩, |e⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G = 0,
    M = 1,
    E = 2,
}

impl Level {
    pub const ALL: [Level; ATOM_LEVELS] = [Level::G, Level::M, Level::E];

    pub fn from_index(i: usize) -> Option<Level> {
        Level::ALL.get(i).copied()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("atom count must be 1 or 2, got {0}")]
    AtomCount(usize),
    #[error("Fock cutoff must be at least 1, got {0}")]
    FockCutoff(usize),
}

/// Shape of the truncated Hilbert space: how many atoms and how many photons
/// are kept. Total dimension is 3^N · (Ncut + 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    atom_count: usize,
    fock_cutoff: usize,
}

impl SpaceDescriptor {
    pub fn new(atom_count: usize, fock_cutoff: usize) -> Result<Self, SpaceError> {
        if !(1..=2).contains(&atom_count) {
            return Err(SpaceError::AtomCount(atom_count));
        }
        if fock_cutoff < 1 {
            return Err(SpaceError::FockCutoff(fock_cutoff));
        }
        Ok(Self { atom_count, fock_cutoff })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// Largest photon number kept in the truncation.
    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// Dimension of the photonic factor, Ncut + 1.
    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    /// Dimension of the atomic factor, 3^N.
    pub fn atomic_dim(&self) -> usize {
        ATOM_LEVELS.pow(self.atom_count as u32)
    }

    pub fn dim(&self) -> usize {
        self.atomic_dim() * self.fock_dim()
    }

    /// Flat index of the product state with the given atomic levels and
    /// photon number. `levels` must have one entry per atom.
    pub fn basis_index(&self, levels: &[Level], photons: usize) -> usize {
        assert_eq!(levels.len(), self.atom_count, "one level per atom required");
        assert!(photons <= self.fock_cutoff, "photon number beyond cutoff");
        let mut atomic = 0usize;
        for &l in levels {
            atomic = atomic * ATOM_LEVELS + l as usize;
        }
        atomic * self.fock_dim() + photons
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn basis_state(&self, index: usize) -> (Vec<Level>, usize) {
        assert!(index < self.dim(), "basis index out of range");
        let photons = index % self.fock_dim();
        let mut atomic = index / self.fock_dim();
        let mut levels = vec![Level::G; self.atom_count];
        for slot in (0..self.atom_count).rev() {
            levels[slot] = Level::from_index(atomic % ATOM_LEVELS).unwrap();
            atomic /= ATOM_LEVELS;
        }
        (levels, photons)
    }
}
