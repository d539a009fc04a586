//! Operators and density matrices on the composite atom-cavity space.
//!
//! Operators are sparse and immutable; density matrices are dense and
//! validated against the physical invariants (Hermitian, unit trace,
//! positive semidefinite) at construction.

use crate::space::{Level, SpaceDescriptor, ATOM_LEVELS};
use crate::sparse::SparseMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// One tensor factor of the composite space, in the fixed ordering
/// (atom 0, atom 1, cavity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Atom(usize),
    Cavity,
}

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("operators live on different spaces")]
    SpaceMismatch,
    #[error("atom index {index} out of range for {atom_count} atom(s)")]
    AtomIndex { index: usize, atom_count: usize },
    #[error("factor for {slot:?} must be {expected}x{expected}, got {found_rows}x{found_cols}")]
    SlotDimension { slot: Slot, expected: usize, found_rows: usize, found_cols: usize },
    #[error("slot {0:?} appears more than once")]
    DuplicateSlot(Slot),
}

/// Lowering operator on a standalone Fock factor: ⟨n−1|a|n⟩ = √n, hard
/// truncation at the cutoff.
pub(crate) fn fock_lowering(fock_dim: usize) -> SparseMatrix {
    let triplets: Vec<_> = (1..fock_dim)
        .map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)))
        .collect();
    SparseMatrix::from_triplets(fock_dim, fock_dim, &triplets)
}

/// |α⟩⟨β| on a standalone three-level factor.
pub(crate) fn level_transition(alpha: Level, beta: Level) -> SparseMatrix {
    SparseMatrix::from_triplets(
        ATOM_LEVELS,
        ATOM_LEVELS,
        &[(alpha as usize, beta as usize, Complex64::new(1.0, 0.0))],
    )
}

/// Sparse operator on the full composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: SparseMatrix,
}

impl Operator {
    pub(crate) fn from_matrix(space: SpaceDescriptor, matrix: SparseMatrix) -> Self {
        assert_eq!(matrix.nrows(), space.dim(), "operator shape must match space");
        assert_eq!(matrix.ncols(), space.dim(), "operator shape must match space");
        Self { space, matrix }
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        Self::from_matrix(space, SparseMatrix::identity(space.dim()))
    }

    /// Cavity annihilation operator a, identity on the atoms.
    pub fn annihilation(space: SpaceDescriptor) -> Self {
        Self::tensor_embed(space, &[(Slot::Cavity, fock_lowering(space.fock_dim()))])
            .expect("cavity slot embedding cannot fail")
    }

    /// Photon number operator a†a.
    pub fn number(space: SpaceDescriptor) -> Self {
        let a = Self::annihilation(space);
        a.dagger().matmul(&a).expect("same space")
    }

    /// S^j_{αβ} = |α⟩⟨β| on atom `atom_index`, identity elsewhere.
    pub fn atomic_transition(
        space: SpaceDescriptor,
        atom_index: usize,
        alpha: Level,
        beta: Level,
    ) -> Result<Self, OperatorError> {
        Self::tensor_embed(space, &[(Slot::Atom(atom_index), level_transition(alpha, beta))])
    }

    /// Projector |l⟩⟨l| on one atom.
    pub fn atomic_projector(
        space: SpaceDescriptor,
        atom_index: usize,
        level: Level,
    ) -> Result<Self, OperatorError> {
        Self::atomic_transition(space, atom_index, level, level)
    }

    /// Total excitation number N̂ = a†a + Σ_j S^j_mm, conserved by the
    /// undriven Hamiltonian.
    pub fn excitation_number(space: SpaceDescriptor) -> Self {
        let mut n = Self::number(space);
        for j in 0..space.atom_count() {
            let p = Self::atomic_projector(space, j, Level::M).expect("index in range");
            n = n.add(&p).expect("same space");
        }
        n
    }

    /// Kronecker-embed subsystem-local matrices into the full space, identity
    /// on every slot not mentioned.
    pub fn tensor_embed(
        space: SpaceDescriptor,
        factors: &[(Slot, SparseMatrix)],
    ) -> Result<Self, OperatorError> {
        for (i, (slot, m)) in factors.iter().enumerate() {
            let expected = match *slot {
                Slot::Atom(j) => {
                    if j >= space.atom_count() {
                        return Err(OperatorError::AtomIndex {
                            index: j,
                            atom_count: space.atom_count(),
                        });
                    }
                    ATOM_LEVELS
                }
                Slot::Cavity => space.fock_dim(),
            };
            if m.nrows() != expected || m.ncols() != expected {
                return Err(OperatorError::SlotDimension {
                    slot: *slot,
                    expected,
                    found_rows: m.nrows(),
                    found_cols: m.ncols(),
                });
            }
            if factors[..i].iter().any(|(s, _)| s == slot) {
                return Err(OperatorError::DuplicateSlot(*slot));
            }
        }
        let slot_order: Vec<Slot> = (0..space.atom_count())
            .map(Slot::Atom)
            .chain(std::iter::once(Slot::Cavity))
            .collect();
        let mut acc = SparseMatrix::identity(1);
        for slot in slot_order {
            let local = factors
                .iter()
                .find(|(s, _)| *s == slot)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(|| match slot {
                    Slot::Atom(_) => SparseMatrix::identity(ATOM_LEVELS),
                    Slot::Cavity => SparseMatrix::identity(space.fock_dim()),
                });
            acc = acc.kron(&local);
        }
        Ok(Self::from_matrix(space, acc))
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.dagger() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { space: self.space, matrix: self.matrix.scale(c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.space != other.space {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self { space: self.space, matrix: self.matrix.add(&other.matrix) })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, OperatorError> {
        if self.space != other.space {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Self { space: self.space, matrix: self.matrix.matmul(&other.matrix) })
    }

    /// tr(op·ρ).
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<Complex64, OperatorError> {
        if self.space != rho.space() {
            return Err(OperatorError::SpaceMismatch);
        }
        let m = rho.matrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, c, v) in self.matrix.iter() {
            acc += v * m[(c, r)];
        }
        Ok(acc)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DensityMatrixError {
    #[error("density matrix must be {expected}x{expected}, got {found_rows}x{found_cols}")]
    Shape { expected: usize, found_rows: usize, found_cols: usize },
    #[error("density matrix not Hermitian: max |ρ − ρ†| = {defect:.3e}")]
    Hermiticity { defect: f64 },
    #[error("density matrix trace {trace:.12} differs from 1")]
    Trace { trace: f64 },
    #[error("density matrix not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    Positivity { min_eigenvalue: f64 },
}

/// Dense, validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: SpaceDescriptor,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_SLACK: f64 = 1e-8;

    /// Validate and wrap a dense matrix. The positivity check runs a full
    /// eigendecomposition; reserve for states worth trusting afterwards.
    pub fn from_matrix(
        space: SpaceDescriptor,
        matrix: DMatrix<Complex64>,
    ) -> Result<Self, DensityMatrixError> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(DensityMatrixError::Shape {
                expected: d,
                found_rows: matrix.nrows(),
                found_cols: matrix.ncols(),
            });
        }
        let candidate = Self { space, matrix };
        let defect = candidate.hermiticity_defect();
        if defect > Self::HERMITICITY_TOL {
            return Err(DensityMatrixError::Hermiticity { defect });
        }
        let trace = candidate.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOL || trace.im.abs() > Self::TRACE_TOL {
            return Err(DensityMatrixError::Trace { trace: trace.re });
        }
        let min_eigenvalue = candidate.min_eigenvalue();
        if min_eigenvalue < -Self::POSITIVITY_SLACK {
            return Err(DensityMatrixError::Positivity { min_eigenvalue });
        }
        Ok(candidate)
    }

    /// Pure state |index⟩⟨index| on the flat basis.
    pub fn pure(space: SpaceDescriptor, basis_index: usize) -> Self {
        assert!(basis_index < space.dim(), "basis index out of range");
        let mut m = DMatrix::from_element(space.dim(), space.dim(), Complex64::new(0.0, 0.0));
        m[(basis_index, basis_index)] = Complex64::new(1.0, 0.0);
        Self { space, matrix: m }
    }

    /// All atoms in |g⟩, cavity in vacuum.
    pub fn ground(space: SpaceDescriptor) -> Self {
        let levels = vec![Level::G; space.atom_count()];
        Self::pure(space, space.basis_index(&levels, 0))
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// max |ρ − ρ†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in r..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |acc, &e| acc.min(e))
    }

    /// Photon-number distribution P(n), atoms traced out.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let fd = self.space.fock_dim();
        let mut p = vec![0.0; fd];
        for a in 0..self.space.atomic_dim() {
            for n in 0..fd {
                let i = a * fd + n;
                p[n] += self.matrix[(i, i)].re;
            }
        }
        p
    }

    /// Population of the two highest Fock levels, the truncation-adequacy
    /// indicator. The vacuum level never counts as tail: population sitting
    /// at n = 0 is not truncation error, so a one-photon cutoff reports only
    /// the n = 1 occupation.
    pub fn fock_tail_population(&self) -> f64 {
        let p = self.photon_distribution();
        let start = p.len().saturating_sub(2).max(1);
        p[start..].iter().sum()
    }

    /// Population of one atomic level, everything else traced out.
    pub fn atomic_population(&self, atom_index: usize, level: Level) -> f64 {
        assert!(atom_index < self.space.atom_count(), "atom index out of range");
        let mut acc = 0.0;
        for i in 0..self.space.dim() {
            let (levels, _) = self.space.basis_state(i);
            if levels[atom_index] == level {
                acc += self.matrix[(i, i)].re;
            }
        }
        acc
    }

    /// Column-major vectorization: vec(ρ)[i + j·dim] = ρ_ij.
    pub fn vectorized(&self) -> Vec<Complex64> {
        self.matrix.as_slice().to_vec()
    }

    /// Trace distance (1/2)‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.space, other.space, "spaces must match");
        let diff = &self.matrix - &other.matrix;
        0.5 * diff.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_atom_space(ncut: usize) -> SpaceDescriptor {
        SpaceDescriptor::new(2, ncut).unwrap()
    }

    #[test]
    fn annihilation_matrix_elements() {
        // single-subsystem check at the smallest cutoff: a = [[0,1],[0,0]]
        let a = fock_lowering(2);
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert_eq!(a.nnz(), 1);

        let space = two_atom_space(3);
        let a = Operator::annihilation(space);
        let gg = [Level::G, Level::G];
        // a|1⟩ = |0⟩, a|0⟩ = 0
        assert_eq!(a.matrix().get(space.basis_index(&gg, 0), space.basis_index(&gg, 1)), c(1.0, 0.0));
        let col0: Vec<_> = a.matrix().iter().filter(|&(_, col, _)| col == 0).collect();
        assert!(col0.is_empty());
        // ⟨2|a|3⟩ = √3
        let elem = a.matrix().get(space.basis_index(&gg, 2), space.basis_index(&gg, 3));
        assert_relative_eq!(elem.re, 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn creation_from_dagger() {
        let space = two_atom_space(3);
        let ad = Operator::annihilation(space).dagger();
        let gg = [Level::G, Level::G];
        // a†|n⟩ = √(n+1)|n+1⟩ below the cutoff
        for n in 0..3 {
            let elem = ad.matrix().get(space.basis_index(&gg, n + 1), space.basis_index(&gg, n));
            assert_relative_eq!(elem.re, ((n + 1) as f64).sqrt(), epsilon = 1e-15);
        }
        assert_eq!(ad.dagger(), Operator::annihilation(space));
    }

    #[test]
    fn atomic_transition_acts_on_one_slot() {
        let space = two_atom_space(2);
        let s_mg = Operator::atomic_transition(space, 0, Level::M, Level::G).unwrap();
        let from = space.basis_index(&[Level::G, Level::E], 1);
        let to = space.basis_index(&[Level::M, Level::E], 1);
        assert_eq!(s_mg.matrix().get(to, from), c(1.0, 0.0));
        // product collapses to the ground projector on atom 0
        let s_gm = Operator::atomic_transition(space, 0, Level::G, Level::M).unwrap();
        let proj_g = Operator::atomic_projector(space, 0, Level::G).unwrap();
        assert_eq!(s_gm.matmul(&s_mg).unwrap(), proj_g);
        // identity on the complement: tr = dim/3
        let s_mm = Operator::atomic_projector(space, 0, Level::M).unwrap();
        let tr: Complex64 = (0..space.dim()).map(|i| s_mm.matrix().get(i, i)).sum();
        assert_relative_eq!(tr.re, space.dim() as f64 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn atomic_transition_rejects_bad_index() {
        let space = SpaceDescriptor::new(1, 2).unwrap();
        let err = Operator::atomic_transition(space, 1, Level::M, Level::G).unwrap_err();
        assert_eq!(err, OperatorError::AtomIndex { index: 1, atom_count: 1 });
    }

    #[test]
    fn tensor_embed_identities_and_disjoint_slots() {
        let space = two_atom_space(2);
        let id3 = SparseMatrix::identity(3);
        let idf = SparseMatrix::identity(space.fock_dim());
        let all_id = Operator::tensor_embed(
            space,
            &[(Slot::Atom(0), id3.clone()), (Slot::Atom(1), id3), (Slot::Cavity, idf)],
        )
        .unwrap();
        assert_eq!(all_id, Operator::identity(space));
        assert_eq!(all_id.matrix().nrows(), 9 * (2 + 1));

        // embedding disjoint slots separately multiplies to the joint embedding
        let x = level_transition(Level::M, Level::G);
        let a = fock_lowering(space.fock_dim());
        let separate = Operator::tensor_embed(space, &[(Slot::Atom(0), x.clone())])
            .unwrap()
            .matmul(&Operator::tensor_embed(space, &[(Slot::Cavity, a.clone())]).unwrap())
            .unwrap();
        let joint = Operator::tensor_embed(space, &[(Slot::Atom(0), x), (Slot::Cavity, a)]).unwrap();
        assert_eq!(separate, joint);
    }

    #[test]
    fn tensor_embed_rejects_misuse() {
        // fock_dim = 4 here, so a 3x3 block cannot sit on the cavity slot
        let space = two_atom_space(3);
        let id3 = SparseMatrix::identity(3);
        let err = Operator::tensor_embed(space, &[(Slot::Cavity, id3.clone())]).unwrap_err();
        assert!(matches!(err, OperatorError::SlotDimension { slot: Slot::Cavity, .. }));
        let err = Operator::tensor_embed(
            space,
            &[(Slot::Atom(0), id3.clone()), (Slot::Atom(0), id3)],
        )
        .unwrap_err();
        assert_eq!(err, OperatorError::DuplicateSlot(Slot::Atom(0)));
    }

    #[test]
    fn commutator_of_ladder_pair_is_identity_below_cutoff() {
        let space = two_atom_space(4);
        let a = Operator::annihilation(space);
        let ad = a.dagger();
        let comm = a
            .matmul(&ad)
            .unwrap()
            .add(&ad.matmul(&a).unwrap().scale(c(-1.0, 0.0)))
            .unwrap();
        // identity except on the top Fock level, where truncation leaves −Ncut
        for i in 0..space.dim() {
            let (_, n) = space.basis_state(i);
            let expected = if n == space.fock_cutoff() { -(n as f64) } else { 1.0 };
            assert_relative_eq!(comm.matrix().get(i, i).re, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_values() {
        let space = two_atom_space(3);
        let n_op = Operator::number(space);
        let vac = DensityMatrix::ground(space);
        assert_eq!(Operator::identity(space).expectation(&vac).unwrap(), c(1.0, 0.0));
        assert_relative_eq!(n_op.expectation(&vac).unwrap().re, 0.0, epsilon = 1e-15);
        let fock2 =
            DensityMatrix::pure(space, space.basis_index(&[Level::G, Level::G], 2));
        assert_relative_eq!(n_op.expectation(&fock2).unwrap().re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_rejects_space_mismatch() {
        let a = two_atom_space(2);
        let b = two_atom_space(3);
        let op = Operator::number(a);
        let rho = DensityMatrix::ground(b);
        assert_eq!(op.expectation(&rho).unwrap_err(), OperatorError::SpaceMismatch);
    }

    #[test]
    fn density_matrix_validation() {
        let space = SpaceDescriptor::new(1, 1).unwrap();
        let d = space.dim();
        let mut m = DMatrix::from_element(d, d, c(0.0, 0.0));
        m[(0, 0)] = c(0.5, 0.0);
        m[(1, 1)] = c(0.5, 0.0);
        m[(0, 1)] = c(0.0, 0.3);
        m[(1, 0)] = c(0.0, -0.3);
        assert!(DensityMatrix::from_matrix(space, m.clone()).is_ok());

        let mut bad_herm = m.clone();
        bad_herm[(0, 1)] = c(0.1, 0.3);
        assert!(matches!(
            DensityMatrix::from_matrix(space, bad_herm),
            Err(DensityMatrixError::Hermiticity { .. })
        ));

        let mut bad_trace = m.clone();
        bad_trace[(1, 1)] = c(0.6, 0.0);
        assert!(matches!(
            DensityMatrix::from_matrix(space, bad_trace),
            Err(DensityMatrixError::Trace { .. })
        ));

        // Hermitian, unit trace, but indefinite
        let mut bad_psd = m;
        bad_psd[(0, 0)] = c(1.2, 0.0);
        bad_psd[(1, 1)] = c(-0.2, 0.0);
        bad_psd[(0, 1)] = c(0.0, 0.0);
        bad_psd[(1, 0)] = c(0.0, 0.0);
        assert!(matches!(
            DensityMatrix::from_matrix(space, bad_psd),
            Err(DensityMatrixError::Positivity { .. })
        ));
    }

    #[test]
    fn photon_distribution_and_tail() {
        let space = two_atom_space(3);
        let rho = DensityMatrix::pure(space, space.basis_index(&[Level::M, Level::G], 2));
        let p = rho.photon_distribution();
        assert_eq!(p.len(), 4);
        assert_relative_eq!(p[2], 1.0, epsilon = 1e-15);
        assert_relative_eq!(rho.fock_tail_population(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(rho.atomic_population(0, Level::M), 1.0, epsilon = 1e-15);
        assert_relative_eq!(rho.atomic_population(1, Level::G), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vectorization_is_column_major() {
        let space = SpaceDescriptor::new(1, 1).unwrap();
        let d = space.dim();
        let mut m = DMatrix::from_element(d, d, c(0.0, 0.0));
        m[(0, 0)] = c(0.75, 0.0);
        m[(2, 2)] = c(0.25, 0.0);
        m[(2, 0)] = c(0.1, 0.2);
        m[(0, 2)] = c(0.1, -0.2);
        let rho = DensityMatrix::from_matrix(space, m).unwrap();
        let v = rho.vectorized();
        assert_eq!(v[2], c(0.1, 0.2)); // ρ_20 at index 2 + 0·d
        assert_eq!(v[2 * d], c(0.1, -0.2)); // ρ_02 at index 0 + 2·d
        assert_eq!(v[2 * d + 2], c(0.25, 0.0));
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let space = SpaceDescriptor::new(1, 1).unwrap();
        let a = DensityMatrix::pure(space, 0);
        let b = DensityMatrix::pure(space, 3);
        assert_relative_eq!(a.trace_distance(&b), 1.0, epsilon = 1e-12);
        assert_relative_eq!(a.trace_distance(&a), 0.0, epsilon = 1e-12);
    }

    proptest! {
        // expectation of a Hermitian operator is real
        #[test]
        fn hermitian_expectation_is_real(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -1.0f64..1.0, -1.0f64..1.0), 1..10),
            diag in proptest::collection::vec(0.01f64..1.0, 6),
        ) {
            let space = SpaceDescriptor::new(1, 1).unwrap();
            let t: Vec<_> = entries
                .iter()
                .flat_map(|&(r, col, re, im)| {
                    [(r, col, c(re, im)), (col, r, c(re, -im))]
                })
                .collect();
            let herm = SparseMatrix::from_triplets(6, 6, &t);
            let op = Operator::from_matrix(space, herm);

            let norm: f64 = diag.iter().sum();
            let mut m = DMatrix::from_element(6, 6, c(0.0, 0.0));
            for (i, &p) in diag.iter().enumerate() {
                m[(i, i)] = c(p / norm, 0.0);
            }
            let rho = DensityMatrix::from_matrix(space, m).unwrap();
            let val = op.expectation(&rho).unwrap();
            prop_assert!(val.im.abs() <= 1e-10);
        }
    }
}
