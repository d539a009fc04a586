//! Hamiltonian, collapse channels, and the vectorized Liouvillian.
//!
//! The master equation is
//!
//!   dρ/dt = −i[H, ρ] + κ(2aρa† − a†aρ − ρa†a)
//!           + Σ_j Γgm(2S^j_gm ρ S^j_mg − S^j_mm ρ − ρ S^j_mm) + (e→m analog)
//!
//! with H = H0 + HI + HD in the rotating frame,
//!
//!   H0 = Σ_j (Δm S^j_mm + Δe S^j_ee) + Δcav a†a
//!   HI = Σ_j [g_j (a S^j_mg + a† S^j_gm) + Ω_L (S^j_em + S^j_me)]
//!   HD = η Σ_j (S^j_mg + S^j_gm)
//!
//! Each channel rate is a half-width: a lone channel (γ, C) empties its level
//! as exp(−2γt).
//!
//! Superoperators act on column-vectorized states, vec(ρ)[i + j·dim] = ρ_ij,
//! so vec(XρY) = (Yᵀ ⊗ X)·vec(ρ) and
//!
//!   L = −i(I⊗H − Hᵀ⊗I) + Σ γ(2C̄⊗C − I⊗C†C − (C†C)ᵀ⊗I).

use crate::operator::{fock_lowering, level_transition, Operator, Slot};
use crate::params::SystemParams;
use crate::space::{Level, SpaceDescriptor};
use crate::sparse::SparseMatrix;
use num_complex::Complex64;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn checked_space(params: &SystemParams) -> SpaceDescriptor {
    params.validate().expect("invalid SystemParams");
    params.space().expect("space already validated")
}

/// Full rotating-frame Hamiltonian H0 + HI + HD.
///
/// Panics if `params` fail validation.
pub fn hamiltonian(params: &SystemParams) -> Operator {
    hamiltonian_with_cavity_drive(params, 0.0)
}

/// Hamiltonian plus a direct cavity pump η_c(a + a†). The pump term is a
/// validation harness: with the atoms decoupled it turns the model into the
/// exactly solvable driven damped oscillator.
pub fn hamiltonian_with_cavity_drive(params: &SystemParams, eta_c: f64) -> Operator {
    let space = checked_space(params);
    let embed_atom = |j: usize, alpha: Level, beta: Level| {
        Operator::atomic_transition(space, j, alpha, beta).expect("atom index in range")
    };
    let mut h = Operator::number(space).scale(re(params.delta_cav));
    for j in 0..params.atom_count {
        let detuning = embed_atom(j, Level::M, Level::M)
            .scale(re(params.delta_m))
            .add(&embed_atom(j, Level::E, Level::E).scale(re(params.delta_e())))
            .expect("same space");
        let exchange = Operator::tensor_embed(
            space,
            &[
                (Slot::Atom(j), level_transition(Level::M, Level::G)),
                (Slot::Cavity, fock_lowering(space.fock_dim())),
            ],
        )
        .expect("valid slots");
        let exchange = exchange.add(&exchange.dagger()).expect("same space");
        let control = embed_atom(j, Level::E, Level::M);
        let control = control.add(&control.dagger()).expect("same space");
        let pump = embed_atom(j, Level::M, Level::G);
        let pump = pump.add(&pump.dagger()).expect("same space");

        h = h
            .add(&detuning)
            .and_then(|h| h.add(&exchange.scale(re(params.coupling(j)))))
            .and_then(|h| h.add(&control.scale(re(params.omega_l))))
            .and_then(|h| h.add(&pump.scale(re(params.eta))))
            .expect("same space");
    }
    if eta_c != 0.0 {
        let a = Operator::annihilation(space);
        let drive = a.add(&a.dagger()).expect("same space").scale(re(eta_c));
        h = h.add(&drive).expect("same space");
    }
    h
}

/// One Lindblad channel: rate γ (half-width) and collapse operator C.
#[derive(Clone, Debug)]
pub struct CollapseChannel {
    pub rate: f64,
    pub operator: Operator,
}

/// Cavity decay plus the two spontaneous-emission channels per atom.
/// Channels with zero rate are omitted.
///
/// Panics if `params` fail validation.
pub fn collapse_channels(params: &SystemParams) -> Vec<CollapseChannel> {
    let space = checked_space(params);
    let mut channels = Vec::new();
    channels.push(CollapseChannel { rate: params.kappa, operator: Operator::annihilation(space) });
    for j in 0..params.atom_count {
        for (rate, upper, lower) in [
            (params.gamma_gm, Level::M, Level::G),
            (params.gamma_me, Level::E, Level::M),
        ] {
            if rate > 0.0 {
                channels.push(CollapseChannel {
                    rate,
                    operator: Operator::atomic_transition(space, j, lower, upper)
                        .expect("atom index in range"),
                });
            }
        }
    }
    channels
}

/// The generator of the master equation, acting on column-vectorized density
/// matrices.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: SpaceDescriptor,
    matrix: SparseMatrix,
}

impl Liouvillian {
    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    /// The dim² × dim² superoperator matrix.
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Dimension of the underlying Hilbert space (the matrix is dim²-sided).
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// L·vec(ρ).
    pub fn apply(&self, vec_rho: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(vec_rho)
    }

    /// ‖vec(I)†·L‖_max, the trace-preservation defect. Zero for any valid
    /// Lindblad generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.space.dim();
        let mut col_sums = vec![Complex64::new(0.0, 0.0); d * d];
        for (r, c, v) in self.matrix.iter() {
            if r % (d + 1) == 0 {
                col_sums[c] += v;
            }
        }
        col_sums.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Assemble the vectorized generator from a Hamiltonian and channel list.
pub fn assemble_liouvillian(h: &Operator, channels: &[CollapseChannel]) -> Liouvillian {
    let space = h.space();
    let d = space.dim();
    let id = SparseMatrix::identity(d);
    let hm = h.matrix();
    let mut l = id
        .kron(hm)
        .add(&hm.transpose().kron(&id).scale(re(-1.0)))
        .scale(Complex64::new(0.0, -1.0));
    for ch in channels {
        assert_eq!(ch.operator.space(), space, "channel on a different space");
        let c = ch.operator.matrix();
        let cdc = c.dagger().matmul(c);
        let term = c
            .conj()
            .kron(c)
            .scale(re(2.0))
            .add(&id.kron(&cdc).scale(re(-1.0)))
            .add(&cdc.transpose().kron(&id).scale(re(-1.0)));
        l = l.add(&term.scale(re(ch.rate)));
    }
    Liouvillian { space, matrix: l }
}

/// Generator for the given parameters.
///
/// Panics if `params` fail validation.
pub fn liouvillian(params: &SystemParams) -> Liouvillian {
    assemble_liouvillian(&hamiltonian(params), &collapse_channels(params))
}

/// Generator with the auxiliary cavity pump included (see
/// [`hamiltonian_with_cavity_drive`]).
pub fn liouvillian_with_cavity_drive(params: &SystemParams, eta_c: f64) -> Liouvillian {
    assemble_liouvillian(
        &hamiltonian_with_cavity_drive(params, eta_c),
        &collapse_channels(params),
    )
}
