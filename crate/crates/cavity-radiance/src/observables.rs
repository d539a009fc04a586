//! Photon statistics, the radiance witness, and blockade-window detection.
//!
//! Everything here is read-only post-processing of steady states. The
//! equal-time correlations are normally ordered moments of the cavity field,
//!
//!   g²(0) = ⟨a†a†aa⟩ / ⟨a†a⟩²,   g³(0) = ⟨a†a†a†aaa⟩ / ⟨a†a⟩³,
//!
//! and the radiance witness compares the two-atom emission against two
//! independent single-atom emitters,
//!
//!   R = (⟨a†a⟩₂ − 2⟨a†a⟩₁) / (2⟨a†a⟩₁).

use crate::model::liouvillian;
use crate::operator::{DensityMatrix, Operator};
use crate::params::SystemParams;
use crate::steady::{steady_state, SolveError};
use thiserror::Error;

/// Mean photon numbers below this are treated as vacuum: normalized
/// correlations divide by powers of ⟨a†a⟩ and become meaningless noise.
pub const MEAN_N_FLOOR: f64 = 1e-12;

/// Half-width of the band around R = 1 that still counts as superradiant.
pub const RADIANCE_CLASS_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("mean photon number below {MEAN_N_FLOOR:.0e}: normalized correlations are undefined")]
    VacuousCorrelation,
    #[error("single-atom reference has vacuum cavity output, radiance witness undefined")]
    ReferenceVacuous,
    #[error("no records to scan for blockade windows")]
    EmptySweep,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Radiance regime relative to two independent emitters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subradiant,
    Enhanced,
    Superradiant,
    Hyperradiant,
    /// No radiance witness available for this record.
    Undefined,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Subradiant => "subradiant",
            Regime::Enhanced => "enhanced",
            Regime::Superradiant => "superradiant",
            Regime::Hyperradiant => "hyperradiant",
            Regime::Undefined => "undefined",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "subradiant" => Some(Regime::Subradiant),
            "enhanced" => Some(Regime::Enhanced),
            "superradiant" => Some(Regime::Superradiant),
            "hyperradiant" => Some(Regime::Hyperradiant),
            "undefined" => Some(Regime::Undefined),
            _ => None,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Photon-blockade classification of a single sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blockade {
    None,
    TwoPhoton,
    ThreePhoton,
}

impl Blockade {
    pub fn as_str(&self) -> &'static str {
        match self {
            Blockade::None => "none",
            Blockade::TwoPhoton => "two_photon",
            Blockade::ThreePhoton => "three_photon",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "none" => Some(Blockade::None),
            "two_photon" => Some(Blockade::TwoPhoton),
            "three_photon" => Some(Blockade::ThreePhoton),
            _ => None,
        }
    }
}

impl std::fmt::Display for Blockade {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Observables of one sweep point. `g2`/`g3` are absent when the cavity is
/// effectively in vacuum, `r_witness` when no single-atom reference was run
/// or the reference output was vacuous.
#[derive(Clone, Copy, Debug)]
pub struct ObservableRecord {
    pub delta: f64,
    pub mean_n: f64,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub r_witness: Option<f64>,
    pub regime: Regime,
    pub blockade: Blockade,
}

/// A maximal contiguous sweep interval satisfying one blockade criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockadeWindow {
    pub delta_lo: f64,
    pub delta_hi: f64,
    pub kind: Blockade,
}

/// ⟨a†a⟩, real within numerical tolerance.
pub fn mean_photon_number(rho: &DensityMatrix) -> f64 {
    let n = Operator::number(rho.space());
    let value = n.expectation(rho).expect("operator built on the state's space");
    debug_assert!(value.im.abs() <= 1e-10 * (1.0 + value.re.abs()));
    value.re
}

fn normalized_moment(rho: &DensityMatrix, order: u32) -> Result<f64, ObservableError> {
    let mean = mean_photon_number(rho);
    if mean < MEAN_N_FLOOR {
        return Err(ObservableError::VacuousCorrelation);
    }
    let space = rho.space();
    let a = Operator::annihilation(space);
    let mut lowered = a.clone();
    for _ in 1..order {
        lowered = a.matmul(&lowered).expect("same space");
    }
    let ordered = lowered.dagger().matmul(&lowered).expect("same space");
    let value = ordered.expectation(rho).expect("operator built on the state's space");
    debug_assert!(value.im.abs() <= 1e-10 * (1.0 + value.re.abs()));
    Ok(value.re / mean.powi(order as i32))
}

/// Equal-time second-order correlation g²(0) = ⟨a†a†aa⟩/⟨a†a⟩².
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64, ObservableError> {
    normalized_moment(rho, 2)
}

/// Equal-time third-order correlation g³(0) = ⟨a†a†a†aaa⟩/⟨a†a⟩³.
pub fn g3_zero(rho: &DensityMatrix) -> Result<f64, ObservableError> {
    normalized_moment(rho, 3)
}

/// Mean photon number and normalized correlations in one pass.
#[derive(Clone, Copy, Debug)]
pub struct PhotonMoments {
    pub mean_n: f64,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
}

pub fn photon_moments(rho: &DensityMatrix) -> PhotonMoments {
    let mean_n = mean_photon_number(rho);
    let (g2, g3) = if mean_n < MEAN_N_FLOOR {
        (None, None)
    } else {
        (
            Some(g2_zero(rho).expect("mean above floor")),
            Some(g3_zero(rho).expect("mean above floor")),
        )
    };
    PhotonMoments { mean_n, g2, g3 }
}

/// The witness R from the two measured mean photon numbers.
pub fn radiance_ratio(mean_two_atom: f64, mean_one_atom: f64) -> Result<f64, ObservableError> {
    if mean_one_atom < MEAN_N_FLOOR {
        return Err(ObservableError::ReferenceVacuous);
    }
    Ok((mean_two_atom - 2.0 * mean_one_atom) / (2.0 * mean_one_atom))
}

/// Solve the two-atom system and its single-atom reference, then form R.
/// The two steady-state solves run concurrently.
pub fn radiance_witness(params_two_atom: &SystemParams) -> Result<f64, ObservableError> {
    assert_eq!(params_two_atom.atom_count, 2, "radiance witness needs the two-atom system");
    let reference = params_two_atom.single_atom_reference();
    let (two, one) = rayon::join(
        || steady_state(&liouvillian(params_two_atom)),
        || steady_state(&liouvillian(&reference)),
    );
    let mean_two = mean_photon_number(&two?.rho);
    let mean_one = mean_photon_number(&one?.rho);
    radiance_ratio(mean_two, mean_one)
}

/// Label a finite witness value. The band `tol` around the exact
/// two-independent-emitters point R = 1 counts as superradiant.
pub fn classify_radiance(r: f64, tol: f64) -> Regime {
    assert!(r.is_finite(), "witness must be finite");
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    if r < -tol {
        Regime::Subradiant
    } else if r < 1.0 - tol {
        Regime::Enhanced
    } else if r <= 1.0 + tol {
        Regime::Superradiant
    } else {
        Regime::Hyperradiant
    }
}

/// Classify one point's blockade character. Strict inequalities: points
/// sitting exactly on 1 carry no blockade label.
pub fn classify_blockade(g2: Option<f64>, g3: Option<f64>) -> Blockade {
    match (g2, g3) {
        (Some(g2), _) if g2 < 1.0 => Blockade::TwoPhoton,
        (Some(g2), Some(g3)) if g2 > 1.0 && g3 < 1.0 => Blockade::ThreePhoton,
        _ => Blockade::None,
    }
}

/// Scan an ordered sweep for maximal runs of identically classified points.
/// A window needs at least two consecutive grid points (its endpoints must
/// differ); isolated single-point crossings are grid noise, not windows.
pub fn detect_blockade_windows(
    records: &[ObservableRecord],
) -> Result<Vec<BlockadeWindow>, ObservableError> {
    if records.is_empty() {
        return Err(ObservableError::EmptySweep);
    }
    assert!(
        records.windows(2).all(|w| w[0].delta < w[1].delta),
        "records must be sorted by strictly increasing delta"
    );
    let mut windows = Vec::new();
    let mut run_start = 0;
    let flush = |start: usize, end: usize, kind: Blockade, out: &mut Vec<BlockadeWindow>| {
        if kind != Blockade::None && end - start >= 2 {
            out.push(BlockadeWindow {
                delta_lo: records[start].delta,
                delta_hi: records[end - 1].delta,
                kind,
            });
        }
    };
    for i in 1..records.len() {
        if records[i].blockade != records[run_start].blockade {
            flush(run_start, i, records[run_start].blockade, &mut windows);
            run_start = i;
        }
    }
    flush(run_start, records.len(), records[run_start].blockade, &mut windows);
    Ok(windows)
}
