//! Sweep configuration: presets, config-file parsing, CLI overrides.
//!
//! The configuration format is line-oriented `key = value` text with
//! bracketed sections:
//!
//! ```text
//! preset = fig2a            # optional, applied before everything else
//!
//! [system]
//! g = 20.0
//! phi_z = pi
//!
//! [sweep]
//! axis = delta
//! lo = -40.0
//! hi = 40.0
//! points = 401
//!
//! [output]
//! path = run.csv
//! compute_r = true
//! ```
//!
//! Precedence, lowest to highest: preset bundle, config file keys, command
//! line flags. `#` starts a full-line comment; unknown sections and keys are
//! rejected.

use crate::manifold::control_resonance_detuning;
use crate::params::SystemParams;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` out of range: {detail}")]
    OutOfRange { key: String, detail: String },
    #[error("missing required key `{0}`")]
    MissingRequired(String),
    #[error("line {line} is not `key = value`: `{text}`")]
    Malformed { line: usize, text: String },
}

/// Which parameter the sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// Pump and cavity detuning locked together: Δm = Δcav = value.
    Delta,
    DeltaM,
    DeltaCav,
    OmegaL,
    PhiZ,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::DeltaM => "delta_m",
            SweepAxis::DeltaCav => "delta_cav",
            SweepAxis::OmegaL => "omega_l",
            SweepAxis::PhiZ => "phi_z",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text {
            "delta" => Some(SweepAxis::Delta),
            "delta_m" => Some(SweepAxis::DeltaM),
            "delta_cav" => Some(SweepAxis::DeltaCav),
            "omega_l" => Some(SweepAxis::OmegaL),
            "phi_z" => Some(SweepAxis::PhiZ),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SweepRange {
    /// The i-th grid value; endpoints are hit exactly.
    pub fn value(&self, i: usize) -> f64 {
        let t = i as f64 / (self.points - 1) as f64;
        self.lo + (self.hi - self.lo) * t
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NcutPolicy {
    /// Use `base.ncut` as is.
    Fixed,
    /// Scan for a converged cutoff before sweeping.
    Auto,
}

impl NcutPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            NcutPolicy::Fixed => "fixed",
            NcutPolicy::Auto => "auto",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: SystemParams,
    pub axis: SweepAxis,
    pub range: SweepRange,
    pub output_path: PathBuf,
    pub compute_r: bool,
    pub ncut_policy: NcutPolicy,
    /// Worker threads for the sweep; 0 means one per available core.
    pub threads: usize,
}

pub const DEFAULT_RANGE: SweepRange = SweepRange { lo: -40.0, hi: 40.0, points: 401 };

/// Command-line overrides, applied after the config file.
#[derive(Clone, Debug, Default)]
pub struct CliOverrides {
    pub preset: Option<String>,
    pub sweep: Option<String>,
    pub range: Option<(f64, f64, usize)>,
    pub ncut: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub no_r: bool,
}

/// Figure-panel parameter bundles. Cutoffs are the converged values for the
/// default grid at tolerance 1e-6.
pub fn preset(name: &str) -> Option<(SystemParams, bool)> {
    let fig2 = SystemParams {
        g: 20.0,
        phi_z: 0.0,
        eta: 2.0,
        kappa: 1.0,
        gamma_gm: 1.0,
        gamma_me: 0.01,
        delta_m: 0.0,
        delta_cav: 0.0,
        atom_count: 2,
        ..SystemParams::default()
    };
    let fig3 = SystemParams { phi_z: std::f64::consts::PI, eta: 6.0, ..fig2 };
    let resonant = control_resonance_detuning(20.0);
    let params = match name {
        "fig2a" => SystemParams { omega_l: 0.0, delta_l: 0.0, ncut: 8, ..fig2 },
        "fig2c" => SystemParams { omega_l: 4.8, delta_l: resonant, ncut: 8, ..fig2 },
        "fig2e" => SystemParams { omega_l: 11.0, delta_l: resonant, ncut: 8, ..fig2 },
        "fig3a" => SystemParams { omega_l: 0.0, delta_l: 0.0, ncut: 18, ..fig3 },
        "fig3c" => SystemParams { omega_l: 4.0, delta_l: resonant, ncut: 17, ..fig3 },
        "fig3e" => SystemParams { omega_l: 5.6, delta_l: resonant, ncut: 17, ..fig3 },
        _ => return None,
    };
    Some((params, true))
}

pub const PRESET_NAMES: [&str; 6] = ["fig2a", "fig2c", "fig2e", "fig3a", "fig3c", "fig3e"];

/// Partially resolved configuration while keys are being applied.
struct Builder {
    base: SystemParams,
    axis: SweepAxis,
    range: SweepRange,
    output_path: Option<PathBuf>,
    compute_r: bool,
    ncut_policy: NcutPolicy,
    threads: usize,
    delta_l_given: bool,
}

impl Builder {
    fn new() -> Self {
        Builder {
            base: SystemParams::default(),
            axis: SweepAxis::Delta,
            range: DEFAULT_RANGE,
            output_path: None,
            compute_r: false,
            ncut_policy: NcutPolicy::Fixed,
            threads: 0,
            delta_l_given: false,
        }
    }

    fn apply_preset(&mut self, name: &str) -> Result<(), ConfigError> {
        let (params, compute_r) = preset(name).ok_or_else(|| ConfigError::OutOfRange {
            key: "preset".into(),
            detail: format!("unknown preset `{name}`, expected one of {PRESET_NAMES:?}"),
        })?;
        self.base = params;
        self.compute_r = compute_r;
        self.delta_l_given = true;
        Ok(())
    }

    fn finish(mut self) -> Result<SweepConfig, ConfigError> {
        // a control field without an explicit two-photon detuning defaults to
        // the resonance condition
        if !self.delta_l_given && self.base.omega_l > 0.0 {
            self.base.delta_l = control_resonance_detuning(self.base.g);
        }
        let output_path = self
            .output_path
            .ok_or_else(|| ConfigError::MissingRequired("output.path".into()))?;
        if self.range.points < 2 {
            return Err(ConfigError::OutOfRange {
                key: "sweep.points".into(),
                detail: format!("need at least 2 grid points, got {}", self.range.points),
            });
        }
        if !(self.range.lo < self.range.hi) {
            return Err(ConfigError::OutOfRange {
                key: "sweep.lo".into(),
                detail: format!("lo = {} must be below hi = {}", self.range.lo, self.range.hi),
            });
        }
        if self.axis == SweepAxis::OmegaL && self.range.lo < 0.0 {
            return Err(ConfigError::OutOfRange {
                key: "sweep.lo".into(),
                detail: "omega_l sweep cannot go negative".into(),
            });
        }
        if self.compute_r && self.base.atom_count != 2 {
            return Err(ConfigError::OutOfRange {
                key: "output.compute_r".into(),
                detail: "the radiance witness needs the two-atom system".into(),
            });
        }
        self.base.validate().map_err(|e| ConfigError::OutOfRange {
            key: "system".into(),
            detail: e.to_string(),
        })?;
        Ok(SweepConfig {
            base: self.base,
            axis: self.axis,
            range: self.range,
            output_path,
            compute_r: self.compute_r,
            ncut_policy: self.ncut_policy,
            threads: self.threads,
        })
    }
}

fn parse_float(key: &str, value: &str) -> Result<f64, ConfigError> {
    match value {
        "pi" => Ok(std::f64::consts::PI),
        "-pi" => Ok(-std::f64::consts::PI),
        _ => value.parse::<f64>().map_err(|_| ConfigError::OutOfRange {
            key: key.into(),
            detail: format!("`{value}` is not a number"),
        }),
    }
}

fn parse_int(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|_| ConfigError::OutOfRange {
        key: key.into(),
        detail: format!("`{value}` is not a nonnegative integer"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::OutOfRange {
            key: key.into(),
            detail: format!("`{value}` is not `true` or `false`"),
        }),
    }
}

fn apply_key(b: &mut Builder, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
    let full = || format!("{section}.{key}");
    match (section, key) {
        ("", "preset") => b.apply_preset(value)?,
        ("system", "g") => b.base.g = parse_float(&full(), value)?,
        ("system", "phi_z") => b.base.phi_z = parse_float(&full(), value)?,
        ("system", "omega_l") => b.base.omega_l = parse_float(&full(), value)?,
        ("system", "eta") => b.base.eta = parse_float(&full(), value)?,
        ("system", "delta_m") => b.base.delta_m = parse_float(&full(), value)?,
        ("system", "delta_l") => {
            b.base.delta_l = parse_float(&full(), value)?;
            b.delta_l_given = true;
        }
        ("system", "delta_cav") => b.base.delta_cav = parse_float(&full(), value)?,
        ("system", "kappa") => b.base.kappa = parse_float(&full(), value)?,
        ("system", "gamma_gm") => b.base.gamma_gm = parse_float(&full(), value)?,
        ("system", "gamma_me") => b.base.gamma_me = parse_float(&full(), value)?,
        ("system", "atom_count") => b.base.atom_count = parse_int(&full(), value)?,
        ("system", "ncut") => b.base.ncut = parse_int(&full(), value)?,
        ("sweep", "axis") => {
            b.axis = SweepAxis::parse(value).ok_or_else(|| ConfigError::OutOfRange {
                key: full(),
                detail: format!("`{value}` is not a sweep axis"),
            })?
        }
        ("sweep", "lo") => b.range.lo = parse_float(&full(), value)?,
        ("sweep", "hi") => b.range.hi = parse_float(&full(), value)?,
        ("sweep", "points") => b.range.points = parse_int(&full(), value)?,
        ("sweep", "ncut_policy") => {
            b.ncut_policy = match value {
                "fixed" => NcutPolicy::Fixed,
                "auto" => NcutPolicy::Auto,
                _ => {
                    return Err(ConfigError::OutOfRange {
                        key: full(),
                        detail: format!("`{value}` is not `fixed` or `auto`"),
                    })
                }
            }
        }
        ("sweep", "threads") => b.threads = parse_int(&full(), value)?,
        ("output", "path") => b.output_path = Some(PathBuf::from(value)),
        ("output", "compute_r") => b.compute_r = parse_bool(&full(), value)?,
        _ => return Err(ConfigError::UnknownKey(full())),
    }
    Ok(())
}

fn apply_text(b: &mut Builder, text: &str) -> Result<(), ConfigError> {
    let mut section = String::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if !matches!(name, "system" | "sweep" | "output") {
                return Err(ConfigError::UnknownKey(format!("[{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed { line: line_no + 1, text: line.to_string() });
        };
        apply_key(b, &section, key.trim(), value.trim())?;
    }
    Ok(())
}

/// Parse a config file on its own (no command-line overrides).
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    parse_with_overrides(text, &CliOverrides::default())
}

/// Full precedence chain: preset, then file keys, then CLI flags.
pub fn parse_with_overrides(
    text: &str,
    overrides: &CliOverrides,
) -> Result<SweepConfig, ConfigError> {
    let mut b = Builder::new();
    // a --preset flag beats the file's preset line, but both are applied
    // before any other file key
    if let Some(name) = &overrides.preset {
        b.apply_preset(name)?;
        let mut shadow = Builder::new();
        apply_text(&mut shadow, text)?; // still validate file syntax fully
        apply_text_skipping_preset(&mut b, text)?;
    } else {
        apply_text(&mut b, text)?;
    }
    if let Some(axis) = &overrides.sweep {
        apply_key(&mut b, "sweep", "axis", axis)?;
    }
    if let Some((lo, hi, points)) = overrides.range {
        b.range = SweepRange { lo, hi, points };
    }
    if let Some(ncut) = overrides.ncut {
        b.base.ncut = ncut;
        b.ncut_policy = NcutPolicy::Fixed;
    }
    if let Some(out) = &overrides.out {
        b.output_path = Some(out.clone());
    }
    if let Some(threads) = overrides.threads {
        b.threads = threads;
    }
    if overrides.no_r {
        b.compute_r = false;
    }
    b.finish()
}

fn apply_text_skipping_preset(b: &mut Builder, text: &str) -> Result<(), ConfigError> {
    let filtered: String = text
        .lines()
        .filter(|l| {
            let t = l.trim();
            !(t.starts_with("preset") && t.contains('='))
        })
        .collect::<Vec<_>>()
        .join("\n");
    apply_text(b, &filtered)
}
