//! CSV emission, the metadata sidecar, and run comparison.
//!
//! The CSV contract: exact header `delta,mean_n,g2,g3,r,regime,blockade`,
//! one row per record, LF line endings, floats at 12 significant digits,
//! empty fields for undefined values. Identical configs produce identical
//! bytes. The sidecar (same basename, `.meta` extension) echoes every input
//! parameter, run statistics, and one `window.N = kind,lo,hi` line per
//! detected window.

use super::run::{SweepError, SweepResult};
use crate::observables::{Blockade, ObservableRecord, Regime};
use std::fmt::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str = "delta,mean_n,g2,g3,r,regime,blockade";

fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Render the records as CSV text.
pub fn render_csv(records: &[ObservableRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_float(r.delta),
            fmt_float(r.mean_n),
            fmt_opt(r.g2),
            fmt_opt(r.g3),
            fmt_opt(r.r_witness),
            r.regime.as_str(),
            r.blockade.as_str(),
        );
    }
    out
}

/// Render the metadata sidecar.
pub fn render_meta(result: &SweepResult) -> String {
    let m = &result.metadata;
    let c = &m.config;
    let p = &c.base;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("system.g", p.g.to_string());
    kv("system.phi_z", p.phi_z.to_string());
    kv("system.omega_l", p.omega_l.to_string());
    kv("system.eta", p.eta.to_string());
    kv("system.delta_m", p.delta_m.to_string());
    kv("system.delta_l", p.delta_l.to_string());
    kv("system.delta_cav", p.delta_cav.to_string());
    kv("system.kappa", p.kappa.to_string());
    kv("system.gamma_gm", p.gamma_gm.to_string());
    kv("system.gamma_me", p.gamma_me.to_string());
    kv("system.atom_count", p.atom_count.to_string());
    kv("system.ncut", p.ncut.to_string());
    kv("sweep.axis", c.axis.as_str().to_string());
    kv("sweep.lo", c.range.lo.to_string());
    kv("sweep.hi", c.range.hi.to_string());
    kv("sweep.points", c.range.points.to_string());
    kv("sweep.ncut_policy", c.ncut_policy.as_str().to_string());
    kv("sweep.threads", c.threads.to_string());
    kv("output.path", c.output_path.display().to_string());
    kv("output.compute_r", c.compute_r.to_string());
    kv("run.records", result.records.len().to_string());
    kv("run.ncut_used", m.ncut_used.to_string());
    kv("run.residual_max", format!("{:.3e}", m.residual_max));
    kv("run.residual_mean", format!("{:.3e}", m.residual_mean));
    kv("run.wall_time_s", format!("{:.3}", m.wall_time_s));
    if let Some(note) = &m.error_note {
        kv("run.error", note.clone());
    }
    for (i, w) in result.windows.iter().enumerate() {
        kv(
            &format!("window.{i}"),
            format!("{},{},{}", w.kind.as_str(), fmt_float(w.delta_lo), fmt_float(w.delta_hi)),
        );
    }
    out
}

/// Write `path` and its `.meta` sidecar.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), SweepError> {
    std::fs::write(path, render_csv(&result.records))?;
    std::fs::write(path.with_extension("meta"), render_meta(result))?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub delta: f64,
    pub mean_n: f64,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub r: Option<f64>,
    pub regime: Regime,
    pub blockade: Blockade,
}

impl CsvRow {
    /// Rebuild a record, e.g. to re-run window detection on emitted data.
    pub fn to_record(&self) -> ObservableRecord {
        ObservableRecord {
            delta: self.delta,
            mean_n: self.mean_n,
            g2: self.g2,
            g3: self.g3,
            r_witness: self.r,
            regime: self.regime,
            blockade: self.blockade,
        }
    }
}

fn parse_float_field(row: usize, column: &str, field: &str) -> Result<f64, SweepError> {
    field.parse::<f64>().map_err(|_| {
        SweepError::GridMismatch(format!("row {row}: `{field}` in column {column} is not a number"))
    })
}

fn parse_opt_field(row: usize, column: &str, field: &str) -> Result<Option<f64>, SweepError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_float_field(row, column, field).map(Some)
    }
}

/// Parse CSV text emitted by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, SweepError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(SweepError::GridMismatch(format!(
                "bad header: expected `{CSV_HEADER}`, got `{}`",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(SweepError::GridMismatch(format!(
                "row {i}: expected 7 fields, got {}",
                fields.len()
            )));
        }
        rows.push(CsvRow {
            delta: parse_float_field(i, "delta", fields[0])?,
            mean_n: parse_float_field(i, "mean_n", fields[1])?,
            g2: parse_opt_field(i, "g2", fields[2])?,
            g3: parse_opt_field(i, "g3", fields[3])?,
            r: parse_opt_field(i, "r", fields[4])?,
            regime: Regime::from_label(fields[5]).ok_or_else(|| {
                SweepError::GridMismatch(format!("row {i}: bad regime `{}`", fields[5]))
            })?,
            blockade: Blockade::from_label(fields[6]).ok_or_else(|| {
                SweepError::GridMismatch(format!("row {i}: bad blockade `{}`", fields[6]))
            })?,
        });
    }
    Ok(rows)
}

/// Per-column agreement statistics between two runs.
#[derive(Clone, Copy, Debug)]
pub struct ColumnComparison {
    pub column: &'static str,
    pub max_abs: f64,
    pub max_rel: f64,
    /// Rows where exactly one of the files has the value defined.
    pub option_mismatches: usize,
    pub within_tol: bool,
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub rows: usize,
    pub columns: Vec<ColumnComparison>,
    /// Label disagreements; reported but not part of pass/fail, since a
    /// hair's-width numeric shift can legitimately flip a threshold label.
    pub regime_mismatches: usize,
    pub blockade_mismatches: usize,
    pub pass: bool,
}

impl CompareReport {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rows compared: {}", self.rows);
        for c in &self.columns {
            let _ = writeln!(
                out,
                "{:>7}: max abs {:.3e}, max rel {:.3e}, option mismatches {}, {}",
                c.column,
                c.max_abs,
                c.max_rel,
                c.option_mismatches,
                if c.within_tol { "ok" } else { "EXCEEDS TOLERANCE" },
            );
        }
        let _ = writeln!(
            out,
            "labels: {} regime / {} blockade mismatches (informational)",
            self.regime_mismatches, self.blockade_mismatches
        );
        let _ = writeln!(out, "verdict: {}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

fn compare_column(
    column: &'static str,
    pairs: impl Iterator<Item = (Option<f64>, Option<f64>)>,
    tol: f64,
) -> ColumnComparison {
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut option_mismatches = 0usize;
    let mut within_tol = true;
    for (a, b) in pairs {
        match (a, b) {
            (Some(a), Some(b)) => {
                let abs = (a - b).abs();
                let scale = a.abs().max(b.abs());
                max_abs = max_abs.max(abs);
                if scale > 0.0 {
                    max_rel = max_rel.max(abs / scale);
                }
                // mixed criterion: absolute near zero, relative for large values
                if abs > tol * scale.max(1.0) {
                    within_tol = false;
                }
            }
            (None, None) => {}
            _ => {
                option_mismatches += 1;
                within_tol = false;
            }
        }
    }
    ColumnComparison { column, max_abs, max_rel, option_mismatches, within_tol }
}

/// Compare two emitted CSV files on an identical delta grid.
pub fn compare_runs(path_a: &Path, path_b: &Path, tol: f64) -> Result<CompareReport, SweepError> {
    let a = parse_csv(&std::fs::read_to_string(path_a)?)?;
    let b = parse_csv(&std::fs::read_to_string(path_b)?)?;
    if a.len() != b.len() {
        return Err(SweepError::GridMismatch(format!(
            "row counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    for (i, (ra, rb)) in a.iter().zip(b.iter()).enumerate() {
        if ra.delta != rb.delta {
            return Err(SweepError::GridMismatch(format!(
                "delta differs at row {i}: {} vs {}",
                ra.delta, rb.delta
            )));
        }
    }
    let columns = vec![
        compare_column(
            "mean_n",
            a.iter().zip(b.iter()).map(|(x, y)| (Some(x.mean_n), Some(y.mean_n))),
            tol,
        ),
        compare_column("g2", a.iter().zip(b.iter()).map(|(x, y)| (x.g2, y.g2)), tol),
        compare_column("g3", a.iter().zip(b.iter()).map(|(x, y)| (x.g3, y.g3)), tol),
        compare_column("r", a.iter().zip(b.iter()).map(|(x, y)| (x.r, y.r)), tol),
    ];
    let regime_mismatches = a.iter().zip(b.iter()).filter(|(x, y)| x.regime != y.regime).count();
    let blockade_mismatches =
        a.iter().zip(b.iter()).filter(|(x, y)| x.blockade != y.blockade).count();
    let pass = columns.iter().all(|c| c.within_tol);
    Ok(CompareReport { rows: a.len(), columns, regime_mismatches, blockade_mismatches, pass })
}
