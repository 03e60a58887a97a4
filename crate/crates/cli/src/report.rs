//! Report types and file emission. Tables go out as CSV with
//! full-precision floats (they re-parse bit-exactly); summaries go out as
//! TOML.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use peakshave::design::{AssessmentReport, Bound, PaybackReport};
use serde::{Deserialize, Serialize};

use crate::CliResult;

/// Write one CSV table: a header row plus stringified records.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let text = toml::to_string_pretty(value)
        .map_err(|e| crate::CliError::validation(format!("serialize {}: {e}", path.display())))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn fmt<T: Display>(v: T) -> String {
    format!("{v}")
}

/// Per-cycle assessment rows flattened to (cycle, bound) records.
pub fn assessment_rows(report: &AssessmentReport, bounds: &[Bound]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in &report.cycles {
        for &b in bounds {
            let hv = c.hvac_schedule.get(b);
            rows.push(vec![
                fmt(c.year),
                fmt(c.month),
                b.label().to_string(),
                fmt(c.baseline_bill.get(b)),
                fmt(c.objective.get(b)),
                fmt(c.gross_saving.get(b)),
                fmt(c.degradation.get(b)),
                fmt(c.gross_saving.get(b) - c.degradation.get(b)),
                fmt(c.exact_bill_total.get(b)),
                fmt(c.peak_kw.get(b)),
                fmt(c.verified.get(b)),
                hv.map_or(String::from(""), |s| fmt(s.pre_start)),
                hv.map_or(String::from(""), |s| fmt(s.post_start)),
            ]);
        }
    }
    rows
}

pub const ASSESSMENT_HEADER: [&str; 13] = [
    "year",
    "month",
    "bound",
    "baseline_bill",
    "objective",
    "gross_saving",
    "degradation",
    "net_saving",
    "exact_bill_total",
    "peak_kw",
    "verified",
    "hvac_pre_start",
    "hvac_post_start",
];

/// TOML summary of an assessment + payback run.
#[derive(Debug, Serialize, Deserialize)]
pub struct AssessmentSummary {
    pub annual_gross_saving_hi: f64,
    pub annual_gross_saving_lo: f64,
    pub annual_degradation_hi: f64,
    pub annual_degradation_lo: f64,
    pub annual_net_saving_hi: f64,
    pub annual_net_saving_lo: f64,
    pub all_cycles_peak_verified_hi: bool,
    pub all_cycles_peak_verified_lo: bool,
    pub payback_years_hi: Option<f64>,
    pub payback_years_lo: Option<f64>,
    pub salvage_fraction_hi: Option<f64>,
    pub salvage_fraction_lo: Option<f64>,
    pub degradation_blind: bool,
}

impl AssessmentSummary {
    pub fn new(report: &AssessmentReport, payback: &PaybackReport, blind: bool) -> Self {
        AssessmentSummary {
            annual_gross_saving_hi: report.annual_gross_saving.hi,
            annual_gross_saving_lo: report.annual_gross_saving.lo,
            annual_degradation_hi: report.annual_degradation.hi,
            annual_degradation_lo: report.annual_degradation.lo,
            annual_net_saving_hi: report.annual_net_saving.hi,
            annual_net_saving_lo: report.annual_net_saving.lo,
            all_cycles_peak_verified_hi: report.all_verified.hi,
            all_cycles_peak_verified_lo: report.all_verified.lo,
            payback_years_hi: payback.payback_years.hi,
            payback_years_lo: payback.payback_years.lo,
            salvage_fraction_hi: payback.salvage_fraction.hi,
            salvage_fraction_lo: payback.salvage_fraction.lo,
            degradation_blind: blind,
        }
    }
}

/// One (cycle, bound) line of the design-vs-runtime comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub year: i32,
    pub month: u32,
    pub bound: String,
    /// Perfect-foresight net saving (baseline - objective), relaxed price.
    pub design_net_saving: f64,
    /// Realized net saving of the controller under the same relaxed price.
    pub runtime_net_saving: f64,
    /// runtime / design; 1.0 when both are ~zero.
    pub ratio: f64,
    pub design_degradation: f64,
    pub runtime_degradation: f64,
    pub baseline_relaxed_bill: f64,
    pub design_objective: f64,
    pub runtime_total_relaxed: f64,
    /// Exact re-priced bill of the realized net load.
    pub runtime_exact_bill: f64,
}

/// Whole-run comparison: per-cycle rows plus per-bound annual aggregates
/// and the monthly cost series used for plotting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub annual: Vec<AnnualComparison>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnualComparison {
    pub bound: String,
    pub design_net_saving: f64,
    pub runtime_net_saving: f64,
    pub ratio: f64,
    pub design_degradation: f64,
    pub runtime_degradation: f64,
}

pub fn ratio_convention(runtime: f64, design: f64) -> f64 {
    if design.abs() < 1e-9 && runtime.abs() < 1e-9 {
        1.0
    } else {
        runtime / design
    }
}

impl ComparisonReport {
    pub fn from_rows(rows: Vec<ComparisonRow>) -> Self {
        let mut annual = Vec::new();
        for bound in ["hi", "lo"] {
            let sel: Vec<&ComparisonRow> = rows.iter().filter(|r| r.bound == bound).collect();
            if sel.is_empty() {
                continue;
            }
            let design: f64 = sel.iter().map(|r| r.design_net_saving).sum();
            let runtime: f64 = sel.iter().map(|r| r.runtime_net_saving).sum();
            annual.push(AnnualComparison {
                bound: bound.to_string(),
                design_net_saving: design,
                runtime_net_saving: runtime,
                ratio: ratio_convention(runtime, design),
                design_degradation: sel.iter().map(|r| r.design_degradation).sum(),
                runtime_degradation: sel.iter().map(|r| r.runtime_degradation).sum(),
            });
        }
        ComparisonReport { rows, annual }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt(r.year),
                    fmt(r.month),
                    r.bound.clone(),
                    fmt(r.design_net_saving),
                    fmt(r.runtime_net_saving),
                    fmt(r.ratio),
                    fmt(r.design_degradation),
                    fmt(r.runtime_degradation),
                    fmt(r.baseline_relaxed_bill),
                    fmt(r.design_objective),
                    fmt(r.runtime_total_relaxed),
                    fmt(r.runtime_exact_bill),
                ]
            })
            .collect()
    }
}

pub const COMPARISON_HEADER: [&str; 12] = [
    "year",
    "month",
    "bound",
    "design_net_saving",
    "runtime_net_saving",
    "ratio",
    "design_degradation",
    "runtime_degradation",
    "baseline_relaxed_bill",
    "design_objective",
    "runtime_total_relaxed",
    "runtime_exact_bill",
];

/// Output paths of one run, all under the chosen output directory.
pub struct OutPaths {
    pub dir: PathBuf,
}

impl OutPaths {
    pub fn new(dir: &Path) -> Self {
        OutPaths {
            dir: dir.to_path_buf(),
        }
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}
