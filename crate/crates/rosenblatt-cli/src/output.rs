//! CSV and JSON emitters.
//!
//! CSV columns are fixed: `order,d,value,method,error_estimate,seed,n_samples`,
//! with seed and sample count blank where they do not apply. Reals are rounded
//! to 12 significant digits and printed in the shortest form that parses back
//! to the rounded value.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use rosenblatt::cumulants::CumulantReport;
use serde::Serialize;

use crate::verify::Check;
use crate::{CliResult, Failure, Format, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub(crate) struct Row {
    pub order: u32,
    pub d: f64,
    pub value: f64,
    pub method: String,
    pub error_estimate: f64,
    pub diagnostics: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
}

impl Row {
    pub fn new(order: u32, d: f64, value: f64, method: &str, error_estimate: f64) -> Self {
        Self {
            order,
            d,
            value,
            method: method.into(),
            error_estimate,
            diagnostics: BTreeMap::new(),
            seed: None,
            n_samples: None,
        }
    }

    pub fn from_report(r: &CumulantReport) -> Self {
        let mut row = Self::new(r.order, r.d, r.value, r.method.as_str(), r.error_estimate);
        row.diagnostics = r.diagnostics.clone();
        row
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    order: u32,
    d: String,
    value: String,
    method: &'a str,
    error_estimate: String,
    seed: Option<u64>,
    n_samples: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub(crate) struct PhiRow {
    pub d: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub divergent: bool,
}

/// `v` rounded to 12 significant digits, shortest round-trip form.
pub(crate) fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded:?}")
}

fn sink(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    match &cfg.out {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Compute(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(format!("write failed: {e}"))
}

fn write_csv<T: Serialize>(
    rows: impl IntoIterator<Item = T>,
    header: &[&str],
    cfg: &RunConfig,
) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink(cfg)?);
    // written explicitly so an empty table still carries the header
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn write_json<T: Serialize>(value: &T, cfg: &RunConfig) -> CliResult<()> {
    let mut w = sink(cfg)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io_err)?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub(crate) fn write_rows(rows: &[Row], cfg: &RunConfig) -> CliResult<()> {
    match cfg.format {
        Format::Json => write_json(&rows, cfg),
        Format::Csv => write_csv(
            rows.iter().map(|r| CsvRow {
                order: r.order,
                d: sig12(r.d),
                value: sig12(r.value),
                method: &r.method,
                error_estimate: sig12(r.error_estimate),
                seed: r.seed,
                n_samples: r.n_samples,
            }),
            &[
                "order",
                "d",
                "value",
                "method",
                "error_estimate",
                "seed",
                "n_samples",
            ],
            cfg,
        ),
    }
}

pub(crate) fn write_phi(rows: &[PhiRow], cfg: &RunConfig) -> CliResult<()> {
    match cfg.format {
        Format::Json => write_json(&rows, cfg),
        Format::Csv => write_csv(
            rows.iter().map(|r| {
                (
                    sig12(r.d),
                    sig12(r.theta),
                    sig12(r.re),
                    sig12(r.im),
                    r.divergent,
                )
            }),
            &["d", "theta", "re", "im", "divergent"],
            cfg,
        ),
    }
}

pub(crate) fn write_checks(checks: &[Check], cfg: &RunConfig) -> CliResult<()> {
    if cfg.format == Format::Json {
        return write_json(&checks, cfg);
    }
    let mut w = sink(cfg)?;
    for c in checks {
        writeln!(
            w,
            "{} {:<24} {:<28} deviation={:.3e} tolerance={:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.case,
            c.deviation,
            c.tolerance
        )
        .map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(w, "{} checks, {failed} failed", checks.len()).map_err(io_err)?;
    w.flush().map_err(io_err)
}
