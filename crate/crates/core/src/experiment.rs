//! Multi-setup runs and their CSV outputs.
//!
//! `results.csv` holds one row per (setup, scheme, precoder, UE) with columns
//! `setup,scheme,precoder,ue,se_bits_per_hz,status`. `summary.csv` holds one
//! row per (scheme, precoder) with columns `scheme,precoder,avg_se,se90,count`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::precoding::Precoder;
use crate::se::summarize;
use crate::simulate::{evaluate, Setup};
use crate::{Error, Scheme, SimulationConfig};

pub const RESULTS_HEADER: [&str; 6] = [
    "setup",
    "scheme",
    "precoder",
    "ue",
    "se_bits_per_hz",
    "status",
];
pub const SUMMARY_HEADER: [&str; 5] = ["scheme", "precoder", "avg_se", "se90", "count"];

/// Everything that determines a run's output bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SimulationConfig,
    pub schemes: Vec<Scheme>,
    pub precoders: Vec<Precoder>,
    pub out_dir: PathBuf,
}

impl RunManifest {
    /// Per-setup stream seeds, in setup order.
    pub fn setup_seeds(&self) -> Vec<u64> {
        (0..self.config.n_setups as u64)
            .map(|s| crate::rng::derive_seed(self.config.seed, &[s]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub setup: usize,
    pub scheme: String,
    pub precoder: String,
    pub ue: usize,
    /// `None` when evaluation failed; `status` then names the failure.
    pub se: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: String,
    pub precoder: String,
    pub avg_se: f64,
    pub se90: f64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub results_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Runs one setup: statistics once, every scheme on the same coefficients,
/// SE for every precoder on shared channel blocks.
pub fn run_setup(
    config: &SimulationConfig,
    schemes: &[Scheme],
    precoders: &[Precoder],
    index: usize,
) -> Result<Vec<ResultRow>, Error> {
    let setup = Setup::generate(config, index)?;
    let states = schemes
        .iter()
        .map(|&s| setup.access(s, config))
        .collect::<Result<Vec<_>, _>>()?;
    let table = evaluate(&setup, config, &states, precoders)?;
    let mut rows = Vec::with_capacity(schemes.len() * precoders.len() * config.k);
    for (scheme, per_scheme) in schemes.iter().zip(&table) {
        for (precoder, per_ue) in precoders.iter().zip(per_scheme) {
            for (ue, outcome) in per_ue.iter().enumerate() {
                let (se, status) = match outcome {
                    Ok(v) => (Some(*v), "ok".to_string()),
                    Err(e) => (None, e.label().to_string()),
                };
                rows.push(ResultRow {
                    setup: index,
                    scheme: scheme.label().to_string(),
                    precoder: precoder.label().to_string(),
                    ue,
                    se,
                    status,
                });
            }
        }
    }
    Ok(rows)
}

/// Runs every setup in canonical order, without touching the filesystem.
pub fn run_rows(
    config: &SimulationConfig,
    schemes: &[Scheme],
    precoders: &[Precoder],
) -> Result<Vec<ResultRow>, Error> {
    config.validate()?;
    let per_setup = (0..config.n_setups)
        .into_par_iter()
        .map(|s| run_setup(config, schemes, precoders, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_setup.into_iter().flatten().collect())
}

/// Runs the manifest and writes `results.csv`, `summary.csv` and a config
/// snapshot `config.txt` into its output directory.
pub fn run_experiment(manifest: &RunManifest) -> Result<RunOutput, Error> {
    let rows = run_rows(&manifest.config, &manifest.schemes, &manifest.precoders)?;
    std::fs::create_dir_all(&manifest.out_dir)?;
    std::fs::write(
        manifest.out_dir.join("config.txt"),
        manifest.config.to_string(),
    )?;
    let results_path = manifest.out_dir.join("results.csv");
    let summary_path = manifest.out_dir.join("summary.csv");
    write_results(&results_path, &rows)?;
    let summary = summarize_csv(&results_path, &summary_path)?;
    Ok(RunOutput {
        rows,
        summary,
        results_path,
        summary_path,
    })
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

pub fn write_results(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.setup.to_string(),
            r.scheme.clone(),
            r.precoder.clone(),
            r.ue.to_string(),
            fmt_f64(r.se.unwrap_or(f64::NAN)),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>, Error> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(Error::Malformed(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let parse_usize = |i: usize| {
            field(i)
                .parse::<usize>()
                .map_err(|_| Error::Malformed(format!("bad {} `{}`", RESULTS_HEADER[i], field(i))))
        };
        let se = field(4)
            .parse::<f64>()
            .map_err(|_| Error::Malformed(format!("bad se_bits_per_hz `{}`", field(4))))?;
        rows.push(ResultRow {
            setup: parse_usize(0)?,
            scheme: field(1).to_string(),
            precoder: field(2).to_string(),
            ue: parse_usize(3)?,
            se: (!se.is_nan()).then_some(se),
            status: field(5).to_string(),
        });
    }
    Ok(rows)
}

/// Groups rows by (scheme, precoder) in order of first appearance and
/// summarizes the successful ones. Groups with fewer than ten usable
/// samples yield a warning row with `NaN` statistics.
pub fn summarize_rows(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<((String, String), Vec<f64>)> = Vec::new();
    for r in rows {
        let key = (r.scheme.clone(), r.precoder.clone());
        let idx = match groups.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                groups.push((key, Vec::new()));
                groups.len() - 1
            }
        };
        if let (Some(se), "ok") = (r.se, r.status.as_str()) {
            if se.is_finite() {
                groups[idx].1.push(se);
            }
        }
    }
    groups
        .into_iter()
        .map(|((scheme, precoder), samples)| match summarize(&samples) {
            Ok(s) => SummaryRow {
                scheme,
                precoder,
                avg_se: s.average,
                se90: s.se90,
                count: s.count,
            },
            Err(_) => SummaryRow {
                scheme,
                precoder,
                avg_se: f64::NAN,
                se90: f64::NAN,
                count: samples.len(),
            },
        })
        .collect()
}

pub fn write_summary(path: impl AsRef<Path>, summary: &[SummaryRow]) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for s in summary {
        w.write_record([
            s.scheme.clone(),
            s.precoder.clone(),
            fmt_f64(s.avg_se),
            fmt_f64(s.se90),
            s.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `results.csv`, writes `summary.csv`, returns the summary rows.
pub fn summarize_csv(
    results: impl AsRef<Path>,
    summary: impl AsRef<Path>,
) -> Result<Vec<SummaryRow>, Error> {
    let rows = read_results(results)?;
    let out = summarize_rows(&rows);
    write_summary(summary, &out)?;
    Ok(out)
}
