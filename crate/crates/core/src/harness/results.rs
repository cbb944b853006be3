use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{Algorithm, TrialRecord};
use crate::error::{arg_err, Error, Result};
use crate::model::PotentialKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => arg_err(format!("unknown output format {other:?}")),
        }
    }
}

impl OutputFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// Mean error and time of one (algorithm, potential, sigma) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub potential: PotentialKind,
    pub sigma: f64,
    pub trials: usize,
    pub mean_error: f64,
    pub mean_time_s: f64,
    pub converged_fraction: f64,
}

/// Groups records by (algorithm, potential, sigma) in order of first appearance.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in records {
        let row = match rows
            .iter_mut()
            .find(|s| s.algorithm == r.algorithm && s.potential == r.potential && s.sigma.to_bits() == r.sigma.to_bits())
        {
            Some(row) => row,
            None => {
                rows.push(SummaryRow {
                    algorithm: r.algorithm.clone(),
                    potential: r.potential,
                    sigma: r.sigma,
                    trials: 0,
                    mean_error: 0.0,
                    mean_time_s: 0.0,
                    converged_fraction: 0.0,
                });
                rows.last_mut().expect("just pushed")
            }
        };
        row.trials += 1;
        row.mean_error += r.error;
        row.mean_time_s += r.time_s;
        row.converged_fraction += f64::from(u8::from(r.converged));
    }
    for row in &mut rows {
        let n = row.trials as f64;
        row.mean_error /= n;
        row.mean_time_s /= n;
        row.converged_fraction /= n;
    }
    rows
}

/// One point of a cluster-size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerMPoint {
    pub potential: PotentialKind,
    pub sigma: f64,
    pub m: usize,
    pub mean_error: f64,
}

/// Mean error against m for every `BP` / `B<m>-BP` group, sorted by
/// potential, sigma and m. Plain BP counts as m = 1.
pub fn per_m_curve(records: &[TrialRecord]) -> Vec<PerMPoint> {
    let mut points: Vec<PerMPoint> = summarize(records)
        .into_iter()
        .filter_map(|row| {
            let m = row.algorithm.parse::<Algorithm>().ok()?.cluster_size()?;
            Some(PerMPoint { potential: row.potential, sigma: row.sigma, m, mean_error: row.mean_error })
        })
        .collect();
    points.sort_by(|a, b| a.potential.cmp(&b.potential).then(a.sigma.total_cmp(&b.sigma)).then(a.m.cmp(&b.m)));
    points
}

pub fn write_per_m_csv(points: &[PerMPoint], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

const CSV_HEADER: [&str; 8] = ["algorithm", "potential", "sigma", "trial", "seed", "error", "time_s", "converged"];

/// Writes the CSV form of `records` (header always present, floats in
/// shortest round-trip form) to any writer.
pub fn write_csv<W: std::io::Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.algorithm.clone(),
            r.potential.label().to_string(),
            r.sigma.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.error.to_string(),
            r.time_s.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes records as CSV in the fixed column order, or as a JSON array with
/// the same field names.
pub fn emit_results(records: &[TrialRecord], format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(records, std::io::BufWriter::new(std::fs::File::create(path)?)),
        OutputFormat::Json => {
            std::fs::write(path, serde_json::to_string_pretty(records)?)?;
            Ok(())
        }
    }
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return arg_err(format!("unexpected CSV header {header:?}"));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Vec<TrialRecord>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(algorithm: &str, sigma: f64, trial: usize, error: f64) -> TrialRecord {
        TrialRecord {
            algorithm: algorithm.into(),
            potential: PotentialKind::Repulsive,
            sigma,
            trial,
            seed: 100 + trial as u64,
            error,
            time_s: 0.25,
            converged: trial.is_multiple_of(2),
        }
    }

    #[test]
    fn summary_means() {
        let one = vec![record("BP", 0.5, 0, 0.2)];
        let s = summarize(&one);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_error, 0.2);
        assert_eq!(s[0].trials, 1);

        let many: Vec<_> = (0..30).map(|t| record("B2-BP", 1.0, t, t as f64 / 100.0)).collect();
        let s = summarize(&many);
        let expect = (0..30).map(|t| t as f64 / 100.0).sum::<f64>() / 30.0;
        assert!((s[0].mean_error - expect).abs() < 1e-15);
        assert_eq!(s[0].converged_fraction, 0.5);
    }

    #[test]
    fn per_m_points() {
        let recs = vec![
            record("B3-BP", 0.5, 0, 0.1),
            record("BP", 0.5, 0, 0.3),
            record("RandB2-BP", 0.5, 0, 0.25),
            record("B2-BP", 0.5, 0, 0.2),
        ];
        let pts = per_m_curve(&recs);
        assert_eq!(pts.iter().map(|p| p.m).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn empty_csv_has_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        emit_results(&[], OutputFormat::Csv, &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "algorithm,potential,sigma,trial,seed,error,time_s,converged\n");
        assert!(read_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let recs: Vec<_> = (0..5).map(|t| record("B2-BP", 0.5, t, 0.1 + t as f64 * 1e-3)).collect();
        let c = dir.path().join("r.csv");
        let j = dir.path().join("r.json");
        emit_results(&recs, OutputFormat::Csv, &c).unwrap();
        emit_results(&recs, OutputFormat::Json, &j).unwrap();
        assert_eq!(read_csv(&c).unwrap(), recs);
        assert_eq!(read_json(&j).unwrap(), recs);
    }
}
