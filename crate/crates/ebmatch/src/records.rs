//! Per-trial records and fitted summaries, with their CSV and JSON-lines forms.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One solved instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub problem: String,
    pub d: usize,
    pub p: f64,
    pub n: usize,
    pub trial: u64,
    /// Master seed; the trial's stream is determined by `(seed, trial)` and
    /// the experiment's own stream layout.
    pub seed: u64,
    pub cost: f64,
    /// `n^(p/d - 1) * cost`.
    pub normalized_cost: f64,
    /// Zero unless timing was requested, so that reruns compare equal.
    pub runtime_ms: u64,
    pub method: String,
}

/// `n^(p/d - 1) * cost`.
pub fn normalize(cost: f64, n: usize, d: usize, p: f64) -> f64 {
    (n as f64).powf(p / d as f64 - 1.0) * cost
}

pub const TRIAL_HEADER: &str = "problem,d,p,n,trial,seed,cost,normalized_cost,runtime_ms,method";

pub fn write_trials<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRIAL_HEADER.split(',')).map_err(Error::from)?;
    for r in records {
        w.serialize(r).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(Error::from)?.iter().map(str::to_string).collect();
    if header.join(",") != TRIAL_HEADER {
        return Err(Error::Format(format!("unexpected trial header `{}`", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// One rung of a fitted scaling ladder. `slope`, `slope_se` and `beta_hat`
/// describe the whole ladder and repeat on every rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFitLine {
    pub n: usize,
    pub mean: f64,
    pub se: f64,
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub beta_hat: f64,
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write, T: Serialize>(mut out: W, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_json_lines<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    serde_json::Deserializer::from_reader(input).into_iter().map(|v| v.map_err(Error::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let recs = vec![
            TrialRecord {
                problem: "kmst:2".into(),
                d: 3,
                p: 1.5,
                n: 100,
                trial: 7,
                seed: u64::MAX,
                cost: 0.1 + 0.2,
                normalized_cost: normalize(0.1 + 0.2, 100, 3, 1.5),
                runtime_ms: 0,
                method: "heuristic:tour-factor".into(),
            },
            TrialRecord {
                problem: "matching".into(),
                d: 2,
                p: 1.0,
                n: 1,
                trial: 0,
                seed: 0,
                cost: 1e-300,
                normalized_cost: 1e-300,
                runtime_ms: 12,
                method: "exact".into(),
            },
        ];
        let mut buf = Vec::new();
        write_trials(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("{TRIAL_HEADER}\n")));
        assert_eq!(read_trials(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn fit_lines_round_trip() {
        let lines = vec![ScalingFitLine { n: 4, mean: 1.25, se: 0.5, slope: None, slope_se: None, beta_hat: 2.0 }];
        let mut buf = Vec::new();
        write_json_lines(&mut buf, &lines).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "{\"n\":4,\"mean\":1.25,\"se\":0.5,\"slope\":null,\"slope_se\":null,\"beta_hat\":2.0}\n");
        assert_eq!(read_json_lines::<_, ScalingFitLine>(buf.as_slice()).unwrap(), lines);
    }
}
