use std::fs;

use serde::Serialize;

use crate::calibration::{recalibrate, RecalibrationMap};
use crate::data::{write_csv, PredictionSample};
use crate::error::{Error, Result};
use crate::measures::{MeasureId, Properness};
use crate::report::{
    evaluate_sample, load_sample, ser_opt_f64, write_text, EvaluationReport, RunConfig, CONFIG_FILE,
};

pub const COMPARISON_FILE: &str = "comparison.json";
pub const RECALIBRATED_FILE: &str = "recalibrated.csv";

/// Change of one measure from the first to the second evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDelta {
    pub key: String,
    pub measure: MeasureId,
    pub properness: Properness,
    #[serde(serialize_with = "ser_opt_f64")]
    pub first: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub second: Option<f64>,
    /// `second - first`.
    #[serde(serialize_with = "ser_opt_f64")]
    pub delta: Option<f64>,
    /// Whether the second value is strictly better; `None` when either side
    /// is missing.
    pub improved: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub labels: [String; 2],
    pub deltas: Vec<MeasureDelta>,
    /// Strictly proper measures that got strictly better.
    pub strictly_proper_improved: Vec<String>,
    /// Strictly proper measures that did not get better or are missing.
    pub strictly_proper_not_improved: Vec<String>,
    pub all_strictly_proper_improved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recalibration: Option<RecalibrationMap>,
    pub first: EvaluationReport,
    pub second: EvaluationReport,
}

impl ComparisonReport {
    pub fn delta(&self, key: &str) -> Option<&MeasureDelta> {
        self.deltas.iter().find(|d| d.key == key)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes") + "\n"
    }
}

fn check_paired(a: &PredictionSample, b: &PredictionSample) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::MismatchedSamples(format!(
            "{} records against {}",
            a.len(),
            b.len()
        )));
    }
    if let Some(i) = a.events().iter().zip(b.events()).position(|(x, y)| x != y) {
        return Err(Error::MismatchedSamples(format!(
            "outcome of record {} differs",
            i + 1
        )));
    }
    if a.ids() != b.ids() {
        return Err(Error::MismatchedSamples("record identifiers differ".into()));
    }
    Ok(())
}

fn deltas(first: &EvaluationReport, second: &EvaluationReport) -> Vec<MeasureDelta> {
    first
        .measures
        .0
        .iter()
        .map(|e| {
            let a = e.value;
            let b = second.value(&e.key);
            let delta = a.zip(b).map(|(x, y)| y - x).filter(|d| !d.is_nan());
            MeasureDelta {
                key: e.key.clone(),
                measure: e.measure,
                properness: e.properness,
                first: a,
                second: b,
                delta,
                improved: a.zip(b).map(|(x, y)| e.measure.direction().improves(x, y)),
            }
        })
        .collect()
}

/// Evaluates two sets of probabilities for the same individuals and
/// outcomes. Each evaluation writes its curves to a subdirectory named after
/// its label; the comparison goes to `comparison.json`.
pub fn run_compare(
    config: &RunConfig,
    first: &PredictionSample,
    second: &PredictionSample,
    labels: [&str; 2],
) -> Result<ComparisonReport> {
    config.validate()?;
    check_paired(first, second)?;
    if labels[0] == labels[1] {
        return Err(Error::InvalidArgument(
            "comparison labels must differ".into(),
        ));
    }
    let out = &config.out_dir;
    let a = evaluate_sample(config, first, Some(&out.join(labels[0])))?;
    let b = evaluate_sample(config, second, Some(&out.join(labels[1])))?;
    let deltas = deltas(&a, &b);
    let (improved, not_improved): (Vec<&MeasureDelta>, Vec<&MeasureDelta>) = deltas
        .iter()
        .filter(|d| d.properness == Properness::StrictlyProper)
        .partition(|d| d.improved == Some(true));
    let report = ComparisonReport {
        labels: [labels[0].to_string(), labels[1].to_string()],
        strictly_proper_improved: improved.iter().map(|d| d.key.clone()).collect(),
        all_strictly_proper_improved: not_improved.is_empty() && !improved.is_empty(),
        strictly_proper_not_improved: not_improved.iter().map(|d| d.key.clone()).collect(),
        deltas,
        recalibration: None,
        first: a,
        second: b,
    };
    fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;
    write_text(&out.join(CONFIG_FILE), &config.to_json())?;
    write_text(&out.join(COMPARISON_FILE), &report.to_json())?;
    Ok(report)
}

/// Logistic recalibration of the input followed by a before/after
/// comparison. The recalibrated probabilities are written to
/// `recalibrated.csv`.
pub fn run_recalibrate(config: &RunConfig) -> Result<ComparisonReport> {
    config.validate()?;
    let sample = load_sample(config)?;
    let clamp = config.clamp_policy()?;
    let fit = recalibrate(&sample, clamp)?;
    let mut report = run_compare(config, &sample, &fit.recalibrated, ["before", "after"])?;
    report.recalibration = Some(fit.map);
    let mut buf = Vec::new();
    let mut schema = config.schema.clone();
    if !config.subgroups {
        schema.group = None;
    }
    write_csv(&fit.recalibrated, &mut buf, &schema)?;
    let out = &config.out_dir;
    write_text(
        &out.join(RECALIBRATED_FILE),
        &String::from_utf8(buf).expect("csv output is UTF-8"),
    )?;
    write_text(&out.join(COMPARISON_FILE), &report.to_json())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{CostSpec, CsvSchema};

    fn config(dir: &std::path::Path) -> RunConfig {
        let mut c = RunConfig::new("unused.csv", CsvSchema::new("p", "y"), dir);
        c.thresholds = vec![0.3];
        c.costs = Some(CostSpec::new(9.0, 1.0).unwrap());
        c
    }

    #[test]
    fn identical_inputs_have_zero_deltas() {
        let dir = tempfile::tempdir().unwrap();
        let s = PredictionSample::new(
            vec![0.2, 0.8, 0.6, 0.4, 0.3],
            vec![false, true, false, true, false],
        )
        .unwrap();
        let r = run_compare(&config(dir.path()), &s, &s, ["a", "b"]).unwrap();
        for d in &r.deltas {
            if let Some(x) = d.delta {
                assert_eq!(x, 0.0, "{}", d.key);
            }
            assert_ne!(d.improved, Some(true));
        }
        assert!(!r.all_strictly_proper_improved);
        assert!(dir.path().join(COMPARISON_FILE).exists());
        assert!(dir.path().join("a").join("roc.csv").exists());
    }

    #[test]
    fn mismatched_outcomes_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let a = PredictionSample::new(vec![0.2, 0.8], vec![false, true]).unwrap();
        let b = PredictionSample::new(vec![0.2, 0.8], vec![true, true]).unwrap();
        let c = PredictionSample::new(vec![0.2], vec![false]).unwrap();
        let cfg = config(dir.path());
        assert!(matches!(
            run_compare(&cfg, &a, &b, ["a", "b"]),
            Err(Error::MismatchedSamples(_))
        ));
        assert!(matches!(
            run_compare(&cfg, &a, &c, ["a", "b"]),
            Err(Error::MismatchedSamples(_))
        ));
    }
}
