use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationSettings;
use crate::curves::DecisionCurveSpec;
use crate::data::{ClampPolicy, CostSpec, CsvSchema, PartialAucBand, Threshold};
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::resampling::BootstrapSpec;

pub const DEFAULT_SEED: u64 = 20240101;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Bootstrap settings of a run; the seed comes from [`RunConfig::seed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub level: f64,
    #[serde(default)]
    pub stratified: bool,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        let spec = BootstrapSpec::default();
        Self {
            replicates: spec.replicates,
            level: spec.level,
            stratified: spec.stratified,
        }
    }
}

/// Everything needed to repeat an evaluation. A persisted config re-executes
/// to byte-identical outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub schema: CsvSchema,
    /// Decision thresholds; the first one is primary. They are never chosen
    /// by the tool.
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub decision_curve: DecisionCurveSpec,
    /// Costs for expected cost; without them the costs implied by the
    /// primary threshold are used.
    #[serde(default)]
    pub costs: Option<CostSpec>,
    /// No intervals are computed when absent.
    #[serde(default)]
    pub bootstrap: Option<BootstrapOptions>,
    #[serde(default)]
    pub calibration: CalibrationSettings,
    #[serde(default)]
    pub partial_auc: PartialAucBand,
    /// Clamp probabilities of exactly 0 or 1 into `[eps, 1 - eps]` for
    /// logarithm-based measures.
    #[serde(default)]
    pub clamp_epsilon: Option<f64>,
    /// Measures to report next to the core set; all measures when absent.
    #[serde(default)]
    pub measures: Option<Vec<MeasureId>>,
    #[serde(default)]
    pub recalibrate: bool,
    #[serde(default)]
    pub subgroups: bool,
    pub out_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, schema: CsvSchema, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            schema,
            thresholds: Vec::new(),
            decision_curve: DecisionCurveSpec::default(),
            costs: None,
            bootstrap: None,
            calibration: CalibrationSettings::default(),
            partial_auc: PartialAucBand::default(),
            clamp_epsilon: None,
            measures: None,
            recalibrate: false,
            subgroups: false,
            out_dir: out_dir.into(),
            seed: DEFAULT_SEED,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn clamp_policy(&self) -> Result<ClampPolicy> {
        ClampPolicy::from_epsilon(self.clamp_epsilon)
    }

    pub fn primary_threshold(&self) -> Option<f64> {
        self.thresholds.first().copied()
    }

    /// Explicit costs, else the costs implied by the primary threshold.
    pub fn effective_costs(&self) -> Option<CostSpec> {
        self.costs.or_else(|| {
            Threshold::new(self.primary_threshold()?)
                .ok()
                .map(CostSpec::from_threshold)
        })
    }

    pub fn bootstrap_spec(&self) -> Option<BootstrapSpec> {
        self.bootstrap.map(|b| BootstrapSpec {
            replicates: b.replicates,
            level: b.level,
            master_seed: self.seed,
            stratified: b.stratified,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = Vec::new();
        for &t in &self.thresholds {
            Threshold::new(t)?;
            if seen.contains(&t) {
                return Err(Error::InvalidArgument(format!("threshold {t} given twice")));
            }
            seen.push(t);
        }
        self.decision_curve.validate()?;
        if let Some(c) = &self.costs {
            c.validate()?;
        }
        if let Some(b) = self.bootstrap_spec() {
            b.validate()?;
        }
        if self.calibration.groups == 0 {
            return Err(Error::InvalidArgument(
                "need at least one calibration group".into(),
            ));
        }
        self.calibration.smoother.validate()?;
        self.partial_auc.validate()?;
        self.clamp_policy()?;
        if self.subgroups && self.schema.group.is_none() {
            return Err(Error::InvalidArgument(
                "subgroup analysis needs a group column in the schema".into(),
            ));
        }
        if let Some(list) = &self.measures {
            if let Some(m) = list.iter().find(|m| m.needs_threshold()) {
                if self.thresholds.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "{m} needs a decision threshold; thresholds are never selected automatically"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut c = RunConfig::new("in.csv", CsvSchema::new("p", "y").with_group("site"), "out");
        c.thresholds = vec![0.1, 0.2];
        c.bootstrap = Some(BootstrapOptions::default());
        c.measures = Some(vec![MeasureId::Brier, MeasureId::F1]);
        c.subgroups = true;
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        back.validate().unwrap();
    }

    #[test]
    fn minimal_json_fills_defaults() {
        let c = RunConfig::from_json(
            r#"{"input": "a.csv", "schema": {"probability": "p", "outcome": "y"}, "out_dir": "o"}"#,
        )
        .unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.decision_curve, DecisionCurveSpec::default());
        c.validate().unwrap();
        assert!(RunConfig::from_json(r#"{"input": "a.csv"}"#).is_err());
    }

    #[test]
    fn threshold_measures_need_a_threshold() {
        let mut c = RunConfig::new("a.csv", CsvSchema::new("p", "y"), "o");
        c.measures = Some(vec![MeasureId::Accuracy]);
        assert!(c.validate().unwrap_err().is_validation());
        c.thresholds = vec![0.1];
        c.validate().unwrap();
        let costs = c.effective_costs().unwrap();
        assert!((costs.cost_fn - 9.0).abs() < 1e-12);
    }
}
