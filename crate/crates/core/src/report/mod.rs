//! Run configuration, evaluation reports and the files written for them.

mod compare;
mod compute;
mod config;
mod files;

use std::fs;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub use compare::{
    run_compare, run_recalibrate, ComparisonReport, MeasureDelta, COMPARISON_FILE,
    RECALIBRATED_FILE,
};
pub use config::{BootstrapOptions, RunConfig, DEFAULT_SEED};
pub use files::CurveFile;

use crate::calibration::CurveChoice;
use crate::curves::{
    cost_curve_point, risk_distribution, CostCurvePoint, DistributionSettings, QUANTILE_LEVELS,
};
use crate::data::{ingest_csv, ClampPolicy, CostSpec, PredictionSample, Threshold};
use crate::error::{Error, Result};
use crate::measures::{Domain, Focus, MeasureId, Properness};
use crate::metrics::{confusion_at_threshold, expected_cost, min_expected_cost};
use crate::resampling::{bootstrap_replicates, percentile_interval, Interval};
use compute::{compute, MeasureContext, Request};

pub const REPORT_FILE: &str = "report.json";
pub const CONFIG_FILE: &str = "run_config.json";

const UTILITY_CI_NOTE: &str =
    "interval shows sampling variability only; the decision rests on the point estimate";

/// Writes finite values as numbers and infinities as the strings "inf" / "-inf".
pub(crate) fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn ser_opt_f64<S: Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_f64(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    pub level: f64,
    pub replicates: usize,
    pub dropped: usize,
    pub seed: u64,
}

impl From<Interval> for ConfidenceInterval {
    fn from(i: Interval) -> Self {
        Self {
            lower: i.lower,
            upper: i.upper,
            level: i.level,
            replicates: i.replicates,
            dropped: i.dropped,
            seed: i.seed,
        }
    }
}

/// One reported value with its catalog tags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEntry {
    #[serde(skip)]
    pub key: String,
    pub measure: MeasureId,
    pub label: &'static str,
    #[serde(skip)]
    pub domain: Domain,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<ConfidenceInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_error: Option<String>,
    pub properness: Properness,
    pub properness_code: &'static str,
    pub focus: Focus,
    pub guidance: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advisory: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Threshold attaining the minimum expected cost.
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_f64"
    )]
    pub t_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub costs: Option<CostSpec>,
    /// Expected cost of classifying at the primary threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_primary_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Entries grouped by domain; serialized as `{domain: {key: entry}}` in
/// catalog order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureTable(pub Vec<MeasureEntry>);

impl Serialize for MeasureTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Domainwise<'a>(Vec<&'a MeasureEntry>);
        impl Serialize for Domainwise<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for e in &self.0 {
                    m.serialize_entry(&e.key, e)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(None)?;
        for d in Domain::ALL {
            let entries: Vec<&MeasureEntry> = self.0.iter().filter(|e| e.domain == d).collect();
            if !entries.is_empty() {
                m.serialize_entry(d.as_str(), &Domainwise(entries))?;
            }
        }
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub events: usize,
    pub nonevents: usize,
    pub prevalence: f64,
}

impl SampleSummary {
    pub fn of(sample: &PredictionSample) -> Self {
        Self {
            n: sample.len(),
            events: sample.n_events(),
            nonevents: sample.n_nonevents(),
            prevalence: sample.prevalence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRiskSummary {
    pub n: usize,
    #[serde(serialize_with = "ser_opt_f64")]
    pub mean: Option<f64>,
    /// `(level, quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    pub histogram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskSummary {
    pub events: ClassRiskSummary,
    pub nonevents: ClassRiskSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupSummary {
    /// Curve file per subgroup label.
    pub curves: std::collections::BTreeMap<String, String>,
    /// Subgroups without a curve, with the reason.
    pub flagged: std::collections::BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub sample: SampleSummary,
    pub thresholds: Vec<f64>,
    pub costs: Option<CostSpec>,
    pub measures: MeasureTable,
    /// Position of the model on the cost curve for the configured costs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_curve_point: Option<CostCurvePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub risk_distribution: Option<RiskSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<SubgroupSummary>,
    pub curves: Vec<CurveFile>,
    pub advisories: Vec<String>,
    pub warnings: Vec<String>,
    /// Parts of the core set (AUROC, net benefit, smoothed calibration
    /// curve, decision curve, risk distribution) that could not be produced.
    pub core_failures: Vec<String>,
    pub config: RunConfig,
}

impl EvaluationReport {
    pub fn entry(&self, key: &str) -> Option<&MeasureEntry> {
        self.measures.0.iter().find(|e| e.key == key)
    }

    /// The value reported under `key`, if it was computed.
    pub fn value(&self, key: &str) -> Option<f64> {
        self.entry(key)?.value
    }

    /// Entries that could not be computed.
    pub fn failures(&self) -> impl Iterator<Item = &MeasureEntry> {
        self.measures.0.iter().filter(|e| e.error.is_some())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Loads the input named by `config`, keeping subgroup labels when asked.
pub fn load_sample(config: &RunConfig) -> Result<PredictionSample> {
    let mut schema = config.schema.clone();
    if !config.subgroups {
        schema.group = None;
    }
    ingest_csv(&config.input, &schema)
}

fn requests(config: &RunConfig) -> Vec<Request> {
    let selected: Vec<MeasureId> = match &config.measures {
        Some(list) => MeasureId::ALL
            .iter()
            .copied()
            .filter(|m| list.contains(m) || MeasureId::CORE.contains(m))
            .collect(),
        None => MeasureId::ALL.to_vec(),
    };
    let mut out = Vec::new();
    for m in selected {
        if m.needs_threshold() && !config.thresholds.is_empty() {
            out.extend(config.thresholds.iter().map(|&t| Request {
                measure: m,
                threshold: Some(t),
            }));
        } else {
            out.push(Request {
                measure: m,
                threshold: None,
            });
        }
    }
    out
}

fn context(config: &RunConfig, clamp: ClampPolicy) -> MeasureContext {
    MeasureContext {
        clamp,
        band: config.partial_auc,
        calibration: config.calibration,
        costs: config.effective_costs(),
    }
}

fn summarize_risk(sample: &PredictionSample) -> Result<RiskSummary> {
    let r = risk_distribution(sample, &DistributionSettings::default())?;
    let class = |c: &crate::curves::ClassDistribution| ClassRiskSummary {
        n: c.n,
        mean: c.mean,
        quantiles: c.quantiles.clone(),
        histogram: c.histogram.clone(),
    };
    debug_assert!(
        r.events.quantiles.is_empty() || r.events.quantiles.len() == QUANTILE_LEVELS.len()
    );
    Ok(RiskSummary {
        events: class(&r.events),
        nonevents: class(&r.nonevents),
    })
}

/// Evaluates `sample` under `config`. Curve files go to `out` when given.
/// Failing measures are kept in the report with their reason; only invalid
/// configuration and file errors abort.
pub fn evaluate_sample(
    config: &RunConfig,
    sample: &PredictionSample,
    out: Option<&Path>,
) -> Result<EvaluationReport> {
    config.validate()?;
    let clamp = config.clamp_policy()?;
    let ctx = context(config, clamp);
    let requests = requests(config);
    let values = compute(sample, &ctx, &requests);

    let boot = config.bootstrap_spec();
    let replicates = boot.map(|spec| {
        bootstrap_replicates(sample, &spec, |s| {
            compute(s, &ctx, &requests)
                .into_iter()
                .map(|v| v.ok())
                .collect::<Vec<_>>()
        })
    });

    let primary = config.primary_threshold();
    let mut warnings = Vec::new();
    let mut core_failures = Vec::new();
    let mut entries = Vec::with_capacity(requests.len());
    for (k, (r, v)) in requests.iter().zip(values).enumerate() {
        let m = r.measure;
        let key = r.key(primary);
        let mut entry = MeasureEntry {
            key: key.clone(),
            measure: m,
            label: m.label(),
            domain: m.domain(),
            threshold: r.threshold,
            value: None,
            ci: None,
            ci_error: None,
            properness: m.properness(),
            properness_code: m.properness().symbol(),
            focus: m.focus(),
            guidance: m.guidance().label(),
            advisory: m.advisory(),
            note: None,
            t_star: None,
            costs: None,
            at_primary_threshold: None,
            error: None,
        };
        match v {
            Ok(x) => {
                entry.value = Some(x);
                if let (Some(reps), Some(spec)) = (&replicates, &boot) {
                    let column: Vec<Option<f64>> = reps.iter().map(|row| row[k]).collect();
                    match percentile_interval(&key, &column, spec) {
                        Ok(i) => entry.ci = Some(i.into()),
                        Err(e) => {
                            warnings.push(format!("{key}: {e}"));
                            entry.ci_error = Some(e.to_string());
                        }
                    }
                    if m.domain() == Domain::ClinicalUtility {
                        entry.note = Some(UTILITY_CI_NOTE.into());
                    }
                }
            }
            Err(reason) => {
                warnings.push(format!("{key}: {reason}"));
                if MeasureId::CORE.contains(&m) {
                    core_failures.push(format!("{key}: {reason}"));
                }
                entry.error = Some(reason);
            }
        }
        if m == MeasureId::ExpectedCost {
            if let Some(costs) = ctx.costs {
                entry.costs = Some(costs);
                if entry.value.is_some() {
                    entry.t_star = Some(min_expected_cost(sample, &costs).t_star());
                }
                if let Some(t) = primary {
                    let counts = confusion_at_threshold(sample, Threshold::new(t)?);
                    entry.at_primary_threshold = Some(expected_cost(&counts, &costs));
                }
            }
        }
        entries.push(entry);
    }

    let mut advisories: Vec<String> = Vec::new();
    for e in &entries {
        if let Some(a) = &e.advisory {
            if !advisories.contains(a) {
                advisories.push(a.clone());
            }
        }
    }
    if sample.has_boundary_probabilities() && clamp == ClampPolicy::Reject {
        warnings.push(
            "probabilities of exactly 0 or 1 present; logarithm-based measures need a clamping epsilon".into(),
        );
    }

    let cost_curve_point = match ctx.costs {
        Some(c) if sample.has_both_classes() => cost_curve_point(sample, &c).ok(),
        _ => None,
    };
    let risk = match summarize_risk(sample) {
        Ok(r) => Some(r),
        Err(e) => {
            core_failures.push(format!("risk distribution: {e}"));
            None
        }
    };

    let mut curves = Vec::new();
    let mut subgroups = None;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let written = files::write_curves(dir, sample, config, boot.as_ref())?;
        curves = written.files;
        warnings.extend(written.warnings);
        core_failures.extend(written.core_failures);
        if config.subgroups {
            let choice = CurveChoice::Smoothed(config.calibration.smoother);
            subgroups = Some(files::write_subgroups(dir, sample, &choice)?);
        }
    }

    Ok(EvaluationReport {
        sample: SampleSummary::of(sample),
        thresholds: config.thresholds.clone(),
        costs: ctx.costs,
        measures: MeasureTable(entries),
        cost_curve_point,
        risk_distribution: risk,
        subgroups,
        curves,
        advisories,
        warnings,
        core_failures,
        config: config.clone(),
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads the input, evaluates it and writes `report.json`, the run config
/// and every curve file into the output directory.
pub fn run_evaluate(config: &RunConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let sample = load_sample(config)?;
    let report = evaluate_sample(config, &sample, Some(&config.out_dir))?;
    write_text(&config.out_dir.join(CONFIG_FILE), &config.to_json())?;
    write_text(&config.out_dir.join(REPORT_FILE), &report.to_json())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CsvSchema;
    use crate::measures::Guidance;

    fn d4() -> PredictionSample {
        PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false]).unwrap()
    }

    fn config() -> RunConfig {
        let mut c = RunConfig::new("d4.csv", CsvSchema::new("p", "y"), "out");
        c.thresholds = vec![0.3];
        c.costs = Some(CostSpec::new(9.0, 1.0).unwrap());
        c.calibration.groups = 2;
        c
    }

    #[test]
    fn d4_report_values_and_failures() {
        let r = evaluate_sample(&config(), &d4(), None).unwrap();
        assert_eq!(r.value("auroc"), Some(1.0));
        assert!((r.value("brier").unwrap() - 0.10).abs() < 1e-12);
        assert!((r.value("ece").unwrap() - 0.30).abs() < 1e-12);
        let ec = r.entry("expected_cost").unwrap();
        assert_eq!(ec.value, Some(0.0));
        assert_eq!(ec.t_star, Some(0.6));
        assert!((ec.at_primary_threshold.unwrap() - 0.25).abs() < 1e-12);
        assert!((r.value("net_benefit").unwrap() - 0.39285714285714285).abs() < 1e-12);
        // separated and too small for the smoother
        assert!(r.entry("calibration_slope").unwrap().error.is_some());
        assert!(r.entry("ici").unwrap().error.is_some());
        assert!(r.core_failures.is_empty());
        assert_eq!(r.measures.0.len(), 32);
    }

    #[test]
    fn every_entry_is_tagged_and_improper_ones_advised() {
        let r = evaluate_sample(&config(), &d4(), None).unwrap();
        for e in &r.measures.0 {
            assert_eq!(e.properness_code, e.measure.properness().symbol());
            assert_eq!(
                e.advisory.is_some(),
                e.measure.guidance() == Guidance::Inadvisable
            );
        }
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let f1 = &json["measures"]["classification"]["f1"];
        assert_eq!(f1["properness"], "improper");
        assert!(f1["advisory"].as_str().unwrap().contains("Inadvisable"));
    }

    #[test]
    fn without_threshold_utility_is_reported_missing() {
        let mut c = config();
        c.thresholds.clear();
        c.costs = None;
        let r = evaluate_sample(&c, &d4(), None).unwrap();
        assert!(r
            .entry("net_benefit")
            .unwrap()
            .error
            .as_deref()
            .unwrap()
            .contains("never selected"));
        assert_eq!(r.core_failures.len(), 1);
    }

    #[test]
    fn extra_thresholds_get_suffixed_keys() {
        let mut c = config();
        c.thresholds = vec![0.3, 0.5];
        c.measures = Some(vec![MeasureId::Accuracy]);
        let r = evaluate_sample(&c, &d4(), None).unwrap();
        let keys: Vec<&str> = r.measures.0.iter().map(|e| e.key.as_str()).collect();
        assert_eq!(
            keys,
            [
                "auroc",
                "accuracy",
                "accuracy@0.5",
                "net_benefit",
                "net_benefit@0.5"
            ]
        );
    }

    #[test]
    fn infinite_values_serialize_as_strings() {
        let s = PredictionSample::new(vec![0.1, 0.2, 0.7, 0.9], vec![false, false, true, true])
            .unwrap();
        let mut c = config();
        c.thresholds = vec![0.5];
        c.measures = Some(vec![MeasureId::DiagnosticOddsRatio]);
        let r = evaluate_sample(&c, &s, None).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["measures"]["classification"]["dor"]["value"], "inf");
    }
}
