//! Core domain types, validation and CSV ingestion.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::util::logit;

/// Default epsilon used when clamping is switched on.
pub const DEFAULT_CLAMP_EPSILON: f64 = 1e-9;

/// One individual: an estimated event probability and the observed outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: Option<String>,
    pub probability: f64,
    pub event: bool,
    pub group: Option<String>,
}

/// How probabilities of exactly 0 or 1 are treated by logit-based measures.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampPolicy {
    /// Logit-based measures are undefined when any probability is 0 or 1.
    #[default]
    Reject,
    /// Probabilities are clamped into `[eps, 1 - eps]` before taking logs.
    Clamp(f64),
}

impl ClampPolicy {
    pub fn enabled() -> Self {
        ClampPolicy::Clamp(DEFAULT_CLAMP_EPSILON)
    }

    pub fn from_epsilon(eps: Option<f64>) -> Result<Self> {
        match eps {
            None => Ok(ClampPolicy::Reject),
            Some(e) if e > 0.0 && e < 0.5 => Ok(ClampPolicy::Clamp(e)),
            Some(e) => Err(Error::InvalidArgument(format!(
                "clamping epsilon must lie in (0, 0.5), got {e}"
            ))),
        }
    }

    /// Applies the policy to a single probability; `None` when the policy
    /// rejects it.
    pub fn apply(self, p: f64) -> Option<f64> {
        if p > 0.0 && p < 1.0 {
            return Some(p);
        }
        match self {
            ClampPolicy::Reject => None,
            ClampPolicy::Clamp(eps) => Some(p.clamp(eps, 1.0 - eps)),
        }
    }
}

/// Paired estimated probabilities and binary outcomes. Immutable once built;
/// iteration order equals ingestion order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSample {
    probabilities: Vec<f64>,
    events: Vec<bool>,
    ids: Option<Vec<String>>,
    groups: Option<Vec<String>>,
    n_events: usize,
}

impl PredictionSample {
    pub fn new(probabilities: Vec<f64>, events: Vec<bool>) -> Result<Self> {
        if probabilities.len() != events.len() {
            return Err(Error::InvalidArgument(format!(
                "{} probabilities but {} outcomes",
                probabilities.len(),
                events.len()
            )));
        }
        if probabilities.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, &p) in probabilities.iter().enumerate() {
            check_probability(p).map_err(|message| Error::InvalidRow {
                row: i + 1,
                message,
            })?;
        }
        let n_events = events.iter().filter(|&&e| e).count();
        Ok(Self {
            probabilities,
            events,
            ids: None,
            groups: None,
            n_events,
        })
    }

    pub fn from_records(records: Vec<PredictionRecord>) -> Result<Self> {
        let has_ids = records.iter().any(|r| r.id.is_some());
        let has_groups = records.iter().any(|r| r.group.is_some());
        let mut probabilities = Vec::with_capacity(records.len());
        let mut events = Vec::with_capacity(records.len());
        let mut ids = Vec::new();
        let mut groups = Vec::new();
        for (i, r) in records.into_iter().enumerate() {
            probabilities.push(r.probability);
            events.push(r.event);
            if has_ids {
                ids.push(r.id.ok_or_else(|| Error::InvalidRow {
                    row: i + 1,
                    message: "missing id".into(),
                })?);
            }
            if has_groups {
                groups.push(r.group.ok_or_else(|| Error::InvalidRow {
                    row: i + 1,
                    message: "missing group label".into(),
                })?);
            }
        }
        let mut sample = Self::new(probabilities, events)?;
        sample.ids = has_ids.then_some(ids);
        sample.groups = has_groups.then_some(groups);
        Ok(sample)
    }

    pub fn with_groups(mut self, groups: Vec<String>) -> Result<Self> {
        if groups.len() != self.len() {
            return Err(Error::InvalidArgument(
                "group labels do not match sample size".into(),
            ));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn n_nonevents(&self) -> usize {
        self.len() - self.n_events
    }

    pub fn prevalence(&self) -> f64 {
        self.n_events as f64 / self.len() as f64
    }

    pub fn has_both_classes(&self) -> bool {
        self.n_events > 0 && self.n_events < self.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn events(&self) -> &[bool] {
        &self.events
    }

    pub fn outcomes(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|&e| if e { 1.0 } else { 0.0 })
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn groups(&self) -> Option<&[String]> {
        self.groups.as_deref()
    }

    pub fn record(&self, i: usize) -> PredictionRecord {
        PredictionRecord {
            id: self.ids.as_ref().map(|v| v[i].clone()),
            probability: self.probabilities[i],
            event: self.events[i],
            group: self.groups.as_ref().map(|v| v[i].clone()),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = PredictionRecord> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }

    /// True when some probability is exactly 0 or 1.
    pub fn has_boundary_probabilities(&self) -> bool {
        self.probabilities.iter().any(|&p| p == 0.0 || p == 1.0)
    }

    /// Logits of the probabilities under `policy`.
    pub fn linear_predictors(&self, policy: ClampPolicy) -> Result<Vec<f64>> {
        self.probabilities
            .iter()
            .map(|&p| {
                policy.apply(p).map(logit).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "probability {p} has no finite logit; enable clamping to include it"
                    ))
                })
            })
            .collect()
    }

    /// New sample made of the records at `indices` (repeats allowed). Labels
    /// and ids are carried along.
    pub fn select(&self, indices: &[usize]) -> Self {
        let probabilities: Vec<f64> = indices.iter().map(|&i| self.probabilities[i]).collect();
        let events: Vec<bool> = indices.iter().map(|&i| self.events[i]).collect();
        let n_events = events.iter().filter(|&&e| e).count();
        Self {
            probabilities,
            events,
            ids: self
                .ids
                .as_ref()
                .map(|v| indices.iter().map(|&i| v[i].clone()).collect()),
            groups: self
                .groups
                .as_ref()
                .map(|v| indices.iter().map(|&i| v[i].clone()).collect()),
            n_events,
        }
    }

    /// Same individuals and outcomes with replaced probabilities.
    pub fn with_probabilities(&self, probabilities: Vec<f64>) -> Result<Self> {
        let mut next = Self::new(probabilities, self.events.clone())?;
        next.ids = self.ids.clone();
        next.groups = self.groups.clone();
        Ok(next)
    }
}

fn check_probability(p: f64) -> std::result::Result<(), String> {
    if !p.is_finite() {
        return Err(format!("probability {p} is not finite"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// A decision threshold strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(t: f64) -> Result<Self> {
        if t > 0.0 && t < 1.0 {
            Ok(Self(t))
        } else {
            Err(Error::InvalidArgument(format!(
                "decision threshold must lie in (0, 1), got {t}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Odds of the threshold, the weight given to false positives in net benefit.
    pub fn odds(self) -> f64 {
        self.0 / (1.0 - self.0)
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(t: f64) -> Result<Self> {
        Threshold::new(t)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// Range of acceptable sensitivity or false-positive rate for partial AUROC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum PartialAucBand {
    Sensitivity { lower: f64, upper: f64 },
    FalsePositiveRate { lower: f64, upper: f64 },
}

impl PartialAucBand {
    pub fn sensitivity(lower: f64, upper: f64) -> Result<Self> {
        check_band(lower, upper)?;
        Ok(PartialAucBand::Sensitivity { lower, upper })
    }

    pub fn false_positive_rate(lower: f64, upper: f64) -> Result<Self> {
        check_band(lower, upper)?;
        Ok(PartialAucBand::FalsePositiveRate { lower, upper })
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            PartialAucBand::Sensitivity { lower, upper }
            | PartialAucBand::FalsePositiveRate { lower, upper } => (lower, upper),
        }
    }

    pub fn width(self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    pub fn validate(self) -> Result<()> {
        let (lo, hi) = self.bounds();
        check_band(lo, hi)
    }
}

impl Default for PartialAucBand {
    fn default() -> Self {
        PartialAucBand::Sensitivity {
            lower: 0.8,
            upper: 1.0,
        }
    }
}

fn check_band(lower: f64, upper: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) {
        return Err(Error::InvalidArgument(format!(
            "band [{lower}, {upper}] must lie within [0, 1]"
        )));
    }
    if lower >= upper {
        return Err(Error::InvalidArgument(format!(
            "band [{lower}, {upper}] is empty"
        )));
    }
    Ok(())
}

/// Misclassification costs: `cost_fn` is the cost of a false negative,
/// `cost_fp` the cost of a false positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub cost_fn: f64,
    pub cost_fp: f64,
    pub normalized: bool,
}

impl CostSpec {
    pub fn new(cost_fn: f64, cost_fp: f64) -> Result<Self> {
        let spec = Self {
            cost_fn,
            cost_fp,
            normalized: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Costs scaled to sum to one; `c` is the normalized false-negative cost.
    pub fn normalized(c: f64) -> Result<Self> {
        let spec = Self {
            cost_fn: c,
            cost_fp: 1.0 - c,
            normalized: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Costs implied by a decision threshold: a false negative costs
    /// `(1 - t) / t` times as much as a false positive.
    pub fn from_threshold(t: Threshold) -> Self {
        Self {
            cost_fn: 1.0 / t.odds(),
            cost_fp: 1.0,
            normalized: false,
        }
    }

    pub fn to_normalized(self) -> Self {
        let total = self.cost_fn + self.cost_fp;
        Self {
            cost_fn: self.cost_fn / total,
            cost_fp: self.cost_fp / total,
            normalized: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.cost_fn.is_finite() && self.cost_fp.is_finite();
        if !finite || self.cost_fn < 0.0 || self.cost_fp < 0.0 {
            return Err(Error::InvalidArgument(
                "costs must be finite and nonnegative".into(),
            ));
        }
        if self.cost_fn + self.cost_fp <= 0.0 {
            return Err(Error::InvalidArgument("costs must not both be zero".into()));
        }
        if self.normalized && (self.cost_fn + self.cost_fp - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(
                "normalized costs must sum to one".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Explicit mapping from CSV header names to record fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub probability: String,
    pub outcome: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub id: Option<String>,
}

impl CsvSchema {
    pub fn new(probability: impl Into<String>, outcome: impl Into<String>) -> Self {
        Self {
            probability: probability.into(),
            outcome: outcome.into(),
            group: None,
            id: None,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<PredictionSample> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, schema)
}

/// Reads a comma-separated table with a header row. Row numbers in errors
/// count data rows from 1.
pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema) -> Result<PredictionSample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    };
    let p_col = column(&schema.probability)?;
    let y_col = column(&schema.outcome)?;
    let g_col = schema.group.as_deref().map(column).transpose()?;
    let id_col = schema.id.as_deref().map(column).transpose()?;

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row?;
        let invalid = |message: String| Error::InvalidRow {
            row: row_no,
            message,
        };
        let field = |col: usize, what: &str| -> Result<&str> {
            let v = row.get(col).unwrap_or("").trim();
            if v.is_empty() {
                Err(invalid(format!("missing {what}")))
            } else {
                Ok(v)
            }
        };
        let raw_p = field(p_col, "probability")?;
        let probability: f64 = raw_p
            .parse()
            .map_err(|_| invalid(format!("probability `{raw_p}` is not a number")))?;
        check_probability(probability).map_err(invalid)?;
        let event = match field(y_col, "outcome")? {
            "0" => false,
            "1" => true,
            other => return Err(invalid(format!("outcome `{other}` is not 0 or 1"))),
        };
        let group = g_col
            .map(|c| field(c, "group label").map(str::to_owned))
            .transpose()?;
        let id = id_col
            .map(|c| field(c, "id").map(str::to_owned))
            .transpose()?;
        records.push(PredictionRecord {
            id,
            probability,
            event,
            group,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    PredictionSample::from_records(records)
}

/// Writes the sample with the columns named by `schema`. Probabilities are
/// printed in shortest round-trip form, so reading the output back yields
/// bit-identical values.
pub fn write_csv<W: Write>(sample: &PredictionSample, writer: W, schema: &CsvSchema) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = Vec::new();
    if let Some(id) = &schema.id {
        header.push(id.as_str());
    }
    header.push(&schema.probability);
    header.push(&schema.outcome);
    if let Some(g) = &schema.group {
        header.push(g.as_str());
    }
    wtr.write_record(&header)?;
    for r in sample.records() {
        let mut row = Vec::with_capacity(header.len());
        if schema.id.is_some() {
            row.push(r.id.unwrap_or_default());
        }
        row.push(format!("{}", r.probability));
        row.push(if r.event { "1" } else { "0" }.to_owned());
        if schema.group.is_some() {
            row.push(r.group.unwrap_or_default());
        }
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Validation verdicts
// ---------------------------------------------------------------------------

/// Minimum sample size for the local-regression calibration smoother.
pub const SMOOTHER_MIN_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Computable,
    RequiresClamping(String),
    Undefined(String),
}

impl Verdict {
    pub fn is_computable(&self) -> bool {
        matches!(self, Verdict::Computable)
    }
}

/// Decides from class counts and probability support alone whether `measure`
/// can be computed on `sample`.
pub fn validate_for_measure(
    sample: &PredictionSample,
    measure: MeasureId,
    clamp: ClampPolicy,
) -> Verdict {
    use MeasureId::*;

    let both = "requires both outcome classes";
    let needs_logs = matches!(
        measure,
        Loglikelihood
            | Logloss
            | McFaddenR2
            | CoxSnellR2
            | NagelkerkeR2
            | CalibrationIntercept
            | CalibrationSlope
    );
    if needs_logs && clamp == ClampPolicy::Reject && sample.has_boundary_probabilities() {
        return Verdict::RequiresClamping(
            "probabilities of exactly 0 or 1 have no finite logarithm".into(),
        );
    }
    let needs_both = matches!(
        measure,
        Auroc
            | AveragePrecision
            | PartialAuroc
            | CalibrationIntercept
            | CalibrationSlope
            | Eci
            | ScaledBrier
            | McFaddenR2
            | CoxSnellR2
            | NagelkerkeR2
            | DiscriminationSlope
            | BalancedAccuracy
            | Youden
            | ExpectedCost
    );
    if needs_both && !sample.has_both_classes() {
        return Verdict::Undefined(both.into());
    }
    match measure {
        Sensitivity | NetBenefit | StandardizedNetBenefit if sample.n_events() == 0 => {
            Verdict::Undefined("requires at least one event".into())
        }
        Specificity if sample.n_nonevents() == 0 => {
            Verdict::Undefined("requires at least one non-event".into())
        }
        OeRatio if sample.probabilities().iter().all(|&p| p == 0.0) => {
            Verdict::Undefined("all estimated probabilities are zero".into())
        }
        Eci | Ici if sample.len() < SMOOTHER_MIN_SIZE => Verdict::Undefined(format!(
            "the calibration smoother needs at least {SMOOTHER_MIN_SIZE} records"
        )),
        _ => Verdict::Computable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> PredictionSample {
        PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false]).unwrap()
    }

    #[test]
    fn csv_counts_classes() {
        let data = "p,y\n0.2,0\n0.8,1\n0.6,1\n0.4,0\n";
        let s = read_csv(data.as_bytes(), &CsvSchema::new("p", "y")).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.n_events(), 2);
        assert_eq!(s.prevalence(), 0.5);
    }

    #[test]
    fn csv_rejects_out_of_range_probability_with_row() {
        let data = "p,y\n0.2,0\n1.3,1\n";
        match read_csv(data.as_bytes(), &CsvSchema::new("p", "y")) {
            Err(Error::InvalidRow { row, message }) => {
                assert_eq!(row, 2);
                assert!(message.contains("1.3"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_errors() {
        let schema = CsvSchema::new("p", "y");
        assert!(matches!(
            read_csv("q,y\n0.1,0\n".as_bytes(), &schema),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            read_csv("p,y\n".as_bytes(), &schema),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            read_csv("p,y\n0.1,2\n".as_bytes(), &schema),
            Err(Error::InvalidRow { row: 1, .. })
        ));
        assert!(matches!(
            read_csv("p,y\n0.1,\n".as_bytes(), &schema),
            Err(Error::InvalidRow { row: 1, .. })
        ));
        assert!(matches!(
            read_csv("p,y\nNaN,1\n".as_bytes(), &schema),
            Err(Error::InvalidRow { row: 1, .. })
        ));
    }

    #[test]
    fn csv_reads_groups_and_ids() {
        let data = "id,p,y,meno\na,0.1,0,pre\nb,0.9,1,post\n";
        let schema = CsvSchema::new("p", "y").with_group("meno").with_id("id");
        let s = read_csv(data.as_bytes(), &schema).unwrap();
        assert_eq!(
            s.groups().unwrap(),
            &["pre".to_string(), "post".to_string()]
        );
        assert_eq!(s.record(1).id.as_deref(), Some("b"));
        let mut out = Vec::new();
        write_csv(&s, &mut out, &schema).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "id,p,y,meno\na,0.1,0,pre\nb,0.9,1,post\n"
        );
    }

    #[test]
    fn prevalence_identity() {
        let s = d4();
        assert_eq!(s.prevalence() * s.len() as f64, s.n_events() as f64);
        assert_eq!(s.n_events() + s.n_nonevents(), s.len());
    }

    #[test]
    fn linear_predictors_respect_clamping() {
        let s = PredictionSample::new(vec![0.0, 0.5, 1.0], vec![false, true, true]).unwrap();
        assert!(s.linear_predictors(ClampPolicy::Reject).is_err());
        let lp = s.linear_predictors(ClampPolicy::enabled()).unwrap();
        assert_eq!(lp[1], 0.0);
        assert!(lp[0] < -20.0 && lp[2] > 20.0);
    }

    #[test]
    fn verdicts() {
        let all_events = PredictionSample::new(vec![0.3, 0.7], vec![true, true]).unwrap();
        assert_eq!(
            validate_for_measure(&all_events, MeasureId::Auroc, ClampPolicy::Reject),
            Verdict::Undefined("requires both outcome classes".into())
        );
        let certain = PredictionSample::new(vec![1.0, 0.2], vec![true, false]).unwrap();
        assert!(matches!(
            validate_for_measure(&certain, MeasureId::Logloss, ClampPolicy::Reject),
            Verdict::RequiresClamping(_)
        ));
        assert!(
            validate_for_measure(&certain, MeasureId::Logloss, ClampPolicy::enabled())
                .is_computable()
        );
        for &m in MeasureId::ALL {
            if matches!(m, MeasureId::Eci | MeasureId::Ici) {
                continue;
            }
            assert!(
                validate_for_measure(&d4(), m, ClampPolicy::Reject).is_computable(),
                "{m}"
            );
        }
    }

    #[test]
    fn thresholds_and_bands() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(1.0).is_err());
        assert!((Threshold::new(0.1).unwrap().odds() - 1.0 / 9.0).abs() < 1e-15);
        assert!(PartialAucBand::sensitivity(0.9, 0.8).is_err());
        assert!(PartialAucBand::sensitivity(0.8, 1.2).is_err());
        assert!((PartialAucBand::default().width() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn costs() {
        assert!(CostSpec::new(0.0, 0.0).is_err());
        assert!(CostSpec::new(-1.0, 2.0).is_err());
        let c = CostSpec::from_threshold(Threshold::new(0.1).unwrap());
        assert!((c.cost_fn - 9.0).abs() < 1e-12 && c.cost_fp == 1.0);
        let n = c.to_normalized();
        assert!((n.cost_fn + n.cost_fp - 1.0).abs() < 1e-12);
        assert!(n.validate().is_ok());
    }
}
