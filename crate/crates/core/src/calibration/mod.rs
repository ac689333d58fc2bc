//! Calibration: logistic recalibration fits, calibration curves by grouping
//! and by smoothing, and the ECE / ICI / ECI summaries.

mod irls;
mod loess;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use irls::{fit_intercept_slope, fit_offset_intercept, score, LogisticFit};
pub use loess::{linspace, Loess, SmootherSettings};

use crate::data::{ClampPolicy, PredictionSample, SMOOTHER_MIN_SIZE};
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::resampling::{bootstrap_replicates, quantile_type7, BootstrapSpec};
use crate::util::{ascending_order, expit, logit};

/// Default number of equal-size groups for grouped curves and ECE.
pub const DEFAULT_GROUPS: usize = 10;

/// Logistic recalibration `p' = expit(intercept + slope * logit(p))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecalibrationMap {
    pub intercept: f64,
    pub slope: f64,
}

impl RecalibrationMap {
    pub fn identity() -> Self {
        Self {
            intercept: 0.0,
            slope: 1.0,
        }
    }

    pub fn apply(&self, p: f64) -> f64 {
        expit(self.intercept + self.slope * logit(p))
    }

    /// Same individuals with mapped probabilities.
    pub fn apply_sample(
        &self,
        sample: &PredictionSample,
        clamp: ClampPolicy,
    ) -> Result<PredictionSample> {
        let lp = sample.linear_predictors(clamp)?;
        let p = lp
            .iter()
            .map(|&l| expit(self.intercept + self.slope * l))
            .collect();
        sample.with_probabilities(p)
    }
}

/// Observed over expected events.
pub fn oe_ratio(sample: &PredictionSample) -> Result<f64> {
    let expected: f64 = sample.probabilities().iter().sum();
    if expected <= 0.0 {
        return Err(Error::undefined(
            MeasureId::OeRatio,
            "all estimated probabilities are zero",
        ));
    }
    Ok(sample.n_events() as f64 / expected)
}

fn require_both(sample: &PredictionSample, measure: MeasureId) -> Result<()> {
    if !sample.has_both_classes() {
        return Err(Error::undefined(measure, "requires both outcome classes"));
    }
    Ok(())
}

/// Intercept of the calibration model with the linear predictor as offset.
pub fn fit_calibration_intercept(sample: &PredictionSample, clamp: ClampPolicy) -> Result<f64> {
    require_both(sample, MeasureId::CalibrationIntercept)?;
    let lp = sample.linear_predictors(clamp)?;
    Ok(fit_offset_intercept(&lp, sample.events())?.intercept)
}

/// Joint intercept and slope of the outcome regressed on the linear predictor.
pub fn fit_calibration_slope(
    sample: &PredictionSample,
    clamp: ClampPolicy,
) -> Result<RecalibrationMap> {
    require_both(sample, MeasureId::CalibrationSlope)?;
    let lp = sample.linear_predictors(clamp)?;
    let fit = fit_intercept_slope(&lp, sample.events())?;
    Ok(RecalibrationMap {
        intercept: fit.intercept,
        slope: fit.slope,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recalibration {
    pub map: RecalibrationMap,
    pub recalibrated: PredictionSample,
}

/// Logistic recalibration. Ranks are preserved whenever the fitted slope is
/// positive.
pub fn recalibrate(sample: &PredictionSample, clamp: ClampPolicy) -> Result<Recalibration> {
    let map = fit_calibration_slope(sample, clamp)?;
    let recalibrated = map.apply_sample(sample, clamp)?;
    Ok(Recalibration { map, recalibrated })
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    Grouped { groups: usize },
    Smoothed { span: f64, grid_points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationPoint {
    /// Mean estimated probability of a group, or a smoother grid point.
    pub x: f64,
    /// Observed event proportion, or smoothed outcome.
    pub y: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Group size for grouped curves.
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationCurve {
    pub kind: CurveKind,
    pub points: Vec<CalibrationPoint>,
}

/// Equal-size groups by ascending probability (ties keep ingestion order);
/// group `g` covers sorted positions `floor(g N / G) .. floor((g + 1) N / G)`.
pub fn grouped_calibration(sample: &PredictionSample, groups: usize) -> Result<CalibrationCurve> {
    if groups < 1 {
        return Err(Error::InvalidArgument("need at least one group".into()));
    }
    let n = sample.len();
    if n < groups {
        return Err(Error::InvalidArgument(format!(
            "cannot form {groups} groups from {n} individuals"
        )));
    }
    let order = ascending_order(sample.probabilities());
    let p = sample.probabilities();
    let y = sample.events();
    let points = (0..groups)
        .map(|g| {
            let members = &order[g * n / groups..(g + 1) * n / groups];
            let count = members.len();
            let mean_p = members.iter().map(|&i| p[i]).sum::<f64>() / count as f64;
            let events = members.iter().filter(|&&i| y[i]).count();
            CalibrationPoint {
                x: mean_p,
                y: events as f64 / count as f64,
                lower: None,
                upper: None,
                count: Some(count),
            }
        })
        .collect();
    Ok(CalibrationCurve {
        kind: CurveKind::Grouped { groups },
        points,
    })
}

fn check_smoother_size(sample: &PredictionSample) -> Result<()> {
    if sample.len() < SMOOTHER_MIN_SIZE {
        return Err(Error::InvalidArgument(format!(
            "smoothed calibration needs at least {SMOOTHER_MIN_SIZE} individuals, got {}; use a grouped curve instead",
            sample.len()
        )));
    }
    Ok(())
}

fn smoother_for(sample: &PredictionSample, settings: &SmootherSettings) -> Loess {
    let y: Vec<f64> = sample.outcomes().collect();
    Loess::new(sample.probabilities(), &y, settings.span)
}

fn probability_range(p: &[f64]) -> (f64, f64) {
    p.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// Local linear smooth of the outcome on the probability, on an equally
/// spaced grid across the observed range. A sample with a single distinct
/// probability gives a one-point curve at its mean outcome.
pub fn smoothed_calibration(
    sample: &PredictionSample,
    settings: &SmootherSettings,
) -> Result<CalibrationCurve> {
    settings.validate()?;
    check_smoother_size(sample)?;
    let kind = CurveKind::Smoothed {
        span: settings.span,
        grid_points: settings.grid_points,
    };
    let (lo, hi) = probability_range(sample.probabilities());
    let point = |x, y| CalibrationPoint {
        x,
        y,
        lower: None,
        upper: None,
        count: None,
    };
    if lo == hi {
        return Ok(CalibrationCurve {
            kind,
            points: vec![point(lo, sample.prevalence())],
        });
    }
    let grid = linspace(lo, hi, settings.grid_points);
    let fitted = smoother_for(sample, settings).fit_sorted(&grid);
    Ok(CalibrationCurve {
        kind,
        points: grid
            .into_iter()
            .zip(fitted)
            .map(|(x, y)| point(x, y))
            .collect(),
    })
}

/// Smoothed curve with a pointwise percentile band: each bootstrap replicate
/// is smoothed and evaluated on the grid of the original sample.
pub fn smoothed_calibration_band(
    sample: &PredictionSample,
    settings: &SmootherSettings,
    spec: &BootstrapSpec,
) -> Result<CalibrationCurve> {
    spec.validate()?;
    let mut curve = smoothed_calibration(sample, settings)?;
    let grid: Vec<f64> = curve.points.iter().map(|pt| pt.x).collect();
    let replicates = bootstrap_replicates(sample, spec, |s| {
        smoother_for(s, settings).fit_sorted(&grid)
    });
    let alpha = (1.0 - spec.level) / 2.0;
    for (k, pt) in curve.points.iter_mut().enumerate() {
        let mut column: Vec<f64> = replicates
            .iter()
            .map(|r| r[k])
            .filter(|v| v.is_finite())
            .collect();
        if column.is_empty() {
            continue;
        }
        column.sort_by(f64::total_cmp);
        pt.lower = Some(quantile_type7(&column, alpha));
        pt.upper = Some(quantile_type7(&column, 1.0 - alpha));
    }
    Ok(curve)
}

/// Smoothed outcome at every individual's own probability, in record order.
pub fn smoothed_fitted_values(
    sample: &PredictionSample,
    settings: &SmootherSettings,
) -> Result<Vec<f64>> {
    settings.validate()?;
    check_smoother_size(sample)?;
    let (lo, hi) = probability_range(sample.probabilities());
    if lo == hi {
        return Ok(vec![sample.prevalence(); sample.len()]);
    }
    Ok(smoother_for(sample, settings).fit(sample.probabilities()))
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Group-size weighted mean absolute gap of a grouped curve.
pub fn ece(curve: &CalibrationCurve) -> Result<f64> {
    if !matches!(curve.kind, CurveKind::Grouped { .. }) {
        return Err(Error::InvalidArgument(
            "ECE requires a grouped calibration curve".into(),
        ));
    }
    let total: usize = curve.points.iter().map(|p| p.count.unwrap_or(0)).sum();
    Ok(curve
        .points
        .iter()
        .map(|p| p.count.unwrap_or(0) as f64 / total as f64 * (p.x - p.y).abs())
        .sum())
}

/// Mean absolute difference between probabilities and smoothed outcomes.
pub fn ici(sample: &PredictionSample, fitted: &[f64]) -> Result<f64> {
    check_fitted(sample, fitted)?;
    let p = sample.probabilities();
    Ok(p.iter()
        .zip(fitted)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / p.len() as f64)
}

/// Mean squared difference between probabilities and smoothed outcomes,
/// divided by that of a null model predicting the prevalence for everyone
/// unless `normalized` is false.
pub fn eci(sample: &PredictionSample, fitted: &[f64], normalized: bool) -> Result<f64> {
    check_fitted(sample, fitted)?;
    let p = sample.probabilities();
    let n = p.len() as f64;
    let raw = p
        .iter()
        .zip(fitted)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if !normalized {
        return Ok(raw);
    }
    let ybar = sample.prevalence();
    let null = p.iter().map(|a| (a - ybar) * (a - ybar)).sum::<f64>() / n;
    if null == 0.0 {
        return Err(Error::undefined(
            MeasureId::Eci,
            "every probability equals the prevalence, so the null-model reference is zero",
        ));
    }
    Ok(raw / null)
}

fn check_fitted(sample: &PredictionSample, fitted: &[f64]) -> Result<()> {
    if fitted.len() != sample.len() {
        return Err(Error::InvalidArgument(format!(
            "{} smoothed values for {} individuals",
            fitted.len(),
            sample.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub groups: usize,
    pub smoother: SmootherSettings,
    /// Report ECI as a plain mean squared difference.
    pub unnormalized_eci: bool,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            groups: DEFAULT_GROUPS,
            smoother: SmootherSettings::default(),
            unnormalized_eci: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummaries {
    pub ece: Result<f64, String>,
    pub ici: Result<f64, String>,
    pub eci: Result<f64, String>,
}

/// ECE from the grouped curve and ICI / ECI from the smoother; each entry
/// fails on its own.
pub fn calibration_summaries(
    sample: &PredictionSample,
    settings: &CalibrationSettings,
) -> CalibrationSummaries {
    let ece_value = grouped_calibration(sample, settings.groups).and_then(|c| ece(&c));
    let (ici_value, eci_value) = match smoothed_fitted_values(sample, &settings.smoother) {
        Ok(f) => (
            ici(sample, &f).map_err(|e| e.to_string()),
            eci(sample, &f, !settings.unnormalized_eci).map_err(|e| e.to_string()),
        ),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    };
    CalibrationSummaries {
        ece: ece_value.map_err(|e| e.to_string()),
        ici: ici_value,
        eci: eci_value,
    }
}

// ---------------------------------------------------------------------------
// Subgroups
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "snake_case")]
pub enum CurveChoice {
    Grouped { groups: usize },
    Smoothed(SmootherSettings),
}

impl CurveChoice {
    pub fn build(&self, sample: &PredictionSample) -> Result<CalibrationCurve> {
        match self {
            CurveChoice::Grouped { groups } => grouped_calibration(sample, *groups),
            CurveChoice::Smoothed(s) => smoothed_calibration(sample, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgroupCalibration {
    pub curves: BTreeMap<String, CalibrationCurve>,
    /// Subgroups whose curve could not be built, with the reason.
    pub flagged: BTreeMap<String, String>,
}

/// One calibration curve per subgroup label.
pub fn subgroup_calibration(
    sample: &PredictionSample,
    choice: &CurveChoice,
) -> Result<SubgroupCalibration> {
    let labels = sample
        .groups()
        .ok_or_else(|| Error::InvalidArgument("sample has no subgroup labels".into()))?;
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, g) in labels.iter().enumerate() {
        members.entry(g.as_str()).or_default().push(i);
    }
    let mut out = SubgroupCalibration {
        curves: BTreeMap::new(),
        flagged: BTreeMap::new(),
    };
    for (label, idx) in members {
        match choice.build(&sample.select(&idx)) {
            Ok(curve) => {
                out.curves.insert(label.to_string(), curve);
            }
            Err(e) => {
                out.flagged.insert(label.to_string(), e.to_string());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> PredictionSample {
        PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false]).unwrap()
    }

    #[test]
    fn d4_calibration() {
        let s = d4();
        assert_eq!(oe_ratio(&s).unwrap(), 1.0);
        let a = fit_calibration_intercept(&s, ClampPolicy::Reject).unwrap();
        assert!(a.abs() < 1e-12);
        assert!(matches!(
            fit_calibration_slope(&s, ClampPolicy::Reject),
            Err(Error::Separation(_))
        ));
        let curve = grouped_calibration(&s, 2).unwrap();
        let xy: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.x, p.y)).collect();
        assert!((xy[0].0 - 0.3).abs() < 1e-15 && xy[0].1 == 0.0);
        assert!((xy[1].0 - 0.7).abs() < 1e-15 && xy[1].1 == 1.0);
        assert!((ece(&curve).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn one_group_ece_is_mean_gap() {
        let s = PredictionSample::new(
            vec![0.1, 0.3, 0.2, 0.6, 0.5, 0.25],
            vec![false, true, false, true, true, false],
        )
        .unwrap();
        let e = ece(&grouped_calibration(&s, 1).unwrap()).unwrap();
        let mean_p = 1.95 / 6.0;
        assert!((e - (mean_p - 0.5f64).abs()).abs() < 1e-15);
        let oe = oe_ratio(&s).unwrap();
        assert!((e - (1.0 - 1.0 / oe).abs() * s.prevalence()).abs() < 1e-12);
    }

    #[test]
    fn constant_probability_smooth_is_single_point() {
        let y: Vec<bool> = (0..30).map(|i| i % 10 < 3).collect();
        let s = PredictionSample::new(vec![0.3; 30], y).unwrap();
        let c = smoothed_calibration(&s, &SmootherSettings::default()).unwrap();
        assert_eq!(c.points.len(), 1);
        assert!((c.points[0].x - 0.3).abs() < 1e-15);
        assert!((c.points[0].y - 0.3).abs() < 1e-15);
    }

    #[test]
    fn smoother_refuses_small_samples() {
        let err = smoothed_calibration(&d4(), &SmootherSettings::default()).unwrap_err();
        assert!(err.to_string().contains("grouped"));
    }

    #[test]
    fn identical_fits_give_zero_summaries() {
        let p: Vec<f64> = (0..25).map(|i| 0.1 + 0.03 * i as f64).collect();
        let y: Vec<bool> = (0..25).map(|i| i % 2 == 0).collect();
        let s = PredictionSample::new(p.clone(), y).unwrap();
        assert_eq!(ici(&s, &p).unwrap(), 0.0);
        assert_eq!(eci(&s, &p, true).unwrap(), 0.0);
    }

    #[test]
    fn ece_rejects_smoothed_curve() {
        let curve = CalibrationCurve {
            kind: CurveKind::Smoothed {
                span: 0.75,
                grid_points: 100,
            },
            points: vec![],
        };
        assert!(ece(&curve).is_err());
    }

    #[test]
    fn subgroups_flag_small_groups() {
        let n = 45;
        let p: Vec<f64> = (0..n).map(|i| 0.05 + 0.02 * i as f64).collect();
        let y: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
        let groups: Vec<String> = (0..n)
            .map(|i| if i < 40 { "a".into() } else { "b".into() })
            .collect();
        let s = PredictionSample::new(p, y)
            .unwrap()
            .with_groups(groups)
            .unwrap();
        let out =
            subgroup_calibration(&s, &CurveChoice::Smoothed(SmootherSettings::default())).unwrap();
        assert!(out.curves.contains_key("a"));
        assert!(out.flagged.contains_key("b"));
    }
}
