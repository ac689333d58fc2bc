//! Builders for ROC, precision-recall, calibration, classification, decision,
//! cost and risk-distribution curves.

mod series;

use serde::{Deserialize, Serialize};

pub use series::{format_value, CurveSeries, CurveType, SvgLabels};

use crate::calibration::{CalibrationCurve, CurveKind};
use crate::data::{CostSpec, PredictionSample};
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::metrics::{
    min_expected_cost_from_sweep, net_benefit, partial_classification, ThresholdSweep,
};
use crate::resampling::quantile_type7;

fn require_both(sweep: &ThresholdSweep, measure: MeasureId) -> Result<()> {
    if sweep.n_events() == 0 || sweep.n_nonevents() == 0 {
        return Err(Error::undefined(
            measure,
            "curve requires both outcome classes",
        ));
    }
    Ok(())
}

/// ROC vertices from a descending threshold sweep: `(0, 0)` and then one
/// vertex per distinct probability, ending at `(1, 1)`. Columns: threshold,
/// fpr, sensitivity, true_pos, false_pos.
pub fn roc_curve(sample: &PredictionSample) -> Result<CurveSeries> {
    let sweep = ThresholdSweep::new(sample);
    require_both(&sweep, MeasureId::Auroc)?;
    let (n_pos, n_neg) = (sweep.n_events() as f64, sweep.n_nonevents() as f64);
    let mut c = CurveSeries::new(
        CurveType::Roc,
        &["threshold", "fpr", "sensitivity", "true_pos", "false_pos"],
    );
    c.push(vec![
        Some(f64::INFINITY),
        Some(0.0),
        Some(0.0),
        Some(0.0),
        Some(0.0),
    ]);
    let (mut tp, mut fp) = (0usize, 0usize);
    for (value, e, n) in sweep.tie_groups().rev() {
        tp += e;
        fp += n;
        c.push(vec![
            Some(value),
            Some(fp as f64 / n_neg),
            Some(tp as f64 / n_pos),
            Some(tp as f64),
            Some(fp as f64),
        ]);
    }
    Ok(c.with_meta("sweep", "distinct observed probabilities, descending"))
}

/// Trapezoidal area under an ROC polyline in (fpr, sensitivity) space.
pub fn trapezoid_area(roc: &CurveSeries) -> Result<f64> {
    let x = roc.values("fpr")?;
    let y = roc.values("sensitivity")?;
    Ok(x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[1] + ys[0]) / 2.0)
        .sum())
}

/// Trapezoidal area from the integer vertex counts; identical to the
/// concordance computation, so it matches `auroc` exactly.
pub fn trapezoid_area_exact(roc: &CurveSeries) -> Result<f64> {
    let tp = roc.values("true_pos")?;
    let fp = roc.values("false_pos")?;
    let n_pos = *tp.last().ok_or(Error::EmptyInput)? as u128;
    let n_neg = *fp.last().ok_or(Error::EmptyInput)? as u128;
    let mut twice: u128 = 0;
    for k in 1..tp.len() {
        let dfp = (fp[k] - fp[k - 1]) as u128;
        twice += dfp * (tp[k] as u128 + tp[k - 1] as u128);
    }
    Ok(twice as f64 / (2 * n_pos * n_neg) as f64)
}

/// Precision-recall points at every distinct threshold, descending. Columns:
/// threshold, recall, precision, true_pos.
pub fn pr_curve(sample: &PredictionSample) -> Result<CurveSeries> {
    let sweep = ThresholdSweep::new(sample);
    require_both(&sweep, MeasureId::AveragePrecision)?;
    let n_pos = sweep.n_events() as f64;
    let mut c = CurveSeries::new(
        CurveType::Pr,
        &["threshold", "recall", "precision", "true_pos"],
    );
    let (mut tp, mut fp) = (0usize, 0usize);
    for (value, e, n) in sweep.tie_groups().rev() {
        tp += e;
        fp += n;
        c.push(vec![
            Some(value),
            Some(tp as f64 / n_pos),
            Some(tp as f64 / (tp + fp) as f64),
            Some(tp as f64),
        ]);
    }
    Ok(c.with_meta("sweep", "distinct observed probabilities, descending"))
}

/// Recall increments times precision, summed along a PR curve.
pub fn step_sum(pr: &CurveSeries) -> Result<f64> {
    let tp = pr.values("true_pos")?;
    let precision = pr.values("precision")?;
    let n_pos = *tp.last().ok_or(Error::EmptyInput)?;
    let mut prev = 0.0;
    let mut total = 0.0;
    for (t, p) in tp.iter().zip(&precision) {
        if *t > prev {
            total += (t - prev) / n_pos * p;
        }
        prev = *t;
    }
    Ok(total)
}

/// Calibration curve as a plottable series with columns x, y, lower, upper.
pub fn calibration_series(curve: &CalibrationCurve) -> CurveSeries {
    let mut c = CurveSeries::new(
        CurveType::Calibration,
        &["x", "y", "lower", "upper", "count"],
    );
    for p in &curve.points {
        c.push(vec![
            Some(p.x),
            Some(p.y),
            p.lower,
            p.upper,
            p.count.map(|v| v as f64),
        ]);
    }
    match curve.kind {
        CurveKind::Grouped { groups } => c
            .with_meta("method", "equal-size groups")
            .with_meta("groups", groups),
        CurveKind::Smoothed { span, grid_points } => c
            .with_meta(
                "method",
                "local linear tricube smoother on the probability scale",
            )
            .with_meta("span", span)
            .with_meta("grid_points", grid_points)
            .with_meta("robustness_iterations", 0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassificationPair {
    /// Sensitivity and 1 - specificity.
    SensFpr,
    PpvNpv,
    PpvSens,
}

impl ClassificationPair {
    pub fn columns(self) -> [&'static str; 2] {
        match self {
            ClassificationPair::SensFpr => ["sensitivity", "fpr"],
            ClassificationPair::PpvNpv => ["ppv", "npv"],
            ClassificationPair::PpvSens => ["ppv", "sensitivity"],
        }
    }
}

impl std::str::FromStr for ClassificationPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sens_fpr" => Ok(ClassificationPair::SensFpr),
            "ppv_npv" => Ok(ClassificationPair::PpvNpv),
            "ppv_sens" => Ok(ClassificationPair::PpvSens),
            other => Err(Error::InvalidArgument(format!(
                "unknown classification pair '{other}' (expected sens_fpr, ppv_npv or ppv_sens)"
            ))),
        }
    }
}

/// Two partial classification measures against the threshold; zero
/// denominators become gaps.
pub fn classification_plot(
    sample: &PredictionSample,
    pair: ClassificationPair,
    grid: &[f64],
) -> Result<CurveSeries> {
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "threshold {t} outside (0, 1)"
        )));
    }
    let sweep = ThresholdSweep::new(sample);
    let [a, b] = pair.columns();
    let mut c = CurveSeries::new(CurveType::Classification, &["threshold", a, b]);
    for &t in grid {
        let m = partial_classification(&sweep.confusion(t));
        let fpr = m.specificity.map(|s| 1.0 - s);
        let (va, vb) = match pair {
            ClassificationPair::SensFpr => (m.sensitivity, fpr),
            ClassificationPair::PpvNpv => (m.ppv, m.npv),
            ClassificationPair::PpvSens => (m.ppv, m.sensitivity),
        };
        c.push(vec![Some(t), va, vb]);
    }
    Ok(c.with_meta("rule", "probability >= threshold is high risk"))
}

/// Threshold grid and smoothing for decision curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionCurveSpec {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    /// Width of the centered moving average; 1 disables smoothing.
    pub smooth_window: usize,
}

impl Default for DecisionCurveSpec {
    fn default() -> Self {
        Self {
            lower: 0.05,
            upper: 0.40,
            step: 0.01,
            smooth_window: 5,
        }
    }
}

impl DecisionCurveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lower > 0.0 && self.upper < 1.0 && self.lower <= self.upper) {
            return Err(Error::InvalidArgument(format!(
                "decision-curve range [{}, {}] must be ordered and inside (0, 1)",
                self.lower, self.upper
            )));
        }
        if !(self.step > 0.0) {
            return Err(Error::InvalidArgument(
                "decision-curve step must be positive".into(),
            ));
        }
        if self.smooth_window == 0 || self.smooth_window % 2 == 0 {
            return Err(Error::InvalidArgument(
                "smoothing window must be a positive odd count".into(),
            ));
        }
        Ok(())
    }

    /// Thresholds `lower + k * step` up to `upper`.
    pub fn thresholds(&self) -> Vec<f64> {
        let count = ((self.upper - self.lower) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.lower + k as f64 * self.step)
            .collect()
    }
}

/// Centered moving average; near the ends the window shrinks symmetrically.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = values.len();
    (0..n)
        .map(|k| {
            let h = half.min(k).min(n - 1 - k);
            let slice = &values[k - h..=k + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Net benefit of the model and of the reference strategies across the
/// threshold range. Columns: threshold, nb, nb_all, nb_none, snb, snb_all,
/// nb_smoothed.
pub fn decision_curve(sample: &PredictionSample, spec: &DecisionCurveSpec) -> Result<CurveSeries> {
    spec.validate()?;
    let sweep = ThresholdSweep::new(sample);
    let thresholds = spec.thresholds();
    let values: Vec<_> = thresholds
        .iter()
        .map(|&t| net_benefit(&sweep.confusion(t)))
        .collect();
    let nb: Vec<f64> = values.iter().map(|v| v.nb).collect();
    let smoothed = moving_average(&nb, spec.smooth_window);
    let mut c = CurveSeries::new(
        CurveType::Decision,
        &[
            "threshold",
            "nb",
            "nb_all",
            "nb_none",
            "snb",
            "snb_all",
            "nb_smoothed",
        ],
    );
    for ((t, v), s) in thresholds.iter().zip(&values).zip(smoothed) {
        c.push(vec![
            Some(*t),
            Some(v.nb),
            Some(v.nb_all),
            Some(v.nb_none),
            v.snb,
            v.snb_all,
            Some(s),
        ]);
    }
    Ok(
        c.with_meta("range", format!("[{}, {}]", spec.lower, spec.upper))
            .with_meta("step", spec.step)
            .with_meta("smooth_window", spec.smooth_window),
    )
}

/// Normalizing constant of the cost curve at normalized false-negative cost `c`.
fn cost_normalizer(prevalence: f64, c: f64) -> f64 {
    prevalence * c + (1.0 - prevalence) * (1.0 - c)
}

/// Point of the cost curve: probability-cost value and normalized minimum
/// expected cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostCurvePoint {
    pub c: f64,
    pub pc: f64,
    pub normalized_ec: f64,
    pub t_star: f64,
}

fn cost_point(sweep: &ThresholdSweep, c: f64) -> Result<CostCurvePoint> {
    let costs = CostSpec::normalized(c)?;
    let prev = sweep.n_events() as f64 / sweep.len() as f64;
    let norm = cost_normalizer(prev, c);
    let opt = min_expected_cost_from_sweep(sweep, &costs);
    Ok(CostCurvePoint {
        c,
        pc: prev * c / norm,
        normalized_ec: opt.ec_min / norm,
        t_star: opt.t_star(),
    })
}

/// Cost-curve point for arbitrary (unnormalized) misclassification costs.
pub fn cost_curve_point(sample: &PredictionSample, costs: &CostSpec) -> Result<CostCurvePoint> {
    costs.validate()?;
    let c = costs.cost_fn / (costs.cost_fn + costs.cost_fp);
    cost_point(&ThresholdSweep::new(sample), c)
}

/// Normalized minimum expected cost against the probability-cost value for
/// each normalized false-negative cost in `grid`. Columns: c, pc,
/// normalized_ec, treat_all, treat_none, t_star.
pub fn cost_curve(sample: &PredictionSample, grid: &[f64]) -> Result<CurveSeries> {
    let sweep = ThresholdSweep::new(sample);
    let mut c = CurveSeries::new(
        CurveType::Cost,
        &[
            "c",
            "pc",
            "normalized_ec",
            "treat_all",
            "treat_none",
            "t_star",
        ],
    );
    for &cost in grid {
        if !(cost > 0.0 && cost < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "normalized cost {cost} outside (0, 1)"
            )));
        }
        let p = cost_point(&sweep, cost)?;
        c.push(vec![
            Some(cost),
            Some(p.pc),
            Some(p.normalized_ec),
            Some(1.0 - p.pc),
            Some(p.pc),
            Some(p.t_star),
        ]);
    }
    Ok(c.with_meta("x", "probability-cost value PC(+)").with_meta(
        "y",
        "minimum expected cost divided by its maximum for the cost ratio",
    ))
}

/// Settings for per-class risk summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSettings {
    pub bins: usize,
    pub density_points: usize,
}

impl Default for DistributionSettings {
    fn default() -> Self {
        Self {
            bins: 20,
            density_points: 101,
        }
    }
}

pub const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDistribution {
    pub class: &'static str,
    pub n: usize,
    /// `None` when the class is absent.
    pub mean: Option<f64>,
    pub quantiles: Vec<(f64, f64)>,
    /// Counts over equal-width bins on [0, 1]; the last bin is closed.
    pub histogram: Vec<usize>,
    /// Normal-reference bandwidth; `None` when the class has no spread.
    pub bandwidth: Option<f64>,
    /// Gaussian kernel density on the evaluation grid of [0, 1].
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskDistribution {
    pub grid: Vec<f64>,
    pub events: ClassDistribution,
    pub nonevents: ClassDistribution,
}

impl RiskDistribution {
    /// Difference of class means, the discrimination slope.
    pub fn mean_difference(&self) -> Option<f64> {
        Some(self.events.mean? - self.nonevents.mean?)
    }

    pub fn density_series(&self) -> CurveSeries {
        let mut c = CurveSeries::new(
            CurveType::Density,
            &["p", "density_event", "density_nonevent"],
        );
        for (k, &x) in self.grid.iter().enumerate() {
            c.push(vec![
                Some(x),
                self.events.density.get(k).copied(),
                self.nonevents.density.get(k).copied(),
            ]);
        }
        c.with_meta("kernel", "gaussian")
            .with_meta("bandwidth", "1.06 * sd * n^(-1/5)")
    }
}

fn class_distribution(
    class: &'static str,
    values: &[f64],
    settings: &DistributionSettings,
    grid: &[f64],
) -> ClassDistribution {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut histogram = vec![0usize; settings.bins];
    for &v in values {
        let b = ((v * settings.bins as f64) as usize).min(settings.bins - 1);
        histogram[b] += 1;
    }
    if n == 0 {
        return ClassDistribution {
            class,
            n,
            mean: None,
            quantiles: Vec::new(),
            histogram,
            bandwidth: None,
            density: Vec::new(),
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let bandwidth = (sd > 0.0).then(|| 1.06 * sd * (n as f64).powf(-0.2));
    let density = match bandwidth {
        Some(h) => grid
            .iter()
            .map(|&x| {
                let s: f64 = values
                    .iter()
                    .map(|&v| {
                        let z = (x - v) / h;
                        (-0.5 * z * z).exp()
                    })
                    .sum();
                s / (n as f64 * h * (2.0 * std::f64::consts::PI).sqrt())
            })
            .collect(),
        None => Vec::new(),
    };
    ClassDistribution {
        class,
        n,
        mean: Some(mean),
        quantiles: QUANTILE_LEVELS
            .iter()
            .map(|&q| (q, quantile_type7(&sorted, q)))
            .collect(),
        histogram,
        bandwidth,
        density,
    }
}

/// Histogram, kernel density and quantiles of the estimated probabilities
/// within each outcome class.
pub fn risk_distribution(
    sample: &PredictionSample,
    settings: &DistributionSettings,
) -> Result<RiskDistribution> {
    if settings.bins == 0 || settings.density_points < 2 {
        return Err(Error::InvalidArgument(
            "need at least one histogram bin and two density points".into(),
        ));
    }
    let grid = crate::calibration::linspace(0.0, 1.0, settings.density_points);
    let (mut ev, mut non) = (Vec::new(), Vec::new());
    for (&p, &e) in sample.probabilities().iter().zip(sample.events()) {
        if e {
            ev.push(p)
        } else {
            non.push(p)
        }
    }
    Ok(RiskDistribution {
        events: class_distribution("event", &ev, settings, &grid),
        nonevents: class_distribution("non_event", &non, settings, &grid),
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{auroc, average_precision};

    fn d4() -> PredictionSample {
        PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false]).unwrap()
    }

    #[test]
    fn d4_roc_vertices() {
        let roc = roc_curve(&d4()).unwrap();
        let fpr = roc.values("fpr").unwrap();
        let sens = roc.values("sensitivity").unwrap();
        assert_eq!(fpr, vec![0.0, 0.0, 0.0, 0.5, 1.0]);
        assert_eq!(sens, vec![0.0, 0.5, 1.0, 1.0, 1.0]);
        assert_eq!(trapezoid_area_exact(&roc).unwrap(), 1.0);
    }

    #[test]
    fn null_model_roc_is_diagonal() {
        let s = PredictionSample::new(vec![0.4; 5], vec![true, false, false, true, false]).unwrap();
        let roc = roc_curve(&s).unwrap();
        assert_eq!(roc.len(), 2);
        assert_eq!(trapezoid_area(&roc).unwrap(), 0.5);
    }

    #[test]
    fn d4_pr_path() {
        let pr = pr_curve(&d4()).unwrap();
        let r = pr.values("recall").unwrap();
        let p = pr.values("precision").unwrap();
        assert_eq!((r[3], p[3]), (1.0, 0.5));
        assert_eq!(step_sum(&pr).unwrap(), average_precision(&d4()).unwrap());
    }

    #[test]
    fn areas_match_measures_with_ties() {
        let s = PredictionSample::new(
            vec![0.1, 0.4, 0.4, 0.8, 0.4, 0.65, 0.1, 0.9, 0.65],
            vec![false, false, true, true, true, false, true, true, false],
        )
        .unwrap();
        let roc = roc_curve(&s).unwrap();
        assert_eq!(trapezoid_area_exact(&roc).unwrap(), auroc(&s).unwrap());
        assert!((trapezoid_area(&roc).unwrap() - auroc(&s).unwrap()).abs() < 1e-12);
        assert!(
            (step_sum(&pr_curve(&s).unwrap()).unwrap() - average_precision(&s).unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn d4_sensitivity_plot() {
        let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
        let c = classification_plot(&d4(), ClassificationPair::SensFpr, &grid).unwrap();
        let sens = c.values("sensitivity").unwrap();
        for (t, s) in grid.iter().zip(sens) {
            assert_eq!(
                s,
                if *t <= 0.6 {
                    1.0
                } else if *t <= 0.8 {
                    0.5
                } else {
                    0.0
                }
            );
        }
    }

    #[test]
    fn ppv_gap_when_nobody_high_risk() {
        let c = classification_plot(&d4(), ClassificationPair::PpvNpv, &[0.9]).unwrap();
        assert_eq!(c.column("ppv").unwrap(), vec![None]);
    }

    #[test]
    fn decision_curve_grid_and_smoothing() {
        let spec = DecisionCurveSpec::default();
        let t = spec.thresholds();
        assert_eq!(t.len(), 36);
        assert!((t[35] - 0.40).abs() < 1e-12);
        assert_eq!(
            moving_average(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 5),
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        );
        assert_eq!(
            moving_average(&[0.0, 0.0, 3.0, 0.0, 0.0], 3),
            vec![0.0, 1.0, 1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn perfect_model_decision_curve_is_prevalence() {
        let s = PredictionSample::new(
            vec![0.01, 0.02, 0.03, 0.97, 0.98],
            vec![false, false, false, true, true],
        )
        .unwrap();
        let c = decision_curve(&s, &DecisionCurveSpec::default()).unwrap();
        for v in c.values("nb").unwrap() {
            assert!((v - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn null_model_cost_curve_is_trivial_envelope() {
        let s = PredictionSample::new(vec![0.3; 10], (0..10).map(|i| i < 3).collect()).unwrap();
        let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
        let c = cost_curve(&s, &grid).unwrap();
        for row in &c.rows {
            let x = row[1].unwrap();
            assert!((row[2].unwrap() - x.min(1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn d4_risk_distribution() {
        let d = risk_distribution(&d4(), &DistributionSettings::default()).unwrap();
        assert!((d.events.mean.unwrap() - 0.7).abs() < 1e-15);
        assert!((d.nonevents.mean.unwrap() - 0.3).abs() < 1e-15);
        assert!((d.mean_difference().unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(d.events.histogram.iter().sum::<usize>(), 2);
    }

    #[test]
    fn constant_distribution_has_zero_width() {
        let s = PredictionSample::new(vec![0.25; 4], vec![true, false, true, false]).unwrap();
        let d = risk_distribution(&s, &DistributionSettings::default()).unwrap();
        assert!(d.events.quantiles.iter().all(|&(_, v)| v == 0.25));
        assert!(d.events.density.is_empty());
        let single = PredictionSample::new(vec![0.25, 0.5], vec![true, true]).unwrap();
        let d = risk_distribution(&single, &DistributionSettings::default()).unwrap();
        assert_eq!(d.nonevents.mean, None);
    }
}
