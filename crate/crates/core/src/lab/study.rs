use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::calibration::{
    calibration_summaries, fit_calibration_intercept, fit_calibration_slope, oe_ratio,
    CalibrationSettings,
};
use crate::curves::{risk_distribution, DistributionSettings, QUANTILE_LEVELS};
use crate::data::{ClampPolicy, PartialAucBand, PredictionSample};
use crate::error::{Error, Result};
use crate::lab::simulate::{generate_dataset, stream_id, SimulationSpec};
use crate::lab::variants::{apply_variant, VariantContext, VariantId, VariantInput};
use crate::measures::MeasureId;
use crate::metrics::{
    auroc_from_sweep, average_precision_from_sweep, min_expected_cost_from_sweep, net_benefit,
    overall_measures, partial_auroc_from_sweep, partial_classification, summary_classification,
    ConfusionCounts, ThresholdSweep,
};
use crate::rng::stream_rng;

/// Which decision threshold a classification column uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyThreshold {
    /// The configured clinically relevant threshold.
    Primary,
    TruePrevalence,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StudyColumn {
    pub measure: MeasureId,
    pub threshold: Option<StudyThreshold>,
}

impl StudyColumn {
    pub fn key(&self) -> String {
        match self.threshold {
            None | Some(StudyThreshold::Primary) => self.measure.as_str().to_string(),
            Some(StudyThreshold::TruePrevalence) => format!("{}@prevalence", self.measure),
            Some(StudyThreshold::Half) => format!("{}@0.5", self.measure),
        }
    }

    /// Columns of the main table (threshold measures at the primary
    /// threshold) followed by the summary classification measures at the
    /// true prevalence and at 0.5.
    pub fn all() -> Vec<StudyColumn> {
        use MeasureId::*;
        let main = [
            Loglikelihood,
            Logloss,
            Brier,
            ScaledBrier,
            McFaddenR2,
            CoxSnellR2,
            NagelkerkeR2,
            DiscriminationSlope,
            Mape,
            Auroc,
            AveragePrecision,
            PartialAuroc,
            OeRatio,
            CalibrationIntercept,
            CalibrationSlope,
            Eci,
            Ici,
            Ece,
            Accuracy,
            BalancedAccuracy,
            Youden,
            DiagnosticOddsRatio,
            Kappa,
            F1,
            Mcc,
            Sensitivity,
            Specificity,
            Ppv,
            Npv,
            NetBenefit,
            StandardizedNetBenefit,
            ExpectedCost,
        ];
        let summary = [
            Accuracy,
            BalancedAccuracy,
            Youden,
            DiagnosticOddsRatio,
            Kappa,
            F1,
            Mcc,
        ];
        let mut cols: Vec<StudyColumn> = main
            .iter()
            .map(|&m| StudyColumn {
                measure: m,
                threshold: m.needs_threshold().then_some(StudyThreshold::Primary),
            })
            .collect();
        for t in [StudyThreshold::TruePrevalence, StudyThreshold::Half] {
            cols.extend(summary.iter().map(|&m| StudyColumn {
                measure: m,
                threshold: Some(t),
            }));
        }
        cols
    }

    pub fn in_main_table(&self) -> bool {
        matches!(self.threshold, None | Some(StudyThreshold::Primary))
    }
}

/// Mean of one measure over datasets for one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSummary {
    pub mean: Option<f64>,
    /// Standard deviation over datasets divided by the square root of `n_used`.
    pub mc_se: Option<f64>,
    pub n_used: usize,
    /// Datasets where the measure was undefined, failed, or infinite.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct DatasetResult {
    prevalence: f64,
    /// Per variant: mean estimated probability.
    mean_probability: Vec<f64>,
    /// `variant_index * columns + column`.
    values: Vec<Option<f64>>,
    /// Estimated probabilities per variant, kept for the first dataset only.
    probabilities: Option<Vec<Vec<f64>>>,
    outcomes: Option<Vec<bool>>,
}

/// Per-dataset measure values of the properness study.
#[derive(Debug, Clone, PartialEq)]
pub struct PropernessStudy {
    pub spec: SimulationSpec,
    pub true_prevalence: f64,
    pub columns: Vec<StudyColumn>,
    datasets: Vec<DatasetResult>,
}

struct Plan {
    columns: Vec<StudyColumn>,
    thresholds: [f64; 3],
    ctx: VariantContext,
    calibration: CalibrationSettings,
}

pub fn run_properness_study(spec: &SimulationSpec) -> Result<PropernessStudy> {
    spec.validate()?;
    if spec.variants.is_empty() {
        return Err(Error::InvalidArgument("no variants selected".into()));
    }
    let true_prevalence = spec.true_prevalence();
    let plan = Plan {
        columns: StudyColumn::all(),
        thresholds: [spec.threshold, true_prevalence, 0.5],
        ctx: VariantContext {
            intercept: spec.intercept,
            wrong_coefficients: spec.wrong_coefficients.clone(),
            true_prevalence,
            literal_square: spec.literal_square,
            shrink_factor: spec.shrink_factor,
        },
        calibration: CalibrationSettings::default(),
    };
    let datasets = (0..spec.n_datasets)
        .into_par_iter()
        .map(|d| run_dataset(spec, &plan, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(PropernessStudy {
        spec: spec.clone(),
        true_prevalence,
        columns: plan.columns,
        datasets,
    })
}

fn run_dataset(spec: &SimulationSpec, plan: &Plan, index: usize) -> Result<DatasetResult> {
    let data = generate_dataset(spec, index)?;
    let input = VariantInput {
        true_probabilities: &data.true_probabilities,
        predictors: Some(&data.predictors),
    };
    let mut values = Vec::with_capacity(spec.variants.len() * plan.columns.len());
    let mut mean_probability = Vec::with_capacity(spec.variants.len());
    let keep = index == 0;
    let mut kept = Vec::new();
    for &variant in &spec.variants {
        let mut rng = stream_rng(spec.master_seed, stream_id(index, variant.get() as u64));
        let p = apply_variant(input, variant, &plan.ctx, &mut rng)?;
        mean_probability.push(p.iter().sum::<f64>() / p.len() as f64);
        let sample = PredictionSample::new(p, data.outcomes.clone())?;
        values.extend(measure_row(&sample, plan, spec));
        if keep {
            kept.push(sample.probabilities().to_vec());
        }
    }
    Ok(DatasetResult {
        prevalence: data.prevalence(),
        mean_probability,
        values,
        probabilities: keep.then_some(kept),
        outcomes: keep.then(|| data.outcomes.clone()),
    })
}

fn threshold_measure(measure: MeasureId, counts: &ConfusionCounts) -> Option<f64> {
    use MeasureId::*;
    let part = partial_classification(counts);
    let summary = summary_classification(counts);
    match measure {
        Accuracy => Some(summary.accuracy),
        BalancedAccuracy => summary.balanced_accuracy,
        Youden => summary.youden,
        DiagnosticOddsRatio => summary.dor,
        Kappa => summary.kappa,
        F1 => summary.f1,
        Mcc => summary.mcc,
        Sensitivity => part.sensitivity,
        Specificity => part.specificity,
        Ppv => part.ppv,
        Npv => part.npv,
        NetBenefit => Some(net_benefit(counts).nb),
        StandardizedNetBenefit => net_benefit(counts).snb,
        _ => None,
    }
}

fn measure_row(sample: &PredictionSample, plan: &Plan, spec: &SimulationSpec) -> Vec<Option<f64>> {
    use MeasureId::*;
    // extreme distortions can round to exactly 0 or 1
    let clamp = ClampPolicy::enabled();
    let overall = overall_measures(sample, clamp);
    let sweep = ThresholdSweep::new(sample);
    let counts = plan.thresholds.map(|t| sweep.confusion(t));
    let mut cal_cache = None;
    plan.columns
        .iter()
        .map(|col| {
            let t_index = match col.threshold {
                None | Some(StudyThreshold::Primary) => 0,
                Some(StudyThreshold::TruePrevalence) => 1,
                Some(StudyThreshold::Half) => 2,
            };
            match col.measure {
                Loglikelihood => overall.loglikelihood,
                Logloss => overall.logloss,
                Brier => Some(overall.brier),
                ScaledBrier => overall.scaled_brier,
                McFaddenR2 => overall.mcfadden_r2,
                CoxSnellR2 => overall.coxsnell_r2,
                NagelkerkeR2 => overall.nagelkerke_r2,
                DiscriminationSlope => overall.discrimination_slope,
                Mape => Some(overall.mape),
                Auroc => auroc_from_sweep(&sweep).ok(),
                AveragePrecision => average_precision_from_sweep(&sweep).ok(),
                PartialAuroc => partial_auroc_from_sweep(&sweep, PartialAucBand::default()).ok(),
                OeRatio => oe_ratio(sample).ok(),
                CalibrationIntercept => fit_calibration_intercept(sample, clamp).ok(),
                CalibrationSlope => fit_calibration_slope(sample, clamp).ok().map(|m| m.slope),
                Eci | Ici | Ece => {
                    let s = cal_cache
                        .get_or_insert_with(|| calibration_summaries(sample, &plan.calibration));
                    match col.measure {
                        Eci => s.eci.clone().ok(),
                        Ici => s.ici.clone().ok(),
                        _ => s.ece.clone().ok(),
                    }
                }
                ExpectedCost => Some(min_expected_cost_from_sweep(&sweep, &spec.ec_costs).ec_min),
                m => threshold_measure(m, &counts[t_index]),
            }
        })
        .collect()
}

impl PropernessStudy {
    pub fn variants(&self) -> &[VariantId] {
        &self.spec.variants
    }

    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn column_index(
        &self,
        measure: MeasureId,
        threshold: Option<StudyThreshold>,
    ) -> Option<usize> {
        let threshold = match threshold {
            None if measure.needs_threshold() => Some(StudyThreshold::Primary),
            t => t,
        };
        self.columns
            .iter()
            .position(|c| c.measure == measure && c.threshold == threshold)
    }

    fn variant_index(&self, variant: VariantId) -> Option<usize> {
        self.spec.variants.iter().position(|&v| v == variant)
    }

    /// Value of column `col` for `variant` in every dataset.
    pub fn dataset_values(&self, variant: VariantId, col: usize) -> Vec<Option<f64>> {
        let Some(v) = self.variant_index(variant) else {
            return Vec::new();
        };
        let stride = self.columns.len();
        self.datasets
            .iter()
            .map(|d| d.values[v * stride + col])
            .collect()
    }

    pub fn summary(&self, variant: VariantId, col: usize) -> MeasureSummary {
        let values = self.dataset_values(variant, col);
        let used: Vec<f64> = values
            .iter()
            .flatten()
            .copied()
            .filter(|v| v.is_finite())
            .collect();
        let (mean, mc_se) = mean_and_se(&used);
        MeasureSummary {
            mean,
            mc_se,
            n_used: used.len(),
            n_excluded: values.len() - used.len(),
        }
    }

    /// Mean of `b - a` over datasets where both are finite, with its Monte
    /// Carlo standard error.
    pub fn paired_difference(
        &self,
        col: usize,
        a: VariantId,
        b: VariantId,
    ) -> (Option<f64>, Option<f64>, usize) {
        let va = self.dataset_values(a, col);
        let vb = self.dataset_values(b, col);
        let diffs: Vec<f64> = va
            .iter()
            .zip(&vb)
            .filter_map(|(x, y)| match (x, y) {
                (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some(y - x),
                _ => None,
            })
            .collect();
        let (mean, se) = mean_and_se(&diffs);
        (mean, se, diffs.len())
    }

    pub fn mean_prevalence(&self) -> f64 {
        self.datasets.iter().map(|d| d.prevalence).sum::<f64>() / self.datasets.len() as f64
    }

    /// Mean over datasets of the average estimated probability of `variant`
    /// minus that of the true model.
    pub fn mean_probability_shift(&self, variant: VariantId) -> Option<f64> {
        let v = self.variant_index(variant)?;
        let t = self.variant_index(VariantId::TRUE_MODEL)?;
        let n = self.datasets.len() as f64;
        Some(
            self.datasets
                .iter()
                .map(|d| d.mean_probability[v] - d.mean_probability[t])
                .sum::<f64>()
                / n,
        )
    }

    /// Estimated probabilities of the first dataset under `variant`, with
    /// its outcomes.
    pub fn first_dataset(&self, variant: VariantId) -> Option<PredictionSample> {
        let v = self.variant_index(variant)?;
        let d = self.datasets.first()?;
        PredictionSample::new(d.probabilities.as_ref()?[v].clone(), d.outcomes.clone()?).ok()
    }

    fn threshold_value(&self, t: Option<StudyThreshold>) -> Option<f64> {
        match t? {
            StudyThreshold::Primary => Some(self.spec.threshold),
            StudyThreshold::TruePrevalence => Some(self.true_prevalence),
            StudyThreshold::Half => Some(0.5),
        }
    }

    fn variant_header(&self) -> String {
        self.spec
            .variants
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn mean_cells(&self, col: usize) -> String {
        self.spec
            .variants
            .iter()
            .map(|&v| self.summary(v, col).mean.map(fixed).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Per-variant means of the main measures, one row per measure.
    pub fn write_main_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "measure,{}", self.variant_header()).map_err(io_err)?;
        for (k, c) in self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.in_main_table())
        {
            writeln!(out, "{},{}", c.key(), self.mean_cells(k)).map_err(io_err)?;
        }
        Ok(())
    }

    /// Per-variant means of the summary classification measures at the true
    /// prevalence and at 0.5.
    pub fn write_threshold_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "measure,threshold,{}", self.variant_header()).map_err(io_err)?;
        for (k, c) in self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.in_main_table())
        {
            let t = self
                .threshold_value(c.threshold)
                .map(fixed)
                .unwrap_or_default();
            writeln!(out, "{},{},{}", c.measure, t, self.mean_cells(k)).map_err(io_err)?;
        }
        Ok(())
    }

    /// Long format: variant, measure, threshold, mean, mc_se, n_used, n_excluded.
    pub fn write_detail<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "variant,measure,threshold,mean,mc_se,n_used,n_excluded"
        )
        .map_err(io_err)?;
        for &v in &self.spec.variants {
            for (k, c) in self.columns.iter().enumerate() {
                let s = self.summary(v, k);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    v,
                    c.measure,
                    self.threshold_value(c.threshold)
                        .map(fixed)
                        .unwrap_or_default(),
                    s.mean.map(fixed).unwrap_or_default(),
                    s.mc_se.map(fixed).unwrap_or_default(),
                    s.n_used,
                    s.n_excluded
                )
                .map_err(io_err)?;
            }
        }
        Ok(())
    }

    /// Estimated probabilities of the first dataset: variant, outcome, probability.
    pub fn write_risk_values<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "variant,outcome,probability").map_err(io_err)?;
        for &v in &self.spec.variants {
            if let Some(s) = self.first_dataset(v) {
                for (p, y) in s.probabilities().iter().zip(s.events()) {
                    writeln!(out, "{},{},{}", v, *y as u8, fixed(*p)).map_err(io_err)?;
                }
            }
        }
        Ok(())
    }

    /// Per-class quantiles and means of the first dataset's probabilities.
    pub fn write_risk_summary<W: Write>(&self, mut out: W) -> Result<()> {
        let q: Vec<String> = QUANTILE_LEVELS
            .iter()
            .map(|l| format!("q{:02}", (l * 100.0).round()))
            .collect();
        writeln!(out, "variant,class,n,mean,{}", q.join(",")).map_err(io_err)?;
        for &v in &self.spec.variants {
            let Some(s) = self.first_dataset(v) else {
                continue;
            };
            let dist = risk_distribution(&s, &DistributionSettings::default())?;
            for class in [&dist.events, &dist.nonevents] {
                let qs: Vec<String> = if class.quantiles.is_empty() {
                    vec![String::new(); QUANTILE_LEVELS.len()]
                } else {
                    class.quantiles.iter().map(|&(_, x)| fixed(x)).collect()
                };
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    v,
                    class.class,
                    class.n,
                    class.mean.map(fixed).unwrap_or_default(),
                    qs.join(",")
                )
                .map_err(io_err)?;
            }
        }
        Ok(())
    }

    /// Kernel densities of the first dataset per variant and class.
    pub fn write_risk_density<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "variant,p,density_event,density_nonevent").map_err(io_err)?;
        for &v in &self.spec.variants {
            let Some(s) = self.first_dataset(v) else {
                continue;
            };
            let dist = risk_distribution(&s, &DistributionSettings::default())?;
            for (k, &x) in dist.grid.iter().enumerate() {
                let e = dist
                    .events
                    .density
                    .get(k)
                    .copied()
                    .map(fixed)
                    .unwrap_or_default();
                let n = dist
                    .nonevents
                    .density
                    .get(k)
                    .copied()
                    .map(fixed)
                    .unwrap_or_default();
                writeln!(out, "{},{},{},{}", v, fixed(x), e, n).map_err(io_err)?;
            }
        }
        Ok(())
    }
}

fn mean_and_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = (values.len() > 1).then(|| {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    (Some(mean), se)
}

pub(crate) fn fixed(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub(crate) fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: "<study output>".into(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimulationSpec {
        SimulationSpec {
            n_datasets: 3,
            n_per_dataset: 300,
            ..Default::default()
        }
    }

    #[test]
    fn columns_cover_every_measure() {
        let cols = StudyColumn::all();
        for &m in MeasureId::ALL {
            assert!(cols.iter().any(|c| c.measure == m), "{m}");
        }
        assert_eq!(cols.iter().filter(|c| !c.in_main_table()).count(), 14);
    }

    #[test]
    fn small_study_runs_and_preserves_ranks() {
        let study = run_properness_study(&small()).unwrap();
        assert_eq!(study.n_datasets(), 3);
        let auc = study.column_index(MeasureId::Auroc, None).unwrap();
        let truth = study.dataset_values(VariantId::TRUE_MODEL, auc);
        for v in 2..=9 {
            assert_eq!(
                study.dataset_values(VariantId::new(v).unwrap(), auc),
                truth,
                "variant {v}"
            );
        }
        let mut buf = Vec::new();
        study.write_main_table(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("measure,1,2,3,4,5,6,7,8,9,10,11\n"));
        assert_eq!(text.lines().count(), 33);
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(-1e-9), "0.000000");
        assert_eq!(fixed(0.5), "0.500000");
        assert_eq!(fixed(f64::INFINITY), "inf");
    }
}
