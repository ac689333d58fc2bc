use crate::calibration::{
    calibration_summaries, fit_calibration_intercept, fit_calibration_slope, oe_ratio,
    CalibrationSettings, CalibrationSummaries,
};
use crate::data::{
    validate_for_measure, ClampPolicy, CostSpec, PartialAucBand, PredictionSample, Verdict,
};
use crate::measures::MeasureId;
use crate::metrics::{
    auroc_from_sweep, average_precision_from_sweep, min_expected_cost_from_sweep, net_benefit,
    overall_measures, partial_auroc_from_sweep, partial_classification, summary_classification,
    OverallMeasures, ThresholdSweep,
};

/// One requested value: a measure, at a threshold when it needs one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Request {
    pub measure: MeasureId,
    pub threshold: Option<f64>,
}

impl Request {
    pub fn key(&self, primary: Option<f64>) -> String {
        match self.threshold {
            Some(t) if Some(t) != primary => format!("{}@{t}", self.measure),
            _ => self.measure.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MeasureContext {
    pub clamp: ClampPolicy,
    pub band: PartialAucBand,
    pub calibration: CalibrationSettings,
    pub costs: Option<CostSpec>,
}

const NO_THRESHOLD: &str =
    "no decision threshold supplied; thresholds are never selected automatically";

/// Values for `requests` on `sample`; each failure carries its reason.
pub(crate) fn compute(
    sample: &PredictionSample,
    ctx: &MeasureContext,
    requests: &[Request],
) -> Vec<Result<f64, String>> {
    let mut cache = Cache {
        sample,
        ctx,
        sweep: None,
        overall: None,
        calibration: None,
    };
    requests.iter().map(|r| cache.value(*r)).collect()
}

struct Cache<'a> {
    sample: &'a PredictionSample,
    ctx: &'a MeasureContext,
    sweep: Option<ThresholdSweep>,
    overall: Option<OverallMeasures>,
    calibration: Option<CalibrationSummaries>,
}

fn defined(v: Option<f64>, reason: &str) -> Result<f64, String> {
    v.ok_or_else(|| reason.to_string())
}

impl Cache<'_> {
    fn sweep(&mut self) -> &ThresholdSweep {
        self.sweep
            .get_or_insert_with(|| ThresholdSweep::new(self.sample))
    }

    fn overall(&mut self) -> OverallMeasures {
        *self
            .overall
            .get_or_insert_with(|| overall_measures(self.sample, self.ctx.clamp))
    }

    fn value(&mut self, r: Request) -> Result<f64, String> {
        use MeasureId::*;
        match validate_for_measure(self.sample, r.measure, self.ctx.clamp) {
            Verdict::Computable => {}
            Verdict::RequiresClamping(why) | Verdict::Undefined(why) => return Err(why),
        }
        let clamp = self.ctx.clamp;
        let sample = self.sample;
        let err = |e: crate::error::Error| e.to_string();
        match r.measure {
            Auroc => auroc_from_sweep(self.sweep()).map_err(err),
            AveragePrecision => average_precision_from_sweep(self.sweep()).map_err(err),
            PartialAuroc => {
                let band = self.ctx.band;
                partial_auroc_from_sweep(self.sweep(), band).map_err(err)
            }
            OeRatio => oe_ratio(sample).map_err(err),
            CalibrationIntercept => fit_calibration_intercept(sample, clamp).map_err(err),
            CalibrationSlope => fit_calibration_slope(sample, clamp)
                .map(|m| m.slope)
                .map_err(err),
            Eci | Ici | Ece => {
                let settings = self.ctx.calibration;
                let s = self
                    .calibration
                    .get_or_insert_with(|| calibration_summaries(sample, &settings));
                match r.measure {
                    Eci => s.eci.clone(),
                    Ici => s.ici.clone(),
                    _ => s.ece.clone(),
                }
            }
            Loglikelihood => defined(self.overall().loglikelihood, "undefined"),
            Logloss => defined(self.overall().logloss, "undefined"),
            Brier => Ok(self.overall().brier),
            ScaledBrier => defined(self.overall().scaled_brier, "requires both outcome classes"),
            McFaddenR2 => defined(self.overall().mcfadden_r2, "undefined"),
            CoxSnellR2 => defined(self.overall().coxsnell_r2, "undefined"),
            NagelkerkeR2 => defined(self.overall().nagelkerke_r2, "undefined"),
            DiscriminationSlope => defined(
                self.overall().discrimination_slope,
                "requires both outcome classes",
            ),
            Mape => Ok(self.overall().mape),
            ExpectedCost => {
                let costs = self
                    .ctx
                    .costs
                    .ok_or("no misclassification costs and no threshold to derive them from")?;
                Ok(min_expected_cost_from_sweep(self.sweep(), &costs).ec_min)
            }
            m => {
                let t = r.threshold.ok_or(NO_THRESHOLD)?;
                let counts = self.sweep().confusion(t);
                let part = partial_classification(&counts);
                let summary = summary_classification(&counts);
                let v = match m {
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
                    NetBenefit => Some(net_benefit(&counts).nb),
                    StandardizedNetBenefit => net_benefit(&counts).snb,
                    _ => unreachable!("threshold-free measures are handled above"),
                };
                defined(v, "zero denominator at this threshold")
            }
        }
    }
}
