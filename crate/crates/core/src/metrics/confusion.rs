use serde::{Deserialize, Serialize};

use crate::data::{PredictionSample, Threshold};

/// Cross-tabulation of classifications and outcomes at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
    pub threshold: f64,
}

impl ConfusionCounts {
    pub fn new(
        true_pos: usize,
        false_pos: usize,
        true_neg: usize,
        false_neg: usize,
        threshold: f64,
    ) -> Self {
        Self {
            true_pos,
            false_pos,
            true_neg,
            false_neg,
            threshold,
        }
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn events(&self) -> usize {
        self.true_pos + self.false_neg
    }

    pub fn nonevents(&self) -> usize {
        self.true_neg + self.false_pos
    }

    pub fn high_risk(&self) -> usize {
        self.true_pos + self.false_pos
    }

    pub fn low_risk(&self) -> usize {
        self.true_neg + self.false_neg
    }

    pub fn prevalence(&self) -> f64 {
        self.events() as f64 / self.total() as f64
    }
}

/// Counts at `t`; a probability equal to the threshold is high risk.
pub fn confusion_at_threshold(sample: &PredictionSample, t: Threshold) -> ConfusionCounts {
    let t = t.value();
    let mut c = ConfusionCounts::new(0, 0, 0, 0, t);
    for (&p, &e) in sample.probabilities().iter().zip(sample.events()) {
        match (p >= t, e) {
            (true, true) => c.true_pos += 1,
            (true, false) => c.false_pos += 1,
            (false, false) => c.true_neg += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    c
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialMeasures {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

pub fn partial_classification(c: &ConfusionCounts) -> PartialMeasures {
    PartialMeasures {
        sensitivity: ratio(c.true_pos, c.events()),
        specificity: ratio(c.true_neg, c.nonevents()),
        ppv: ratio(c.true_pos, c.high_risk()),
        npv: ratio(c.true_neg, c.low_risk()),
    }
}

/// Summary classification measures. `None` marks an undefined value; the
/// diagnostic odds ratio is `f64::INFINITY` when `fp * fn = 0 < tp * tn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryMeasures {
    pub accuracy: f64,
    pub balanced_accuracy: Option<f64>,
    pub youden: Option<f64>,
    pub dor: Option<f64>,
    pub kappa: Option<f64>,
    pub f1: Option<f64>,
    pub mcc: Option<f64>,
}

pub fn summary_classification(c: &ConfusionCounts) -> SummaryMeasures {
    summary_from_cells(
        c.true_pos as f64,
        c.false_pos as f64,
        c.true_neg as f64,
        c.false_neg as f64,
    )
}

/// Summary measures from cell counts or from cell fractions summing to one.
pub fn summary_from_cells(tp: f64, fp: f64, tn: f64, fneg: f64) -> SummaryMeasures {
    let n = tp + fp + tn + fneg;
    let sensitivity = (tp + fneg > 0.0).then(|| tp / (tp + fneg));
    let specificity = (tn + fp > 0.0).then(|| tn / (tn + fp));
    let both = sensitivity.zip(specificity);
    let balanced_accuracy = both.map(|(se, sp)| 0.5 * se + 0.5 * sp);
    let youden = both.map(|(se, sp)| se + sp - 1.0);

    let dor = if fp * fneg > 0.0 {
        Some(tp * tn / (fp * fneg))
    } else if tp * tn > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    };

    let chance = (tp + fp) * (tp + fneg) + (fp + tn) * (fneg + tn);
    let kappa_den = n * n - chance;
    let kappa = (kappa_den != 0.0).then(|| (n * (tp + tn) - chance) / kappa_den);

    let f1_den = 2.0 * tp + fp + fneg;
    let f1 = (f1_den > 0.0).then(|| 2.0 * tp / f1_den);

    let margins = (tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg);
    let mcc = (margins > 0.0).then(|| (tp * tn - fp * fneg) / margins.sqrt());

    SummaryMeasures {
        accuracy: (tp + tn) / n,
        balanced_accuracy,
        youden,
        dor,
        kappa,
        f1,
        mcc,
    }
}
