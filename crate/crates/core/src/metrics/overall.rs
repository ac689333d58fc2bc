use serde::Serialize;

use crate::data::{ClampPolicy, PredictionSample};

/// Overall performance measures. Loglikelihood-based entries are `None` when a
/// probability of exactly 0 or 1 is present and clamping is off; entries that
/// need both outcome classes are `None` for single-class samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverallMeasures {
    /// Summed over individuals.
    pub loglikelihood: Option<f64>,
    /// Negative loglikelihood averaged over individuals.
    pub logloss: Option<f64>,
    pub brier: f64,
    pub scaled_brier: Option<f64>,
    pub mcfadden_r2: Option<f64>,
    pub coxsnell_r2: Option<f64>,
    pub nagelkerke_r2: Option<f64>,
    pub discrimination_slope: Option<f64>,
    pub mape: f64,
}

pub fn overall_measures(sample: &PredictionSample, clamp: ClampPolicy) -> OverallMeasures {
    let n = sample.len() as f64;
    let p = sample.probabilities();
    let y = sample.events();
    let ybar = sample.prevalence();

    let mut sq = 0.0;
    let mut abs = 0.0;
    let mut sum_p_events = 0.0;
    let mut sum_p_nonevents = 0.0;
    let mut loglik = Some(0.0);
    for (&pi, &ei) in p.iter().zip(y) {
        let yi = if ei { 1.0 } else { 0.0 };
        sq += (pi - yi) * (pi - yi);
        abs += (pi - yi).abs();
        if ei {
            sum_p_events += pi;
        } else {
            sum_p_nonevents += pi;
        }
        loglik = match (loglik, clamp.apply(pi)) {
            (Some(acc), Some(q)) => Some(acc + if ei { q.ln() } else { (1.0 - q).ln() }),
            _ => None,
        };
    }
    let brier = sq / n;
    let both = sample.has_both_classes();

    let brier_null = ybar * (1.0 - ybar);
    let scaled_brier = both.then(|| 1.0 - brier / brier_null);

    let n_events = sample.n_events() as f64;
    let n_nonevents = sample.n_nonevents() as f64;
    let discrimination_slope =
        both.then(|| sum_p_events / n_events - sum_p_nonevents / n_nonevents);

    let l0 = both.then(|| n_events * ybar.ln() + n_nonevents * (1.0 - ybar).ln());
    let pair = loglik.zip(l0);
    let mcfadden_r2 = pair.map(|(lm, l0)| 1.0 - lm / l0);
    let coxsnell_r2 = pair.map(|(lm, l0)| 1.0 - (2.0 * (l0 - lm) / n).exp());
    let nagelkerke_r2 =
        pair.map(|(lm, l0)| (1.0 - (2.0 * (l0 - lm) / n).exp()) / (1.0 - (2.0 * l0 / n).exp()));

    OverallMeasures {
        loglikelihood: loglik,
        logloss: loglik.map(|l| -l / n),
        brier,
        scaled_brier,
        mcfadden_r2,
        coxsnell_r2,
        nagelkerke_r2,
        discrimination_slope,
        mape: abs / n,
    }
}
