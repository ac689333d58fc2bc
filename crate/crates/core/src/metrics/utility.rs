use serde::Serialize;

use crate::data::{CostSpec, PredictionSample};
use crate::metrics::{ConfusionCounts, ThresholdSweep};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetBenefit {
    pub nb: f64,
    /// Net benefit divided by prevalence; `None` without events.
    pub snb: Option<f64>,
    pub nb_all: f64,
    pub nb_none: f64,
    pub snb_all: Option<f64>,
}

/// Net benefit of the classification in `counts`, and of the treat-all and
/// treat-none strategies, at the threshold stored in `counts`.
///
/// Panics if the stored threshold is not inside (0, 1).
pub fn net_benefit(counts: &ConfusionCounts) -> NetBenefit {
    let t = counts.threshold;
    assert!(
        t > 0.0 && t < 1.0,
        "net benefit needs a threshold in (0, 1), got {t}"
    );
    let odds = t / (1.0 - t);
    let n = counts.total() as f64;
    let prevalence = counts.events() as f64 / n;
    let nb = counts.true_pos as f64 / n - counts.false_pos as f64 / n * odds;
    let nb_all = counts.events() as f64 / n - counts.nonevents() as f64 / n * odds;
    let has_events = counts.events() > 0;
    NetBenefit {
        nb,
        snb: has_events.then(|| nb / prevalence),
        nb_all,
        nb_none: 0.0,
        snb_all: has_events.then(|| nb_all / prevalence),
    }
}

/// Cost-weighted fractions of false negatives and false positives.
pub fn expected_cost(counts: &ConfusionCounts, costs: &CostSpec) -> f64 {
    let n = counts.total() as f64;
    counts.false_neg as f64 / n * costs.cost_fn + counts.false_pos as f64 / n * costs.cost_fp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "strategy", content = "threshold", rename_all = "snake_case")]
pub enum CostStrategy {
    TreatAll,
    /// Classify `p >= threshold` as high risk.
    Threshold(f64),
    TreatNone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostOptimum {
    pub ec_min: f64,
    pub strategy: CostStrategy,
    pub counts: ConfusionCounts,
}

impl CostOptimum {
    /// Threshold achieving the minimum: 0 for treat-all, +inf for treat-none.
    pub fn t_star(&self) -> f64 {
        match self.strategy {
            CostStrategy::TreatAll => 0.0,
            CostStrategy::Threshold(t) => t,
            CostStrategy::TreatNone => f64::INFINITY,
        }
    }
}

/// Minimum expected cost over treat-all, every distinct observed probability
/// used as threshold, and treat-none. Ties resolve to the smallest threshold.
pub fn min_expected_cost(sample: &PredictionSample, costs: &CostSpec) -> CostOptimum {
    min_expected_cost_from_sweep(&ThresholdSweep::new(sample), costs)
}

pub fn min_expected_cost_from_sweep(sweep: &ThresholdSweep, costs: &CostSpec) -> CostOptimum {
    let points = sweep.points();
    let last = points.len() - 1;
    let mut best: Option<CostOptimum> = None;
    for (i, p) in points.into_iter().enumerate() {
        let counts: ConfusionCounts = p.into();
        let ec = expected_cost(&counts, costs);
        if best.is_none_or(|b| ec < b.ec_min) {
            let strategy = match i {
                0 => CostStrategy::TreatAll,
                i if i == last => CostStrategy::TreatNone,
                _ => CostStrategy::Threshold(p.threshold),
            };
            best = Some(CostOptimum {
                ec_min: ec,
                strategy,
                counts,
            });
        }
    }
    best.expect("a sweep always has the two trivial strategies")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d4_net_benefit_at_0_3() {
        let c = ConfusionCounts::new(2, 1, 1, 0, 0.3);
        let nb = net_benefit(&c);
        assert!((nb.nb - (0.5 - 0.25 * 3.0 / 7.0)).abs() < 1e-15);
        assert!((nb.nb_all - (0.5 - 0.5 * 3.0 / 7.0)).abs() < 1e-15);
        assert_eq!(nb.nb_none, 0.0);
    }

    #[test]
    fn adnex_net_benefit() {
        let nb = net_benefit(&ConfusionCounts::new(414, 164, 296, 20, 0.10));
        assert!((nb.nb - 0.443).abs() < 5e-4);
        assert!((nb.snb.unwrap() - 0.912).abs() < 5e-4);
    }

    #[test]
    fn perfect_classifier_net_benefit_is_prevalence() {
        for t in [0.05, 0.3, 0.8] {
            let nb = net_benefit(&ConfusionCounts::new(3, 0, 7, 0, t));
            assert!((nb.nb - 0.3).abs() < 1e-15);
            assert!((nb.snb.unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn treat_all_is_zero_at_prevalence() {
        let nb = net_benefit(&ConfusionCounts::new(3, 7, 0, 0, 0.3));
        assert!(nb.nb_all.abs() < 1e-15);
    }

    #[test]
    fn expected_cost_d4() {
        let c = ConfusionCounts::new(2, 1, 1, 0, 0.3);
        let costs = CostSpec::new(9.0, 1.0).unwrap();
        assert!((expected_cost(&c, &costs) - 0.25).abs() < 1e-15);
        assert_eq!(
            expected_cost(&ConfusionCounts::new(2, 0, 2, 0, 0.5), &costs),
            0.0
        );
    }

    #[test]
    fn min_cost_on_separated_sample() {
        let s = PredictionSample::new(vec![0.1, 0.2, 0.7, 0.9], vec![false, false, true, true])
            .unwrap();
        let opt = min_expected_cost(&s, &CostSpec::new(9.0, 1.0).unwrap());
        assert_eq!(opt.ec_min, 0.0);
        assert_eq!(opt.strategy, CostStrategy::Threshold(0.7));
    }

    #[test]
    fn min_cost_trivial_strategies() {
        let s = PredictionSample::new(vec![0.5, 0.5], vec![false, true]).unwrap();
        // FN very costly: treat all (ties with threshold 0.5 resolve to treat-all)
        let opt = min_expected_cost(&s, &CostSpec::new(9.0, 1.0).unwrap());
        assert_eq!(opt.strategy, CostStrategy::TreatAll);
        // FP very costly: treat none
        let opt = min_expected_cost(&s, &CostSpec::new(1.0, 9.0).unwrap());
        assert_eq!(opt.strategy, CostStrategy::TreatNone);
        assert_eq!(opt.t_star(), f64::INFINITY);
    }
}
