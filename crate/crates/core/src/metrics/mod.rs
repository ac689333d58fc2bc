//! Scalar performance measures: discrimination, overall, classification and
//! clinical utility. Calibration measures live in [`crate::calibration`].

mod confusion;
mod discrimination;
mod overall;
mod sweep;
mod utility;

pub use confusion::{
    confusion_at_threshold, partial_classification, summary_classification, summary_from_cells,
    ConfusionCounts, PartialMeasures, SummaryMeasures,
};
pub use discrimination::{
    auroc, auroc_from_sweep, average_precision, average_precision_from_sweep, partial_auroc,
    partial_auroc_from_sweep, partial_auroc_rescaled,
};
pub use overall::{overall_measures, OverallMeasures};
pub use sweep::{SweepPoint, ThresholdSweep};
pub use utility::{
    expected_cost, min_expected_cost, min_expected_cost_from_sweep, net_benefit, CostOptimum,
    CostStrategy, NetBenefit,
};
