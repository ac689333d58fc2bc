//! Catalog of the 32 performance measures with their stable identifiers,
//! domains, properness status and reporting guidance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Discrimination,
    Calibration,
    Overall,
    Classification,
    ClinicalUtility,
}

impl Domain {
    pub const ALL: [Domain; 5] = [
        Domain::Discrimination,
        Domain::Calibration,
        Domain::Overall,
        Domain::Classification,
        Domain::ClinicalUtility,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Discrimination => "discrimination",
            Domain::Calibration => "calibration",
            Domain::Overall => "overall",
            Domain::Classification => "classification",
            Domain::ClinicalUtility => "clinical_utility",
        }
    }
}

/// Whether the expected value of a measure is optimized by the correct
/// probabilities: uniquely (strictly proper), not uniquely (semi-proper), or
/// not at all (improper).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Properness {
    StrictlyProper,
    SemiProper,
    Improper,
}

impl Properness {
    /// The `++` / `+` / `-` coding used in the overview table.
    pub fn symbol(self) -> &'static str {
        match self {
            Properness::StrictlyProper => "++",
            Properness::SemiProper => "+",
            Properness::Improper => "-",
        }
    }
}

/// Whether a measure focuses cleanly on either statistical or decision-analytic
/// performance, or mixes the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus {
    Clear,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guidance {
    Recommended,
    Optional,
    DescriptiveInPairs,
    Inadvisable,
}

impl Guidance {
    pub fn label(self) -> &'static str {
        match self {
            Guidance::Recommended => "Recommended",
            Guidance::Optional => "Not inadvisable, but not essential",
            Guidance::DescriptiveInPairs => "Not essential; descriptive when reported in pairs",
            Guidance::Inadvisable => "Inadvisable",
        }
    }
}

/// Which direction of a measure counts as better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    Higher,
    Lower,
    Target(f64),
}

impl Direction {
    /// True when `candidate` is strictly better than `reference`.
    pub fn improves(self, reference: f64, candidate: f64) -> bool {
        match self {
            Direction::Higher => candidate > reference,
            Direction::Lower => candidate < reference,
            Direction::Target(t) => (candidate - t).abs() < (reference - t).abs(),
        }
    }
}

macro_rules! measures {
    ($( $variant:ident => $id:literal, $label:literal, $domain:ident, $prop:ident, $focus:ident, $guide:ident, $dir:expr; )*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum MeasureId { $($variant),* }

        impl MeasureId {
            pub const ALL: &'static [MeasureId] = &[$(MeasureId::$variant),*];

            /// Stable snake_case identifier used on the command line and as JSON key.
            pub fn as_str(self) -> &'static str {
                match self { $(MeasureId::$variant => $id),* }
            }

            pub fn label(self) -> &'static str {
                match self { $(MeasureId::$variant => $label),* }
            }

            pub fn domain(self) -> Domain {
                match self { $(MeasureId::$variant => Domain::$domain),* }
            }

            pub fn properness(self) -> Properness {
                match self { $(MeasureId::$variant => Properness::$prop),* }
            }

            pub fn focus(self) -> Focus {
                match self { $(MeasureId::$variant => Focus::$focus),* }
            }

            pub fn guidance(self) -> Guidance {
                match self { $(MeasureId::$variant => Guidance::$guide),* }
            }

            pub fn direction(self) -> Direction {
                match self { $(MeasureId::$variant => $dir),* }
            }
        }

        impl FromStr for MeasureId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                match s {
                    $($id => Ok(MeasureId::$variant),)*
                    other => Err(Error::InvalidArgument(format!("unknown measure `{other}`"))),
                }
            }
        }
    };
}

use Direction::{Higher, Lower, Target};

measures! {
    Auroc => "auroc", "AUROC / c statistic", Discrimination, SemiProper, Clear, Recommended, Higher;
    AveragePrecision => "average_precision", "AUPRC / average precision", Discrimination, SemiProper, Mixed, Inadvisable, Higher;
    PartialAuroc => "partial_auroc", "Partial AUROC", Discrimination, SemiProper, Mixed, Inadvisable, Higher;
    OeRatio => "oe_ratio", "O:E ratio", Calibration, SemiProper, Clear, Optional, Target(1.0);
    CalibrationIntercept => "calibration_intercept", "Calibration intercept", Calibration, SemiProper, Clear, Optional, Target(0.0);
    CalibrationSlope => "calibration_slope", "Calibration slope", Calibration, SemiProper, Clear, Optional, Target(1.0);
    Eci => "eci", "Estimated calibration index", Calibration, StrictlyProper, Clear, Optional, Lower;
    Ici => "ici", "Integrated calibration index", Calibration, StrictlyProper, Clear, Optional, Lower;
    Ece => "ece", "Expected calibration error", Calibration, StrictlyProper, Clear, Optional, Lower;
    Loglikelihood => "loglikelihood", "Loglikelihood", Overall, StrictlyProper, Clear, Optional, Higher;
    Logloss => "logloss", "Logloss / cross-entropy", Overall, StrictlyProper, Clear, Optional, Lower;
    Brier => "brier", "Brier score", Overall, StrictlyProper, Clear, Optional, Lower;
    ScaledBrier => "scaled_brier", "Scaled Brier score", Overall, StrictlyProper, Clear, Optional, Higher;
    McFaddenR2 => "mcfadden_r2", "McFadden R-squared", Overall, StrictlyProper, Clear, Optional, Higher;
    CoxSnellR2 => "coxsnell_r2", "Cox-Snell R-squared", Overall, StrictlyProper, Clear, Optional, Higher;
    NagelkerkeR2 => "nagelkerke_r2", "Nagelkerke R-squared", Overall, StrictlyProper, Clear, Optional, Higher;
    DiscriminationSlope => "discrimination_slope", "Discrimination slope", Overall, Improper, Clear, Inadvisable, Higher;
    Mape => "mape", "Mean absolute prediction error", Overall, Improper, Clear, Inadvisable, Lower;
    Accuracy => "accuracy", "Classification accuracy", Classification, Improper, Clear, Inadvisable, Higher;
    BalancedAccuracy => "balanced_accuracy", "Balanced accuracy", Classification, Improper, Clear, Inadvisable, Higher;
    Youden => "youden", "Youden index", Classification, Improper, Clear, Inadvisable, Higher;
    DiagnosticOddsRatio => "dor", "Diagnostic odds ratio", Classification, Improper, Clear, Inadvisable, Higher;
    Kappa => "kappa", "Kappa", Classification, Improper, Clear, Inadvisable, Higher;
    F1 => "f1", "F1", Classification, Improper, Mixed, Inadvisable, Higher;
    Mcc => "mcc", "Matthews correlation coefficient", Classification, Improper, Clear, Inadvisable, Higher;
    Sensitivity => "sensitivity", "Sensitivity / recall", Classification, Improper, Clear, DescriptiveInPairs, Higher;
    Specificity => "specificity", "Specificity", Classification, Improper, Clear, DescriptiveInPairs, Higher;
    Ppv => "ppv", "Positive predictive value / precision", Classification, Improper, Clear, DescriptiveInPairs, Higher;
    Npv => "npv", "Negative predictive value", Classification, Improper, Clear, DescriptiveInPairs, Higher;
    NetBenefit => "net_benefit", "Net benefit", ClinicalUtility, SemiProper, Clear, Recommended, Higher;
    StandardizedNetBenefit => "standardized_net_benefit", "Standardized net benefit", ClinicalUtility, SemiProper, Clear, Recommended, Higher;
    ExpectedCost => "expected_cost", "Expected cost", ClinicalUtility, SemiProper, Clear, Recommended, Lower;
}

impl MeasureId {
    /// Measures that are always reported regardless of selection.
    pub const CORE: &'static [MeasureId] = &[MeasureId::Auroc, MeasureId::NetBenefit];

    pub fn needs_threshold(self) -> bool {
        matches!(
            self.domain(),
            Domain::Classification | Domain::ClinicalUtility
        ) && self != MeasureId::ExpectedCost
    }

    /// Advisory attached to measures whose use is discouraged.
    pub fn advisory(self) -> Option<String> {
        if self.guidance() != Guidance::Inadvisable {
            return None;
        }
        let why = match (self.properness(), self.focus()) {
            (Properness::Improper, Focus::Mixed) => {
                "improper at clinically relevant thresholds and mixes statistical with decision-analytic evaluation"
            }
            (Properness::Improper, _) => {
                "improper: an incorrect model can score better than the correct one"
            }
            _ => "mixes statistical with decision-analytic evaluation without explicit misclassification costs",
        };
        Some(format!("{}: Inadvisable ({why})", self.as_str()))
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for MeasureId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for MeasureId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_32_measures_split_across_domains() {
        assert_eq!(MeasureId::ALL.len(), 32);
        let count = |d| MeasureId::ALL.iter().filter(|m| m.domain() == d).count();
        assert_eq!(count(Domain::Discrimination), 3);
        assert_eq!(count(Domain::Calibration), 6);
        assert_eq!(count(Domain::Overall), 9);
        assert_eq!(count(Domain::Classification), 11);
        assert_eq!(count(Domain::ClinicalUtility), 3);
    }

    #[test]
    fn seventeen_measures_meet_both_characteristics() {
        let both = MeasureId::ALL
            .iter()
            .filter(|m| m.properness() != Properness::Improper && m.focus() == Focus::Clear)
            .count();
        assert_eq!(both, 17);
        let neither = MeasureId::ALL
            .iter()
            .filter(|m| m.properness() == Properness::Improper && m.focus() == Focus::Mixed)
            .collect::<Vec<_>>();
        assert_eq!(neither, vec![&MeasureId::F1]);
    }

    #[test]
    fn identifiers_round_trip() {
        for &m in MeasureId::ALL {
            assert_eq!(m.as_str().parse::<MeasureId>().unwrap(), m);
        }
        assert!("AUROC".parse::<MeasureId>().is_err());
    }

    #[test]
    fn advisory_only_for_inadvisable() {
        assert!(MeasureId::Auroc.advisory().is_none());
        assert!(MeasureId::Mape.advisory().unwrap().contains("Inadvisable"));
        assert!(MeasureId::Sensitivity.advisory().is_none());
    }

    #[test]
    fn target_direction() {
        assert!(Direction::Target(1.0).improves(1.228, 1.0));
        assert!(!Direction::Target(0.0).improves(0.1, -0.2));
    }
}
