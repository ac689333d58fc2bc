use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::uniform_open;
use crate::util::{expit, logit};

/// One of the eleven probability-distortion models; 1 is the true model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct VariantId(u8);

impl VariantId {
    pub const TRUE_MODEL: VariantId = VariantId(1);

    pub fn new(id: u8) -> Result<Self> {
        if (1..=11).contains(&id) {
            Ok(Self(id))
        } else {
            Err(Error::InvalidArgument(format!(
                "variant id must be 1..=11, got {id}"
            )))
        }
    }

    pub fn all() -> Vec<Self> {
        (1..=11).map(Self).collect()
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Whether the distortion is a strictly increasing map of the true
    /// probability, so that every rank-based measure is unchanged.
    pub fn preserves_ranks(self, literal_square: bool) -> bool {
        match self.0 {
            1..=4 | 7..=9 => true,
            5 | 6 => !literal_square,
            _ => false,
        }
    }

    pub fn description(self, literal_square: bool) -> &'static str {
        match (self.0, literal_square) {
            (1, _) => "true probabilities",
            (2, _) => "expit(LP + 0.75)",
            (3, _) => "expit(LP - 1)",
            (4, _) => "expit(LP / 1.3)",
            (5, false) => "expit(2 LP)",
            (5, true) => "expit(LP^2)",
            (6, false) => "expit(2 LP - 1)",
            (6, true) => "expit(LP^2 - 1)",
            (7, _) => "shrink below 0.1, inflate at or above 0.1",
            (8, _) => "shrink below the true prevalence, inflate at or above it",
            (9, _) => "shrink below 0.5, inflate at or above 0.5",
            (10, _) => "add or subtract 0.04 at random within [0.051, 0.949]",
            _ => "misspecified coefficient for the second predictor",
        }
    }
}

impl TryFrom<u8> for VariantId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Self::new(v)
    }
}

impl From<VariantId> for u8 {
    fn from(v: VariantId) -> u8 {
        v.0
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a distortion may see: the true probabilities and, for the
/// misspecified model, the predictors. Outcomes are deliberately absent.
#[derive(Debug, Clone, Copy)]
pub struct VariantInput<'a> {
    pub true_probabilities: &'a [f64],
    /// Row-major `n x k` predictor matrix.
    pub predictors: Option<&'a [f64]>,
}

/// Fixed parameters of the distortions.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantContext {
    pub intercept: f64,
    pub wrong_coefficients: Vec<f64>,
    /// Cut used by variant 8.
    pub true_prevalence: f64,
    pub literal_square: bool,
    /// Scale applied by variants 7 to 9.
    pub shrink_factor: f64,
}

/// Below `cut` the probability is multiplied by `factor`; at or above it the
/// distance to 1 is.
pub fn shrink_inflate(p: f64, cut: f64, factor: f64) -> f64 {
    if p < cut {
        factor * p
    } else {
        1.0 - factor * (1.0 - p)
    }
}

/// Distorted probabilities for `variant`. Only variant 10 draws from `rng`,
/// one fair coin per eligible individual.
pub fn apply_variant<R: RngCore>(
    input: VariantInput<'_>,
    variant: VariantId,
    ctx: &VariantContext,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let p = input.true_probabilities;
    let on_lp = |f: &dyn Fn(f64) -> f64| p.iter().map(|&v| expit(f(logit(v)))).collect::<Vec<_>>();
    let out = match variant.0 {
        1 => p.to_vec(),
        2 => on_lp(&|l| l + 0.75),
        3 => on_lp(&|l| l - 1.0),
        4 => on_lp(&|l| l / 1.3),
        5 if ctx.literal_square => on_lp(&|l| l * l),
        5 => on_lp(&|l| 2.0 * l),
        6 if ctx.literal_square => on_lp(&|l| l * l - 1.0),
        6 => on_lp(&|l| 2.0 * l - 1.0),
        7 => p
            .iter()
            .map(|&v| shrink_inflate(v, 0.1, ctx.shrink_factor))
            .collect(),
        8 => p
            .iter()
            .map(|&v| shrink_inflate(v, ctx.true_prevalence, ctx.shrink_factor))
            .collect(),
        9 => p
            .iter()
            .map(|&v| shrink_inflate(v, 0.5, ctx.shrink_factor))
            .collect(),
        10 => p
            .iter()
            .map(|&v| {
                if (0.051..=0.949).contains(&v) {
                    if uniform_open(rng) < 0.5 {
                        v + 0.04
                    } else {
                        v - 0.04
                    }
                } else {
                    v
                }
            })
            .collect(),
        _ => {
            let x = input.predictors.ok_or_else(|| {
                Error::InvalidArgument(
                    "the misspecified-coefficient variant needs the predictor matrix".into(),
                )
            })?;
            let k = ctx.wrong_coefficients.len();
            if x.len() != p.len() * k {
                return Err(Error::InvalidArgument(format!(
                    "predictor matrix has {} entries, expected {} x {k}",
                    x.len(),
                    p.len()
                )));
            }
            x.chunks(k)
                .map(|row| {
                    let lp: f64 = ctx.intercept
                        + row
                            .iter()
                            .zip(&ctx.wrong_coefficients)
                            .map(|(a, b)| a * b)
                            .sum::<f64>();
                    expit(lp)
                })
                .collect()
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn ctx() -> VariantContext {
        VariantContext {
            intercept: -1.0,
            wrong_coefficients: vec![0.74, 0.74, 0.18, 0.18],
            true_prevalence: 0.304,
            literal_square: false,
            shrink_factor: 0.1,
        }
    }

    fn run(p: &[f64], v: u8) -> Vec<f64> {
        let input = VariantInput {
            true_probabilities: p,
            predictors: None,
        };
        apply_variant(
            input,
            VariantId::new(v).unwrap(),
            &ctx(),
            &mut stream_rng(1, 10),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_shifts() {
        assert_eq!(run(&[0.2, 0.7], 1), vec![0.2, 0.7]);
        assert!((run(&[0.5], 3)[0] - 0.2689414213699951).abs() < 1e-15);
        assert!((run(&[0.5], 2)[0] - expit(0.75)).abs() < 1e-15);
        assert!((run(&[0.5], 6)[0] - expit(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn piecewise_variants() {
        let out = run(&[0.09, 0.10], 7);
        assert!((out[0] - 0.009).abs() < 1e-15);
        assert!((out[1] - 0.91).abs() < 1e-15);
        let out = run(&[0.3, 0.31], 8);
        assert!((out[0] - 0.03).abs() < 1e-15);
        assert!((out[1] - 0.931).abs() < 1e-12);
    }

    #[test]
    fn random_shift_stays_in_band() {
        let p = [0.03, 0.051, 0.5, 0.949, 0.97];
        let out = run(&p, 10);
        assert_eq!(out[0], 0.03);
        assert_eq!(out[4], 0.97);
        for i in 1..4 {
            assert!(((out[i] - p[i]).abs() - 0.04).abs() < 1e-12);
        }
    }

    #[test]
    fn misspecified_model_needs_predictors() {
        let input = VariantInput {
            true_probabilities: &[0.3],
            predictors: None,
        };
        let err = apply_variant(
            input,
            VariantId::new(11).unwrap(),
            &ctx(),
            &mut stream_rng(1, 11),
        );
        assert!(err.is_err());
        let input = VariantInput {
            true_probabilities: &[0.3],
            predictors: Some(&[0.0, 1.0, 0.0, 0.0]),
        };
        let out = apply_variant(
            input,
            VariantId::new(11).unwrap(),
            &ctx(),
            &mut stream_rng(1, 11),
        )
        .unwrap();
        assert!((out[0] - expit(-1.0 + 0.74)).abs() < 1e-15);
    }

    #[test]
    fn ids_are_validated() {
        assert!(VariantId::new(0).is_err());
        assert!(VariantId::new(12).is_err());
        assert_eq!(VariantId::all().len(), 11);
    }
}
