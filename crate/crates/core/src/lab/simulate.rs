use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{CostSpec, PredictionSample};
use crate::error::{Error, Result};
use crate::lab::VariantId;
use crate::rng::{normal_quantile, standard_normal, stream_rng, uniform_open};
use crate::util::expit;

/// Substream tag of the dataset draws; variant streams use the variant id.
const DATASET_TAG: u64 = 0;

/// Full parameterization of the properness simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub n_datasets: usize,
    pub n_per_dataset: usize,
    /// Common pairwise correlation of the standard normal predictors.
    pub predictor_correlation: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Decision threshold for classification and net benefit.
    pub threshold: f64,
    pub ec_costs: CostSpec,
    pub master_seed: u64,
    pub variants: Vec<VariantId>,
    /// Coefficients of the misspecified model (variant 11).
    pub wrong_coefficients: Vec<f64>,
    /// Variants 5 and 6 square the linear predictor instead of doubling it.
    pub literal_square: bool,
    /// Factor of the shrink/inflate variants 7 to 9.
    #[serde(default = "default_shrink_factor")]
    pub shrink_factor: f64,
}

fn default_shrink_factor() -> f64 {
    0.1
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            n_datasets: 2000,
            n_per_dataset: 1000,
            predictor_correlation: 0.4,
            intercept: -1.0,
            coefficients: vec![0.74, 0.18, 0.18, 0.18],
            threshold: 0.1,
            ec_costs: CostSpec {
                cost_fn: 9.0,
                cost_fp: 1.0,
                normalized: false,
            },
            master_seed: 20240101,
            variants: VariantId::all(),
            wrong_coefficients: vec![0.74, 0.74, 0.18, 0.18],
            literal_square: false,
            shrink_factor: default_shrink_factor(),
        }
    }
}

impl SimulationSpec {
    pub fn predictor_count(&self) -> usize {
        self.coefficients.len()
    }

    fn correlation_matrix(&self) -> DMatrix<f64> {
        let k = self.predictor_count();
        DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                1.0
            } else {
                self.predictor_correlation
            }
        })
    }

    /// Lower Cholesky factor of the predictor correlation matrix.
    pub fn cholesky_factor(&self) -> Result<DMatrix<f64>> {
        self.correlation_matrix()
            .cholesky()
            .map(|c| c.l())
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "correlation {} does not give a positive definite matrix for {} predictors",
                    self.predictor_correlation,
                    self.predictor_count()
                ))
            })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_datasets == 0 || self.n_per_dataset == 0 {
            return Err(Error::InvalidArgument(
                "need at least one dataset and one individual".into(),
            ));
        }
        if self.coefficients.is_empty() {
            return Err(Error::InvalidArgument("need at least one predictor".into()));
        }
        if self.wrong_coefficients.len() != self.coefficients.len() {
            return Err(Error::InvalidArgument(
                "misspecified coefficients must match the predictor count".into(),
            ));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidArgument(
                "threshold must lie in (0, 1)".into(),
            ));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidArgument(
                "shrink factor must lie in (0, 1)".into(),
            ));
        }
        if self.n_datasets >= 1 << 55 {
            return Err(Error::InvalidArgument(
                "too many datasets for the stream layout".into(),
            ));
        }
        self.ec_costs.validate()?;
        self.cholesky_factor().map(|_| ())
    }

    /// Standard deviation of the true linear predictor.
    pub fn linear_predictor_sd(&self) -> f64 {
        let b = DVector::from_vec(self.coefficients.clone());
        (b.transpose() * self.correlation_matrix() * &b)[(0, 0)].sqrt()
    }

    /// Population event rate: the mean of the true probability over the
    /// normal distribution of the linear predictor, by numerical quadrature.
    pub fn true_prevalence(&self) -> f64 {
        let sd = self.linear_predictor_sd();
        if sd == 0.0 {
            return expit(self.intercept);
        }
        // midpoint rule on the probability scale of the linear predictor
        let m = 20_000;
        (0..m)
            .map(|i| {
                let u = (i as f64 + 0.5) / m as f64;
                expit(self.intercept + sd * normal_quantile(u))
            })
            .sum::<f64>()
            / m as f64
    }
}

/// Substream id for one dataset and tag.
pub(crate) fn stream_id(dataset_index: usize, tag: u64) -> u64 {
    ((dataset_index as u64) << 8) | tag
}

/// One simulated dataset with everything the distortion variants may use.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    pub index: usize,
    /// Row-major `n x k` predictor matrix.
    pub predictors: Vec<f64>,
    pub predictor_count: usize,
    pub linear_predictor: Vec<f64>,
    pub true_probabilities: Vec<f64>,
    pub outcomes: Vec<bool>,
}

impl SimulatedDataset {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// The true probabilities with the simulated outcomes.
    pub fn true_sample(&self) -> PredictionSample {
        PredictionSample::new(self.true_probabilities.clone(), self.outcomes.clone())
            .expect("simulated probabilities lie in [0, 1]")
    }

    pub fn prevalence(&self) -> f64 {
        self.outcomes.iter().filter(|&&y| y).count() as f64 / self.len() as f64
    }
}

/// Draws dataset `dataset_index`: correlated standard normal predictors, the
/// true logistic probability, and a Bernoulli outcome for each individual.
pub fn generate_dataset(spec: &SimulationSpec, dataset_index: usize) -> Result<SimulatedDataset> {
    let chol = spec.cholesky_factor()?;
    let k = spec.predictor_count();
    let n = spec.n_per_dataset;
    let mut rng = stream_rng(spec.master_seed, stream_id(dataset_index, DATASET_TAG));
    let mut predictors = Vec::with_capacity(n * k);
    let mut linear_predictor = Vec::with_capacity(n);
    let mut true_probabilities = Vec::with_capacity(n);
    let mut outcomes = Vec::with_capacity(n);
    let mut z = vec![0.0; k];
    for _ in 0..n {
        for v in z.iter_mut() {
            *v = standard_normal(&mut rng);
        }
        let mut lp = spec.intercept;
        for i in 0..k {
            let x: f64 = (0..=i).map(|j| chol[(i, j)] * z[j]).sum();
            predictors.push(x);
            lp += spec.coefficients[i] * x;
        }
        let p = expit(lp);
        linear_predictor.push(lp);
        true_probabilities.push(p);
        outcomes.push(uniform_open(&mut rng) < p);
    }
    Ok(SimulatedDataset {
        index: dataset_index,
        predictors,
        predictor_count: k,
        linear_predictor,
        true_probabilities,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        let spec = SimulationSpec::default();
        spec.validate().unwrap();
        assert!((spec.linear_predictor_sd().powi(2) - 1.04224).abs() < 1e-12);
        assert!((spec.true_prevalence() - 0.304).abs() < 0.001);
    }

    #[test]
    fn indefinite_correlation_rejected() {
        let spec = SimulationSpec {
            predictor_correlation: -0.5,
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn datasets_are_reproducible_and_independent() {
        let spec = SimulationSpec {
            n_per_dataset: 50,
            ..Default::default()
        };
        let a = generate_dataset(&spec, 3).unwrap();
        assert_eq!(a, generate_dataset(&spec, 3).unwrap());
        assert_ne!(
            a.true_probabilities,
            generate_dataset(&spec, 4).unwrap().true_probabilities
        );
        assert_eq!(a.predictors.len(), 200);
    }

    #[test]
    fn predictor_correlation_is_recovered() {
        let spec = SimulationSpec {
            n_per_dataset: 20_000,
            ..Default::default()
        };
        let d = generate_dataset(&spec, 0).unwrap();
        let col =
            |j: usize| -> Vec<f64> { d.predictors.iter().skip(j).step_by(4).copied().collect() };
        let (a, b) = (col(0), col(3));
        let n = a.len() as f64;
        let r = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n;
        let va = a.iter().map(|x| x * x).sum::<f64>() / n;
        assert!((r - 0.4).abs() < 0.03, "{r}");
        assert!((va - 1.0).abs() < 0.05, "{va}");
    }

    #[test]
    fn zero_coefficients_give_intercept_prevalence() {
        let spec = SimulationSpec {
            n_per_dataset: 40_000,
            coefficients: vec![0.0; 4],
            ..Default::default()
        };
        let d = generate_dataset(&spec, 1).unwrap();
        assert!((d.prevalence() - 0.2689).abs() < 0.01);
        assert!((spec.true_prevalence() - expit(-1.0)).abs() < 1e-15);
    }
}
