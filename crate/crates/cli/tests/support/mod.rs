//! Fixtures and brute-force oracles shared by the CLI test targets.
#![allow(dead_code)]

use riskbench_core::{CostSpec, PredictionSample};

/// Four records, perfectly separated.
pub fn d4() -> PredictionSample {
    PredictionSample::new(vec![0.2, 0.8, 0.6, 0.4], vec![false, true, true, false]).unwrap()
}

/// Stand-in for the ovarian-tumour validation set: 894 records laid out so
/// that the threshold 0.10 gives TP=414, FP=164, TN=296, FN=20 and the
/// expected cost under costs 9:1 is minimal at 0.06.
pub fn adnex_standin() -> PredictionSample {
    let mut p = Vec::with_capacity(894);
    let mut y = Vec::with_capacity(894);
    for k in 0..10 {
        p.push(0.001 * (k + 1) as f64);
        y.push(true);
    }
    for i in 0..233 {
        p.push(0.011 + i as f64 * 0.048 / 232.0);
        y.push(false);
    }
    for j in 0..73 {
        p.push(0.06 + j as f64 * 0.04 / 73.0);
        y.push(j % 7 == 0 && j <= 63);
    }
    // 164 non-events spread evenly among the 578 high-risk records
    for j in 0..578usize {
        p.push(0.10 + j as f64 * 0.89 / 577.0);
        y.push((j * 164) % 578 >= 164);
    }
    PredictionSample::new(p, y).unwrap()
}

/// The real ADNEX file, when a path is given in `RISKBENCH_ADNEX_CSV`.
pub fn adnex_from_env() -> Option<PredictionSample> {
    let path = std::env::var_os("RISKBENCH_ADNEX_CSV")?;
    let prob = std::env::var("RISKBENCH_ADNEX_PROB_COL").unwrap_or_else(|_| "probability".into());
    let outcome = std::env::var("RISKBENCH_ADNEX_OUTCOME_COL").unwrap_or_else(|_| "outcome".into());
    let schema = riskbench_core::CsvSchema::new(prob, outcome);
    Some(riskbench_core::ingest_csv(path, &schema).expect("RISKBENCH_ADNEX_CSV is readable"))
}

pub struct Cells {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fneg: f64,
}

pub fn cells(s: &PredictionSample, t: f64) -> Cells {
    let mut c = Cells {
        tp: 0.0,
        fp: 0.0,
        tn: 0.0,
        fneg: 0.0,
    };
    for (&p, &e) in s.probabilities().iter().zip(s.events()) {
        match (p >= t, e) {
            (true, true) => c.tp += 1.0,
            (true, false) => c.fp += 1.0,
            (false, false) => c.tn += 1.0,
            (false, true) => c.fneg += 1.0,
        }
    }
    c
}

/// Share of event/non-event pairs ranked correctly, ties counting half.
pub fn auroc_pairs(s: &PredictionSample) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (&pe, _) in s.probabilities().iter().zip(s.events()).filter(|(_, &e)| e) {
        for (&pn, _) in s
            .probabilities()
            .iter()
            .zip(s.events())
            .filter(|(_, &e)| !e)
        {
            den += 1.0;
            if pe > pn {
                num += 1.0;
            } else if pe == pn {
                num += 0.5;
            }
        }
    }
    num / den
}

pub fn loglik(s: &PredictionSample) -> f64 {
    s.probabilities()
        .iter()
        .zip(s.events())
        .map(|(&p, &e)| if e { p.ln() } else { (1.0 - p).ln() })
        .sum()
}

pub fn brier(s: &PredictionSample) -> f64 {
    let n = s.len() as f64;
    s.probabilities()
        .iter()
        .zip(s.outcomes())
        .map(|(&p, y)| (p - y).powi(2))
        .sum::<f64>()
        / n
}

/// Net benefit at `t` counted directly from the records.
pub fn net_benefit(s: &PredictionSample, t: f64) -> f64 {
    let c = cells(s, t);
    let n = s.len() as f64;
    c.tp / n - c.fp / n * t / (1.0 - t)
}

pub fn expected_cost_at(s: &PredictionSample, t: f64, costs: &CostSpec) -> f64 {
    let c = cells(s, t);
    let n = s.len() as f64;
    (c.fneg * costs.cost_fn + c.fp * costs.cost_fp) / n
}

/// Minimum expected cost over every threshold that can split the records:
/// each distinct probability, plus treating nobody.
pub fn min_expected_cost(s: &PredictionSample, costs: &CostSpec) -> f64 {
    let mut candidates: Vec<f64> = s.probabilities().to_vec();
    candidates.push(f64::INFINITY);
    candidates
        .iter()
        .map(|&t| expected_cost_at(s, t, costs))
        .fold(f64::INFINITY, f64::min)
}

/// Cost-curve point `(PC(+), normalized minimum expected cost)` at
/// normalized false-negative cost `c`.
pub fn cost_point(s: &PredictionSample, c: f64) -> (f64, f64) {
    let prev = s.prevalence();
    let norm = prev * c + (1.0 - prev) * (1.0 - c);
    let costs = CostSpec::new(c, 1.0 - c).unwrap();
    (prev * c / norm, min_expected_cost(s, &costs) / norm)
}
