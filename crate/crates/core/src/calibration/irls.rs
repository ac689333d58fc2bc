//! Newton / IRLS fits of the two logistic calibration models: intercept with
//! the linear predictor as offset, and intercept plus slope on the linear
//! predictor.

use crate::error::{Error, Result};
use crate::util::expit;

pub const MAX_ITERATIONS: usize = 50;
pub const LOGLIK_TOLERANCE: f64 = 1e-10;
/// A slope beyond this magnitude with the likelihood still rising is taken as
/// separation.
pub const SEPARATION_SLOPE: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub loglik: f64,
    pub iterations: usize,
}

fn loglik(eta: impl Iterator<Item = f64>, y: &[bool]) -> f64 {
    eta.zip(y)
        .map(|(e, &yi)| {
            // log(expit(e)) and log(1 - expit(e)) without cancellation
            let log1pexp = if e > 0.0 {
                e + (-e).exp().ln_1p()
            } else {
                e.exp().ln_1p()
            };
            if yi {
                e - log1pexp
            } else {
                -log1pexp
            }
        })
        .sum()
}

/// Maximum-likelihood intercept of `logit P(y) = a + offset`.
pub fn fit_offset_intercept(offset: &[f64], y: &[bool]) -> Result<LogisticFit> {
    if !y.iter().any(|&v| v) || y.iter().all(|&v| v) {
        return Err(Error::Singular(
            "offset model needs both outcome classes".into(),
        ));
    }
    let mut a = 0.0;
    let mut ll = loglik(offset.iter().map(|&o| o + a), y);
    let mut trace = vec![ll];
    for it in 1..=MAX_ITERATIONS {
        let (mut score, mut info) = (0.0, 0.0);
        for (&o, &yi) in offset.iter().zip(y) {
            let p = expit(o + a);
            score += if yi { 1.0 } else { 0.0 } - p;
            info += p * (1.0 - p);
        }
        if info <= 0.0 {
            return Err(Error::Singular("zero information in offset model".into()));
        }
        let step = score / info;
        let (next_a, next_ll) = damped(a, ll, step, |cand| {
            loglik(offset.iter().map(|&o| o + cand), y)
        });
        let change = next_ll - ll;
        a = next_a;
        ll = next_ll;
        trace.push(ll);
        if change.abs() < LOGLIK_TOLERANCE {
            return Ok(LogisticFit {
                intercept: a,
                slope: 1.0,
                loglik: ll,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        trace,
    })
}

/// Step halving until the likelihood does not decrease.
fn damped(current: f64, ll: f64, step: f64, eval: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut scale = 1.0;
    loop {
        let cand = current + scale * step;
        let cand_ll = eval(cand);
        if cand_ll >= ll - 1e-12 || scale < 1e-6 {
            return (cand, cand_ll);
        }
        scale *= 0.5;
    }
}

/// Maximum-likelihood `(a, b)` of `logit P(y) = a + b * x`.
pub fn fit_intercept_slope(x: &[f64], y: &[bool]) -> Result<LogisticFit> {
    if !y.iter().any(|&v| v) || y.iter().all(|&v| v) {
        return Err(Error::Singular(
            "calibration model needs both outcome classes".into(),
        ));
    }
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if min == max {
        return Err(Error::Singular("linear predictor is constant".into()));
    }
    check_separation(x, y)?;

    let eval = |a: f64, b: f64| loglik(x.iter().map(|&xi| a + b * xi), y);
    let (mut a, mut b) = (0.0, 1.0);
    let mut ll = eval(a, b);
    let mut trace = vec![ll];
    for it in 1..=MAX_ITERATIONS {
        let (mut s0, mut s1) = (0.0, 0.0);
        let (mut i00, mut i01, mut i11) = (0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(y) {
            let p = expit(a + b * xi);
            let r = if yi { 1.0 } else { 0.0 } - p;
            let w = p * (1.0 - p);
            s0 += r;
            s1 += r * xi;
            i00 += w;
            i01 += w * xi;
            i11 += w * xi * xi;
        }
        let det = i00 * i11 - i01 * i01;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Singular(format!(
                "information matrix not positive definite at iteration {it}"
            )));
        }
        let da = (i11 * s0 - i01 * s1) / det;
        let db = (i00 * s1 - i01 * s0) / det;
        let mut scale = 1.0;
        let (na, nb, nll) = loop {
            let (ca, cb) = (a + scale * da, b + scale * db);
            let cll = eval(ca, cb);
            if cll >= ll - 1e-12 || scale < 1e-6 {
                break (ca, cb, cll);
            }
            scale *= 0.5;
        };
        let change = nll - ll;
        a = na;
        b = nb;
        ll = nll;
        trace.push(ll);
        if b.abs() > SEPARATION_SLOPE && change > 0.0 {
            return Err(Error::Separation(format!(
                "slope diverged to {b:.3} with log-likelihood still increasing"
            )));
        }
        if change.abs() < LOGLIK_TOLERANCE {
            return Ok(LogisticFit {
                intercept: a,
                slope: b,
                loglik: ll,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        trace,
    })
}

/// Complete or quasi-complete separation of the outcome by `x`.
fn check_separation(x: &[f64], y: &[bool]) -> Result<()> {
    let mut ev = (f64::INFINITY, f64::NEG_INFINITY);
    let mut non = (f64::INFINITY, f64::NEG_INFINITY);
    for (&xi, &yi) in x.iter().zip(y) {
        let r = if yi { &mut ev } else { &mut non };
        r.0 = r.0.min(xi);
        r.1 = r.1.max(xi);
    }
    if ev.0 >= non.1 || non.0 >= ev.1 {
        return Err(Error::Separation(format!(
            "events span [{:.4}, {:.4}] and non-events span [{:.4}, {:.4}] on the logit scale",
            ev.0, ev.1, non.0, non.1
        )));
    }
    Ok(())
}

/// Score vector of the intercept-slope model at `(a, b)`.
pub fn score(x: &[f64], y: &[bool], a: f64, b: f64) -> (f64, f64) {
    x.iter().zip(y).fold((0.0, 0.0), |(s0, s1), (&xi, &yi)| {
        let r = if yi { 1.0 } else { 0.0 } - expit(a + b * xi);
        (s0 + r, s1 + r * xi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::logit;

    fn data() -> (Vec<f64>, Vec<bool>) {
        let p = [
            0.1, 0.2, 0.3, 0.35, 0.5, 0.55, 0.6, 0.7, 0.8, 0.9, 0.15, 0.45,
        ];
        let y = [
            false, false, true, false, false, true, true, false, true, true, false, true,
        ];
        (p.iter().map(|&v| logit(v)).collect(), y.to_vec())
    }

    #[test]
    fn intercept_slope_solves_score_equations() {
        let (x, y) = data();
        let fit = fit_intercept_slope(&x, &y).unwrap();
        let (s0, s1) = score(&x, &y, fit.intercept, fit.slope);
        assert!(s0.abs() < 1e-8 && s1.abs() < 1e-8, "{s0} {s1}");
    }

    #[test]
    fn offset_intercept_solves_score_equation() {
        let (x, y) = data();
        let fit = fit_offset_intercept(&x, &y).unwrap();
        let s: f64 = x
            .iter()
            .zip(&y)
            .map(|(&o, &yi)| yi as u8 as f64 - expit(o + fit.intercept))
            .sum();
        assert!(s.abs() < 1e-8);
    }

    #[test]
    fn separation_and_singularity() {
        let x = [-1.386, -0.405, 0.405, 1.386];
        let y = [false, false, true, true];
        assert!(matches!(
            fit_intercept_slope(&x, &y),
            Err(Error::Separation(_))
        ));
        assert!(matches!(
            fit_intercept_slope(&[0.3, 0.3, 0.3], &[true, false, true]),
            Err(Error::Singular(_))
        ));
        // quasi-complete: a tie at the boundary
        let x = [-1.0, 0.0, 0.0, 1.0];
        let y = [false, false, true, true];
        assert!(matches!(
            fit_intercept_slope(&x, &y),
            Err(Error::Separation(_))
        ));
    }
}
