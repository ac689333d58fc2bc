//! Local linear regression with tricube weights and nearest-neighbour
//! bandwidth, no robustness iterations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherSettings {
    /// Fraction of the sample in each local neighbourhood.
    pub span: f64,
    /// Number of equally spaced evaluation points across the observed range.
    pub grid_points: usize,
}

impl Default for SmootherSettings {
    fn default() -> Self {
        Self {
            span: 0.75,
            grid_points: 100,
        }
    }
}

impl SmootherSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.span > 0.0 && self.span <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "smoother span must lie in (0, 1], got {}",
                self.span
            )));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidArgument(
                "smoother grid needs at least 2 points".into(),
            ));
        }
        Ok(())
    }
}

/// Sorted copy of the data prepared for repeated local fits.
#[derive(Debug, Clone)]
pub struct Loess {
    x: Vec<f64>,
    y: Vec<f64>,
    q: usize,
}

impl Loess {
    pub fn new(x: &[f64], y: &[f64], span: f64) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let q = ((span * x.len() as f64).floor() as usize).clamp(2.min(x.len()), x.len());
        Self {
            x: order.iter().map(|&i| x[i]).collect(),
            y: order.iter().map(|&i| y[i]).collect(),
            q,
        }
    }

    /// Fitted values at ascending query points.
    pub fn fit_sorted(&self, queries: &[f64]) -> Vec<f64> {
        let n = self.x.len();
        let q = self.q;
        let mut left = 0;
        queries
            .iter()
            .map(|&x0| {
                while left + q < n && x0 - self.x[left] > self.x[left + q] - x0 {
                    left += 1;
                }
                self.local_fit(x0, left, left + q)
            })
            .collect()
    }

    /// Fitted values at arbitrary query points, returned in query order.
    pub fn fit(&self, queries: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..queries.len()).collect();
        order.sort_by(|&a, &b| queries[a].total_cmp(&queries[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| queries[i]).collect();
        let fitted = self.fit_sorted(&sorted);
        let mut out = vec![0.0; queries.len()];
        for (k, &i) in order.iter().enumerate() {
            out[i] = fitted[k];
        }
        out
    }

    fn local_fit(&self, x0: f64, lo: usize, hi: usize) -> f64 {
        let h = (x0 - self.x[lo]).max(self.x[hi - 1] - x0);
        if h <= 0.0 {
            // every neighbour sits at x0: the fit is the mean outcome there
            let (sum, count) = self
                .x
                .iter()
                .zip(&self.y)
                .filter(|(&xi, _)| xi == x0)
                .fold((0.0, 0usize), |(s, c), (_, &yi)| (s + yi, c + 1));
            return sum / count as f64;
        }
        let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in lo..hi {
            let u = self.x[i] - x0;
            let r = u.abs() / h;
            if r >= 1.0 {
                continue;
            }
            let c = 1.0 - r * r * r;
            let w = c * c * c;
            s0 += w;
            s1 += w * u;
            s2 += w * u * u;
            t0 += w * self.y[i];
            t1 += w * u * self.y[i];
        }
        let det = s0 * s2 - s1 * s1;
        let value = if det > 1e-12 * s0 * s2 {
            (s2 * t0 - s1 * t1) / det
        } else {
            t0 / s0
        };
        value.clamp(0.0, 1.0)
    }
}

/// `count` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_a_line_exactly() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.1 + 0.8 * v).collect();
        let fit = Loess::new(&x, &y, 0.75).fit(&x);
        for (f, t) in fit.iter().zip(&y) {
            assert!((f - t).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_naive_weighted_regression() {
        let x: Vec<f64> = (0..40)
            .map(|i| ((i * 37) % 40) as f64 / 40.0 + 0.001 * i as f64)
            .collect();
        let y: Vec<f64> = (0..40)
            .map(|i| if (i * 7) % 3 == 0 { 1.0 } else { 0.0 })
            .collect();
        let loess = Loess::new(&x, &y, 0.5);
        for &x0 in &[0.05, 0.33, 0.5, 0.91] {
            let mut d: Vec<f64> = x.iter().map(|v| (v - x0).abs()).collect();
            d.sort_by(f64::total_cmp);
            let h = d[19];
            let w: Vec<f64> = x
                .iter()
                .map(|v| {
                    let r = (v - x0).abs() / h;
                    if r < 1.0 {
                        (1.0 - r.powi(3)).powi(3)
                    } else {
                        0.0
                    }
                })
                .collect();
            let sw: f64 = w.iter().sum();
            let mx = w.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / sw;
            let my = w.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / sw;
            let sxy: f64 = (0..40).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
            let sxx: f64 = (0..40).map(|i| w[i] * (x[i] - mx).powi(2)).sum();
            let expected = (my + sxy / sxx * (x0 - mx)).clamp(0.0, 1.0);
            let got = loess.fit(&[x0])[0];
            assert!((got - expected).abs() < 1e-12, "{x0}: {got} vs {expected}");
        }
    }

    #[test]
    fn tied_support_returns_mean() {
        let x = vec![0.3; 10];
        let y = vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        assert!((Loess::new(&x, &y, 0.75).fit(&[0.3])[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.2, 0.7, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[99], 0.7);
    }
}
