use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::study::{fixed, io_err};
use crate::measures::MeasureId;
use crate::metrics::{summary_from_cells, SummaryMeasures};

/// The seven summary classification measures of the grid study, in column order.
pub const GRID_MEASURES: [MeasureId; 7] = [
    MeasureId::Accuracy,
    MeasureId::BalancedAccuracy,
    MeasureId::Youden,
    MeasureId::DiagnosticOddsRatio,
    MeasureId::Kappa,
    MeasureId::F1,
    MeasureId::Mcc,
];

/// Lattice of prevalence, sensitivity and specificity values `k / steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub steps: u32,
    /// Keep only (sensitivity, specificity) pairs with balanced accuracy of
    /// at least one half.
    pub filter_balanced: bool,
    /// (sensitivity, specificity) pairs traced across prevalence.
    pub profiles: Vec<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            steps: 20,
            filter_balanced: true,
            profiles: vec![(0.9, 0.3), (0.6, 0.6), (0.3, 0.9)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub prevalence: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// Values in [`GRID_MEASURES`] order; infinite odds ratios are `None`.
    pub values: [Option<f64>; 7],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridStudy {
    pub points: Vec<GridPoint>,
    /// Spearman correlation between measures, pairwise complete.
    pub spearman: [[Option<f64>; 7]; 7],
    pub profiles: Vec<GridProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridProfile {
    pub sensitivity: f64,
    pub specificity: f64,
    pub points: Vec<GridPoint>,
}

fn as_values(m: SummaryMeasures) -> [Option<f64>; 7] {
    [
        Some(m.accuracy),
        m.balanced_accuracy,
        m.youden,
        m.dor.filter(|v| v.is_finite()),
        m.kappa,
        m.f1,
        m.mcc,
    ]
}

/// Measures from normalized confusion fractions.
pub fn grid_point(prevalence: f64, sensitivity: f64, specificity: f64) -> GridPoint {
    let tp = prevalence * sensitivity;
    let fneg = prevalence * (1.0 - sensitivity);
    let tn = (1.0 - prevalence) * specificity;
    let fp = (1.0 - prevalence) * (1.0 - specificity);
    let mut values = as_values(summary_from_cells(tp, fp, tn, fneg));
    // with fractions the accuracy needs no division
    values[0] = Some(tp + tn);
    GridPoint {
        prevalence,
        sensitivity,
        specificity,
        values,
    }
}

pub fn classification_grid_study(spec: &GridSpec) -> Result<GridStudy> {
    if spec.steps == 0 {
        return Err(Error::InvalidArgument(
            "grid needs at least one step".into(),
        ));
    }
    let s = spec.steps;
    let at = |k: u32| k as f64 / s as f64;
    let mut points = Vec::new();
    for i in 0..=s {
        for j in 0..=s {
            for k in 0..=s {
                // sens + spec >= 1 in exact integer arithmetic
                if spec.filter_balanced && j + k < s {
                    continue;
                }
                points.push(grid_point(at(i), at(j), at(k)));
            }
        }
    }
    let mut spearman = [[None; 7]; 7];
    for a in 0..7 {
        for b in 0..7 {
            let pairs: Vec<(f64, f64)> = points
                .iter()
                .filter_map(|p| Some((p.values[a]?, p.values[b]?)))
                .collect();
            spearman[a][b] = spearman_correlation(&pairs);
        }
    }
    let profiles = spec
        .profiles
        .iter()
        .map(|&(se, sp)| GridProfile {
            sensitivity: se,
            specificity: sp,
            points: (0..=s).map(|i| grid_point(at(i), se, sp)).collect(),
        })
        .collect();
    Ok(GridStudy {
        points,
        spearman,
        profiles,
    })
}

/// Ranks starting at 1 with ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of average ranks; `None` when either side is constant.
pub fn spearman_correlation(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let rx = average_ranks(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let ry = average_ranks(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in rx.iter().zip(&ry) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

impl GridStudy {
    /// Retained combinations at one prevalence value.
    pub fn count_at_prevalence(&self, prevalence: f64) -> usize {
        self.points
            .iter()
            .filter(|p| (p.prevalence - prevalence).abs() < 1e-12)
            .count()
    }

    fn write_points<W: Write>(out: &mut W, points: &[GridPoint]) -> Result<()> {
        let names: Vec<&str> = GRID_MEASURES.iter().map(|m| m.as_str()).collect();
        writeln!(
            out,
            "prevalence,sensitivity,specificity,{}",
            names.join(",")
        )
        .map_err(io_err)?;
        for p in points {
            let cells: Vec<String> = p
                .values
                .iter()
                .map(|v| v.map(fixed).unwrap_or_default())
                .collect();
            writeln!(
                out,
                "{},{},{},{}",
                fixed(p.prevalence),
                fixed(p.sensitivity),
                fixed(p.specificity),
                cells.join(",")
            )
            .map_err(io_err)?;
        }
        Ok(())
    }

    pub fn write_combinations<W: Write>(&self, mut out: W) -> Result<()> {
        Self::write_points(&mut out, &self.points)
    }

    pub fn write_spearman<W: Write>(&self, mut out: W) -> Result<()> {
        let names: Vec<&str> = GRID_MEASURES.iter().map(|m| m.as_str()).collect();
        writeln!(out, "measure,{}", names.join(",")).map_err(io_err)?;
        for (a, row) in self.spearman.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map(fixed).unwrap_or_default())
                .collect();
            writeln!(out, "{},{}", names[a], cells.join(",")).map_err(io_err)?;
        }
        Ok(())
    }

    pub fn write_profiles<W: Write>(&self, mut out: W) -> Result<()> {
        let all: Vec<GridPoint> = self
            .profiles
            .iter()
            .flat_map(|p| p.points.iter().copied())
            .collect();
        Self::write_points(&mut out, &all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lattice_counts() {
        let g = classification_grid_study(&GridSpec::default()).unwrap();
        assert_eq!(g.points.len(), 4851);
        assert_eq!(g.count_at_prevalence(0.5), 231);
        let unfiltered = classification_grid_study(&GridSpec {
            filter_balanced: false,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(unfiltered.points.len(), 21 * 21 * 21);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
        let perfect: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i * i) as f64)).collect();
        assert!((spearman_correlation(&perfect).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spearman_correlation(&[(1.0, 2.0), (1.0, 3.0)]), None);
    }

    #[test]
    fn fraction_measures_match_counts() {
        let p = grid_point(0.5, 0.6, 0.8);
        assert!((p.values[0].unwrap() - 0.7).abs() < 1e-15);
        assert!((p.values[2].unwrap() - 0.4).abs() < 1e-15);
        assert!((p.values[3].unwrap() - 6.0).abs() < 1e-12);
    }
}
