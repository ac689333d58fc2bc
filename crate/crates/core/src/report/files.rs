use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::calibration::{
    grouped_calibration, smoothed_calibration, smoothed_calibration_band, subgroup_calibration,
    CurveChoice,
};
use crate::curves::{
    calibration_series, classification_plot, cost_curve, decision_curve, pr_curve,
    risk_distribution, roc_curve, ClassificationPair, CurveSeries, DistributionSettings, SvgLabels,
};
use crate::data::PredictionSample;
use crate::error::Result;
use crate::report::{write_text, RunConfig, SubgroupSummary};
use crate::resampling::BootstrapSpec;

/// One written curve: CSV data and an optional SVG rendering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFile {
    pub name: String,
    pub kind: &'static str,
    pub csv: String,
    pub svg: Option<String>,
    pub rows: usize,
}

pub(crate) struct Written {
    pub files: Vec<CurveFile>,
    pub warnings: Vec<String>,
    pub core_failures: Vec<String>,
}

struct Plot<'a> {
    x: &'a str,
    y: &'a [&'a str],
    labels: SvgLabels,
}

fn write_series(
    dir: &Path,
    name: &str,
    series: &CurveSeries,
    plot: Option<Plot<'_>>,
) -> Result<CurveFile> {
    let csv = format!("{name}.csv");
    write_text(&dir.join(&csv), &series.to_csv_string())?;
    let svg = match plot {
        Some(p) => {
            let file = format!("{name}.svg");
            write_text(&dir.join(&file), &series.to_svg(p.x, p.y, &p.labels)?)?;
            Some(file)
        }
        None => None,
    };
    Ok(CurveFile {
        name: name.to_string(),
        kind: series.kind.as_str(),
        csv,
        svg,
        rows: series.len(),
    })
}

/// Range of the finite values in `columns`, padded by 5%.
fn span_of(series: &CurveSeries, columns: &[&str]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in columns {
        for v in series.column(c).unwrap_or_default().into_iter().flatten() {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !(lo < hi) {
        return (lo.min(0.0), hi.max(1.0));
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn labels(title: &str, x: &str, y: &str, series: &[&str]) -> SvgLabels {
    let mut l = SvgLabels::unit(title, x, y);
    l.series = series.iter().map(|s| s.to_string()).collect();
    l
}

fn unit_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

fn record(
    dir: &Path,
    w: &mut Written,
    name: &str,
    core: bool,
    built: Result<(CurveSeries, Option<Plot<'_>>)>,
) -> Result<()> {
    match built {
        Ok((series, plot)) => w.files.push(write_series(dir, name, &series, plot)?),
        Err(e) => {
            w.warnings.push(format!("{name}: {e}"));
            if core {
                w.core_failures.push(format!("{name}: {e}"));
            }
        }
    }
    Ok(())
}

pub(crate) fn write_curves(
    dir: &Path,
    sample: &PredictionSample,
    config: &RunConfig,
    boot: Option<&BootstrapSpec>,
) -> Result<Written> {
    let mut w = Written {
        files: Vec::new(),
        warnings: Vec::new(),
        core_failures: Vec::new(),
    };
    let smoothed = match boot {
        Some(spec) => smoothed_calibration_band(sample, &config.calibration.smoother, spec),
        None => smoothed_calibration(sample, &config.calibration.smoother),
    };
    record(
        dir,
        &mut w,
        "calibration_smoothed",
        true,
        smoothed.map(|c| {
            let s = calibration_series(&c);
            let plot = Plot {
                x: "x",
                y: &["y", "lower", "upper"],
                labels: labels(
                    "Calibration (smoothed)",
                    "Estimated probability",
                    "Observed proportion",
                    &["smoothed", "lower", "upper"],
                ),
            };
            (s, Some(plot))
        }),
    )?;
    record(
        dir,
        &mut w,
        "calibration_grouped",
        false,
        grouped_calibration(sample, config.calibration.groups).map(|c| {
            let plot = Plot {
                x: "x",
                y: &["y"],
                labels: labels(
                    "Calibration (grouped)",
                    "Mean estimated probability",
                    "Observed proportion",
                    &["groups"],
                ),
            };
            (calibration_series(&c), Some(plot))
        }),
    )?;

    let dca_cols: &[&str] = &["nb", "nb_all", "nb_none", "nb_smoothed"];
    record(
        dir,
        &mut w,
        "decision_curve",
        true,
        decision_curve(sample, &config.decision_curve).map(|s| {
            let mut l = labels(
                "Decision curve",
                "Threshold probability",
                "Net benefit",
                &["model", "treat all", "treat none", "model (smoothed)"],
            );
            l.x_range = (config.decision_curve.lower, config.decision_curve.upper);
            let (lo, hi) = span_of(&s, dca_cols);
            l.y_range = (lo, hi);
            let plot = Plot {
                x: "threshold",
                y: dca_cols,
                labels: l,
            };
            (s, Some(plot))
        }),
    )?;

    record(
        dir,
        &mut w,
        "risk_density",
        true,
        risk_distribution(sample, &DistributionSettings::default()).map(|r| {
            let s = r.density_series();
            let mut l = labels(
                "Risk distribution",
                "Estimated probability",
                "Density",
                &["events", "non-events"],
            );
            l.y_range = (
                0.0,
                span_of(&s, &["density_event", "density_nonevent"])
                    .1
                    .max(1e-9),
            );
            let plot = Plot {
                x: "p",
                y: &["density_event", "density_nonevent"],
                labels: l,
            };
            (s, Some(plot))
        }),
    )?;

    record(
        dir,
        &mut w,
        "roc",
        false,
        roc_curve(sample).map(|s| {
            let plot = Plot {
                x: "fpr",
                y: &["sensitivity"],
                labels: labels("ROC curve", "1 - specificity", "Sensitivity", &["model"]),
            };
            (s, Some(plot))
        }),
    )?;
    record(
        dir,
        &mut w,
        "precision_recall",
        false,
        pr_curve(sample).map(|s| {
            let plot = Plot {
                x: "recall",
                y: &["precision"],
                labels: labels("Precision-recall curve", "Recall", "Precision", &["model"]),
            };
            (s, Some(plot))
        }),
    )?;

    let grid = unit_grid();
    for (name, pair, titles) in [
        (
            "classification_sens_fpr",
            ClassificationPair::SensFpr,
            ["sensitivity", "1 - specificity"],
        ),
        (
            "classification_ppv_npv",
            ClassificationPair::PpvNpv,
            ["PPV", "NPV"],
        ),
    ] {
        let cols = pair.columns();
        record(
            dir,
            &mut w,
            name,
            false,
            classification_plot(sample, pair, &grid).map(|s| {
                let plot = Plot {
                    x: "threshold",
                    y: &cols,
                    labels: labels("Classification plot", "Threshold", "Proportion", &titles),
                };
                (s, Some(plot))
            }),
        )?;
    }

    record(
        dir,
        &mut w,
        "cost_curve",
        false,
        cost_curve(sample, &grid).map(|s| {
            let mut l = labels(
                "Cost curve",
                "Probability-cost value",
                "Normalized expected cost",
                &["model", "treat all", "treat none"],
            );
            l.y_range = (0.0, 1.0);
            let plot = Plot {
                x: "pc",
                y: &["normalized_ec", "treat_all", "treat_none"],
                labels: l,
            };
            (s, Some(plot))
        }),
    )?;
    Ok(w)
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub(crate) fn write_subgroups(
    dir: &Path,
    sample: &PredictionSample,
    choice: &CurveChoice,
) -> Result<SubgroupSummary> {
    let result = subgroup_calibration(sample, choice)?;
    let mut curves = BTreeMap::new();
    for (k, (label, curve)) in result.curves.iter().enumerate() {
        let name = format!("calibration_subgroup_{k}_{}", file_stem(label));
        let plot = Plot {
            x: "x",
            y: &["y"],
            labels: labels(
                &format!("Calibration: {label}"),
                "Estimated probability",
                "Observed proportion",
                &[label],
            ),
        };
        let f = write_series(dir, &name, &calibration_series(curve), Some(plot))?;
        curves.insert(label.clone(), f.csv);
    }
    Ok(SubgroupSummary {
        curves,
        flagged: result.flagged,
    })
}
