use crate::data::{PartialAucBand, PredictionSample};
use crate::error::{Error, Result};
use crate::measures::MeasureId;
use crate::metrics::ThresholdSweep;

fn require_both(sweep: &ThresholdSweep, measure: MeasureId) -> Result<()> {
    if sweep.n_events() == 0 || sweep.n_nonevents() == 0 {
        return Err(Error::undefined(measure, "requires both outcome classes"));
    }
    Ok(())
}

/// Concordance probability. Tied event/non-event pairs count one half, so the
/// value equals the Mann-Whitney U statistic over `N+ * N-`.
pub fn auroc(sample: &PredictionSample) -> Result<f64> {
    auroc_from_sweep(&ThresholdSweep::new(sample))
}

pub fn auroc_from_sweep(sweep: &ThresholdSweep) -> Result<f64> {
    require_both(sweep, MeasureId::Auroc)?;
    // Twice the concordance count, kept in integers so that samples with the
    // same rank structure give bit-identical results.
    let mut twice: u128 = 0;
    let mut below: u128 = 0;
    for (_, e, n) in sweep.tie_groups() {
        twice += 2 * e as u128 * below + (e as u128) * (n as u128);
        below += n as u128;
    }
    let pairs = sweep.n_events() as u128 * sweep.n_nonevents() as u128;
    Ok(twice as f64 / (2 * pairs) as f64)
}

/// Average precision: recall increments times precision, summed over the
/// distinct thresholds in descending order.
pub fn average_precision(sample: &PredictionSample) -> Result<f64> {
    average_precision_from_sweep(&ThresholdSweep::new(sample))
}

pub fn average_precision_from_sweep(sweep: &ThresholdSweep) -> Result<f64> {
    require_both(sweep, MeasureId::AveragePrecision)?;
    let n_pos = sweep.n_events() as f64;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    for (_, e, n) in sweep.tie_groups().rev() {
        tp += e;
        fp += n;
        if e > 0 {
            ap += (e as f64 / n_pos) * (tp as f64 / (tp + fp) as f64);
        }
    }
    Ok(ap)
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// Unnormalized partial AUROC over a sensitivity or false-positive-rate band.
/// Its maximum equals the band width.
///
/// For a sensitivity band, each event owns a `1/N+` slice of the sensitivity
/// axis (the lowest-risk event owns the slice ending at sensitivity 1) and
/// contributes its concordance with all non-events, weighted by how much of
/// its slice lies inside the band. A false-positive-rate band is the mirror
/// image over non-events.
pub fn partial_auroc(sample: &PredictionSample, band: PartialAucBand) -> Result<f64> {
    partial_auroc_from_sweep(&ThresholdSweep::new(sample), band)
}

pub fn partial_auroc_from_sweep(sweep: &ThresholdSweep, band: PartialAucBand) -> Result<f64> {
    require_both(sweep, MeasureId::PartialAuroc)?;
    band.validate()
        .map_err(|e| Error::undefined(MeasureId::PartialAuroc, e.to_string()))?;
    let n_pos = sweep.n_events() as f64;
    let n_neg = sweep.n_nonevents() as f64;
    let mut area = 0.0;
    match band {
        PartialAucBand::Sensitivity { lower, upper } => {
            let (mut events_below, mut nonevents_below) = (0usize, 0usize);
            for (_, e, n) in sweep.tie_groups() {
                if e > 0 {
                    let hi = (sweep.n_events() - events_below) as f64 / n_pos;
                    let lo = (sweep.n_events() - events_below - e) as f64 / n_pos;
                    let w = overlap((lo, hi), (lower, upper)) * n_pos;
                    area += w * (nonevents_below as f64 + 0.5 * n as f64);
                }
                events_below += e;
                nonevents_below += n;
            }
        }
        PartialAucBand::FalsePositiveRate { lower, upper } => {
            let (mut events_above, mut nonevents_above) = (0usize, 0usize);
            for (_, e, n) in sweep.tie_groups().rev() {
                if n > 0 {
                    let lo = nonevents_above as f64 / n_neg;
                    let hi = (nonevents_above + n) as f64 / n_neg;
                    let w = overlap((lo, hi), (lower, upper)) * n_neg;
                    area += w * (events_above as f64 + 0.5 * e as f64);
                }
                events_above += e;
                nonevents_above += n;
            }
        }
    }
    Ok(area / (n_pos * n_neg))
}

/// Partial AUROC rescaled so that a non-informative model scores 0.5 and a
/// perfect one scores 1.
pub fn partial_auroc_rescaled(sample: &PredictionSample, band: PartialAucBand) -> Result<f64> {
    let raw = partial_auroc(sample, band)?;
    let (a, b) = band.bounds();
    let max = b - a;
    let min = match band {
        PartialAucBand::Sensitivity { .. } => (b - a) - (b * b - a * a) / 2.0,
        PartialAucBand::FalsePositiveRate { .. } => (b * b - a * a) / 2.0,
    };
    Ok(0.5 * (1.0 + (raw - min) / (max - min)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: &[f64], y: &[u8]) -> PredictionSample {
        PredictionSample::new(p.to_vec(), y.iter().map(|&v| v == 1).collect()).unwrap()
    }

    #[test]
    fn d4_discrimination() {
        let s = sample(&[0.2, 0.8, 0.6, 0.4], &[0, 1, 1, 0]);
        assert_eq!(auroc(&s).unwrap(), 1.0);
        assert_eq!(average_precision(&s).unwrap(), 1.0);
        let band = PartialAucBand::sensitivity(0.8, 1.0).unwrap();
        assert!((partial_auroc(&s, band).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn single_tie_counts_half() {
        let s = sample(&[0.3, 0.3], &[0, 1]);
        assert_eq!(auroc(&s).unwrap(), 0.5);
    }

    #[test]
    fn null_model_ap_is_prevalence() {
        let s = sample(&[0.3; 10], &[1, 0, 0, 1, 0, 0, 1, 0, 0, 0]);
        assert!((average_precision(&s).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(auroc(&s).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        let s = sample(&[0.3, 0.6], &[1, 1]);
        assert!(matches!(auroc(&s), Err(Error::Undefined { .. })));
        assert!(average_precision(&s).is_err());
    }

    #[test]
    fn full_band_equals_auroc() {
        let s = sample(
            &[0.1, 0.4, 0.35, 0.8, 0.4, 0.65, 0.2, 0.9],
            &[0, 0, 1, 1, 1, 0, 0, 1],
        );
        let full = auroc(&s).unwrap();
        let sens = partial_auroc(&s, PartialAucBand::sensitivity(0.0, 1.0).unwrap()).unwrap();
        let fpr =
            partial_auroc(&s, PartialAucBand::false_positive_rate(0.0, 1.0).unwrap()).unwrap();
        assert!((full - sens).abs() < 1e-12);
        assert!((full - fpr).abs() < 1e-12);
    }

    #[test]
    fn perfect_model_partial_area_is_band_width() {
        let s = sample(&[0.1, 0.2, 0.3, 0.7, 0.8, 0.9], &[0, 0, 0, 1, 1, 1]);
        let band = PartialAucBand::sensitivity(0.8, 1.0).unwrap();
        assert!((partial_auroc(&s, band).unwrap() - 0.2).abs() < 1e-15);
        assert!((partial_auroc_rescaled(&s, band).unwrap() - 1.0).abs() < 1e-12);
    }
}
