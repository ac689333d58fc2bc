use crate::data::PredictionSample;
use crate::metrics::ConfusionCounts;

#[derive(Debug, Clone, Copy, PartialEq)]
struct TieGroup {
    value: f64,
    events: usize,
    nonevents: usize,
}

/// Confusion counts at one candidate threshold of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Everyone with probability at or above this value is high risk.
    /// `0.0` for treat-all and `f64::INFINITY` for treat-none.
    pub threshold: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

/// Distinct probabilities of a sample in ascending order with per-value class
/// counts. Every threshold-dependent quantity can be read off it in
/// O(log N) after an O(N log N) build.
#[derive(Debug, Clone)]
pub struct ThresholdSweep {
    groups: Vec<TieGroup>,
    // events / non-events with probability >= groups[k].value
    events_at_or_above: Vec<usize>,
    nonevents_at_or_above: Vec<usize>,
    n_events: usize,
    n_nonevents: usize,
}

impl ThresholdSweep {
    pub fn new(sample: &PredictionSample) -> Self {
        Self::from_parts(sample.probabilities(), sample.events())
    }

    pub fn from_parts(probabilities: &[f64], events: &[bool]) -> Self {
        let mut pairs: Vec<(f64, bool)> = probabilities
            .iter()
            .copied()
            .zip(events.iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut groups: Vec<TieGroup> = Vec::new();
        for (p, e) in pairs {
            match groups.last_mut() {
                Some(g) if g.value == p => {
                    if e {
                        g.events += 1
                    } else {
                        g.nonevents += 1
                    }
                }
                _ => groups.push(TieGroup {
                    value: p,
                    events: e as usize,
                    nonevents: (!e) as usize,
                }),
            }
        }
        let k = groups.len();
        let mut events_at_or_above = vec![0; k + 1];
        let mut nonevents_at_or_above = vec![0; k + 1];
        for i in (0..k).rev() {
            events_at_or_above[i] = events_at_or_above[i + 1] + groups[i].events;
            nonevents_at_or_above[i] = nonevents_at_or_above[i + 1] + groups[i].nonevents;
        }
        Self {
            n_events: events_at_or_above[0],
            n_nonevents: nonevents_at_or_above[0],
            groups,
            events_at_or_above,
            nonevents_at_or_above,
        }
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn n_nonevents(&self) -> usize {
        self.n_nonevents
    }

    pub fn len(&self) -> usize {
        self.n_events + self.n_nonevents
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of distinct probabilities.
    pub fn distinct(&self) -> usize {
        self.groups.len()
    }

    pub fn distinct_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.groups.iter().map(|g| g.value)
    }

    /// (value, events, non-events) per distinct probability, ascending.
    pub fn tie_groups(&self) -> impl DoubleEndedIterator<Item = (f64, usize, usize)> + '_ {
        self.groups.iter().map(|g| (g.value, g.events, g.nonevents))
    }

    fn point_at_group(&self, k: usize, threshold: f64) -> SweepPoint {
        let tp = self.events_at_or_above[k];
        let fp = self.nonevents_at_or_above[k];
        SweepPoint {
            threshold,
            true_pos: tp,
            false_pos: fp,
            true_neg: self.n_nonevents - fp,
            false_neg: self.n_events - tp,
        }
    }

    /// Confusion counts for the rule `p >= t` is high risk.
    pub fn confusion(&self, t: f64) -> ConfusionCounts {
        let k = self.groups.partition_point(|g| g.value < t);
        self.point_at_group(k, t).into()
    }

    /// Treat-all, then every distinct probability ascending, then treat-none.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.groups.len() + 2);
        out.push(self.point_at_group(0, 0.0));
        for (k, g) in self.groups.iter().enumerate() {
            out.push(self.point_at_group(k, g.value));
        }
        out.push(self.point_at_group(self.groups.len(), f64::INFINITY));
        out
    }
}

impl From<SweepPoint> for ConfusionCounts {
    fn from(p: SweepPoint) -> Self {
        ConfusionCounts {
            true_pos: p.true_pos,
            false_pos: p.false_pos,
            true_neg: p.true_neg,
            false_neg: p.false_neg,
            threshold: p.threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::confusion_at_threshold;
    use crate::Threshold;

    #[test]
    fn sweep_matches_direct_confusion() {
        let s = PredictionSample::new(
            vec![0.1, 0.3, 0.3, 0.5, 0.7, 0.7, 0.9],
            vec![false, true, false, false, true, true, true],
        )
        .unwrap();
        let sweep = ThresholdSweep::new(&s);
        assert_eq!(sweep.distinct(), 5);
        for t in [0.05, 0.1, 0.2, 0.3, 0.31, 0.7, 0.95] {
            let direct = confusion_at_threshold(&s, Threshold::new(t).unwrap());
            assert_eq!(sweep.confusion(t), direct, "t = {t}");
        }
        let pts = sweep.points();
        assert_eq!(pts.first().unwrap().true_pos, 4);
        assert_eq!(pts.first().unwrap().false_pos, 3);
        assert_eq!(
            pts.last().unwrap().true_pos + pts.last().unwrap().false_pos,
            0
        );
    }
}
