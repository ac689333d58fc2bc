use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveType {
    Roc,
    Pr,
    Calibration,
    Classification,
    Decision,
    Cost,
    Density,
}

impl CurveType {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveType::Roc => "roc",
            CurveType::Pr => "pr",
            CurveType::Calibration => "calibration",
            CurveType::Classification => "classification",
            CurveType::Decision => "decision",
            CurveType::Cost => "cost",
            CurveType::Density => "density",
        }
    }
}

/// Ordered points of one plotted object. Each row holds one value per
/// column; `None` is a gap (an undefined value at that position).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub kind: CurveType,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub metadata: BTreeMap<String, String>,
}

impl CurveSeries {
    pub fn new(kind: CurveType, columns: &[&str]) -> Self {
        Self {
            kind,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidArgument(format!("curve has no column '{name}'")))
    }

    /// All values of one column.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }

    /// A column that is defined everywhere.
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::InvalidArgument(format!("column '{name}' has gaps"))))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |source| Error::Io {
            path: "<curve csv>".into(),
            source,
        };
        writeln!(out, "{}", self.columns.join(",")).map_err(io)?;
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|v| v.map(format_value).unwrap_or_default())
                .collect();
            writeln!(out, "{}", line.join(",")).map_err(io)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is ASCII")
    }

    /// Standalone line chart on a fixed 800x600 canvas with unit axes. One
    /// polyline per entry of `y`, broken at gaps. Output depends only on the
    /// data and arguments.
    pub fn to_svg(&self, x: &str, y: &[&str], labels: &SvgLabels) -> Result<String> {
        let xs = self.column(x)?;
        let ys: Vec<Vec<Option<f64>>> = y.iter().map(|c| self.column(c)).collect::<Result<_>>()?;
        let (x0, x1) = labels.x_range;
        let (y0, y1) = labels.y_range;
        let (left, right, top, bottom) = (80.0, 760.0, 40.0, 520.0);
        let px = |v: f64| left + (v - x0) / (x1 - x0) * (right - left);
        let py = |v: f64| bottom - (v - y0) / (y1 - y0) * (bottom - top);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600" font-family="sans-serif" font-size="14">"#
        );
        let _ = writeln!(
            s,
            r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="400" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            escape(&labels.title)
        );
        let _ = writeln!(
            s,
            r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#
        );
        for k in 0..=5 {
            let f = k as f64 / 5.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                px(xv),
                bottom + 20.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                left - 8.0,
                py(yv) + 5.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="420" y="560" text-anchor="middle">{}</text>"#,
            escape(&labels.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="24" y="280" text-anchor="middle" transform="rotate(-90 24 280)">{}</text>"#,
            escape(&labels.y_label)
        );
        for (k, col) in ys.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let mut segment: Vec<String> = Vec::new();
            let flush = |segment: &mut Vec<String>, s: &mut String| {
                if segment.len() > 1 {
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
                        segment.join(" ")
                    );
                } else if let Some(p) = segment.first() {
                    let (cx, cy) = p.split_once(',').expect("point has two coordinates");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{colour}"/>"#);
                }
                segment.clear();
            };
            for (xv, yv) in xs.iter().zip(col) {
                match (xv, yv) {
                    (Some(a), Some(b)) if a.is_finite() && b.is_finite() => {
                        segment.push(format!("{:.2},{:.2}", px(*a), py(*b)));
                    }
                    _ => flush(&mut segment, &mut s),
                }
            }
            flush(&mut segment, &mut s);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
                right - 150.0,
                top + 20.0 + 18.0 * k as f64,
                escape(labels.series.get(k).map(String::as_str).unwrap_or(y[k]))
            );
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

/// Axis titles and ranges for [`CurveSeries::to_svg`].
#[derive(Debug, Clone, PartialEq)]
pub struct SvgLabels {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub series: Vec<String>,
}

impl SvgLabels {
    pub fn unit(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            series: Vec::new(),
        }
    }
}

const PALETTE: [&str; 6] = [
    "#1b6ca8", "#d1495b", "#2e8b57", "#555555", "#edae49", "#7b4b94",
];

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Shortest representation that parses back to the same value.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series() -> CurveSeries {
        let mut c = CurveSeries::new(CurveType::Decision, &["threshold", "nb"]);
        c.push(vec![Some(0.1), Some(0.2)]);
        c.push(vec![Some(0.2), None]);
        c.push(vec![Some(0.3), Some(0.1)]);
        c.push(vec![Some(0.4), Some(0.05)]);
        c
    }

    #[test]
    fn csv_leaves_gaps_empty() {
        assert_eq!(
            series().to_csv_string(),
            "threshold,nb\n0.1,0.2\n0.2,\n0.3,0.1\n0.4,0.05\n"
        );
    }

    #[test]
    fn svg_is_deterministic_and_breaks_at_gaps() {
        let labels = SvgLabels::unit("Decision curve", "Threshold", "Net benefit");
        let a = series().to_svg("threshold", &["nb"], &labels).unwrap();
        let b = series().to_svg("threshold", &["nb"], &labels).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert_eq!(a.matches("<circle").count(), 1);
    }

    #[test]
    fn unknown_column_is_an_error() {
        assert!(series().column("missing").is_err());
        assert!(series().values("nb").is_err());
    }
}
