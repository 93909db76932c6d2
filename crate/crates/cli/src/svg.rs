// SPDX-License-Identifier: MIT OR Apache-2.0

//! Static SVG plots. Coordinates are printed with fixed precision so the
//! output is byte-stable.

use std::fmt::Write;

use patred_core::evalbench::Trajectory;
use patred_core::{MatchResult, MidPoint};

const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

fn open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, stroke: &str, width: f64) -> String {
    let coords: Vec<String> = points.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

/// One row per trajectory: label, sparkline over the sweep's `N` values, min and max.
/// Sparklines share the `[lo, hi]` vertical range.
pub fn sparkline_table(title: &str, rows: &[Trajectory], lo: f64, hi: f64) -> String {
    const ROW: f64 = 22.0;
    const LABEL: f64 = 190.0;
    const SPARK: f64 = 220.0;
    let width = LABEL + SPARK + 130.0;
    let height = 30.0 + ROW * rows.len() as f64 + 10.0;
    let mut s = open(width, height);
    let _ = writeln!(
        s,
        "<text x=\"8\" y=\"18\" {FONT} font-weight=\"bold\">{}</text>",
        escape(title)
    );
    let span = if hi > lo { hi - lo } else { 1.0 };
    for (i, t) in rows.iter().enumerate() {
        let top = 30.0 + ROW * i as f64;
        let label = match t.eta {
            Some(eta) => format!("{} {} \u{3b7}={eta}", t.metric, t.kind.as_str()),
            None => format!("{} {}", t.metric, t.kind.as_str()),
        };
        let _ = writeln!(
            s,
            "<text x=\"8\" y=\"{:.2}\" {FONT}>{}</text>",
            top + 15.0,
            escape(&label)
        );
        let count = t.points.len().max(2) - 1;
        let line = t.points.iter().enumerate().map(|(k, &(_, v))| {
            let x = LABEL + SPARK * k as f64 / count as f64;
            let y = top + ROW - 3.0 - (ROW - 6.0) * ((v - lo) / span).clamp(0.0, 1.0);
            (x, y)
        });
        if t.points.len() == 1 {
            let (x, y) = line.clone().next().expect("one point");
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"#1f4e9c\"/>"
            );
        } else {
            s.push_str(&polyline(line, "#1f4e9c", 1.5));
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" {FONT}>{} / {}</text>",
            LABEL + SPARK + 12.0,
            top + 15.0,
            fmt_value(t.min()),
            fmt_value(t.max())
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Scatter of diagram coordinates on the upper half plane, `P_o` highlighted.
pub fn mid_scatter(points: &[MidPoint]) -> String {
    const SIZE: f64 = 360.0;
    const PAD: f64 = 30.0;
    let r = points
        .iter()
        .map(|p| p.radius)
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let scale = (SIZE - 2.0 * PAD) / (2.0 * r);
    let cx = SIZE / 2.0;
    let base = SIZE / 2.0 + PAD;
    let height = base + PAD;
    let mut s = open(SIZE, height);
    let _ = writeln!(
        s,
        "<line x1=\"{PAD}\" y1=\"{base:.2}\" x2=\"{:.2}\" y2=\"{base:.2}\" stroke=\"#888\"/>",
        SIZE - PAD
    );
    let _ = writeln!(
        s,
        "<path d=\"M {:.2} {base:.2} A {:.2} {:.2} 0 0 1 {:.2} {base:.2}\" fill=\"none\" stroke=\"#ccc\"/>",
        cx - r * scale,
        r * scale,
        r * scale,
        cx + r * scale
    );
    for p in points {
        let x = cx + p.x * scale;
        let y = base - p.y * scale;
        let reference = p.label == patred_core::search::REFERENCE_LABEL;
        let fill = if reference { "#c0392b" } else { "#1f4e9c" };
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{fill}\"/>"
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" {FONT}>{}</text>",
            x + 5.0,
            y - 5.0,
            escape(&p.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// The pattern followed by each match as a small line chart with its start index and distance.
pub fn match_strip(pattern: &[f64], matches: &[MatchResult]) -> String {
    const CELL: f64 = 110.0;
    const CHART: f64 = 70.0;
    let cells = matches.len() + 1;
    let mut s = open(CELL * cells as f64, CHART + 50.0);
    let mut chart = |i: usize, values: &[f64], caption: &str, stroke: &str| {
        let left = CELL * i as f64 + 10.0;
        let width = CELL - 20.0;
        let count = values.len().max(2) - 1;
        let pts = values.iter().enumerate().map(|(k, &v)| {
            (
                left + width * k as f64 / count as f64,
                10.0 + CHART * (1.0 - v.clamp(0.0, 1.0)),
            )
        });
        let _ = writeln!(
            s,
            "<rect x=\"{left:.2}\" y=\"10\" width=\"{width:.2}\" height=\"{CHART}\" fill=\"none\" stroke=\"#ddd\"/>"
        );
        s.push_str(&polyline(pts, stroke, 1.5));
        let _ = writeln!(
            s,
            "<text x=\"{left:.2}\" y=\"{:.2}\" {FONT}>{}</text>",
            CHART + 28.0,
            escape(caption)
        );
    };
    chart(0, pattern, "pattern", "#c0392b");
    for (i, m) in matches.iter().enumerate() {
        chart(
            i + 1,
            &m.window,
            &format!("#{} @{} d={:.3}", m.rank, m.start_index, m.distance),
            "#1f4e9c",
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use patred_core::{MetricId, RedundancyKind};

    fn trajectory() -> Trajectory {
        Trajectory {
            metric: MetricId::Nmi,
            kind: RedundancyKind::Cloud,
            eta: Some(0.1),
            points: vec![(0, 0.2), (1, 0.5), (2, 0.4)],
        }
    }

    #[test]
    fn sparkline_has_one_line_per_row() {
        let svg = sparkline_table("r2", &[trajectory(), trajectory()], 0.0, 1.0);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("0.200 / 0.500"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn scatter_marks_reference() {
        let pts = vec![
            MidPoint::polar("P_o", 2.0, 0.0),
            MidPoint::polar("12", 1.5, 0.7),
        ];
        let svg = mid_scatter(&pts);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("#c0392b").count(), 1);
    }

    #[test]
    fn strip_labels_matches() {
        let m = MatchResult {
            start_index: 40,
            distance: 0.0,
            rank: 1,
            window: vec![1.0, 0.0, 0.5],
        };
        let svg = match_strip(&[1.0, 0.0, 0.5], &[m]);
        assert!(svg.contains("#1 @40 d=0.000"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b&c"), "a&lt;b&amp;c");
    }
}
