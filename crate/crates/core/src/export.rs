//! Output formats: CSV tables, the JSON report helpers and SVG figures.
//!
//! Every writer here is deterministic. Floats are rounded to 12 significant
//! digits and printed in shortest form so golden files are stable across
//! platforms.

use std::fmt::Write as _;

use serde_json::Value;

use crate::factors::FactorSolution;
use crate::mds::MapLayout;
use crate::trends::TrendSeries;

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{}", round12(x))
}

/// JSON number rounded to 12 significant digits (`null` if not finite).
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

pub fn json_nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_num(x)).collect())
}

/// Pretty JSON with a trailing newline. Object keys come out sorted because
/// `serde_json::Map` is ordered.
pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("Value always serializes");
    s.push('\n');
    s
}

/// `journal,factor_1..factor_k,designation`
pub fn loadings_csv(solution: &FactorSolution) -> String {
    let mut out = String::from("journal");
    for f in 1..=solution.k {
        let _ = write!(out, ",factor_{f}");
    }
    out.push_str(",designation\n");
    for (i, label) in solution.labels.iter().enumerate() {
        out.push_str(label);
        for v in solution.loadings.row(i) {
            out.push(',');
            out.push_str(&fmt_num(*v));
        }
        let _ = writeln!(out, ",{}", solution.designation[i]);
    }
    out
}

/// `journal,x,y,factor,stress`; one-dimensional layouts get `y = 0`.
pub fn layout_csv(layout: &MapLayout, designation: &[usize]) -> String {
    let mut out = String::from("journal,x,y,factor,stress\n");
    let stress = fmt_num(layout.stress);
    for (i, label) in layout.labels.iter().enumerate() {
        let x = layout.coords[(i, 0)];
        let y = if layout.coords.cols() > 1 { layout.coords[(i, 1)] } else { 0.0 };
        let _ = writeln!(out, "{label},{},{},{},{stress}", fmt_num(x), fmt_num(y), designation[i]);
    }
    out
}

/// `year,a_cites_b,b_cites_a,a_cites_b_ma,b_cites_a_ma`; moving-average
/// cells stay empty where no full window is centered on the year.
pub fn trend_csv(ab: &TrendSeries, ba: &TrendSeries) -> String {
    let mut out = String::from("year,a_cites_b,b_cites_a,a_cites_b_ma,b_cites_a_ma\n");
    for (p, q) in ab.points.iter().zip(&ba.points) {
        let year = p.0;
        let ma = |s: &TrendSeries| s.smoothed_at(year).map(fmt_num).unwrap_or_default();
        let _ = writeln!(out, "{year},{},{},{},{}", fmt_num(p.1), fmt_num(q.1), ma(ab), ma(ba));
    }
    out
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];
const MAP_SIZE: f64 = 800.0;
const MAP_MARGIN: f64 = 0.05 * MAP_SIZE;

fn glyph(factor: usize, cx: f64, cy: f64) -> String {
    let color = PALETTE[(factor - 1) % PALETTE.len()];
    let r = 6.0;
    match (factor - 1) % 5 {
        0 => format!(r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="{color}"/>"#),
        1 => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{color}"/>"#,
            cx - r,
            cy - r,
            2.0 * r,
            2.0 * r
        ),
        2 => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            cx,
            cy - r,
            cx + r,
            cy + r,
            cx - r,
            cy + r
        ),
        3 => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            cx,
            cy - r,
            cx + r,
            cy,
            cx,
            cy + r,
            cx - r,
            cy
        ),
        _ => format!(
            r#"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{color}" stroke-width="3"/>"#,
            cx - r,
            cy - r,
            cx + r,
            cy + r,
            cx - r,
            cy + r,
            cx + r,
            cy - r
        ),
    }
}

/// Scatter plot of a layout: one labeled group per journal, glyph and color
/// by factor, uniform scaling into an 800×800 view box with a 5% margin.
pub fn map_svg(layout: &MapLayout, designation: &[usize], title: &str) -> String {
    let n = layout.labels.len();
    let xs: Vec<f64> = (0..n).map(|i| layout.coords[(i, 0)]).collect();
    let ys: Vec<f64> = (0..n).map(|i| if layout.coords.cols() > 1 { layout.coords[(i, 1)] } else { 0.0 }).collect();
    let range = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let ((x0, x1), (y0, y1)) = (range(&xs), range(&ys));
    let span = (x1 - x0).max(y1 - y0);
    let scale = if span > 0.0 { (MAP_SIZE - 2.0 * MAP_MARGIN) / span } else { 1.0 };
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let half = MAP_SIZE / 2.0;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{MAP_SIZE}" height="{MAP_SIZE}" viewBox="0 0 {MAP_SIZE} {MAP_SIZE}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "  <title>{}</title>", xml_escape(title));
    let _ = writeln!(svg, r#"  <rect x="0" y="0" width="{MAP_SIZE}" height="{MAP_SIZE}" fill="white"/>"#);
    for i in 0..n {
        let px = half + (xs[i] - cx) * scale;
        let py = half - (ys[i] - cy) * scale;
        let label = xml_escape(&layout.labels[i]);
        let _ = writeln!(svg, r#"  <g class="point" data-journal="{label}" data-factor="{}">"#, designation[i]);
        let _ = writeln!(svg, "    {}", glyph(designation[i], px, py));
        let _ = writeln!(svg, r#"    <text x="{:.2}" y="{:.2}">{label}</text>"#, px + 9.0, py + 4.0);
        svg.push_str("  </g>\n");
    }
    let _ = writeln!(
        svg,
        r#"  <text class="caption" x="{half}" y="{:.2}" text-anchor="middle">Kruskal stress-1 = {}</text>"#,
        MAP_SIZE - 12.0,
        fmt_num(layout.stress)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Line chart of both directions: raw counts dashed, moving averages solid.
pub fn trend_svg(ab: &TrendSeries, ba: &TrendSeries, title: &str) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const PAD: f64 = 60.0;
    let years: Vec<i32> = ab.points.iter().map(|p| p.0).collect();
    let (first, last) = (*years.first().unwrap_or(&0), *years.last().unwrap_or(&0));
    let ymax = ab.points.iter().chain(&ba.points).map(|p| p.1).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
    let px = |year: i32| {
        if last == first {
            W / 2.0
        } else {
            PAD + (year - first) as f64 / (last - first) as f64 * (W - 2.0 * PAD)
        }
    };
    let py = |v: f64| H - PAD - v / ymax * (H - 2.0 * PAD);
    let line = |pts: &[(i32, f64)]| {
        pts.iter().map(|&(y, v)| format!("{:.2},{:.2}", px(y), py(v))).collect::<Vec<_>>().join(" ")
    };

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "  <title>{}</title>", xml_escape(title));
    let _ = writeln!(svg, r#"  <rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"  <path d="M{PAD},{PAD}V{:.2}H{:.2}" fill="none" stroke="black"/>"#, H - PAD, W - PAD);
    for &y in &years {
        let _ = writeln!(svg, r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle">{y}</text>"#, px(y), H - PAD + 18.0);
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        PAD - 6.0,
        PAD + 4.0,
        fmt_num(ymax)
    );
    for (series, color, y_legend) in [(ab, PALETTE[0], 20.0), (ba, PALETTE[1], 36.0)] {
        let name = xml_escape(&format!("{} → {}", series.citing, series.cited));
        let _ = writeln!(
            svg,
            r#"  <g class="series" data-citing="{}" data-cited="{}">"#,
            xml_escape(&series.citing),
            xml_escape(&series.cited)
        );
        let _ = writeln!(
            svg,
            r#"    <polyline class="raw" points="{}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            line(&series.points)
        );
        if !series.smoothed.is_empty() {
            let _ = writeln!(
                svg,
                r#"    <polyline class="smoothed" points="{}" fill="none" stroke="{color}" stroke-width="2.5"/>"#,
                line(&series.smoothed)
            );
        }
        let _ = writeln!(svg, r#"    <text x="{:.2}" y="{y_legend}" fill="{color}">{name}</text>"#, W - PAD - 200.0);
        svg.push_str("  </g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn rounding() {
        assert_eq!(fmt_num(5.0), "5");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(-2.0 / 3.0e5), "-0.00000666666666667");
        assert_eq!(json_num(f64::NAN), Value::Null);
    }

    #[test]
    fn escaping() {
        assert_eq!(xml_escape("A&B <C>"), "A&amp;B &lt;C&gt;");
    }

    fn layout3() -> MapLayout {
        MapLayout {
            labels: vec!["A".into(), "B&C".into(), "D".into()],
            coords: Matrix::from_rows(&[[1.0, 0.0], [-0.5, 0.5], [-0.5, -0.5]]),
            stress: 0.0123,
            seed: 42,
            restarts: 8,
            best_start: 0,
            history: vec![],
        }
    }

    #[test]
    fn map_svg_structure() {
        let svg = map_svg(&layout3(), &[1, 2, 2], "test map");
        let doc = roxmltree::Document::parse(&svg).expect("well-formed");
        let groups: Vec<_> = doc.descendants().filter(|n| n.attribute("class") == Some("point")).collect();
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[1].attribute("data-journal"), Some("B&C"));
        assert!(groups.iter().all(|g| g.children().any(|c| c.has_tag_name("text"))));
        assert!(svg.contains("Kruskal stress-1 = 0.0123"));
        assert!(groups[0].children().any(|c| c.has_tag_name("circle")));
        assert!(groups[1].children().any(|c| c.has_tag_name("rect")));
    }

    #[test]
    fn map_svg_stays_in_margins() {
        let svg = map_svg(&layout3(), &[1, 1, 1], "m");
        let doc = roxmltree::Document::parse(&svg).unwrap();
        for c in doc.descendants().filter(|n| n.has_tag_name("circle")) {
            for attr in ["cx", "cy"] {
                let v: f64 = c.attribute(attr).unwrap().parse().unwrap();
                assert!((40.0..=760.0).contains(&v), "{attr}={v}");
            }
        }
    }

    #[test]
    fn trend_table() {
        let ab = TrendSeries {
            citing: "A".into(),
            cited: "B".into(),
            points: vec![(1980, 1.0), (1982, 2.0), (1984, 6.0)],
            smoothed: vec![(1982, 3.0)],
        };
        let ba = TrendSeries {
            citing: "B".into(),
            cited: "A".into(),
            points: vec![(1980, 0.0), (1982, 0.0), (1984, 3.0)],
            smoothed: vec![(1982, 1.0)],
        };
        assert_eq!(
            trend_csv(&ab, &ba),
            "year,a_cites_b,b_cites_a,a_cites_b_ma,b_cites_a_ma\n1980,1,0,,\n1982,2,0,3,1\n1984,6,3,,\n"
        );
        let svg = trend_svg(&ab, &ba, "t");
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("series")).count(), 2);
    }
}
