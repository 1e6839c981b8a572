//! Minimal SVG line plots for success/precision curves. No display server,
//! no plotting dependency: analysts open the files after a run.

use std::fmt::Write as _;

pub struct CurveSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Renders series into a fixed-size SVG with axes, ticks, and a legend.
/// `x_max` trims the domain (e.g. 1.0 for IoU thresholds, 50 for pixels).
pub fn render_svg(title: &str, x_label: &str, y_label: &str, x_max: f64, series: &[CurveSeries]) -> String {
    let width = 640.0;
    let height = 480.0;
    let margin_left = 70.0;
    let margin_right = 30.0;
    let margin_top = 50.0;
    let margin_bottom = 60.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let sx = |x: f64| margin_left + (x / x_max).clamp(0.0, 1.0) * plot_w;
    let sy = |y: f64| margin_top + (1.0 - y.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
        width / 2.0,
        title
    );

    // gridlines and ticks at fifths
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let x = sx(f * x_max);
        let y = sy(f);
        let _ = writeln!(
            svg,
            r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#dddddd"/>"##,
            margin_top,
            margin_top + plot_h
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#dddddd"/>"##,
            margin_left,
            margin_left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            margin_top + plot_h + 18.0,
            trim_float(f * x_max)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            margin_left - 8.0,
            y + 4.0,
            trim_float(f)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{margin_left}" y="{margin_top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        margin_left + plot_w / 2.0,
        height - 16.0,
        x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        margin_top + plot_h / 2.0,
        margin_top + plot_h / 2.0,
        y_label
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        let ly = margin_top + 14.0 + i as f64 * 18.0;
        let lx = margin_left + plot_w - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_contains_series_and_axes() {
        let series = vec![
            CurveSeries {
                label: "ftlr_sa".to_string(),
                points: (0..21).map(|i| (i as f64 * 0.05, 1.0 - i as f64 / 21.0)).collect(),
            },
            CurveSeries {
                label: "baseline".to_string(),
                points: (0..21).map(|i| (i as f64 * 0.05, 0.5)).collect(),
            },
        ];
        let svg = render_svg("Success plot", "overlap threshold", "success rate", 1.0, &series);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("ftlr_sa") && svg.contains("baseline"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
