//! Accuracy-versus-hidden-size line charts as standalone SVG.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub name: String,
    /// `(hidden size, accuracy as a fraction)`
    pub points: Vec<(usize, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one polyline per series with x on a log2 scale and y in percent.
/// Hidden sizes below `min_hidden` are left out.
pub fn render(series: &[Series], min_hidden: usize, manifest: &str) -> String {
    let shown: Vec<Vec<(usize, f64)>> = series
        .iter()
        .map(|s| s.points.iter().copied().filter(|&(h, _)| h >= min_hidden && h > 0).collect())
        .collect();
    let mut sizes: Vec<usize> = shown.iter().flatten().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let accs: Vec<f64> = shown.iter().flatten().map(|p| 100.0 * p.1).collect();

    let (x_lo, x_hi) = match (sizes.first(), sizes.last()) {
        (Some(&a), Some(&b)) if a < b => ((a as f64).log2(), (b as f64).log2()),
        (Some(&a), _) => ((a as f64).log2() - 1.0, (a as f64).log2() + 1.0),
        _ => (0.0, 1.0),
    };
    let lo = accs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut y_lo, mut y_hi) = if accs.is_empty() {
        (0.0, 100.0)
    } else {
        ((lo / 5.0).floor() * 5.0, (hi / 5.0).ceil() * 5.0)
    };
    if y_hi - y_lo < 5.0 {
        y_lo = (y_lo - 5.0).max(0.0);
        y_hi = (y_lo + 10.0).min(100.0);
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |h: usize| LEFT + ((h as f64).log2() - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |pct: f64| TOP + (y_hi - pct) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<!-- manifest={} -->", escape(manifest));
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1} {y0:.1} L{x0:.1} {y1:.1} L{x1:.1} {y1:.1}" fill="none" stroke="black"/>"#
    );
    for &h in &sizes {
        let x = px(h);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{y1:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{h}</text>"#,
            y1 + 5.0,
            y1 + 20.0
        );
    }
    let mut tick = y_lo;
    while tick <= y_hi + 1e-9 {
        let y = py(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{tick:.0}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
        tick += 5.0;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">hidden size (log2 scale)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">accuracy (%)</text>"#,
        (y0 + y1) / 2.0
    );
    for (i, (s, pts)) in series.iter().zip(&shown).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let name = escape(&s.name);
        let coords: Vec<String> = pts.iter().map(|&(h, a)| format!("{:.1},{:.1}", px(h), py(100.0 * a))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-series="{name}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for &(h, a) in pts {
            let _ = writeln!(
                svg,
                r#"<circle data-series="{name}" data-hidden="{h}" data-accuracy="{:.2}" cx="{:.1}" cy="{:.1}" r="3" fill="{color}"><title>{name} h={h}: {:.2}%</title></circle>"#,
                100.0 * a,
                px(h),
                py(100.0 * a),
                100.0 * a
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            x1 + 10.0,
            x1 + 30.0,
            x1 + 36.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
