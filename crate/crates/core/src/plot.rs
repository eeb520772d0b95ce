//! Minimal SVG rendering of Tippett curves.

use std::fmt::Write as _;

use crate::evaluation::TippettCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, colour: &str) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(
        out,
        r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

/// Both survival curves against base-10 log LR, with a line at LR = 1.
pub fn tippett_svg(curve: &TippettCurve) -> String {
    let pts = &curve.points;
    let (lo, hi) = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) if b.threshold > a.threshold => (a.threshold, b.threshold),
        (Some(a), _) => (a.threshold - 1.0, a.threshold + 1.0),
        _ => (-1.0, 1.0),
    };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |t: f64| MARGIN + (t - lo) / (hi - lo) * plot_w;
    let sy = |p: f64| HEIGHT - MARGIN - p * plot_h;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    if lo < 0.0 && hi > 0.0 {
        let x0 = sx(0.0);
        writeln!(
            out,
            r##"<line x1="{x0:.2}" y1="{MARGIN}" x2="{x0:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            HEIGHT - MARGIN
        )
        .unwrap();
    }
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = sy(tick);
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{tick}</text>"#,
            MARGIN - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    for i in 0..=4 {
        let t = lo + (hi - lo) * i as f64 / 4.0;
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.2}</text>"#,
            sx(t),
            HEIGHT - MARGIN + 18.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">log10 likelihood ratio</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">proportion &gt;= threshold</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    )
    .unwrap();
    polyline(&mut out, pts.iter().map(|p| (sx(p.threshold), sy(p.so_proportion))), "#1f77b4");
    polyline(&mut out, pts.iter().map(|p| (sx(p.threshold), sy(p.do_proportion))), "#d62728");
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" fill="#1f77b4">same origin</text>"##,
        WIDTH - MARGIN - 110.0,
        MARGIN + 16.0
    )
    .unwrap();
    writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" fill="#d62728">different origin</text>"##,
        WIDTH - MARGIN - 110.0,
        MARGIN + 32.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}
