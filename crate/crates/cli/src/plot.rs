//! Minimal SVG line plots of result tables.

use std::fmt::Write;

use crate::table::ResultTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt_tick(x: f64) -> String {
    format!("{x:.3e}")
}

/// Renders the columns named in the table's plot spec. Rows with a missing x
/// or y value are skipped; a log axis also skips non-positive values.
pub fn render_svg(table: &ResultTable, title: &str) -> String {
    let spec = &table.plot;
    let xs = table.values(spec.x);
    let ty = |y: f64| if spec.log_y { y.log10() } else { y };
    let series: Vec<(&str, Vec<(f64, f64)>)> = spec
        .ys
        .iter()
        .map(|name| {
            let pts = xs
                .iter()
                .zip(table.values(name))
                .filter_map(|(x, y)| Some(((*x)?, y?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!spec.log_y || *y > 0.0))
                .map(|(x, y)| (x, ty(y)))
                .collect();
            (*name, pts)
        })
        .collect();

    let all = series.iter().flat_map(|(_, p)| p.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + y0.abs().max(1.0) * 1e-3;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let y_label = |y: f64| {
        if spec.log_y {
            fmt_tick(10f64.powf(y))
        } else {
            fmt_tick(y)
        }
    };
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}" text-anchor="middle">{}</text>"#,
        HEIGHT - MARGIN + 16.0,
        fmt_tick(x0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0,
        fmt_tick(x1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        HEIGHT - MARGIN,
        y_label(y0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        MARGIN - 4.0,
        MARGIN + 4.0,
        y_label(y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0,
        spec.x
    );

    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        if path.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{colour}"/>"#,
                sx(*x),
                sy(*y)
            );
        }
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{colour}">{name}</text>"#,
            MARGIN + 8.0
        );
    }
    s.push_str("</svg>\n");
    s
}
