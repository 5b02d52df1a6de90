//! SVG scatter plots of two-dimensional configurations.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gaborface_core::{Configuration, Error};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

/// Renders one labelled marker per item. Both axes share one scale so
/// distances on the page are proportional to configuration distances.
/// Items missing from `labels` are labelled with their id.
pub fn render_scatter(
    config: &Configuration,
    labels: &BTreeMap<String, String>,
    title: &str,
) -> Result<String, Error> {
    if config.dims() != 2 {
        return Err(Error::UnsupportedDimension("render_scatter", config.dims()));
    }
    let pts: Vec<(f64, f64)> = (0..config.len())
        .map(|i| (config.point(i)[0], config.point(i)[1]))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let inner = SIZE - 2.0 * MARGIN;
    let scale = if span > 0.0 { inner / span } else { 1.0 };
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let mid = SIZE / 2.0;
    // page y grows downward
    let place = |x: f64, y: f64| (mid + (x - cx) * scale, mid - (y - cy) * scale);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{mid}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    )
    .unwrap();
    let (ox, oy) = place(0.0, 0.0);
    writeln!(
        s,
        r##"<g stroke="#bbbbbb" stroke-width="1"><line x1="{MARGIN}" y1="{oy:.2}" x2="{:.2}" y2="{oy:.2}"/><line x1="{ox:.2}" y1="{MARGIN}" x2="{ox:.2}" y2="{:.2}"/></g>"##,
        SIZE - MARGIN,
        SIZE - MARGIN
    )
    .unwrap();
    s.push_str("<g font-family=\"sans-serif\" font-size=\"11\">\n");
    for (id, &(x, y)) in config.item_ids().iter().zip(&pts) {
        let (px, py) = place(x, y);
        let label = labels.get(id).unwrap_or(id);
        writeln!(
            s,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="black"><title>{}</title></circle><text x="{:.2}" y="{:.2}">{}</text>"#,
            escape(id),
            px + 5.0,
            py - 5.0,
            escape(label)
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
