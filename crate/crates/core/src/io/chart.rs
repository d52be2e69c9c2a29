//! Minimal standalone SVG rendering for bar and line charts.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::report::{ChartKind, Series};

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("chart has no data points")]
    EmptySeries,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
];

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render a chart to SVG text. Layout is deterministic.
pub fn render_chart_string(series: &[Series], kind: ChartKind) -> Result<String, ChartError> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(ChartError::EmptySeries);
    }
    let max_value = series
        .iter()
        .flat_map(|s| s.points.iter().map(|(_, v)| *v))
        .fold(f64::MIN, f64::max)
        .max(0.0);
    let min_value = series
        .iter()
        .flat_map(|s| s.points.iter().map(|(_, v)| *v))
        .fold(f64::MAX, f64::min)
        .min(0.0);
    let span = (max_value - min_value).max(1e-12);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - min_value) / span);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = fmt(MARGIN_LEFT),
        t = fmt(MARGIN_TOP),
        b = fmt(MARGIN_TOP + plot_h)
    ));
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = fmt(MARGIN_LEFT),
        r = fmt(MARGIN_LEFT + plot_w),
        b = fmt(MARGIN_TOP + plot_h)
    ));
    // Y-axis ticks.
    for i in 0..=4 {
        let value = min_value + span * (i as f64) / 4.0;
        let y = y_of(value);
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>\n",
            x1 = fmt(MARGIN_LEFT - 4.0),
            x2 = fmt(MARGIN_LEFT),
            y = fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{v:.4}</text>\n",
            x = fmt(MARGIN_LEFT - 8.0),
            y = fmt(y + 4.0),
            v = value
        ));
    }

    let categories: Vec<&String> = series
        .iter()
        .max_by_key(|s| s.points.len())
        .map(|s| s.points.iter().map(|(k, _)| k).collect())
        .unwrap_or_default();
    let slots = categories.len().max(1) as f64;

    match kind {
        ChartKind::Bar => {
            let group_w = plot_w / slots;
            let bar_w = group_w * 0.8 / series.len() as f64;
            for (si, s) in series.iter().enumerate() {
                let color = PALETTE[si % PALETTE.len()];
                for (pi, (_, v)) in s.points.iter().enumerate() {
                    let x = MARGIN_LEFT + group_w * (pi as f64 + 0.1) + bar_w * si as f64;
                    let y0 = y_of(0.0);
                    let y1 = y_of(*v);
                    let (top, h) = if y1 <= y0 { (y1, y0 - y1) } else { (y0, y1 - y0) };
                    svg.push_str(&format!(
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{h}\" fill=\"{color}\"/>\n",
                        x = fmt(x),
                        y = fmt(top),
                        w = fmt(bar_w),
                        h = fmt(h)
                    ));
                }
            }
        }
        ChartKind::Line => {
            for (si, s) in series.iter().enumerate() {
                let color = PALETTE[si % PALETTE.len()];
                let points: Vec<String> = s
                    .points
                    .iter()
                    .enumerate()
                    .map(|(pi, (_, v))| {
                        let x = MARGIN_LEFT + plot_w * (pi as f64 + 0.5) / slots;
                        format!("{},{}", fmt(x), fmt(y_of(*v)))
                    })
                    .collect();
                if !points.is_empty() {
                    svg.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                        points.join(" ")
                    ));
                }
            }
        }
    }

    // Category labels.
    for (pi, label) in categories.iter().enumerate() {
        let x = MARGIN_LEFT + plot_w * (pi as f64 + 0.5) / slots;
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
            x = fmt(x),
            y = fmt(MARGIN_TOP + plot_h + 16.0)
        ));
    }
    // Legend.
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let y = MARGIN_TOP + 14.0 * si as f64;
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            x = fmt(MARGIN_LEFT + plot_w - 120.0),
            y = fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\">{label}</text>\n",
            x = fmt(MARGIN_LEFT + plot_w - 106.0),
            y = fmt(y + 9.0),
            label = s.label
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write a chart SVG file.
pub fn render_chart(series: &[Series], kind: ChartKind, path: &Path) -> Result<(), ChartError> {
    let svg = render_chart_string(series, kind)?;
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, svg)?;
    Ok(())
}
