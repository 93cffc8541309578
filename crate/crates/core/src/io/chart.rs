use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::embedding::TimeSeries;
use crate::error::{Error, Result};
use crate::windowed::MeasureSeries;

const WIDTH: f64 = 960.0;
const PANEL_HEIGHT: f64 = 260.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const GAP: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#c0392b", "#2471a3", "#229954", "#7d3c98", "#d68910", "#566573",
];

struct Panel {
    top: f64,
    lo: f64,
    hi: f64,
}

impl Panel {
    fn new(top: f64, values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if !(hi > lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { top, lo, hi }
    }

    fn y(&self, v: f64) -> f64 {
        self.top + PANEL_HEIGHT * (self.hi - v) / (self.hi - self.lo)
    }

    fn frame(&self, out: &mut String, label: &str) {
        let bottom = self.top + PANEL_HEIGHT;
        writeln!(
            out,
            r##"<rect x="{LEFT:.2}" y="{:.2}" width="{:.2}" height="{PANEL_HEIGHT:.2}" fill="none" stroke="#999"/>"##,
            self.top,
            WIDTH - LEFT - RIGHT
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.4}</text>"#,
            LEFT - 6.0,
            self.top + 4.0,
            self.hi
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.4}</text>"#,
            LEFT - 6.0,
            bottom,
            self.lo
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            LEFT + 6.0,
            self.top + 16.0
        )
        .unwrap();
    }
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str) {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

/// SVG with the price on top and the measures below, sharing a date axis.
///
/// Each measure is drawn as one polyline per run of defined values.
pub fn render_chart(series: &TimeSeries, measures: &[MeasureSeries]) -> Result<String> {
    if series.is_empty() || measures.is_empty() || measures.iter().all(|m| m.is_empty()) {
        return Err(Error::InvalidConfig(
            "chart needs a series and at least one measure".into(),
        ));
    }
    let n = series.len();
    if let Some(p) = measures
        .iter()
        .flat_map(|m| &m.points)
        .find(|p| p.index >= n)
    {
        return Err(Error::InvalidConfig(format!(
            "measure index {} beyond series length {n}",
            p.index
        )));
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let x = |i: usize| LEFT + plot_w * i as f64 / (n - 1).max(1) as f64;
    let height = TOP + 2.0 * PANEL_HEIGHT + GAP + 40.0;

    let price = Panel::new(TOP, series.values().iter().copied());
    let lower = Panel::new(
        TOP + PANEL_HEIGHT + GAP,
        measures
            .iter()
            .flat_map(|m| m.points.iter().filter_map(|p| p.value)),
    );

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    price.frame(&mut out, "price");
    let names: Vec<&str> = measures.iter().map(|m| m.measure.name()).collect();
    lower.frame(&mut out, &names.join(", "));

    let pts: Vec<(f64, f64)> = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (x(i), price.y(v)))
        .collect();
    polyline(&mut out, &pts, "#1b2631");

    for (k, m) in measures.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut run = Vec::new();
        for p in &m.points {
            match p.value {
                Some(v) => run.push((x(p.index), lower.y(v))),
                None if !run.is_empty() => {
                    polyline(&mut out, &run, color);
                    run.clear();
                }
                None => {}
            }
        }
        if !run.is_empty() {
            polyline(&mut out, &run, color);
        }
    }

    let axis_y = lower.top + PANEL_HEIGHT + 16.0;
    let ticks = [0, n / 2, n - 1];
    for &i in ticks.iter().take(if n > 2 { 3 } else { n.min(2) }) {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{axis_y:.2}" text-anchor="middle">{}</text>"#,
            x(i),
            series.dates()[i].format("%Y-%m-%d")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn export_chart(
    series: &TimeSeries,
    measures: &[MeasureSeries],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let svg = render_chart(series, measures)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
