//! Minimal SVG line plots: linear axes, one polyline per series, a text
//! legend. Convenience output only; the CSV is the contract.

use std::collections::BTreeMap;
use std::path::Path;

use sarlab_core::gaussian::Bits;

use crate::sweep::{Row, RowStatus};
use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Finite plottable series extracted from the rows: schemes with bound pairs
/// split into `<scheme>_low` / `<scheme>_up`.
fn collect_series(rows: &[Row]) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        if row.status != RowStatus::Ok {
            continue;
        }
        if let (Some(lo), Some(up)) = (row.lower, row.upper) {
            series
                .entry(format!("{}_low", row.scheme))
                .or_default()
                .push((row.sweep_value, lo));
            series
                .entry(format!("{}_up", row.scheme))
                .or_default()
                .push((row.sweep_value, up));
        } else if let Some(Bits::Finite(v)) = row.value {
            series
                .entry(row.scheme.clone())
                .or_default()
                .push((row.sweep_value, v));
        }
    }
    series.retain(|_, pts| !pts.is_empty());
    series
}

/// Renders the rows as an SVG document.
pub fn render_svg(rows: &[Row], axis_label: &str) -> String {
    let series = collect_series(rows);
    let mut doc = String::new();
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    doc.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let (x0, x1, y0, y1) = {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for pts in series.values() {
            for (x, y) in pts {
                xs.push(*x);
                ys.push(*y);
            }
        }
        if xs.is_empty() {
            (0.0, 1.0, 0.0, 1.0)
        } else {
            let (xmin, xmax) = (
                xs.iter().cloned().fold(f64::INFINITY, f64::min),
                xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            );
            let (ymin, ymax) = (
                ys.iter().cloned().fold(f64::INFINITY, f64::min).min(0.0),
                ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            );
            let xpad = if xmax > xmin { 0.0 } else { 0.5 };
            let ypad = if ymax > ymin {
                (ymax - ymin) * 0.05
            } else {
                0.5
            };
            (xmin - xpad, xmax + xpad, ymin, ymax + ypad)
        }
    };

    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y0) / (y1 - y0) * (HEIGHT - MARGIN_T - MARGIN_B);

    // axes and ticks
    doc.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    doc.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        doc.push_str(&format!(
            "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>\n",
            px(fx),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        doc.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{:.3}</text>\n",
            px(fx),
            HEIGHT - MARGIN_B + 18.0,
            fx
        ));
        doc.push_str(&format!(
            "<line x1=\"{1:.1}\" y1=\"{0:.1}\" x2=\"{2:.1}\" y2=\"{0:.1}\" stroke=\"black\"/>\n",
            py(fy),
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        doc.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
            MARGIN_L - 8.0,
            py(fy) + 4.0,
            fy
        ));
    }
    doc.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{axis_label}</text>\n",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    ));
    doc.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" font-size=\"12\" transform=\"rotate(-90 18 {:.1})\" \
         text-anchor=\"middle\">bits per channel use</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    ));

    for (idx, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        doc.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * idx as f64 + 10.0;
        doc.push_str(&format!(
            "<line x1=\"{0:.1}\" y1=\"{ly:.1}\" x2=\"{1:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            WIDTH - MARGIN_R + 10.0,
            WIDTH - MARGIN_R + 34.0
        ));
        doc.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{name}</text>\n",
            WIDTH - MARGIN_R + 40.0,
            ly + 4.0
        ));
    }
    doc.push_str("</svg>\n");
    doc
}

pub fn write_svg(path: &Path, rows: &[Row], axis_label: &str) -> Result<(), CliError> {
    std::fs::write(path, render_svg(rows, axis_label))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
