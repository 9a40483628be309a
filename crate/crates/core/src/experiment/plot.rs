//! SVG figures: split-ratio boxplots and test-error curves.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::cut_probs::CutProbabilityTable;
use super::mse::MseCurve;
use crate::error::{Error, Result};

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Data(format!("plotting failed: {e}"))
}

/// One boxplot per coordinate and `(n, d)` cell, written as
/// `cut_probs_n{n}_d{d}.svg`.
pub fn plot_cut_probs(table: &CutProbabilityTable, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (n, d) in table.grid() {
        let ratios = table.ratios(n, d);
        let path = dir.join(format!("cut_probs_n{n}_d{d}.svg"));
        let width = (60 + 14 * d as u32).max(480);
        let root = SVGBackend::new(&path, (width, 360)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let top = ratios.iter().flatten().copied().fold(0.0f64, f64::max).max(1e-3) * 1.05;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("split ratio per coordinate (n={n}, d={d})"), ("sans-serif", 16))
            .margin(10)
            .x_label_area_size(30)
            .y_label_area_size(50)
            .build_cartesian_2d((1..d as u32).into_segmented(), 0f32..top as f32)
            .map_err(plot_err)?;
        chart.configure_mesh().x_desc("coordinate").y_desc("ratio").x_labels(d.min(25)).draw().map_err(plot_err)?;
        chart
            .draw_series((0..d).map(|j| {
                let values: Vec<f64> = ratios.iter().map(|r| r[j]).collect();
                Boxplot::new_vertical(SegmentValue::CenterOf(j as u32 + 1), &Quartiles::new(&values))
            }))
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
        drop(chart);
        drop(root);
        written.push(path);
    }
    Ok(written)
}

/// Test error against `n` for each `d`, written as `mse_d{d}.svg`. Bars span
/// one standard error either side of the mean.
pub fn plot_mse_curve(curve: &MseCurve, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut dims: Vec<usize> = curve.points.iter().map(|p| p.d).collect();
    dims.sort_unstable();
    dims.dedup();
    let mut written = Vec::new();
    for d in dims {
        let pts: Vec<_> = curve.points.iter().filter(|p| p.d == d).collect();
        let path = dir.join(format!("mse_d{d}.svg"));
        let root = SVGBackend::new(&path, (560, 380)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let x_max = pts.iter().map(|p| p.n).max().unwrap_or(1) as f64;
        let x_min = pts.iter().map(|p| p.n).min().unwrap_or(1) as f64;
        let y_max = pts.iter().map(|p| p.mse_mean + p.mse_stderr).fold(0.0, f64::max).max(1e-12) * 1.1;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("{} test MSE (d={d})", pts[0].model), ("sans-serif", 16))
            .margin(10)
            .x_label_area_size(30)
            .y_label_area_size(60)
            .build_cartesian_2d((x_min * 0.8..x_max * 1.25).log_scale(), 0.0..y_max)
            .map_err(plot_err)?;
        chart.configure_mesh().x_desc("n").y_desc("MSE").draw().map_err(plot_err)?;
        chart.draw_series(LineSeries::new(pts.iter().map(|p| (p.n as f64, p.mse_mean)), &BLUE)).map_err(plot_err)?;
        chart
            .draw_series(pts.iter().map(|p| {
                ErrorBar::new_vertical(
                    p.n as f64,
                    p.mse_mean - p.mse_stderr,
                    p.mse_mean,
                    p.mse_mean + p.mse_stderr,
                    BLUE.filled(),
                    6,
                )
            }))
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
        drop(chart);
        drop(root);
        written.push(path);
    }
    Ok(written)
}
