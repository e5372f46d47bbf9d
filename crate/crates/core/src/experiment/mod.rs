//! Worked-example reproduction: instance construction, parameter sweeps,
//! and CSV/SVG emission.

pub mod emit;
pub mod fig2;

pub use emit::{fmt_f64, render_svg, write_csv, write_svg, Series, Table};
pub use fig2::{
    build_fig2_instance, sweep_alpha, sweep_p, Fig2Config, SweepAlphaRow, SweepPRow,
};

use std::path::Path;

use crate::error::Result;

/// Run both sweeps and write `fig2a.csv/svg` and `fig2b.csv/svg` into the
/// output directory. Returns the written file names.
pub fn reproduce_fig2(cfg: &Fig2Config, out_dir: &Path, which: Option<&str>) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir).map_err(crate::error::Error::from)?;
    let mut written = Vec::new();
    let opt = |v: &Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "inf".into());

    if which.is_none() || which == Some("p") {
        let rows = sweep_p(cfg)?;
        let mut table = Table::new(&["p", "b_kl", "b_mod", "b_petz", "abs_gen"]);
        for r in &rows {
            table.push_row(vec![
                fmt_f64(r.p),
                opt(&r.b_kl),
                opt(&r.b_mod),
                opt(&r.b_petz),
                fmt_f64(r.abs_gen),
            ]);
        }
        let csv_path = out_dir.join("fig2a.csv");
        write_csv(&table, &csv_path)?;
        written.push(csv_path.display().to_string());

        let series: Vec<Series> = [
            ("KL", rows.iter().map(|r| (r.p, r.b_kl)).collect::<Vec<_>>()),
            ("modified", rows.iter().map(|r| (r.p, r.b_mod)).collect()),
            ("Petz", rows.iter().map(|r| (r.p, r.b_petz)).collect()),
        ]
        .into_iter()
        .map(|(name, pts)| Series {
            name: name.to_string(),
            points: pts
                .into_iter()
                .filter_map(|(x, y)| y.map(|v| (x, v)))
                .collect(),
        })
        .collect();
        let svg_path = out_dir.join("fig2a.svg");
        write_svg(
            "Bound optima against the mixing weight",
            "p",
            "bound value",
            &series,
            &svg_path,
        )?;
        written.push(svg_path.display().to_string());
    }

    if which.is_none() || which == Some("alpha") {
        let rows = sweep_alpha(cfg)?;
        let mut table = Table::new(&["alpha", "b_kl", "b_mod", "b_petz"]);
        for r in &rows {
            table.push_row(vec![
                fmt_f64(r.alpha),
                opt(&r.b_kl),
                opt(&r.b_mod),
                opt(&r.b_petz),
            ]);
        }
        let csv_path = out_dir.join("fig2b.csv");
        write_csv(&table, &csv_path)?;
        written.push(csv_path.display().to_string());

        let series: Vec<Series> = [
            ("KL", rows.iter().map(|r| (r.alpha, r.b_kl)).collect::<Vec<_>>()),
            ("modified", rows.iter().map(|r| (r.alpha, r.b_mod)).collect()),
            ("Petz", rows.iter().map(|r| (r.alpha, r.b_petz)).collect()),
        ]
        .into_iter()
        .map(|(name, pts)| Series {
            name: name.to_string(),
            points: pts
                .into_iter()
                .filter_map(|(x, y)| y.map(|v| (x, v)))
                .collect(),
        })
        .collect();
        let svg_path = out_dir.join("fig2b.svg");
        write_svg(
            "Per-order bounds at the reference mixing weight",
            "alpha",
            "bound value",
            &series,
            &svg_path,
        )?;
        written.push(svg_path.display().to_string());
    }

    Ok(written)
}
