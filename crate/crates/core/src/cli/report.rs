//! Result files and terminal tables.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::design::{GearboxDesign, Topology};
use crate::optimizer::{Assessment, DesignEvaluation, OptimizeOutcome, SweepResult};

use super::plot::{line_chart, Series};

/// Column order of every CSV result file.
pub const CSV_COLUMNS: [&str; 19] = [
    "topology",
    "bin_lo",
    "bin_hi",
    "feasible",
    "mass_kg",
    "efficiency",
    "width_mm",
    "cost",
    "ratio",
    "N_s1",
    "N_p1",
    "N_r1",
    "N_s2",
    "N_p2",
    "N_r2",
    "module_1",
    "module_2",
    "n_p1",
    "n_p2",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub config: RunConfig,
    pub results: Vec<OptimizeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: RunConfig,
    pub sweep: SweepResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport<'a> {
    pub config: &'a RunConfig,
    pub assessment: &'a Assessment,
}

fn design_cells(d: &GearboxDesign) -> Vec<String> {
    let x = d.variables();
    let mut cells: Vec<String> = x[..6].iter().map(|v| v.to_string()).collect();
    cells.push(d.stage1.module.to_string());
    cells.push(d.stage2.module.to_string());
    cells.push(x[8].to_string());
    cells.push(x[9].to_string());
    cells
}

fn row(topology: Topology, lo: f64, hi: f64, best: Option<&DesignEvaluation>) -> Vec<String> {
    let mut cells = vec![topology.as_str().to_string(), lo.to_string(), hi.to_string()];
    match best {
        Some(b) => {
            cells.push("true".into());
            cells.push(format!("{:.6}", b.mass.total));
            cells.push(format!("{:.6}", b.efficiency));
            cells.push(format!("{:.3}", b.width.actuator_width));
            cells.push(format!("{:.6}", b.cost));
            cells.push(format!("{:.6}", b.ratio.value));
            cells.extend(design_cells(&b.design));
        }
        None => {
            cells.push("false".into());
            cells.resize(CSV_COLUMNS.len(), String::new());
        }
    }
    cells
}

/// Configuration as `#`-prefixed TOML lines.
fn config_comment(config: &RunConfig) -> String {
    let mut out = String::from("# gearbox-opt results; configuration:\n");
    for line in config.to_toml_string().lines() {
        let _ = writeln!(out, "# {line}");
    }
    out
}

fn write_csv(config: &RunConfig, rows: Vec<Vec<String>>, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(config_comment(config).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_csv(config: &RunConfig, sweep: &SweepResult, out: &mut impl Write) -> std::io::Result<()> {
    let rows = sweep
        .rows
        .iter()
        .map(|r| row(r.topology, r.bin_lo as f64, r.bin_hi as f64, r.best.as_ref()))
        .collect();
    write_csv(config, rows, out)
}

pub fn optimize_csv(config: &RunConfig, results: &[OptimizeOutcome], out: &mut impl Write) -> std::io::Result<()> {
    let (lo, hi) = (config.constraints.gr_min, config.constraints.gr_max);
    let rows = results.iter().map(|o| row(o.topology, lo, hi, o.best.as_ref())).collect();
    write_csv(config, rows, out)
}

/// The four sweep charts as `(file stem, svg)`.
pub fn sweep_charts(sweep: &SweepResult) -> Vec<(&'static str, String)> {
    let topologies: Vec<Topology> = Topology::ALL
        .into_iter()
        .filter(|t| sweep.rows.iter().any(|r| r.topology == *t))
        .collect();
    let metric = |f: fn(&DesignEvaluation) -> f64| -> Vec<Series> {
        topologies
            .iter()
            .map(|&t| Series {
                name: t.label().to_string(),
                points: sweep
                    .rows_for(t)
                    .map(|r| ((r.bin_lo + r.bin_hi) as f64 / 2.0, r.best.as_ref().map(f)))
                    .collect(),
            })
            .collect()
    };
    vec![
        ("sweep_mass", line_chart("Actuator mass", "gear ratio", "mass (kg)", &metric(|b| b.mass.total))),
        ("sweep_efficiency", line_chart("Efficiency", "gear ratio", "efficiency", &metric(|b| b.efficiency))),
        (
            "sweep_width",
            line_chart("Actuator width", "gear ratio", "width (mm)", &metric(|b| b.width.actuator_width)),
        ),
        ("sweep_cost", line_chart("Cost", "gear ratio", "cost", &metric(|b| b.cost))),
    ]
}

pub fn optimize_table(results: &[OptimizeOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:>9} {:>9} {:>10} {:>10} {:>9} {:>10} {:>9}  design",
        "type", "ratio", "mass kg", "efficiency", "width mm", "cost", "feasible", "time ms"
    );
    for o in results {
        match &o.best {
            Some(b) => {
                let _ = writeln!(
                    out,
                    "{:<5} {:>9.4} {:>9.4} {:>10.4} {:>10.2} {:>9.5} {:>10} {:>9.1}  {}",
                    o.topology.label(),
                    b.ratio.value,
                    b.mass.total,
                    b.efficiency,
                    b.width.actuator_width,
                    b.cost,
                    o.stats.feasible,
                    o.stats.elapsed_ms,
                    b.design
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "{:<5} {:>9} {:>9} {:>10} {:>10} {:>9} {:>10} {:>9.1}  no feasible design",
                    o.topology.label(),
                    "-",
                    "-",
                    "-",
                    "-",
                    "-",
                    o.stats.feasible,
                    o.stats.elapsed_ms
                );
            }
        }
    }
    out
}

pub fn assessment_text(a: &Assessment) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "design      {}", a.design);
    if let Some(r) = &a.ratio {
        let dir = if r.reversed { " (output reversed)" } else { "" };
        let _ = writeln!(out, "ratio       {} = {:.6}{dir}", r.exact, r.value);
    }
    match &a.efficiency {
        Ok(e) => {
            let _ = writeln!(out, "efficiency  {e:.6}");
        }
        Err(e) => {
            let _ = writeln!(out, "efficiency  unavailable: {e}");
        }
    }
    if let Some(w) = &a.width {
        let faces: Vec<String> = w.stage_face_widths.iter().map(|b| format!("{b:.3}")).collect();
        let _ = writeln!(
            out,
            "width       {:.3} mm actuator, {:.3} mm gearbox, face widths {} mm",
            w.actuator_width,
            w.gearbox_width,
            faces.join(" / ")
        );
    }
    if let Some(m) = &a.mass {
        let _ = writeln!(
            out,
            "mass        {:.4} kg ({:.4} kg gearbox + {:.4} kg motor)",
            m.total, m.gearbox_mass, m.motor_mass
        );
    }
    if let Some(c) = a.cost {
        let _ = writeln!(out, "cost        {c:.6}");
    }
    if a.feasibility.feasible {
        let _ = writeln!(out, "feasible    yes");
    } else {
        let _ = writeln!(out, "feasible    no");
        for v in &a.feasibility.violations {
            let _ = writeln!(out, "  {v}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_rows_have_empty_metrics() {
        let r = row(Topology::Sspg, 50.0, 51.0, None);
        assert_eq!(r.len(), CSV_COLUMNS.len());
        assert_eq!(r[3], "false");
        assert!(r[4..].iter().all(|c| c.is_empty()));
    }
}
