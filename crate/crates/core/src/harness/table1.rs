use std::fmt::Write;

use serde::Serialize;

use crate::channels::{standard_channel, StandardKind};
use crate::du::{du, DuMethod};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub family: StandardKind,
    pub param: f64,
    pub du: f64,
    pub closed_form: f64,
    pub abs_dev: f64,
    pub method: DuMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max)
    }

    pub fn max_deviation_for(&self, family: StandardKind) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.family == family)
            .map(|r| r.abs_dev)
            .fold(0.0, f64::max)
    }
}

/// `points` equally spaced values covering `[0, 1]`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// Dispatcher DU against the closed form for every standard family and grid
/// parameter.
pub fn run_table1(grid: &[f64]) -> Result<Table1Report> {
    let mut rows = Vec::with_capacity(grid.len() * StandardKind::ALL.len());
    for family in StandardKind::ALL {
        for &param in grid {
            let (res, _) = du(&standard_channel(family, param)?)?;
            let closed_form = family.closed_form_du(param);
            rows.push(Table1Row {
                family,
                param,
                du: res.value,
                closed_form,
                abs_dev: (res.value - closed_form).abs(),
                method: res.method,
            });
        }
    }
    Ok(Table1Report { rows })
}

pub fn table1_csv(report: &Table1Report) -> String {
    let mut out = String::from("family,param,du,closed_form,abs_dev,method\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{:.15},{:.15},{:.3e},{}",
            r.family,
            r.param,
            r.du,
            r.closed_form,
            r.abs_dev,
            r.method.name()
        );
    }
    let _ = writeln!(out, "# max_abs_dev={:.3e}", report.max_deviation());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depolarizing_grid_matches() {
        let grid = uniform_grid(11);
        let report = run_table1(&grid).unwrap();
        assert!(report.max_deviation_for(StandardKind::Depolarizing) < 1e-9);
        assert_eq!(report.rows.len(), 44);
    }

    #[test]
    fn depolarizing_branches() {
        // identity branch until the branches meet at p = 1
        let report = run_table1(&[4.0 / 7.0, 1.0]).unwrap();
        let rows: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.family == StandardKind::Depolarizing)
            .collect();
        assert!((rows[0].du - 4.0 / 7.0).abs() < 1e-9);
        assert!((rows[1].du - 0.25).abs() < 1e-9);
    }

    #[test]
    fn amplitude_damping_full_decay() {
        let report = run_table1(&[1.0]).unwrap();
        let row = report
            .rows
            .iter()
            .find(|r| r.family == StandardKind::AmplitudeDamping)
            .unwrap();
        assert!((row.du - 0.25).abs() < 1e-9);
    }

    #[test]
    fn grid_shape() {
        assert_eq!(uniform_grid(51).len(), 51);
        assert_eq!(uniform_grid(51)[50], 1.0);
        assert_eq!(uniform_grid(1), vec![0.0]);
    }
}
