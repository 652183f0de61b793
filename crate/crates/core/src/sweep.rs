//! Parameter sweeps over (r, α) or (r, η) grids.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::{coherent_g2, JointTable, SourceParams};

/// Quantity evaluated at each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// P(1, 1); second axis is α.
    P11,
    /// g²(0) with a perfect herald; second axis is α.
    G2Perfect,
    /// P_click(n); second axis is η.
    PClick(usize),
    /// g²(0) with the click herald; second axis is η.
    G2Click,
}

impl Quantity {
    /// Name of the second grid axis.
    pub fn second_axis(&self) -> &'static str {
        match self {
            Quantity::P11 | Quantity::G2Perfect => "alpha",
            Quantity::PClick(_) | Quantity::G2Click => "eta",
        }
    }
}

/// One evaluated cell. `value` is `None` exactly when `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub second: f64,
    pub value: Option<f64>,
    pub leakage: f64,
    pub error: Option<String>,
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(name, "grid has non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(name, "grid must be strictly increasing"));
    }
    Ok(())
}

/// Evaluates `quantity` on the outer product of `r_grid` and `second_grid`.
///
/// Rows come back with r as the outer index, whatever order cells finish in.
/// Values not on a grid axis (η for the α sweeps, α for the η sweeps,
/// cutoff tolerance, `k_max`) come from `base`. A failing cell is recorded in
/// its row and does not stop the sweep.
pub fn sweep_grid(quantity: Quantity, r_grid: &[f64], second_grid: &[f64], base: &SourceParams) -> Result<Vec<SweepRow>> {
    check_grid("r_grid", r_grid)?;
    check_grid(quantity.second_axis(), second_grid)?;

    let rows: Vec<Vec<SweepRow>> = r_grid
        .par_iter()
        .map(|&r| match quantity {
            Quantity::P11 | Quantity::G2Perfect => second_grid
                .par_iter()
                .map(|&alpha| {
                    let cell = base.with_r(r).and_then(|p| p.with_alpha(alpha)).and_then(|p| perfect_cell(quantity, &p));
                    finish(r, alpha, cell)
                })
                .collect(),
            Quantity::PClick(_) | Quantity::G2Click => {
                // the state does not depend on η, so one table serves the row
                let table = base.with_r(r).and_then(|p| JointTable::compute(&p).map(|t| (p, t)));
                second_grid
                    .iter()
                    .map(|&eta| {
                        let cell = match &table {
                            Ok((p, t)) => p.with_eta(eta).and_then(|p| click_cell(quantity, &p, t)),
                            Err(e) => Err(e.clone()),
                        };
                        finish(r, eta, cell)
                    })
                    .collect()
            }
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn finish(r: f64, second: f64, cell: Result<(f64, f64)>) -> SweepRow {
    match cell {
        Ok((value, leakage)) => SweepRow { r, second, value: Some(value), leakage, error: None },
        Err(e) => SweepRow { r, second, value: None, leakage: f64::NAN, error: Some(format!("{}: {e}", e.kind())) },
    }
}

fn perfect_cell(quantity: Quantity, params: &SourceParams) -> Result<(f64, f64)> {
    if quantity == Quantity::G2Perfect {
        if let Some(v) = coherent_g2(params, 1.0) {
            return v.map(|g| (g, 0.0));
        }
    }
    let table = JointTable::compute(params)?;
    let value = match quantity {
        Quantity::P11 => table.get(1, 1),
        _ => table.herald_column(1).moments().g2()?,
    };
    Ok((value, table.leakage()))
}

fn click_cell(quantity: Quantity, params: &SourceParams, table: &JointTable) -> Result<(f64, f64)> {
    if quantity == Quantity::G2Click {
        if let Some(v) = coherent_g2(params, params.eta()) {
            return v.map(|g| (g, 0.0));
        }
    }
    let dist = table.click(params.eta(), params.k_max())?;
    let value = match quantity {
        Quantity::PClick(n) => dist.get(n),
        _ => dist.moments().g2()?,
    };
    Ok((value, table.leakage()))
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps).map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{g2_click, g2_perfect, joint_probability};

    #[test]
    fn single_point_matches_direct_call() {
        let base = SourceParams::new(0.06, 0.9, 1.0).unwrap();
        let rows = sweep_grid(Quantity::P11, &[0.9], &[0.06], &base).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].value.unwrap(), joint_probability(1, 1, &base).unwrap());

        let rows = sweep_grid(Quantity::G2Perfect, &[0.9], &[0.06], &base).unwrap();
        assert_eq!(rows[0].value.unwrap(), g2_perfect(&base).unwrap());

        let p = base.with_eta(0.8).unwrap();
        let rows = sweep_grid(Quantity::G2Click, &[0.9], &[0.8], &base).unwrap();
        assert_eq!(rows[0].value.unwrap(), g2_click(&p).unwrap());
    }

    #[test]
    fn row_order_is_r_major() {
        let base = SourceParams::new(0.06, 0.5, 1.0).unwrap();
        let rows = sweep_grid(Quantity::P11, &[0.1, 0.2, 0.3], &[0.0, 0.5], &base).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.r, r.second)).collect();
        assert_eq!(keys, vec![(0.1, 0.0), (0.1, 0.5), (0.2, 0.0), (0.2, 0.5), (0.3, 0.0), (0.3, 0.5)]);
    }

    #[test]
    fn cell_errors_do_not_abort() {
        let base = SourceParams::new(0.06, 0.5, 1.0).unwrap();
        let rows = sweep_grid(Quantity::G2Perfect, &[0.0, 0.5], &[0.0, 0.06], &base).unwrap();
        // r = 0, α = 0 has no heralded photons
        assert!(rows[0].error.as_deref().unwrap().starts_with("degenerate"));
        assert!(rows[0].value.is_none());
        assert_eq!(rows[1].value, Some(1.0));
        assert!(rows[2].value.is_some() && rows[3].value.is_some());
    }

    #[test]
    fn grid_validation() {
        let base = SourceParams::new(0.06, 0.5, 1.0).unwrap();
        assert!(sweep_grid(Quantity::P11, &[], &[0.1], &base).is_err());
        assert!(sweep_grid(Quantity::P11, &[0.2, 0.1], &[0.1], &base).is_err());
        assert!(sweep_grid(Quantity::G2Click, &[0.2], &[0.5, 0.5], &base).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.5, 4), vec![0.0, 0.5, 1.0, 1.5]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
