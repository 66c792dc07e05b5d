//! Variation functionals of a user-supplied grid function.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::{Report, Row};
use crate::young::{bar_vp, controlled_pvar, tilde_vp, vp, ControlledMode, GridFunction, GridPartition, VpMode};

/// Plain JSON form of a grid function: per-axis points and row-major values
/// with the last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInput {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl GridInput {
    pub fn build(&self) -> Result<GridFunction> {
        GridFunction::new(GridPartition::new(self.axes.clone())?, self.values.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub mode: VpMode,
    pub controlled: ControlledMode,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            p: 2.0,
            mode: VpMode::Auto,
            controlled: ControlledMode::ExactSmall,
        }
    }
}

/// Reports the cell sum, grid-like, face-summed and controlled variations
/// and checks the orderings that hold between exact values.
pub fn run(f: &GridFunction, p: &Params) -> Result<Report> {
    let mut rep = Report::new("pvar", p)?;
    let tol = 1e-12;
    let tilde = tilde_vp(f, p.p)?;
    let grid = vp(f, p.p, p.mode)?;
    let bar = bar_vp(f, p.p, p.mode)?;
    let ctrl = controlled_pvar(f, p.p, p.controlled)?;
    let exact_tag = |v: &crate::young::Variation| if v.exact { "exact" } else { "lower bound" };
    rep.push(Row::exact("cell sum variation", tilde, 0.0, None, true).info());
    rep.push(
        Row::exact(
            format!("grid-like variation ({})", exact_tag(&grid)),
            grid.value,
            0.0,
            None,
            true,
        )
        .info(),
    );
    rep.push(
        Row::exact(
            format!("face-summed variation ({})", exact_tag(&bar)),
            bar.value,
            0.0,
            None,
            true,
        )
        .info(),
    );
    rep.push(
        Row::exact(
            format!("controlled variation ({})", exact_tag(&ctrl)),
            ctrl.value,
            0.0,
            None,
            true,
        )
        .info(),
    );
    let slack = tol * (1.0 + grid.value);
    rep.push(Row::exact(
        "grid-like >= cell sum",
        grid.value,
        slack,
        Some(tilde),
        grid.value + slack >= tilde,
    ));
    if grid.exact && bar.exact {
        rep.push(Row::exact(
            "face-summed >= grid-like",
            bar.value,
            slack,
            Some(grid.value),
            bar.value + slack >= grid.value,
        ));
    }
    if grid.exact && ctrl.exact {
        rep.push(Row::exact(
            "controlled >= grid-like",
            ctrl.value,
            slack,
            Some(grid.value),
            ctrl.value + slack >= grid.value,
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid() {
        let input = GridInput {
            axes: vec![vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 2.0]],
            values: vec![0.0, 1.0, -1.0, 2.0, 0.5, 0.0, 1.0, -2.0, 3.0],
        };
        let f = input.build().unwrap();
        let rep = run(&f, &Params::default()).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        assert_eq!(rep.rows.len(), 7);
        let bad = GridInput {
            values: vec![0.0; 3],
            ..input
        };
        assert!(bad.build().is_err());
    }
}
