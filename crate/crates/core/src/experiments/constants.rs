//! Limit constants and the identity linking them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::gaussian_core::series_constants;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub hs: Vec<f64>,
    pub tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            hs: vec![0.35, 0.4, 0.45, 0.5],
            tol: 1e-8,
        }
    }
}

/// Tolerance of the Brownian anchor values.
pub const BROWNIAN_TOL: f64 = 1e-6;

pub fn run(p: &Params) -> Result<Report> {
    if p.hs.is_empty() {
        return domain("no Hurst parameters given");
    }
    let mut rep = Report::new("constants", p)?;
    for &h in &p.hs {
        let c = series_constants(h, p.tol)?;
        let tol = c.combined_tol();
        let brownian = (h - 0.5).abs() < 1e-15;
        let anchor = |name: &str, v: f64, oracle: f64| {
            if brownian {
                Row::exact(name, v, BROWNIAN_TOL, Some(oracle), (v - oracle).abs() <= BROWNIAN_TOL)
            } else {
                Row::exact(name, v, tol, None, true).info()
            }
        };
        rep.push(anchor(&format!("H={h} sigma^2"), c.sigma2, 1.0));
        rep.push(anchor(&format!("H={h} sigma_tilde^2"), c.sigma2_tilde, 0.5));
        rep.push(anchor(&format!("H={h} C"), c.fclt_c, 0.5));
        let lhs = c.fclt_c * c.fclt_c;
        let rhs = c.sigma2_tilde - c.sigma2 / 4.0;
        rep.push(Row::exact(
            format!("H={h} C^2 vs sigma_tilde^2 - sigma^2/4"),
            lhs,
            2.0 * tol,
            Some(rhs),
            (lhs - rhs).abs() <= 2.0 * tol,
        ));
    }
    Ok(rep)
}
