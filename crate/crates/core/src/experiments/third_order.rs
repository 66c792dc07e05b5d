//! Scaling of the third-order sums from their exact covariances.

use serde::{Deserialize, Serialize};

use crate::chaos_sums::third::{second_moment_from_unit, unit_cov_table};
use crate::chaos_sums::KPattern;
use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::gaussian_core::{rho_lag, HurstModel};
use crate::numerics::linear_fit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: f64,
    pub m_min: u32,
    pub m_max: u32,
    /// Largest level whose cell pairs fit the per-pattern constant; pairs
    /// up to `m_max` validate it.
    pub fit_m_max: u32,
    pub n_quad: usize,
    pub slope_rel_tol: f64,
    /// Relative slack on the fitted constant at the validation levels.
    pub c_allowance: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            h: 0.4,
            m_min: 4,
            m_max: 9,
            fit_m_max: 8,
            n_quad: 32,
            slope_rel_tol: 0.1,
            c_allowance: 1e-3,
        }
    }
}

/// `sum_{k=1..3} |rho_H(lag)|^k`.
fn rho_power_sum(lag: u64, h: f64) -> f64 {
    let r = rho_lag(lag as i64, h).abs();
    r + r * r + r * r * r
}

pub fn run(p: &Params) -> Result<Report> {
    HurstModel::new(p.h, 3)?;
    if p.m_min >= p.m_max || p.fit_m_max > p.m_max || p.fit_m_max < p.m_min || p.m_max > 14 {
        return domain("need m_min <= fit_m_max <= m_max <= 14 and m_min < m_max");
    }
    if p.n_quad < 2 {
        return domain("need at least two quadrature points per cell");
    }
    let lags = 1u64 << p.m_max;
    let fit_lags = 1u64 << p.fit_m_max;
    let table = unit_cov_table(p.h, lags, p.n_quad);
    let target = -(6.0 * p.h - 1.0);
    let levels: Vec<u32> = (p.m_min..=p.m_max).collect();
    let xs: Vec<f64> = levels.iter().map(|&m| m as f64 * std::f64::consts::LN_2).collect();
    let mut rep = Report::new("verify-third-order", p)?;
    for (k, pattern) in KPattern::ALL.iter().enumerate() {
        let moments: Vec<f64> = levels
            .iter()
            .map(|&m| second_moment_from_unit(p.h, m, |l| table[l as usize][k]))
            .collect();
        if moments.iter().any(|v| !(*v > 0.0)) {
            return Err(crate::error::Error::Consistency(format!(
                "non-positive second moment for {}",
                pattern.name()
            )));
        }
        let ys: Vec<f64> = moments.iter().map(|v| v.ln()).collect();
        let fit = linear_fit(&xs, &ys);
        rep.push(Row::exact(
            format!("{} slope", pattern.name()),
            fit.slope,
            p.slope_rel_tol * target.abs(),
            Some(target),
            (fit.slope - target).abs() <= p.slope_rel_tol * target.abs(),
        ));
        let ratio = |l: u64| table[l as usize][k].abs() / rho_power_sum(l, p.h);
        let c_fit = (0..fit_lags).map(ratio).fold(0.0, f64::max);
        let worst = (0..lags).map(ratio).fold(0.0, f64::max) / c_fit;
        rep.push(Row::exact(format!("{} fitted C", pattern.name()), c_fit, p.c_allowance, None, true).info());
        rep.push(Row::exact(
            format!("{} covariance bound ratio (lags < {lags})", pattern.name()),
            worst,
            p.c_allowance,
            Some(1.0),
            worst <= 1.0 + p.c_allowance,
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table() {
        let p = Params {
            m_min: 3,
            m_max: 6,
            fit_m_max: 5,
            n_quad: 8,
            slope_rel_tol: 0.2,
            c_allowance: 0.05,
            ..Params::default()
        };
        let rep = run(&p).unwrap();
        assert_eq!(rep.rows.len(), 21);
        assert!(
            rep.rows
                .iter()
                .filter(|r| r.name.contains("slope"))
                .all(|r| r.pass == Some(true)),
            "{}",
            rep.summary()
        );
        assert!(run(&Params {
            fit_m_max: 10,
            ..Params::default()
        })
        .is_err());
    }
}
