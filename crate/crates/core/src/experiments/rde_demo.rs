//! Self-convergence of the scalar geometric equation `dY = Y dB`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::gaussian_core::HurstModel;
use crate::rde::{geometric_closed_form, self_convergence, AffineField, Scheme};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: f64,
    pub m_min: u32,
    /// Number of step halvings after `m_min`.
    pub halvings: u32,
    pub replicas: u64,
    pub seed: u64,
    pub xi: f64,
    /// Runge-Kutta steps inside each log-ODE step.
    pub inner: usize,
    pub min_order: f64,
    /// `||J J^{-1} - I||` must stay below this multiple of the
    /// self-convergence estimate.
    pub inverse_factor: f64,
    /// Also report the plain second-order Taylor scheme.
    pub with_davie: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            h: 0.4,
            m_min: 10,
            halvings: 4,
            replicas: 20,
            seed: 10,
            xi: 1.0,
            inner: 1,
            min_order: 1.0,
            inverse_factor: 10.0,
            with_davie: true,
        }
    }
}

pub fn run(p: &Params) -> Result<Report> {
    if p.halvings < 2 || p.m_min < 1 || p.m_min + p.halvings > 20 {
        return domain("need at least two halvings and a finest level of at most 20");
    }
    if !p.xi.is_finite() || p.xi == 0.0 {
        return domain("initial value must be finite and non-zero");
    }
    let model = HurstModel::new(p.h, 1)?;
    let levels: Vec<u32> = (p.m_min..=p.m_min + p.halvings).collect();
    let field = AffineField::geometric_1d();
    let xi = DVector::from_element(1, p.xi);
    let exact = geometric_closed_form(p.xi);
    let mut rep = Report::new("rde-demo", p)?;
    let mut schemes = vec![(Scheme::LogOde { inner: p.inner }, "log-ODE", true)];
    if p.with_davie {
        schemes.push((Scheme::Davie, "Davie", false));
    }
    for (scheme, name, gate) in schemes {
        let r = self_convergence(model, &levels, p.replicas, p.seed, &field, &xi, scheme, Some(&exact))?;
        let order = Row::mc(
            format!("{name} self-convergence order"),
            r.theta,
            r.theta_stderr,
            Some(p.min_order),
            r.theta > p.min_order,
        );
        let bound = p.inverse_factor * r.self_estimate;
        let inv = Row::exact(
            format!("{name} max |J Jinv - I|"),
            r.inverse_defect,
            bound,
            Some(0.0),
            r.inverse_defect <= bound,
        );
        let est = Row::exact(
            format!("{name} self-convergence estimate"),
            r.self_estimate,
            0.0,
            None,
            true,
        )
        .info();
        let err = Row::exact(
            format!("{name} rms error vs xi exp(B_1)"),
            r.exact_rms.unwrap_or(f64::NAN),
            r.self_estimate,
            Some(0.0),
            true,
        )
        .info();
        for row in [order, inv, est, err] {
            rep.push(if gate { row } else { row.info() });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run() {
        let p = Params {
            m_min: 6,
            halvings: 3,
            replicas: 4,
            ..Params::default()
        };
        let rep = run(&p).unwrap();
        assert_eq!(rep.rows.len(), 8);
        assert!(rep.rows[4..].iter().all(|r| r.pass.is_none()));
        assert!(run(&Params { halvings: 1, ..p }).is_err());
    }
}
