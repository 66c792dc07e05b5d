//! Lévy-area statistics and algebraic checks of the level-2 lift.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos_sums::mean_se;
use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::fbm_sim::{simulate, SimSpec};
use crate::gaussian_core::{iterated_cov_rl, HurstModel};
use crate::rough_lift::{chen_combine, lift2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: f64,
    pub replicas: u64,
    /// Sub-steps of `[0, 1]`; a power of two, at least 2.
    pub n: usize,
    pub seed: u64,
    /// Acceptance band in standard errors.
    pub k_se: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            h: 0.4,
            replicas: 10_000,
            n: 64,
            seed: 3,
            k_se: 5.0,
        }
    }
}

/// Tolerance of the exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;

pub fn run(p: &Params) -> Result<Report> {
    if p.n < 2 || !p.n.is_power_of_two() {
        return domain(format!("sub-step count must be a power of two >= 2, got {}", p.n));
    }
    if p.replicas < 2 {
        return domain("need at least two replicas");
    }
    let model = HurstModel::new(p.h, 2)?;
    let level = p.n.trailing_zeros();
    let per_rep: Vec<(f64, f64, f64)> = (0..p.replicas)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let path = simulate(&SimSpec::new(model, level, 1, p.seed)?.with_replica(r))?;
            let fine = lift2(&path);
            let total = fine.total();
            let halves = lift2(&path.regroup(1)?);
            let joined = chen_combine(&halves.cell(0), &halves.cell(1))?;
            let chen = (0..4).map(|k| (joined.a2[k] - total.a2[k]).abs()).fold(0.0, f64::max);
            let shuffle = fine.shuffle_defect().max(halves.shuffle_defect());
            Ok((total.level2(0, 1), chen, shuffle))
        })
        .collect::<Result<_>>()?;
    let squares: Vec<f64> = per_rep.iter().map(|v| v.0 * v.0).collect();
    let ms = mean_se(&squares);
    let oracle = iterated_cov_rl(2, 0.0, 1.0, p.n, p.h)?.corner();
    let mut rep = Report::new("lift", p)?;
    rep.push(Row::mc(
        "E[(B^{12}_{0,1})^2]",
        ms.mean,
        ms.se,
        Some(oracle),
        ms.within(oracle, p.k_se),
    ));
    let areas: Vec<f64> = per_rep.iter().map(|v| v.0).collect();
    let mean = mean_se(&areas);
    rep.push(Row::mc(
        "E[B^{12}_{0,1}]",
        mean.mean,
        mean.se,
        Some(0.0),
        mean.within(0.0, p.k_se),
    ));
    let chen = per_rep.iter().map(|v| v.1).fold(0.0, f64::max);
    rep.push(Row::exact(
        "max Chen defect",
        chen,
        ALGEBRA_TOL,
        Some(0.0),
        chen <= ALGEBRA_TOL,
    ));
    let shuffle = per_rep.iter().map(|v| v.2).fold(0.0, f64::max);
    rep.push(Row::exact(
        "max shuffle defect",
        shuffle,
        ALGEBRA_TOL,
        Some(0.0),
        shuffle <= ALGEBRA_TOL,
    ));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let rep = run(&Params {
            replicas: 2000,
            n: 16,
            ..Params::default()
        })
        .unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        assert!(run(&Params {
            n: 12,
            ..Params::default()
        })
        .is_err());
    }
}
