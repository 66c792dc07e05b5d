//! Path simulation with a quadratic-variation sanity check.

use serde::{Deserialize, Serialize};

use crate::chaos_sums::mean_se;
use crate::error::Result;
use crate::experiments::{Report, Row};
use crate::fbm_sim::{simulate, FbmPath, SimMethod, SimSpec};
use crate::gaussian_core::{series_constants, HurstModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: f64,
    pub d: usize,
    pub m: u32,
    pub refine: usize,
    pub seed: u64,
    pub replica: u64,
    pub method: SimMethod,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            h: 0.4,
            d: 2,
            m: 10,
            refine: 1,
            seed: 1,
            replica: 0,
            method: SimMethod::Auto,
        }
    }
}

/// Simulates one path and checks that the mean squared normalised fine
/// increment is 1, with a standard error inflated by the long-run factor
/// `sigma^2`.
pub fn run(p: &Params) -> Result<(Report, FbmPath)> {
    let model = HurstModel::new(p.h, p.d)?;
    let spec = SimSpec::new(model, p.m, p.refine, p.seed)?
        .with_replica(p.replica)
        .with_method(p.method);
    let path = simulate(&spec)?;
    let mut rep = Report::new("simulate", p)?;
    let norm = path.n_points() as f64;
    let long_run = series_constants(p.h, 1e-8)?.sigma2.sqrt();
    for a in 0..p.d {
        let sq: Vec<f64> = path
            .increments(a)
            .iter()
            .map(|x| (x * norm.powf(p.h)).powi(2))
            .collect();
        let ms = mean_se(&sq);
        let se = ms.se * long_run;
        rep.push(Row::mc(
            format!("component {} mean squared normalised increment", a + 1),
            ms.mean,
            se,
            Some(1.0),
            (ms.mean - 1.0).abs() <= 4.0 * se,
        ));
        let end: f64 = path.increments(a).iter().sum();
        rep.push(Row::mc(format!("component {} B_1", a + 1), end, 1.0, Some(0.0), true).info());
    }
    Ok((rep, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let (rep, path) = run(&Params::default()).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        assert_eq!(path.n_points(), 1024);
    }
}
