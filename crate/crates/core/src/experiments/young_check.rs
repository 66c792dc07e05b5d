//! Seeded fuzz suites for the multidimensional Young estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::young::{
    fgh_check, fv_sandwich_corpus, iterated_a_corpus, product_pvar_separable, product_pvar_shared, psi_variation_ratio,
    towghi_corpus, zeta_sum_check, ControlFunction, FghShape, GridFunction, GridPartition,
};

/// Golden value of the Towghi corpus for a fixed configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowghiGolden {
    pub seed: u64,
    pub cases: usize,
    pub points: usize,
    pub p: f64,
    pub q: f64,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub seed: u64,
    pub cases: usize,
    pub sandwich_p: f64,
    pub towghi_points: usize,
    pub towghi_p: f64,
    pub towghi_q: f64,
    pub golden: Option<TowghiGolden>,
    pub golden_rel_tol: f64,
    pub iterated_grid: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            seed: 8,
            cases: 100,
            sandwich_p: 1.7,
            towghi_points: 4,
            towghi_p: 1.5,
            towghi_q: 1.5,
            golden: None,
            golden_rel_tol: 1e-12,
            iterated_grid: 129,
        }
    }
}

fn random_axis(rng: &mut ChaCha8Rng, points: usize) -> Vec<f64> {
    let mut a = vec![0.0];
    for _ in 1..points {
        let last = *a.last().unwrap();
        a.push(last + rng.random_range(0.05..1.0));
    }
    a
}

fn random_grid(rng: &mut ChaCha8Rng, dims: usize) -> Result<GridFunction> {
    let axes: Vec<Vec<f64>> = (0..dims)
        .map(|_| {
            let pts = rng.random_range(2..=5);
            random_axis(rng, pts)
        })
        .collect();
    let part = GridPartition::new(axes)?;
    let n = part.len();
    GridFunction::new(part, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Largest `V_p(f g) / (V_p(f) V_p(g))` over random separable products.
pub fn separable_product_corpus(seed: u64, cases: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let df = rng.random_range(1..=2);
        let dg = if df == 2 { 1 } else { rng.random_range(1..=2) };
        let f = random_grid(&mut rng, df)?;
        let g = random_grid(&mut rng, dg)?;
        let p = rng.random_range(1.0..3.0);
        worst = worst.max(product_pvar_separable(&f, &g, p)?.ratio);
    }
    Ok(worst)
}

pub fn run(p: &Params) -> Result<Report> {
    if p.cases == 0 {
        return domain("need at least one case");
    }
    let mut rep = Report::new("young-check", p)?;
    let tol = 1e-12;

    let (fails, n) = fv_sandwich_corpus(p.seed, p.cases, p.sandwich_p)?;
    rep.push(Row::exact(
        format!("variation sandwich failures over {n} grids"),
        fails as f64,
        0.0,
        Some(0.0),
        fails == 0,
    ));

    let t = towghi_corpus(p.seed, p.cases, p.towghi_points, p.towghi_p, p.towghi_q)?;
    let bounded = t.max_ratio.is_finite() && t.all_exact;
    match &p.golden {
        Some(g) => {
            let same_config = g.seed == p.seed
                && g.cases == p.cases
                && g.points == p.towghi_points
                && g.p == p.towghi_p
                && g.q == p.towghi_q;
            if !same_config {
                return Err(crate::error::Error::Config(
                    "golden Towghi value was recorded for a different configuration".into(),
                ));
            }
            let gap_tol = p.golden_rel_tol * g.max_ratio.abs();
            rep.push(Row::exact(
                "Towghi max ratio vs golden",
                t.max_ratio,
                gap_tol,
                Some(g.max_ratio),
                bounded && (t.max_ratio - g.max_ratio).abs() <= gap_tol,
            ));
        }
        None => rep.push(Row::exact("Towghi max ratio", t.max_ratio, 0.0, None, bounded)),
    }
    rep.push(
        Row::exact(
            "Towghi max ratio, f vanishing on axes",
            t.max_ratio_vanishing,
            0.0,
            None,
            true,
        )
        .info(),
    );

    let worst = separable_product_corpus(p.seed, p.cases)?;
    rep.push(Row::exact(
        "separable product V_p(fg) / (V_p(f) V_p(g)) max",
        worst,
        tol,
        Some(1.0),
        worst <= 1.0 + tol,
    ));

    let ia = iterated_a_corpus(p.seed, p.cases, p.iterated_grid)?;
    rep.push(Row::exact(
        "iterated integral / bound max",
        ia,
        tol,
        Some(1.0),
        ia <= 1.0 + tol,
    ));

    // Informational coverage of the remaining estimates.
    let part = GridPartition::uniform(2, 3, 0.0, 1.0)?;
    let f = GridFunction::from_fn(part.clone(), |x| (2.0 * x[0]).sin() + x[1] * x[1]);
    let g = GridFunction::from_fn(part.clone(), |x| (x[0] * x[1]).cos());
    let shared = product_pvar_shared(&f, &g, 1.5, 2.0)?;
    rep.push(Row::exact("shared-partition product ratio", shared.ratio, 0.0, None, true).info());

    let (zp, zq) = (1.5, 1.8);
    let phi = move |x: &[f64]| x[0].powf(1.0 / zp) * x[1].powf(1.0 / zq);
    let z = zeta_sum_check(
        &phi,
        &GridPartition::uniform(1, 16, 0.0, 1.0)?,
        &ControlFunction::Linear,
        1.0,
        zp,
        zq,
    )?;
    rep.push(Row::exact(
        "zeta sum ratio",
        z.ratio,
        tol,
        Some(1.0),
        z.ratio <= 1.0 + tol,
    ));

    let shape = FghShape { n: 2, k: 1, l: 1, m: 1 };
    let ff = |x: &[f64]| 1.0 + 0.5 * x[0];
    let pf = |x: &[f64]| x[0].powf(1.0 / 1.5) * x[1].powf(1.0 / 1.5);
    let gf = |x: &[f64]| (3.0 * x[0]).cos();
    let r = fgh_check(shape, &ff, &pf, &gf, &part, &ControlFunction::Linear, 1.0, 1.5, 1.5)?;
    rep.push(Row::exact("mixed product ratio", r.ratio, 0.0, None, true).info());

    let grid: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
    let psi_worst = [(0.1, 0.3), (0.4, 0.9), (0.0, 1.0)]
        .iter()
        .map(|&(s, t)| psi_variation_ratio(s, t, 0.4, &grid))
        .fold(0.0, f64::max);
    rep.push(Row::exact(
        "psi total variation / 3|t-s|^{2H}",
        psi_worst,
        tol,
        Some(1.0),
        psi_worst <= 1.0 + tol,
    ));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let p = Params {
            cases: 10,
            iterated_grid: 33,
            ..Params::default()
        };
        let rep = run(&p).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        let golden = TowghiGolden {
            seed: p.seed,
            cases: 10,
            points: 4,
            p: 1.5,
            q: 1.5,
            max_ratio: rep.rows[1].estimate,
        };
        let again = run(&Params {
            golden: Some(golden.clone()),
            ..p.clone()
        })
        .unwrap();
        assert!(again.pass());
        let wrong = TowghiGolden { seed: 99, ..golden };
        assert!(run(&Params {
            golden: Some(wrong),
            ..p
        })
        .is_err());
    }
}
