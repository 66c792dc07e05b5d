//! Marginal checks of the functional limit theorem for `Q^m`, the exact
//! covariance table of the second-chaos families and the combinatorial
//! bound on multiple correlation sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos_sums::rho_bound::sweep;
use crate::chaos_sums::{
    exact_second_moment_q, ks_normal, mean_se, q_processes, CellPairOracle, Normalization, Poly, QCovariance, QKind,
    Resolution, RhoSequence,
};
use crate::error::{domain, Result};
use crate::experiments::{dyadic_scale, Report, Row};
use crate::fbm_sim::{simulate, SimSpec};
use crate::gaussian_core::{series_constants, HurstModel};
use crate::rough_lift::lift2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Marginal,
    Covariance,
    RhoBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub parts: Vec<Part>,
    pub h: f64,
    pub m: u32,
    pub refine: usize,
    pub replicas: u64,
    pub seed: u64,
    /// Cap on the fine grid size of the simulated paths.
    pub max_points: usize,
    pub k_se: f64,
    pub ks_alpha: f64,
    /// Relative gap allowed between the exact limit variance and `C^2`.
    pub c2_rel_tol: f64,
    pub cov_cases: usize,
    pub cov_m_max: u32,
    pub cov_n: usize,
    pub cov_rel_tol: f64,
    pub rho_p_max: usize,
    pub rho_q_max: u32,
    pub rho_m_max: u32,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            parts: vec![Part::Marginal, Part::Covariance, Part::RhoBound],
            h: 0.4,
            m: 10,
            refine: 64,
            replicas: 2000,
            seed: 5,
            max_points: 1 << 16,
            k_se: 4.0,
            ks_alpha: 0.01,
            c2_rel_tol: 0.02,
            cov_cases: 20,
            cov_m_max: 6,
            cov_n: 8,
            cov_rel_tol: 1e-8,
            rho_p_max: 4,
            rho_q_max: 3,
            rho_m_max: 6,
        }
    }
}

pub fn run(p: &Params) -> Result<Report> {
    if p.parts.is_empty() {
        return domain("no parts selected");
    }
    let mut rep = Report::new("verify-fclt", p)?;
    for part in &p.parts {
        match part {
            Part::Marginal => marginal(p, &mut rep)?,
            Part::Covariance => covariance_table(p, &mut rep)?,
            Part::RhoBound => rho_bound(p, &mut rep)?,
        }
    }
    Ok(rep)
}

fn marginal(p: &Params, rep: &mut Report) -> Result<()> {
    if p.replicas < 2 {
        return domain("need at least two replicas");
    }
    let model = HurstModel::new(p.h, 2)?;
    SimSpec::with_capacity(model, p.m, p.refine, p.seed, p.max_points)?.validate()?;
    let samples: Vec<f64> = (0..p.replicas)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let path = simulate(&SimSpec::with_capacity(model, p.m, p.refine, p.seed, p.max_points)?.with_replica(r))?;
            let q = q_processes(&lift2(&path), p.h);
            Ok(q.sum_process(QKind::Q, 0, 1)?.normalized_increment(0.0, 1.0))
        })
        .collect::<Result<_>>()?;
    let norm = ((1u64 << p.m) as f64).powf(4.0 * p.h - 1.0);
    let var_disc = norm * exact_second_moment_q(p.h, p.m, QKind::Q, 0.0, 1.0, Resolution::Discrete { n: p.refine })?;
    let lim_tol = 1e-9;
    let var_lim = norm * exact_second_moment_q(p.h, p.m, QKind::Q, 0.0, 1.0, Resolution::Limit { tol: lim_tol })?;
    let consts = series_constants(p.h, 1e-8)?;
    let c2 = consts.fclt_c * consts.fclt_c;

    let sq: Vec<f64> = samples.iter().map(|x| x * x).collect();
    let ms = mean_se(&sq);
    rep.push(Row::mc(
        format!("Var normalised Q^{}_{{0,1}} vs exact (n={})", p.m, p.refine),
        ms.mean,
        ms.se,
        Some(var_disc),
        ms.within(var_disc, p.k_se),
    ));
    rep.push(
        Row::mc(
            "Var normalised Q vs exact limit variance",
            ms.mean,
            ms.se,
            Some(var_lim),
            true,
        )
        .info(),
    );
    let gap = (var_lim - c2).abs() / c2;
    rep.push(Row::exact(
        format!("exact limit variance at m={} vs C^2", p.m),
        var_lim,
        p.c2_rel_tol * c2,
        Some(c2),
        gap <= p.c2_rel_tol,
    ));
    let ks = ks_normal(&samples, var_disc);
    rep.push(Row::exact(
        "KS p-value against N(0, exact Var)",
        ks.p_value,
        p.ks_alpha,
        None,
        ks.p_value >= p.ks_alpha,
    ));
    rep.push(Row::exact("KS statistic", ks.statistic, p.ks_alpha, None, true).info());
    Ok(())
}

/// One closed-form covariance and its pairing oracle.
struct Entry {
    name: &'static str,
    closed: f64,
    left: Poly,
    right: Poly,
}

fn covariance_table(p: &Params, rep: &mut Report) -> Result<()> {
    if p.cov_m_max < 1 || p.cov_m_max > 10 || p.cov_n == 0 {
        return domain("covariance table needs 1 <= m_max <= 10 and n >= 1");
    }
    HurstModel::new(p.h, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut cov = QCovariance::new(p.h, Resolution::Discrete { n: p.cov_n })?;
    let triples: Vec<(u32, usize, usize)> = (0..p.cov_cases)
        .map(|_| {
            let m = rng.random_range(1..=p.cov_m_max);
            let cells = 1usize << m;
            (m, rng.random_range(0..cells), rng.random_range(0..cells))
        })
        .collect();
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let mut count = 0usize;
    for &(m, i, j) in &triples {
        let o = CellPairOracle::new(p.h, m, i, j, p.cov_n, 3)?;
        let q = |slot: usize, a: usize, b: usize| o.hat(a, b, slot).add(o.area(a, b, slot).scale(-1.0));
        let entries = [
            Entry {
                name: "hat",
                closed: cov.cell_pair(QKind::Hat, m, i, j)?,
                left: o.hat(0, 1, 0),
                right: o.hat(0, 1, 1),
            },
            Entry {
                name: "check",
                closed: cov.cell_pair(QKind::Check, m, i, j)?,
                left: o.check(0, 0),
                right: o.check(0, 1),
            },
            Entry {
                name: "tilde",
                closed: cov.cell_pair(QKind::Tilde, m, i, j)?,
                left: o.area(0, 1, 0),
                right: o.area(0, 1, 1),
            },
            Entry {
                name: "Q",
                closed: cov.cell_pair(QKind::Q, m, i, j)?,
                left: q(0, 0, 1),
                right: q(1, 0, 1),
            },
            Entry {
                name: "tilde x hat",
                closed: cov.cell_pair(QKind::CrossTildeHat, m, i, j)?,
                left: o.area(0, 1, 0),
                right: o.hat(0, 1, 1),
            },
            Entry {
                name: "hat 12 x hat 13",
                closed: 0.0,
                left: o.hat(0, 1, 0),
                right: o.hat(0, 2, 1),
            },
            Entry {
                name: "tilde 12 x tilde 23",
                closed: 0.0,
                left: o.area(0, 1, 0),
                right: o.area(1, 2, 1),
            },
            Entry {
                name: "hat x check",
                closed: 0.0,
                left: o.hat(0, 1, 0),
                right: o.check(0, 1),
            },
            Entry {
                name: "tilde x check",
                closed: 0.0,
                left: o.area(0, 1, 0),
                right: o.check(0, 1),
            },
            Entry {
                name: "check 1 x check 2",
                closed: 0.0,
                left: o.check(0, 0),
                right: o.check(1, 1),
            },
        ];
        let floor = 1e-12 * dyadic_scale(m, 4.0, p.h);
        for e in entries {
            let oracle = o.covariance(&e.left, &e.right)?;
            let tol = p.cov_rel_tol * oracle.abs() + floor;
            let gap = (e.closed - oracle).abs();
            let pass = gap <= tol;
            count += 1;
            if !pass {
                failures += 1;
            }
            worst = worst.max(gap / tol);
            rep.push(Row::exact(
                format!("cov {} m={m} i={i} j={j}", e.name),
                e.closed,
                tol,
                Some(oracle),
                pass,
            ));
        }
    }
    rep.push(Row::exact(
        "covariance table failures",
        failures as f64,
        0.0,
        Some(0.0),
        failures == 0,
    ));
    rep.push(
        Row::exact(
            format!("covariance table worst gap / tol over {count}"),
            worst,
            1.0,
            None,
            worst <= 1.0,
        )
        .info(),
    );
    Ok(())
}

fn rho_bound(p: &Params, rep: &mut Report) -> Result<()> {
    if p.rho_m_max > 12 {
        return domain("rho bound sweep is limited to m <= 12");
    }
    let len = 1usize << p.rho_m_max;
    let seq = RhoSequence::new(p.h, len, Normalization::TwoSided)?;
    let s = sweep(p.rho_p_max, p.rho_q_max, p.rho_m_max, &seq)?;
    rep.push(Row::exact(
        format!(
            "rho bound violations ({} assignments, {} evaluations)",
            s.cases, s.evaluations
        ),
        s.violations as f64,
        0.0,
        Some(0.0),
        s.violations == 0,
    ));
    rep.push(
        Row::exact(
            "rho bound worst ratio",
            s.worst_ratio,
            1.0,
            Some(1.0),
            s.worst_ratio <= 1.0 + 1e-12,
        )
        .info(),
    );
    let one = RhoSequence::new(p.h, len, Normalization::OneSided)?;
    let o = sweep(p.rho_p_max, p.rho_q_max, p.rho_m_max, &one)?;
    rep.push(
        Row::exact(
            "one-sided normalisation violations",
            o.violations as f64,
            0.0,
            None,
            true,
        )
        .info(),
    );
    Ok(())
}
