//! Moments of normalised weighted Lévy-area sums across dyadic levels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos_sums::sums::levy_sum_process;
use crate::chaos_sums::{exact_second_moment_q, holder_norm, mean_se, QKind, Resolution, WeightSeries};
use crate::error::{domain, Result};
use crate::experiments::{Report, Row};
use crate::fbm_sim::{simulate, FbmPath, SimSpec};
use crate::gaussian_core::HurstModel;
use crate::rough_lift::lift2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    One,
    TanhB1,
}

impl Weight {
    fn series(self, path: &FbmPath) -> Result<WeightSeries> {
        match self {
            Weight::One => Ok(WeightSeries::constant(path.m(), 1.0)),
            Weight::TanhB1 => WeightSeries::from_path(path, |b| b[0].tanh()),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Weight::One => "F=1",
            Weight::TanhB1 => "F=tanh(B1)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub h: f64,
    pub m_min: u32,
    pub m_max: u32,
    /// Sub-steps per cell at the finest level.
    pub refine: usize,
    pub replicas: u64,
    pub seed: u64,
    pub ps: Vec<u32>,
    pub weights: Vec<Weight>,
    /// Largest allowed ratio of a moment to its value at `m_min`.
    pub ratio_cap: f64,
    pub k_se: f64,
    /// Hölder exponent for the discrete Hölder norm rows; levels above
    /// `holder_m_max` are skipped.
    pub holder_theta: Option<f64>,
    pub holder_m_max: u32,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            h: 0.4,
            m_min: 4,
            m_max: 9,
            refine: 16,
            replicas: 3000,
            seed: 4,
            ps: vec![2, 4],
            weights: vec![Weight::One, Weight::TanhB1],
            ratio_cap: 3.0,
            k_se: 4.0,
            holder_theta: None,
            holder_m_max: 7,
        }
    }
}

/// Per replica: `[weight][level]` normalised increments over `[0, 1]` and
/// Hölder norms.
type Sample = (Vec<Vec<f64>>, Vec<Vec<f64>>);

pub fn run(p: &Params) -> Result<Report> {
    if p.m_min < 1 || p.m_min >= p.m_max {
        return domain("need 1 <= m_min < m_max");
    }
    if p.replicas < 2 || p.ps.is_empty() || p.weights.is_empty() {
        return domain("need replicas >= 2, at least one moment order and one weight");
    }
    if p.ps.iter().any(|&q| q == 0) {
        return domain("moment orders must be positive");
    }
    let model = HurstModel::new(p.h, 2)?;
    SimSpec::new(model, p.m_max, p.refine, p.seed)?.validate()?;
    let levels: Vec<u32> = (p.m_min..=p.m_max).collect();
    let samples: Vec<Sample> = (0..p.replicas)
        .into_par_iter()
        .map(|r| -> Result<Sample> {
            let path = simulate(&SimSpec::new(model, p.m_max, p.refine, p.seed)?.with_replica(r))?;
            let mut vals = vec![Vec::with_capacity(levels.len()); p.weights.len()];
            let mut hold = vec![Vec::new(); p.weights.len()];
            for &m in &levels {
                let pm = path.regroup(m)?;
                let lift = lift2(&pm);
                for (w, weight) in p.weights.iter().enumerate() {
                    let proc = levy_sum_process(&weight.series(&pm)?, &lift, 0, 1, p.h)?;
                    vals[w].push(proc.normalized_increment(0.0, 1.0));
                    if let Some(theta) = p.holder_theta {
                        if m <= p.holder_m_max {
                            let scaled: Vec<f64> = proc.values().iter().map(|v| v * proc.scale()).collect();
                            hold[w].push(holder_norm(&scaled, theta)?);
                        }
                    }
                }
            }
            Ok((vals, hold))
        })
        .collect::<Result<_>>()?;

    let mut rep = Report::new("verify-moment", p)?;
    for (w, weight) in p.weights.iter().enumerate() {
        for &q in &p.ps {
            let stats: Vec<_> = (0..levels.len())
                .map(|k| {
                    let v: Vec<f64> = samples.iter().map(|s| s.0[w][k].abs().powi(q as i32)).collect();
                    mean_se(&v)
                })
                .collect();
            let base = stats[0];
            for (k, &m) in levels.iter().enumerate() {
                let st = stats[k];
                let name = format!("{} p={q} m={m}", weight.name());
                if q == 2 && *weight == Weight::One {
                    let n_m = p.refine << (p.m_max - m);
                    let norm = ((1u64 << m) as f64).powf(4.0 * p.h - 1.0);
                    let oracle =
                        norm * exact_second_moment_q(p.h, m, QKind::Tilde, 0.0, 1.0, Resolution::Discrete { n: n_m })?;
                    rep.push(Row::mc(
                        format!("{name} moment"),
                        st.mean,
                        st.se,
                        Some(oracle),
                        st.within(oracle, p.k_se),
                    ));
                } else {
                    rep.push(Row::mc(format!("{name} moment"), st.mean, st.se, None, true).info());
                }
                let ratio = st.mean / base.mean;
                let ratio_se = ratio * ((st.se / st.mean).powi(2) + (base.se / base.mean).powi(2)).sqrt();
                rep.push(Row::mc(
                    format!("{name} ratio to m={}", p.m_min),
                    ratio,
                    ratio_se,
                    Some(p.ratio_cap),
                    ratio <= p.ratio_cap,
                ));
            }
        }
        if p.holder_theta.is_some() {
            let count = samples[0].1[w].len();
            for k in 0..count {
                let v: Vec<f64> = samples.iter().map(|s| s.1[w][k].powi(2)).collect();
                let st = mean_se(&v);
                rep.push(
                    Row::mc(
                        format!("{} m={} E[Holder norm^2]", weight.name(), levels[k]),
                        st.mean,
                        st.se,
                        None,
                        true,
                    )
                    .info(),
                );
            }
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
            m_min: 3,
            m_max: 5,
            refine: 4,
            replicas: 400,
            holder_theta: Some(0.4),
            ..Params::default()
        };
        let rep = run(&p).unwrap();
        assert!(rep.pass(), "{}", rep.summary());
        assert!(rep.rows.iter().any(|r| r.name.contains("Holder")));
        assert!(run(&Params {
            m_min: 5,
            m_max: 5,
            ..p
        })
        .is_err());
    }
}
