//! The matrix-valued second-chaos processes `Q-hat`, `Q-check`, `Q-tilde`,
//! `Q` and their exact covariances.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chaos_sums::sums::SumProcess;
use crate::error::{domain, Result};
use crate::gaussian_core::{cov_rect_raw, rho_lag, tilde_rho_any, tilde_rho_discrete};
use crate::rough_lift::RoughLift;

/// Which member of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QKind {
    /// `B^a B^b / 2` off the diagonal.
    Hat,
    /// `((B^a)^2 - 2^{-2mH}) / 2` on the diagonal.
    Check,
    /// The Lévy area off the diagonal.
    Tilde,
    /// `Hat - Tilde`.
    Q,
    /// Mixed moment of `Tilde` (left factor) and `Hat` (right factor).
    CrossTildeHat,
}

/// How the Lévy-area correlations are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Resolution {
    /// The `n -> infinity` integrals, to quadrature tolerance `tol`.
    Limit { tol: f64 },
    /// Left-point sums with `n` sub-steps per cell; exact for lifts built
    /// with [`crate::rough_lift::lift2`] at that refinement.
    Discrete { n: usize },
}

/// Per-cell `d x d` entries of the four families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QProcesses {
    pub m: u32,
    pub d: usize,
    pub h: f64,
    hat: Vec<f64>,
    check: Vec<f64>,
    tilde: Vec<f64>,
    q: Vec<f64>,
    dmat: Vec<f64>,
}

pub fn q_processes(lift: &RoughLift, h: f64) -> QProcesses {
    let d = lift.d;
    let cells = lift.cells();
    let centre = (-(2.0 * h * lift.m as f64) * std::f64::consts::LN_2).exp();
    let size = cells * d * d;
    let (mut hat, mut check, mut tilde, mut q, mut dmat) = (
        vec![0.0; size],
        vec![0.0; size],
        vec![0.0; size],
        vec![0.0; size],
        vec![0.0; size],
    );
    for c in 0..cells {
        for a in 0..d {
            let xa = lift.x(c, a);
            for b in 0..d {
                let k = (c * d + a) * d + b;
                let xb = lift.x(c, b);
                dmat[k] = 0.5 * xa * xb - lift.area(c, a, b);
                if a == b {
                    check[k] = 0.5 * (xa * xa - centre);
                } else {
                    hat[k] = 0.5 * xa * xb;
                    tilde[k] = lift.area(c, a, b);
                    q[k] = hat[k] - tilde[k];
                }
            }
        }
    }
    QProcesses {
        m: lift.m,
        d,
        h,
        hat,
        check,
        tilde,
        q,
        dmat,
    }
}

impl QProcesses {
    pub fn cells(&self) -> usize {
        1usize << self.m
    }

    /// Cell entry `(a, b)` of cell `i` (0-based).
    pub fn cell(&self, kind: QKind, i: usize, a: usize, b: usize) -> Result<f64> {
        let k = (i * self.d + a) * self.d + b;
        Ok(match kind {
            QKind::Hat => self.hat[k],
            QKind::Check => self.check[k],
            QKind::Tilde => self.tilde[k],
            QKind::Q => self.q[k],
            QKind::CrossTildeHat => return domain("the cross term is a moment, not a process"),
        })
    }

    /// `d^{m,a,b}` per cell: `B^a B^b / 2 - B^{ab}`.
    pub fn d_entry(&self, i: usize, a: usize, b: usize) -> f64 {
        self.dmat[(i * self.d + a) * self.d + b]
    }

    /// Partial-sum process of entry `(a, b)` normalised by `(2^m)^{2H-1/2}`.
    pub fn sum_process(&self, kind: QKind, a: usize, b: usize) -> Result<SumProcess> {
        let cells: Vec<f64> = (0..self.cells())
            .map(|i| self.cell(kind, i, a, b))
            .collect::<Result<_>>()?;
        SumProcess::from_cells(self.m, &cells, None, 2.0 * self.h - 0.5)
    }
}

fn unit_sub_overlap_sq(lag: i64, h: f64, n: usize) -> f64 {
    let l = lag as f64;
    (1..=n)
        .map(|k| {
            let r = cov_rect_raw((k - 1) as f64 / n as f64, k as f64 / n as f64, l, l + 1.0, h);
            r * r
        })
        .sum()
}

/// Evaluates unit-scale cell covariances, caching the Lévy-area
/// correlations by lag.
pub struct QCovariance {
    h: f64,
    res: Resolution,
    tilde: HashMap<u64, f64>,
}

impl QCovariance {
    pub fn new(h: f64, res: Resolution) -> Result<Self> {
        match res {
            Resolution::Limit { tol } if tol <= 0.0 => return domain("tolerance must be positive"),
            Resolution::Discrete { n } if n == 0 => return domain("need at least one sub-step"),
            _ => {}
        }
        Ok(Self {
            h,
            res,
            tilde: HashMap::new(),
        })
    }

    fn tilde_rho(&mut self, lag: u64) -> Result<f64> {
        if let Some(v) = self.tilde.get(&lag) {
            return Ok(*v);
        }
        let v = match self.res {
            Resolution::Limit { tol } => tilde_rho_any(lag, self.h, tol)?.value,
            Resolution::Discrete { n } => tilde_rho_discrete(lag, self.h, n),
        };
        self.tilde.insert(lag, v);
        Ok(v)
    }

    /// `E[X_i Y_j] / 2^{-4mH}` for cells `j = i + lag` with matching
    /// off-diagonal (or diagonal for `Check`) entries.
    pub fn unit(&mut self, kind: QKind, lag: i64) -> Result<f64> {
        let r2 = rho_lag(lag, self.h).powi(2);
        Ok(match kind {
            QKind::Hat => 0.25 * r2,
            QKind::Check => 0.5 * r2,
            QKind::Tilde => self.tilde_rho(lag.unsigned_abs())?,
            QKind::CrossTildeHat => match self.res {
                Resolution::Limit { .. } => 0.25 * r2,
                Resolution::Discrete { n } => 0.25 * (r2 - unit_sub_overlap_sq(lag, self.h, n)),
            },
            QKind::Q => {
                self.unit(QKind::Hat, lag)? + self.unit(QKind::Tilde, lag)?
                    - self.unit(QKind::CrossTildeHat, lag)?
                    - self.unit(QKind::CrossTildeHat, -lag)?
            }
        })
    }

    /// Covariance of cells `i` and `j` (0-based) at level `m`.
    pub fn cell_pair(&mut self, kind: QKind, m: u32, i: usize, j: usize) -> Result<f64> {
        let scale = (-(4.0 * self.h * m as f64) * std::f64::consts::LN_2).exp();
        Ok(scale * self.unit(kind, j as i64 - i as i64)?)
    }
}

/// `E[X_{s,t} Y_{s,t}]` summed over the cells of `D_m` in `(s, t]`, where
/// `X = Y = kind`, except for `CrossTildeHat` (`X = Tilde`, `Y = Hat`).
pub fn exact_second_moment_q(h: f64, m: u32, kind: QKind, s: f64, t: f64, res: Resolution) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s > t {
        return domain(format!("need 0 <= s <= t <= 1, got s = {s}, t = {t}"));
    }
    let scale = (1u64 << m) as f64;
    let count = ((t * scale).floor() - (s * scale).floor()) as i64;
    let mut cov = QCovariance::new(h, res)?;
    let mut acc = crate::numerics::Compensated::new();
    for lag in -(count - 1).max(0)..count {
        acc.add((count - lag.abs()) as f64 * cov.unit(kind, lag)?);
    }
    Ok(acc.value() * (-(4.0 * h * m as f64) * std::f64::consts::LN_2).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm_sim::{simulate, SimSpec};
    use crate::gaussian_core::{series_constants, HurstModel};
    use crate::rough_lift::lift2;

    #[test]
    fn structure_of_the_families() {
        let model = HurstModel::new(0.4, 3).unwrap();
        let p = simulate(&SimSpec::new(model, 3, 8, 2).unwrap()).unwrap();
        let q = q_processes(&lift2(&p), 0.4);
        for i in 0..q.cells() {
            for a in 0..3 {
                assert_eq!(q.cell(QKind::Q, i, a, a).unwrap(), 0.0);
                assert_eq!(q.cell(QKind::Hat, i, a, a).unwrap(), 0.0);
                for b in 0..3 {
                    let qab = q.cell(QKind::Q, i, a, b).unwrap();
                    let qba = q.cell(QKind::Q, i, b, a).unwrap();
                    assert!((qab + qba).abs() < 1e-15);
                    assert_eq!(
                        q.cell(QKind::Hat, i, a, b).unwrap(),
                        q.cell(QKind::Hat, i, b, a).unwrap()
                    );
                    if a != b {
                        assert_eq!(q.cell(QKind::Check, i, a, b).unwrap(), 0.0);
                    }
                    assert!((q.d_entry(i, a, b) - qab).abs() < 1e-15);
                }
            }
        }
        assert!(q.cell(QKind::CrossTildeHat, 0, 0, 1).is_err());
    }

    #[test]
    fn check_is_centred() {
        let model = HurstModel::new(0.4, 1).unwrap();
        let reps = 4000;
        let vals: Vec<f64> = (0..reps)
            .map(|r| {
                let p = simulate(&SimSpec::new(model, 2, 1, 9).unwrap().with_replica(r)).unwrap();
                let q = q_processes(&lift2(&p), 0.4);
                q.cell(QKind::Check, 1, 0, 0).unwrap()
            })
            .collect();
        assert!(crate::chaos_sums::stats::mean_se(&vals).within(0.0, 4.0));
    }

    #[test]
    fn brownian_tilde_variance_is_half() {
        for m in [2u32, 5] {
            let v = exact_second_moment_q(0.5, m, QKind::Tilde, 0.0, 1.0, Resolution::Limit { tol: 1e-10 }).unwrap();
            let norm = ((1u64 << m) as f64).powf(4.0 * 0.5 - 1.0);
            assert!((norm * v - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn normalised_q_variance_approaches_c_squared() {
        let h = 0.4;
        let c = series_constants(h, 1e-8).unwrap();
        let target = c.fclt_c * c.fclt_c;
        let mut gaps = Vec::new();
        for m in [4u32, 7, 10] {
            let v = exact_second_moment_q(h, m, QKind::Q, 0.0, 1.0, Resolution::Limit { tol: 1e-9 }).unwrap();
            gaps.push((((1u64 << m) as f64).powf(4.0 * h - 1.0) * v - target).abs() / target);
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[2] < 0.02, "{gaps:?}");
    }

    #[test]
    fn discrete_cross_term_tends_to_limit() {
        let h = 0.4;
        let mut lim = QCovariance::new(h, Resolution::Limit { tol: 1e-9 }).unwrap();
        let target = lim.unit(QKind::CrossTildeHat, 0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [4usize, 16, 64, 256] {
            let mut c = QCovariance::new(h, Resolution::Discrete { n }).unwrap();
            let gap = (c.unit(QKind::CrossTildeHat, 0).unwrap() - target).abs();
            assert!(gap < prev);
            prev = gap;
        }
    }
}
