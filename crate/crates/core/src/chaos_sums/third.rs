//! Third-order sums `K^m` and their exact cell covariances.
//!
//! The finite-`n` covariances below are the exact second moments of the
//! discretised chaos elements: left-point sums over `n` sub-steps per cell,
//! which is what [`crate::rough_lift::lift3`] produces from one-step sub-cells.

use serde::{Deserialize, Serialize};

use crate::chaos_sums::sums::SumProcess;
use crate::error::{domain, Result};
use crate::fbm_sim::FbmPath;
use crate::gaussian_core::{cov_rect_raw, rho_lag};
use crate::numerics::Compensated;
use crate::rough_lift::RoughLift;

/// Per-cell third-order element `K_{tau_{i-1}, tau_i}` for an index triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KFamily {
    /// `B^{abc}`.
    Level3(usize, usize, usize),
    /// `B^{ab} B^c`.
    AreaIncrement(usize, usize, usize),
    /// `B^a B^b B^c`.
    Triple(usize, usize, usize),
}

/// The canonical covariance patterns, with `alpha = 0`, `beta = 1`,
/// `gamma = 2`; all others reduce to these by the shuffle identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KPattern {
    TripleDistinct,
    TripleAab,
    TripleAaa,
    AreaIncDistinct,
    AreaIncAlpha,
    Level3Distinct,
    Level3Aab,
}

impl KPattern {
    pub const ALL: [KPattern; 7] = [
        KPattern::TripleDistinct,
        KPattern::TripleAab,
        KPattern::TripleAaa,
        KPattern::AreaIncDistinct,
        KPattern::AreaIncAlpha,
        KPattern::Level3Distinct,
        KPattern::Level3Aab,
    ];

    pub fn family(self) -> KFamily {
        match self {
            KPattern::TripleDistinct => KFamily::Triple(0, 1, 2),
            KPattern::TripleAab => KFamily::Triple(0, 0, 1),
            KPattern::TripleAaa => KFamily::Triple(0, 0, 0),
            KPattern::AreaIncDistinct => KFamily::AreaIncrement(0, 1, 2),
            KPattern::AreaIncAlpha => KFamily::AreaIncrement(0, 1, 0),
            KPattern::Level3Distinct => KFamily::Level3(0, 1, 2),
            KPattern::Level3Aab => KFamily::Level3(0, 0, 1),
        }
    }

    /// Driving dimension needed.
    pub fn dim(self) -> usize {
        match self {
            KPattern::TripleDistinct | KPattern::AreaIncDistinct | KPattern::Level3Distinct => 3,
            KPattern::TripleAaa => 1,
            _ => 2,
        }
    }

    /// True when the exact covariance does not depend on the sub-step count.
    pub fn is_closed_form(self) -> bool {
        matches!(
            self,
            KPattern::TripleDistinct | KPattern::TripleAab | KPattern::TripleAaa
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            KPattern::TripleDistinct => "triple_abc",
            KPattern::TripleAab => "triple_aab",
            KPattern::TripleAaa => "triple_aaa",
            KPattern::AreaIncDistinct => "area_inc_abc",
            KPattern::AreaIncAlpha => "area_inc_aba",
            KPattern::Level3Distinct => "level3_abc",
            KPattern::Level3Aab => "level3_aab",
        }
    }
}

/// Per-cell values of a third-order family.
pub fn third_order_cells(lift: &RoughLift, family: KFamily) -> Result<Vec<f64>> {
    let d = lift.d;
    let check = |i: usize| -> Result<()> {
        if i >= d {
            domain(format!("index {i} out of range for dimension {d}"))
        } else {
            Ok(())
        }
    };
    let cells = lift.cells();
    match family {
        KFamily::Triple(a, b, c) => {
            check(a)?;
            check(b)?;
            check(c)?;
            Ok((0..cells).map(|i| lift.x(i, a) * lift.x(i, b) * lift.x(i, c)).collect())
        }
        KFamily::AreaIncrement(a, b, c) => {
            check(a)?;
            check(b)?;
            check(c)?;
            Ok((0..cells).map(|i| lift.area(i, a, b) * lift.x(i, c)).collect())
        }
        KFamily::Level3(a, b, c) => {
            check(a)?;
            check(b)?;
            check(c)?;
            if !lift.has_level3() {
                return domain("level-3 sums need a lift built with lift3");
            }
            Ok((0..cells).map(|i| lift.level3(i, a, b, c).unwrap()).collect())
        }
    }
}

/// `K^m_t` as a sum process (normalisation exponent `2H - 1/2`).
pub fn third_order_sums(lift: &RoughLift, path: &FbmPath, family: KFamily, h: f64) -> Result<SumProcess> {
    if lift.m != path.m() || lift.d != path.d() {
        return domain("lift and path live on different grids");
    }
    let cells = third_order_cells(lift, family)?;
    SumProcess::from_cells(lift.m, &cells, None, 2.0 * h - 0.5)
}

/// Unit-scale tables for cells `[0, 1]` and `[lag, lag + 1]` with `n`
/// sub-steps each.
struct CellPair {
    n: usize,
    rho: f64,
    /// `R([0, u_a] x [lag, v_b])`, `a, b = 0..=n`.
    p: Vec<f64>,
    /// `R(sub_a x sub_b)`, `a, b = 1..=n` stored 0-based.
    r: Vec<f64>,
    /// `R([0, u_a] x [lag, lag + 1])`.
    left_vs_other: Vec<f64>,
    /// `R([0, 1] x [lag, v_b])`.
    other_vs_right: Vec<f64>,
    /// `R([0, u_a] x [0, 1])`.
    left_vs_own: Vec<f64>,
    /// `R([lag, v_b] x [lag, lag + 1])`.
    right_vs_own: Vec<f64>,
    /// `u_a^{2H}`.
    var_left: Vec<f64>,
}

impl CellPair {
    fn new(h: f64, lag: u64, n: usize) -> Self {
        let l = lag as f64;
        let nf = n as f64;
        let u = |a: usize| a as f64 / nf;
        let mut p = vec![0.0; (n + 1) * (n + 1)];
        for a in 0..=n {
            for b in 0..=n {
                p[a * (n + 1) + b] = cov_rect_raw(0.0, u(a), l, l + u(b), h);
            }
        }
        let mut r = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                r[a * n + b] = cov_rect_raw(u(a), u(a + 1), l + u(b), l + u(b + 1), h);
            }
        }
        Self {
            n,
            rho: rho_lag(lag as i64, h),
            p,
            r,
            left_vs_other: (0..=n).map(|a| cov_rect_raw(0.0, u(a), l, l + 1.0, h)).collect(),
            other_vs_right: (0..=n).map(|b| cov_rect_raw(0.0, 1.0, l, l + u(b), h)).collect(),
            left_vs_own: (0..=n).map(|a| cov_rect_raw(0.0, u(a), 0.0, 1.0, h)).collect(),
            right_vs_own: (0..=n).map(|b| cov_rect_raw(0.0, u(b), 0.0, 1.0, h)).collect(),
            var_left: (0..=n).map(|a| u(a).powf(2.0 * h)).collect(),
        }
    }

    fn p(&self, a: usize, b: usize) -> f64 {
        self.p[a * (self.n + 1) + b]
    }

    fn r(&self, a: usize, b: usize) -> f64 {
        self.r[a * self.n + b]
    }

    /// Sum over sub-step pairs of `w(a, b) R(sub_a x sub_b)` with left
    /// endpoints `a, b = 0..n-1`.
    fn young_sum(&self, w: impl Fn(usize, usize) -> f64) -> f64 {
        let mut acc = Compensated::new();
        for a in 0..self.n {
            for b in 0..self.n {
                acc.add(w(a, b) * self.r(a, b));
            }
        }
        acc.value()
    }

    fn covariance(&self, pattern: KPattern) -> f64 {
        let rho = self.rho;
        match pattern {
            KPattern::TripleDistinct => rho.powi(3),
            KPattern::TripleAab => 2.0 * rho.powi(3) + rho,
            KPattern::TripleAaa => 6.0 * rho.powi(3) + 9.0 * rho,
            KPattern::AreaIncDistinct => rho * self.young_sum(|a, b| self.p(a, b)),
            KPattern::AreaIncAlpha => self.young_sum(|a, b| {
                self.p(a, b) * rho
                    + self.left_vs_own[a] * self.right_vs_own[b]
                    + self.left_vs_other[a] * self.other_vs_right[b]
            }),
            KPattern::Level3Distinct => {
                // tail[a][b] = sum_{a' > a, b' > b} R(sub_a' x sub_b').
                let n = self.n;
                let mut tail = vec![0.0; (n + 1) * (n + 1)];
                for a in (0..n).rev() {
                    for b in (0..n).rev() {
                        tail[a * (n + 1) + b] = self.r(a, b) + tail[(a + 1) * (n + 1) + b] + tail[a * (n + 1) + b + 1]
                            - tail[(a + 1) * (n + 1) + b + 1];
                    }
                }
                self.young_sum(|a, b| self.p(a, b) * tail[(a + 1) * (n + 1) + b + 1])
            }
            KPattern::Level3Aab => self.young_sum(|a, b| {
                let c = self.p(a, b);
                0.5 * c * c + 0.25 * self.var_left[a] * self.var_left[b]
            }),
        }
    }
}

/// `E[K_i K_j]` for cells `i, j` (0-based) of `D_m` and `n_quad` sub-steps.
pub fn exact_cov_k(h: f64, m: u32, pattern: KPattern, i: usize, j: usize, n_quad: usize) -> Result<f64> {
    if n_quad < 2 && !pattern.is_closed_form() {
        return domain("n_quad must be at least 2");
    }
    let lag = (j as i64 - i as i64).unsigned_abs();
    let scale = (-(6.0 * h * m as f64) * std::f64::consts::LN_2).exp();
    Ok(scale * unit_cov_k(h, pattern, lag, n_quad))
}

/// Unit-scale covariance `E[K_0 K_lag]` (cells of length one).
pub fn unit_cov_k(h: f64, pattern: KPattern, lag: u64, n_quad: usize) -> f64 {
    if pattern.is_closed_form() {
        let rho = rho_lag(lag as i64, h);
        return match pattern {
            KPattern::TripleDistinct => rho.powi(3),
            KPattern::TripleAab => 2.0 * rho.powi(3) + rho,
            _ => 6.0 * rho.powi(3) + 9.0 * rho,
        };
    }
    CellPair::new(h, lag, n_quad).covariance(pattern)
}

/// Unit-scale covariances of every pattern for lags `0..lags`.
pub fn unit_cov_table(h: f64, lags: u64, n_quad: usize) -> Vec<[f64; 7]> {
    use rayon::prelude::*;
    (0..lags)
        .into_par_iter()
        .map(|lag| {
            let pair = CellPair::new(h, lag, n_quad);
            let mut row = [0.0; 7];
            for (k, p) in KPattern::ALL.iter().enumerate() {
                row[k] = pair.covariance(*p);
            }
            row
        })
        .collect()
}

/// `E[(K^m_{0,1})^2] = 2^{-6mH} sum_{|lag| < 2^m} (2^m - |lag|) f(lag)` from
/// a unit table column.
pub fn second_moment_from_unit(h: f64, m: u32, unit: impl Fn(u64) -> f64) -> f64 {
    let c = 1u64 << m;
    let mut acc = Compensated::new();
    acc.add(c as f64 * unit(0));
    for lag in 1..c {
        acc.add(2.0 * (c - lag) as f64 * unit(lag));
    }
    acc.value() * (-(6.0 * h * m as f64) * std::f64::consts::LN_2).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos_sums::isserlis::{poly_covariance, Poly};
    use crate::fbm_sim::{simulate, SimSpec};
    use crate::gaussian_core::HurstModel;
    use crate::rough_lift::{lift2, lift3};
    use nalgebra::DMatrix;

    /// Discretised sub-increments of `d` components on two unit cells.
    struct Discrete {
        n: usize,
        cov: DMatrix<f64>,
    }

    impl Discrete {
        fn new(h: f64, lag: u64, n: usize, d: usize) -> Self {
            let starts = [0.0, lag as f64];
            let dim = d * 2 * n;
            let mut cov = DMatrix::zeros(dim, dim);
            for c in 0..d {
                for s1 in 0..2 {
                    for k1 in 0..n {
                        for s2 in 0..2 {
                            for k2 in 0..n {
                                let a = starts[s1] + k1 as f64 / n as f64;
                                let b = starts[s2] + k2 as f64 / n as f64;
                                let v = cov_rect_raw(a, a + 1.0 / n as f64, b, b + 1.0 / n as f64, h);
                                cov[(c * 2 * n + s1 * n + k1, c * 2 * n + s2 * n + k2)] = v;
                            }
                        }
                    }
                }
            }
            Self { n, cov }
        }

        fn var(&self, comp: usize, slot: usize, k: usize) -> usize {
            comp * 2 * self.n + slot * self.n + k
        }

        fn increment(&self, comp: usize, slot: usize, upto: usize) -> Poly {
            (0..upto).fold(Poly::default(), |p, k| p.add(Poly::var(self.var(comp, slot, k))))
        }

        fn element(&self, pattern: KPattern, slot: usize) -> Poly {
            let n = self.n;
            let inc = |c: usize| self.increment(c, slot, n);
            let step = |c: usize, k: usize| Poly::var(self.var(c, slot, k));
            match pattern {
                KPattern::TripleDistinct => inc(0).mul(&inc(1)).mul(&inc(2)),
                KPattern::TripleAab => inc(0).mul(&inc(0)).mul(&inc(1)),
                KPattern::TripleAaa => inc(0).mul(&inc(0)).mul(&inc(0)),
                KPattern::AreaIncDistinct | KPattern::AreaIncAlpha => {
                    let area = (0..n).fold(Poly::default(), |p, k| {
                        p.add(self.increment(0, slot, k).mul(&step(1, k)))
                    });
                    let c = if pattern == KPattern::AreaIncDistinct { 2 } else { 0 };
                    area.mul(&inc(c))
                }
                KPattern::Level3Distinct => {
                    let mut p = Poly::default();
                    for l in 0..n {
                        for k in 0..l {
                            p = p.add(self.increment(0, slot, k).mul(&step(1, k)).mul(&step(2, l)));
                        }
                    }
                    p
                }
                KPattern::Level3Aab => (0..n).fold(Poly::default(), |p, k| {
                    let x = self.increment(0, slot, k);
                    p.add(x.mul(&x).mul(&step(1, k)).scale(0.5))
                }),
            }
        }
    }

    #[test]
    fn patterns_match_pairing_oracle() {
        let h = 0.4;
        let n = 3;
        for lag in [0u64, 1, 3] {
            for p in KPattern::ALL {
                let disc = Discrete::new(h, lag, n, p.dim());
                let oracle = poly_covariance(&disc.cov, &disc.element(p, 0), &disc.element(p, 1)).unwrap();
                let v = unit_cov_k(h, p, lag, n);
                assert!(
                    (v - oracle).abs() < 1e-10 * (1.0 + oracle.abs()),
                    "{p:?} lag {lag}: {v} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn brownian_disjoint_cells_vanish() {
        for p in KPattern::ALL {
            assert!(unit_cov_k(0.5, p, 2, 8).abs() < 1e-15, "{p:?}");
            assert!(exact_cov_k(0.5, 3, p, 1, 4, 8).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn table_matches_single_evaluations() {
        let t = unit_cov_table(0.4, 3, 8);
        for (k, p) in KPattern::ALL.iter().enumerate() {
            assert!((t[2][k] - unit_cov_k(0.4, *p, 2, 8)).abs() < 1e-15);
        }
    }

    #[test]
    fn level3_requires_lift3() {
        let model = HurstModel::new(0.4, 3).unwrap();
        let p = simulate(&SimSpec::new(model, 2, 4, 1).unwrap()).unwrap();
        let l = lift2(&p);
        assert!(third_order_sums(&l, &p, KFamily::Level3(0, 1, 2), 0.4).is_err());
        let cube = third_order_cells(&l, KFamily::Triple(1, 1, 1)).unwrap();
        let x = p.cell_increments(1);
        for (c, v) in cube.iter().zip(&x) {
            assert_eq!(*c, v * v * v);
        }
    }

    #[test]
    fn monte_carlo_matches_exact_triple_and_level3() {
        let h = 0.4;
        let (m, n) = (3u32, 4usize);
        let model = HurstModel::new(h, 3).unwrap();
        let reps = 4000;
        let pats = [KPattern::TripleDistinct, KPattern::Level3Distinct, KPattern::Level3Aab];
        let mut samples = vec![Vec::with_capacity(reps); pats.len()];
        for r in 0..reps {
            let p = simulate(&SimSpec::new(model, m, n, 77).unwrap().with_replica(r as u64)).unwrap();
            let sub = lift2(&p.regroup(m + 2).unwrap());
            let l3 = lift3(&p, &sub).unwrap();
            for (k, pat) in pats.iter().enumerate() {
                let s = third_order_sums(&l3, &p, pat.family(), h).unwrap();
                samples[k].push(s.increment(0.0, 1.0).powi(2));
            }
        }
        for (k, pat) in pats.iter().enumerate() {
            let exact = second_moment_from_unit(h, m, |lag| unit_cov_k(h, *pat, lag, n));
            let est = crate::chaos_sums::stats::mean_se(&samples[k]);
            assert!(est.within(exact, 5.0), "{pat:?}: {est:?} vs {exact}");
        }
    }
}
