//! Covariance kernel of fractional Brownian motion, the correlation
//! sequences `rho_H` and `tilde rho_H`, the iterated covariances `R^l_s`
//! and the limit constants `sigma^2`, `tilde sigma^2` and `C`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{fsum, gauss_legendre, pow_diff, Compensated, Richardson};

/// Default absolute tolerance for quadratures and truncated series.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Hurst parameter together with the driving dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurstModel {
    h: f64,
    d: usize,
}

impl HurstModel {
    pub fn new(h: f64, d: usize) -> Result<Self> {
        if !(h > 1.0 / 3.0 && h <= 0.5) {
            return domain(format!("Hurst parameter {h} outside (1/3, 1/2]"));
        }
        if d == 0 {
            return domain("dimension d must be at least 1");
        }
        Ok(Self { h, d })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cov(&self, s: f64, t: f64) -> f64 {
        cov(s, t, self.h)
    }

    pub fn rho(&self, k: u64) -> f64 {
        rho(k, self.h)
    }
}

#[inline]
fn g(x: f64, h2: f64) -> f64 {
    x.abs().powf(h2)
}

/// `R(s,t) = E[B_s B_t]`.
pub fn cov(s: f64, t: f64, h: f64) -> f64 {
    let h2 = 2.0 * h;
    0.5 * (g(s, h2) + g(t, h2) - g(s - t, h2))
}

/// Rectangular increment `R([s0,s1] x [t0,t1])`, the covariance of the
/// increments `B_{s0,s1}` and `B_{t0,t1}`.
pub fn cov_rect(s: (f64, f64), t: (f64, f64), h: f64) -> Result<f64> {
    if s.1 < s.0 || t.1 < t.0 {
        return domain(format!("reversed rectangle [{},{}]x[{},{}]", s.0, s.1, t.0, t.1));
    }
    Ok(cov_rect_raw(s.0, s.1, t.0, t.1, h))
}

/// Unchecked rectangular increment. Separated rectangles use power
/// differences so that far-apart cells keep their relative accuracy.
#[inline]
pub fn cov_rect_raw(s0: f64, s1: f64, t0: f64, t1: f64, h: f64) -> f64 {
    let h2 = 2.0 * h;
    if s1 <= t0 {
        0.5 * (pow_diff(t1 - s0, t1 - s1, h2) - pow_diff(t0 - s0, t0 - s1, h2))
    } else if t1 <= s0 {
        0.5 * (pow_diff(s1 - t0, s0 - t0, h2) - pow_diff(s1 - t1, s0 - t1, h2))
    } else {
        0.5 * (-g(s1 - t1, h2) + g(s0 - t1, h2) + g(s1 - t0, h2) - g(s0 - t0, h2))
    }
}

/// `rho_H(k) = (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) / 2`.
pub fn rho(k: u64, h: f64) -> f64 {
    let h2 = 2.0 * h;
    match k {
        0 => 1.0,
        1..=7 => {
            let x = k as f64;
            0.5 * ((x + 1.0).powf(h2) + (x - 1.0).powf(h2) - 2.0 * x.powf(h2))
        }
        _ => {
            // k^{2H} sum_j binom(2H, 2j) k^{-2j}; avoids the cancellation of
            // the closed form at large lags.
            let x = k as f64;
            let inv2 = 1.0 / (x * x);
            let mut binom = 1.0;
            let mut pw = 1.0;
            let mut acc = 0.0;
            for j in 1..60 {
                let j2 = 2 * j;
                binom *= (h2 - (j2 - 2) as f64) / (j2 - 1) as f64;
                binom *= (h2 - (j2 - 1) as f64) / j2 as f64;
                pw *= inv2;
                let term = binom * pw;
                acc += term;
                if term.abs() <= 1e-18 * acc.abs() {
                    break;
                }
            }
            x.powf(h2) * acc
        }
    }
}

/// `rho_H` at a signed lag.
#[inline]
pub fn rho_lag(k: i64, h: f64) -> f64 {
    rho(k.unsigned_abs(), h)
}

/// Upper bound on `sum_{k>K} |rho_H(k)|` by comparison with the integral of
/// the monotone tail.
pub fn rho_tail_bound(big_k: u64, h: f64) -> f64 {
    assert!(big_k >= 2, "tail bound needs K >= 2");
    if h == 0.5 {
        return 0.0;
    }
    // |int_K^inf rho| = (F(K+1) + F(K-1) - 2F(K)) / 2 with F = x^a / a.
    let a = 2.0 * h + 1.0;
    let x = big_k as f64;
    let second_diff = if big_k < 8 {
        ((x + 1.0).powf(a) + (x - 1.0).powf(a) - 2.0 * x.powf(a)) / a
    } else {
        let inv2 = 1.0 / (x * x);
        let mut binom = 1.0;
        let mut pw = 1.0;
        let mut acc = 0.0;
        for j in 1..60 {
            let j2 = 2 * j;
            binom *= (a - (j2 - 2) as f64) / (j2 - 1) as f64;
            binom *= (a - (j2 - 1) as f64) / j2 as f64;
            pw *= inv2;
            let term = binom * pw;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs() {
                break;
            }
        }
        2.0 * x.powf(a) / a * acc
    };
    0.5 * second_diff
}

/// Upper bound on `sum_{k>K} rho_H(k)^2`, from
/// `|rho_H(x)| <= H(1-2H)(x-1)^{2H-2}`.
pub fn rho_sq_tail_bound(big_k: u64, h: f64) -> f64 {
    assert!(big_k >= 2);
    let c = h * (1.0 - 2.0 * h);
    c * c * ((big_k - 1) as f64).powf(4.0 * h - 3.0) / (3.0 - 4.0 * h)
}

/// Left-point discrete Young sum for `tilde rho_H(i)` with `n` sub-steps per
/// unit cell:
/// `sum_{a,b=1}^n R([0,u_{a-1}] x [i, v_{b-1}]) R([u_{a-1},u_a] x [v_{b-1},v_b])`.
///
/// Evaluated in `O(n)` by grouping the double sum by lag.
pub fn tilde_rho_discrete(i: u64, h: f64, n: usize) -> f64 {
    assert!(n >= 1);
    let h2 = 2.0 * h;
    let nn = n as i64;
    let big_n = i as i64 * nn;
    // rho(k) for k in [lo, hi] (signed), with prefix sums.
    let lo = big_n - nn + 1;
    let hi = big_n + nn - 1;
    let len = (hi - lo + 1) as usize;
    let rho_at: Vec<f64> = (0..len).map(|j| rho_lag(lo + j as i64, h)).collect();
    let mut prefix = Vec::with_capacity(len + 1);
    let mut acc = Compensated::new();
    prefix.push(0.0);
    for r in &rho_at {
        acc.add(*r);
        prefix.push(acc.value());
    }
    let window = |from: i64, to: i64| -> f64 {
        let a = (from - lo) as usize;
        let b = (to - lo) as usize;
        prefix[b + 1] - prefix[a]
    };
    let gn = |x: i64| (x as f64).abs().powf(h2);

    let mut t1 = Compensated::new();
    let mut t2 = Compensated::new();
    for b in 1..=nn {
        // P(b) = (g(N+b-1) - g(N)) / 2
        let p = 0.5 * pow_diff((big_n + b - 1) as f64, big_n as f64, h2);
        t1.add(p * window(big_n + b - nn, big_n + b - 1));
    }
    for a in 1..=nn {
        let w = window(big_n + 1 - a, big_n + nn - a);
        t2.add(0.5 * gn(big_n - a + 1) * w);
    }
    let mut t3 = Compensated::new();
    for lag in -(nn - 1)..nn {
        let k = big_n + lag;
        let cnt = (nn - lag.abs()) as f64;
        t3.add(-0.5 * cnt * gn(k) * rho_at[(k - lo) as usize]);
    }
    let total = fsum([t1.value(), t2.value(), t3.value()]);
    total * (n as f64).powf(-2.0 * h2)
}

/// A quadrature value together with its achieved tolerance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub tol: f64,
    /// Finest refinement used.
    pub n: usize,
}

const TILDE_RHO_MIN_LEVEL: u32 = 3;
const TILDE_RHO_MAX_LEVEL: u32 = 22;

/// `tilde rho_H(i)` by dyadic refinement of the discrete Young sum with
/// Richardson extrapolation; stops when successive extrapolants differ by
/// less than `tol`.
pub fn tilde_rho(i: u64, h: f64, tol: f64) -> Result<Quadrature> {
    if tol <= 0.0 {
        return domain("tolerance must be positive");
    }
    let mut rich = Richardson::new(2.0, &[4.0 * h - 1.0, 1.0, 4.0 * h, 2.0 * h + 1.0, 2.0]);
    let mut prev = f64::NAN;
    for level in TILDE_RHO_MIN_LEVEL..=TILDE_RHO_MAX_LEVEL {
        let n = 1usize << level;
        let est = rich.push(tilde_rho_discrete(i, h, n));
        if let Some(change) = rich.change() {
            if change < tol {
                return Ok(Quadrature {
                    value: est,
                    tol: change,
                    n,
                });
            }
        }
        if level == TILDE_RHO_MAX_LEVEL {
            return Err(Error::Refinement { n, prev, last: est });
        }
        prev = est;
    }
    unreachable!()
}

/// `tilde rho_H(i)` for `i >= 2` by tensor Gauss–Legendre quadrature of the
/// smooth density `H(2H-1)|v-u|^{2H-2}` (the cells are separated there).
pub fn tilde_rho_smooth(i: u64, h: f64, points: usize) -> f64 {
    assert!(i >= 2, "the smooth rule needs separated cells");
    if h == 0.5 {
        return 0.0;
    }
    let fi = i as f64;
    let (xu, wu) = gauss_legendre(points, 0.0, 1.0);
    let (xv, wv) = gauss_legendre(points, fi, fi + 1.0);
    let c = h * (2.0 * h - 1.0);
    let mut acc = Compensated::new();
    for (u, wu) in xu.iter().zip(&wu) {
        for (v, wv) in xv.iter().zip(&wv) {
            let r = cov_rect_raw(0.0, *u, fi, *v, h);
            let dens = c * (v - u).powf(2.0 * h - 2.0);
            acc.add(wu * wv * r * dens);
        }
    }
    acc.value()
}

/// Quadrature order used by [`series_constants`] for separated cells.
pub fn smooth_points(i: u64) -> usize {
    if i <= 64 {
        16
    } else {
        4
    }
}

/// `tilde rho_H(i)` using the extrapolated discrete sum for the touching
/// cells `i <= 1` and Gauss–Legendre beyond.
pub fn tilde_rho_any(i: u64, h: f64, tol: f64) -> Result<Quadrature> {
    if i <= 1 {
        tilde_rho(i, h, tol)
    } else {
        Ok(Quadrature {
            value: tilde_rho_smooth(i, h, smooth_points(i)),
            tol: 1e-15,
            n: smooth_points(i),
        })
    }
}

/// Truncated correlation tables and the limit constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesConstants {
    pub h: f64,
    pub tol: f64,
    pub k: u64,
    #[serde(skip)]
    pub rho: Vec<f64>,
    #[serde(skip)]
    pub rho_tilde: Vec<f64>,
    /// Bound on the neglected tail of each of the two series.
    pub tail_bound: f64,
    /// Accumulated quadrature tolerance of the `tilde rho` table.
    pub quad_tol: f64,
    pub sigma2: f64,
    pub sigma2_tilde: f64,
    pub fclt_c: f64,
}

impl SeriesConstants {
    /// `rho_H(lag)` from the table, or directly beyond it.
    pub fn rho_at(&self, lag: i64) -> f64 {
        let k = lag.unsigned_abs();
        self.rho.get(k as usize).copied().unwrap_or_else(|| rho(k, self.h))
    }

    /// `tilde rho_H(lag)` from the table, or by quadrature beyond it.
    pub fn rho_tilde_at(&self, lag: i64) -> f64 {
        let k = lag.unsigned_abs();
        match self.rho_tilde.get(k as usize) {
            Some(v) => *v,
            None => tilde_rho_smooth(k, self.h, smooth_points(k)),
        }
    }

    /// Combined tolerance of `sigma2`, `sigma2_tilde` and `C^2`.
    pub fn combined_tol(&self) -> f64 {
        self.tail_bound + self.quad_tol
    }
}

/// Smallest `K >= 2` whose squared-tail bound is below `target`.
pub fn truncation_index(h: f64, target: f64) -> u64 {
    let ok = |k: u64| 2.0 * rho_sq_tail_bound(k, h) <= target;
    if ok(2) {
        return 2;
    }
    let mut hi = 4u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sigma^2`, `tilde sigma^2` and the FCLT constant `C`.
///
/// `C` is evaluated from its defining series (variance and lag covariances
/// of the Lévy area, increment variance and squared increment covariances
/// taken from `cov_rect`); the identity `C^2 = tilde sigma^2 - sigma^2/4`
/// is then checked as an internal consistency condition.
pub fn series_constants(h: f64, tol: f64) -> Result<SeriesConstants> {
    HurstModel::new(h, 1)?;
    if tol <= 0.0 {
        return domain("tolerance must be positive");
    }
    let k = truncation_index(h, tol / 10.0);
    let tail_bound = 2.0 * rho_sq_tail_bound(k.max(2), h);
    let rho_tab: Vec<f64> = (0..=k).into_par_iter().map(|j| rho(j, h)).collect();

    let q0 = tilde_rho(0, h, tol / 10.0)?;
    let q1 = tilde_rho(1, h, tol / 10.0)?;
    let far: Vec<f64> = (2..=k)
        .into_par_iter()
        .map(|i| tilde_rho_smooth(i, h, smooth_points(i)))
        .collect();
    let mut rho_tilde = Vec::with_capacity(k as usize + 1);
    rho_tilde.push(q0.value);
    rho_tilde.push(q1.value);
    rho_tilde.extend(far);
    rho_tilde.truncate(k as usize + 1);
    let quad_tol = q0.tol + 2.0 * q1.tol + 2.0 * (k as f64) * 1e-16;

    let sigma2 = 1.0 + 2.0 * fsum(rho_tab[1..].iter().map(|r| r * r));
    let sigma2_tilde = rho_tilde[0] + 2.0 * fsum(rho_tilde[1..].iter().copied());

    // C^2 from its defining series.
    let var_inc = cov(1.0, 1.0, h);
    let sq_cross = fsum((1..=k).map(|j| {
        let c = cov_rect_raw(0.0, 1.0, j as f64, j as f64 + 1.0, h);
        c * c
    }));
    let levy_series = rho_tilde[0] + 2.0 * fsum(rho_tilde[1..].iter().copied());
    let c2 = levy_series - 0.25 * var_inc * var_inc - 0.5 * sq_cross;
    let slack = 2.0 * (tail_bound + quad_tol);
    if c2 < -slack {
        return Err(Error::Consistency(format!(
            "negative radicand {c2:e} for the FCLT constant"
        )));
    }
    let fclt_c = c2.max(0.0).sqrt();
    let identity_gap = (c2 - (sigma2_tilde - sigma2 / 4.0)).abs();
    if identity_gap > slack.max(1e-14) {
        return Err(Error::Consistency(format!(
            "C^2 and sigma_tilde^2 - sigma^2/4 differ by {identity_gap:e}"
        )));
    }
    Ok(SeriesConstants {
        h,
        tol,
        k,
        rho: rho_tab,
        rho_tilde,
        tail_bound,
        quad_tol,
        sigma2,
        sigma2_tilde,
        fclt_c,
    })
}

/// Iterated covariance `R^l_s(u,v)` on an `(n+1) x (n+1)` grid of `[s,t]^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IteratedCov {
    pub level: usize,
    pub s: f64,
    pub t: f64,
    pub n: usize,
    pub h: f64,
    values: Vec<f64>,
}

impl IteratedCov {
    /// `R^l_s(u_i, v_j)` with `u_i = s + i (t-s)/n`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.n + 1) + j]
    }

    /// `R^l_s(t, t)`.
    pub fn corner(&self) -> f64 {
        self.value(self.n, self.n)
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        self.s + (self.t - self.s) * i as f64 / self.n as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Runs the recursion `R^l_s(u,v) = int int R^{l-1}_s dR` with left-point
/// discrete Young sums.
pub fn iterated_cov_rl(l: usize, s: f64, t: f64, n: usize, h: f64) -> Result<IteratedCov> {
    if l == 0 {
        return domain("level l must be at least 1");
    }
    if n < 2 {
        return domain("grid size n must be at least 2");
    }
    if !(t > s && s >= 0.0) {
        return domain(format!("invalid base interval [{s},{t}]"));
    }
    let w = n + 1;
    let step = (t - s) / n as f64;
    let u = |i: usize| s + step * i as f64;
    let mut cur = vec![0.0; w * w];
    for i in 0..w {
        for j in 0..w {
            cur[i * w + j] = cov_rect_raw(s, u(i), s, u(j), h);
        }
    }
    // Sub-cell covariances depend only on the lag.
    let unit = step.powf(2.0 * h);
    let cell: Vec<f64> = (0..n).map(|k| unit * rho(k as u64, h)).collect();
    for _ in 1..l {
        let mut next = vec![0.0; w * w];
        for i in 1..w {
            for j in 1..w {
                let d_r = cell[(i as i64 - j as i64).unsigned_abs() as usize];
                next[i * w + j] = next[(i - 1) * w + j] + next[i * w + j - 1] - next[(i - 1) * w + j - 1]
                    + cur[(i - 1) * w + j - 1] * d_r;
            }
        }
        cur = next;
    }
    Ok(IteratedCov {
        level: l,
        s,
        t,
        n,
        h,
        values: cur,
    })
}
