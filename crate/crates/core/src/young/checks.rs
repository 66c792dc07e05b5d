//! Numerical checks of the multidimensional Young estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::young::grid::{GridFunction, GridPartition};
use crate::young::integral::{discrete_young_integral, iterated_a, psi};
use crate::young::variation::{bar_vp, controlled_pvar, tilde_vp, vp, ControlledMode, VpMode};

/// A control `w(s, t)` on intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ControlFunction {
    /// `t - s`.
    Linear,
    /// `(t - s)^kappa` with `kappa >= 1`.
    Power(f64),
    /// `W(t) - W(s)` for a non-decreasing `W` sampled on `grid`, linearly
    /// interpolated.
    Increments { grid: Vec<f64>, w: Vec<f64> },
}

impl ControlFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Linear => Ok(()),
            Self::Power(k) if *k >= 1.0 && k.is_finite() => Ok(()),
            Self::Power(k) => domain(format!("power control needs kappa >= 1, got {k}")),
            Self::Increments { grid, w } => {
                if grid.len() < 2 || grid.len() != w.len() {
                    return domain("increment control needs matching grid and values");
                }
                if grid.windows(2).any(|p| !(p[0] < p[1])) || w.windows(2).any(|p| p[1] < p[0]) {
                    return domain("increment control needs an increasing grid and non-decreasing W");
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Self::Linear => t - s,
            Self::Power(k) => (t - s).max(0.0).powf(*k),
            Self::Increments { grid, w } => {
                let at = |x: f64| {
                    let k = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1);
                    let (g0, g1) = (grid[k - 1], grid[k]);
                    let lam = ((x - g0) / (g1 - g0)).clamp(0.0, 1.0);
                    w[k - 1] + lam * (w[k] - w[k - 1])
                };
                at(t) - at(s)
            }
        }
    }

    /// Largest violation of `w(s, u) + w(u, t) <= w(s, t)` over triples of
    /// `points` (non-positive when superadditive).
    pub fn superadditivity_defect(&self, points: &[f64]) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..points.len() {
            for j in i..points.len() {
                for k in j..points.len() {
                    let (s, u, t) = (points[i], points[j], points[k]);
                    worst = worst.max(self.eval(s, u) + self.eval(u, t) - self.eval(s, t));
                }
            }
        }
        worst
    }
}

/// `|int f dg| / (Vbar_p(f) V_q(g))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowghiReport {
    pub integral: f64,
    pub bar_vp_f: f64,
    pub vp_f: f64,
    pub vq_g: f64,
    /// Ratio against `Vbar_p(f) V_q(g)`.
    pub ratio: f64,
    /// Ratio against `V_p(f) V_q(g)`, meaningful when `f` vanishes on the
    /// lower axes.
    pub ratio_vanishing: Option<f64>,
    pub exact: bool,
}

fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn vanishes_on_lower_axes(f: &GridFunction) -> bool {
    let shape = f.shape();
    let n = shape.len();
    let total: usize = shape.iter().product();
    let st = crate::young::grid::strides(&shape);
    (0..total).all(|flat| {
        let on_axis = (0..n).any(|r| (flat / st[r]) % shape[r] == 0);
        !on_axis || f.values()[flat] == 0.0
    })
}

pub fn towghi_check(f: &GridFunction, g: &GridFunction, p: f64, q: f64) -> Result<TowghiReport> {
    if !(1.0 / p + 1.0 / q > 1.0) {
        return domain(format!("need 1/p + 1/q > 1, got p = {p}, q = {q}"));
    }
    let integral = discrete_young_integral(f, g)?;
    let bar = bar_vp(f, p, VpMode::Auto)?;
    let vpf = vp(f, p, VpMode::Auto)?;
    let vqg = vp(g, q, VpMode::Auto)?;
    let vanishing = vanishes_on_lower_axes(f);
    Ok(TowghiReport {
        integral,
        bar_vp_f: bar.value,
        vp_f: vpf.value,
        vq_g: vqg.value,
        ratio: safe_ratio(integral.abs(), bar.value * vqg.value),
        ratio_vanishing: vanishing.then(|| safe_ratio(integral.abs(), vpf.value * vqg.value)),
        exact: bar.exact && vpf.exact && vqg.exact,
    })
}

/// Summary of a seeded batch of random Towghi instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowghiCorpus {
    pub seed: u64,
    pub cases: usize,
    pub points: usize,
    pub p: f64,
    pub q: f64,
    pub max_ratio: f64,
    pub max_ratio_vanishing: f64,
    pub all_exact: bool,
}

fn random_partition(rng: &mut ChaCha8Rng, dims: usize, points: usize) -> Result<GridPartition> {
    let axes = (0..dims)
        .map(|_| {
            let mut a: Vec<f64> = (0..points).map(|_| rng.random_range(0.0..1.0)).collect();
            a.sort_by(f64::total_cmp);
            a[0] = 0.0;
            a[points - 1] = 1.0;
            for k in 1..points - 1 {
                a[k] = a[k].max(a[k - 1] + 1e-3).min(1.0 - 1e-3 * (points - 1 - k) as f64);
            }
            a
        })
        .collect();
    GridPartition::new(axes)
}

/// Random two-parameter pairs on `points x points` grids: values uniform in
/// `[-1, 1]`; odd cases use an `f` that vanishes on the lower axes.
pub fn towghi_corpus(seed: u64, cases: usize, points: usize, p: f64, q: f64) -> Result<TowghiCorpus> {
    if points < 2 {
        return domain("need at least two points per axis");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TowghiCorpus {
        seed,
        cases,
        points,
        p,
        q,
        max_ratio: 0.0,
        max_ratio_vanishing: 0.0,
        all_exact: true,
    };
    for case in 0..cases {
        let part = random_partition(&mut rng, 2, points)?;
        let n = part.len();
        let mut fv: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gv: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if case % 2 == 1 {
            for (k, v) in fv.iter_mut().enumerate() {
                if k / points == 0 || k % points == 0 {
                    *v = 0.0;
                }
            }
        }
        let f = GridFunction::new(part.clone(), fv)?;
        let g = GridFunction::new(part, gv)?;
        let r = towghi_check(&f, &g, p, q)?;
        out.max_ratio = out.max_ratio.max(r.ratio);
        if let Some(v) = r.ratio_vanishing {
            out.max_ratio_vanishing = out.max_ratio_vanishing.max(v);
        }
        out.all_exact &= r.exact;
    }
    Ok(out)
}

/// The orderings `Vtilde_p <= V_p <= ||.||_{p-var}` and superadditivity of
/// the controlled variation across a grid line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub tilde: f64,
    pub grid_like: f64,
    pub controlled: f64,
    /// `||f||^p` on each half plus the split total; superadditive when
    /// `parts <= whole`.
    pub split_parts: f64,
    pub split_whole: f64,
}

impl SandwichReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.tilde <= self.grid_like + tol
            && self.grid_like <= self.controlled + tol
            && self.split_parts <= self.split_whole + tol
    }
}

pub fn fv_sandwich(f: &GridFunction, p: f64, split_axis: usize, split_at: usize) -> Result<SandwichReport> {
    let shape = f.shape();
    if split_axis >= shape.len() || split_at == 0 || split_at + 1 >= shape[split_axis] {
        return domain("split must be at an interior node");
    }
    let ctrl = |g: &GridFunction| -> Result<f64> { Ok(controlled_pvar(g, p, ControlledMode::ExactSmall)?.value) };
    let mut lo: Vec<(usize, usize)> = shape.iter().map(|&m| (0, m - 1)).collect();
    let mut hi = lo.clone();
    lo[split_axis].1 = split_at;
    hi[split_axis].0 = split_at;
    let whole = ctrl(f)?;
    Ok(SandwichReport {
        tilde: tilde_vp(f, p)?,
        grid_like: vp(f, p, VpMode::Exact)?.value,
        controlled: whole,
        split_parts: ctrl(&f.sub_box(&lo)?)?.powf(p) + ctrl(&f.sub_box(&hi)?)?.powf(p),
        split_whole: whole.powf(p),
    })
}

/// Seeded random two-parameter grids with at most four points per axis;
/// returns the number of failures and the number of cases.
pub fn fv_sandwich_corpus(seed: u64, cases: usize, p: f64) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..cases {
        let points = rng.random_range(3..=4);
        let part = random_partition(&mut rng, 2, points)?;
        let n = part.len();
        let f = GridFunction::new(part, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())?;
        let axis = rng.random_range(0..2);
        let at = rng.random_range(1..points - 1);
        if !fv_sandwich(&f, p, axis, at)?.pass(1e-12) {
            failures += 1;
        }
    }
    Ok((failures, cases))
}

/// Product estimates for `V_p`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProductReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub exact: bool,
}

/// `V_p(f g)` against `V_p(f) V_p(g)` for functions of disjoint variables.
pub fn product_pvar_separable(f: &GridFunction, g: &GridFunction, p: f64) -> Result<ProductReport> {
    let fg = f.tensor(g);
    let l = vp(&fg, p, VpMode::Auto)?;
    let a = vp(f, p, VpMode::Auto)?;
    let b = vp(g, p, VpMode::Auto)?;
    let rhs = a.value * b.value;
    Ok(ProductReport {
        lhs: l.value,
        rhs,
        ratio: safe_ratio(l.value, rhs),
        exact: l.exact && a.exact && b.exact,
    })
}

/// `V_q(f g)` against `Vbar_p(f) Vbar_p(g)` on a shared partition, `q >= p`.
pub fn product_pvar_shared(f: &GridFunction, g: &GridFunction, p: f64, q: f64) -> Result<ProductReport> {
    if q < p {
        return domain(format!("need q >= p, got p = {p}, q = {q}"));
    }
    let fg = f.pointwise_mul(g)?;
    let l = vp(&fg, q, VpMode::Auto)?;
    let a = bar_vp(f, p, VpMode::Auto)?;
    let b = bar_vp(g, p, VpMode::Auto)?;
    let rhs = a.value * b.value;
    Ok(ProductReport {
        lhs: l.value,
        rhs,
        ratio: safe_ratio(l.value, rhs),
        exact: l.exact && a.exact && b.exact,
    })
}

/// Riemann zeta at `theta > 1`, by direct summation with an integral tail.
pub fn zeta(theta: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return domain(format!("zeta needs theta > 1, got {theta}"));
    }
    let n = 10_000usize;
    let mut acc = crate::numerics::Compensated::new();
    for k in (1..=n).rev() {
        acc.add((k as f64).powf(-theta));
    }
    // Euler-Maclaurin tail.
    let nf = n as f64;
    let tail = nf.powf(1.0 - theta) / (theta - 1.0) - 0.5 * nf.powf(-theta) + theta / 12.0 * nf.powf(-theta - 1.0);
    Ok(acc.value() + tail)
}

/// A box function `phi` on `2N`-dimensional boxes, given by its values on
/// corners: `phi(u_1..u_N, v_1..v_N)`.
pub type CornerFn<'a> = dyn Fn(&[f64]) -> f64 + 'a;

/// Rectangular increment of a point function over a box.
pub fn box_increment(phi: &CornerFn, lo: &[f64], hi: &[f64]) -> f64 {
    let n = lo.len();
    let mut x = vec![0.0; n];
    let mut acc = 0.0;
    for mask in 0..(1usize << n) {
        let mut lower = 0;
        for r in 0..n {
            if mask >> r & 1 == 1 {
                x[r] = hi[r];
            } else {
                x[r] = lo[r];
                lower += 1;
            }
        }
        let v = phi(&x);
        acc += if lower % 2 == 0 { v } else { -v };
    }
    acc
}

/// Result of the zeta-sum estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaReport {
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    /// Largest `|phi(box)| / (C prod w^{1/p} w^{1/q})` over sampled boxes.
    pub hypothesis_ratio: f64,
}

/// `sum_i phi(prod [s_r, t_{i_r - 1}] x prod [t_{i_r - 1}, t_{i_r}])` against
/// `C zeta(theta)^N prod w(s_r, t_r)^theta`, `theta = 1/p + 1/q`, after
/// checking the hypothesis on every box of the grid.
pub fn zeta_sum_check(
    phi: &CornerFn,
    partition: &GridPartition,
    w: &ControlFunction,
    c: f64,
    p: f64,
    q: f64,
) -> Result<ZetaReport> {
    w.validate()?;
    let theta = 1.0 / p + 1.0 / q;
    if !(theta > 1.0) {
        return domain(format!("need 1/p + 1/q > 1, got p = {p}, q = {q}"));
    }
    let n = partition.dims();
    if n > 4 {
        return Err(Error::Capacity {
            what: "dimensions for the zeta sum",
            got: n,
            max: 4,
        });
    }
    let shape = partition.shape();
    let cells: Vec<usize> = shape.iter().map(|m| m - 1).collect();
    let total: usize = cells.iter().product();
    let mut lhs = crate::numerics::Compensated::new();
    let mut hyp = 0.0f64;
    let mut lo = vec![0.0; 2 * n];
    let mut hi = vec![0.0; 2 * n];
    for flat in 0..total {
        let mut rest = flat;
        let mut idx = vec![0; n];
        for r in (0..n).rev() {
            idx[r] = rest % cells[r] + 1;
            rest /= cells[r];
        }
        let mut scale = c;
        for r in 0..n {
            let ax = partition.axis(r);
            let (s, a, b) = (ax[0], ax[idx[r] - 1], ax[idx[r]]);
            lo[r] = s;
            hi[r] = a;
            lo[n + r] = a;
            hi[n + r] = b;
            scale *= w.eval(s, a).powf(1.0 / p) * w.eval(a, b).powf(1.0 / q);
        }
        let v = box_increment(phi, &lo, &hi);
        lhs.add(v);
        hyp = hyp.max(safe_ratio(v.abs(), scale));
    }
    if hyp > 1.0 + 1e-9 {
        return domain(format!("hypothesis fails on a box: ratio {hyp}"));
    }
    let z = zeta(theta)?;
    let mut bound = c * z.powi(n as i32);
    for r in 0..n {
        let ax = partition.axis(r);
        bound *= w.eval(ax[0], ax[ax.len() - 1]).powf(theta);
    }
    let l = lhs.value();
    Ok(ZetaReport {
        lhs: l,
        bound,
        ratio: safe_ratio(l.abs(), bound),
        hypothesis_ratio: hyp,
    })
}

/// Variable split `(N, K, L, M)` for the mixed product estimate, with
/// `M <= K <= N` and `M <= L <= N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FghShape {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

impl FghShape {
    pub fn validate(&self) -> Result<()> {
        let FghShape { n, k, l, m } = *self;
        if n == 0 || n > 3 || k + l > 2 || m > k || m > l || k > n || l > n {
            return Err(Error::Capacity {
                what: "mixed product shape (N <= 3, K + L <= 2)",
                got: n.max(k + l),
                max: 3,
            });
        }
        Ok(())
    }
}

/// Ratio form of the mixed product estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FghReport {
    pub lhs: f64,
    pub vp_f: f64,
    pub vq_g: f64,
    pub w_factor: f64,
    pub ratio: f64,
}

/// `Phi(u, v) = f(u_{M+1..M+N-K}) phi(u_{1..M}, u_{M+N-K+1..N}, v_{1..L})
/// g(v_{L+1..N})`; the zeta-type sum of `Phi` is compared with
/// `V_p(f) V_q(g) prod w` where `phi` obeys the box hypothesis with constant
/// `c`. Returns `lhs / (c V_p(f) V_q(g) prod w)`.
#[allow(clippy::too_many_arguments)]
pub fn fgh_check(
    shape: FghShape,
    f: &dyn Fn(&[f64]) -> f64,
    phi: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> f64,
    partition: &GridPartition,
    w: &ControlFunction,
    c: f64,
    p: f64,
    q: f64,
) -> Result<FghReport> {
    shape.validate()?;
    w.validate()?;
    let FghShape { n, k, l, m } = shape;
    if partition.dims() != n {
        return domain("partition dimension must equal N");
    }
    if !(1.0 / p + 1.0 / q > 1.0) {
        return domain(format!("need 1/p + 1/q > 1, got p = {p}, q = {q}"));
    }
    let f_axes: Vec<usize> = (m..m + n - k).collect();
    let g_axes: Vec<usize> = (l..n).collect();
    let big = |x: &[f64]| -> f64 {
        let (u, v) = x.split_at(n);
        let fa: Vec<f64> = f_axes.iter().map(|&r| u[r]).collect();
        let mut pa: Vec<f64> = u[..m].to_vec();
        pa.extend_from_slice(&u[m + n - k..]);
        pa.extend_from_slice(&v[..l]);
        let ga: Vec<f64> = g_axes.iter().map(|&r| v[r]).collect();
        f(&fa) * phi(&pa) * g(&ga)
    };
    let shape_pts = partition.shape();
    let cells: Vec<usize> = shape_pts.iter().map(|x| x - 1).collect();
    let total: usize = cells.iter().product();
    let mut lhs = crate::numerics::Compensated::new();
    let mut lo = vec![0.0; 2 * n];
    let mut hi = vec![0.0; 2 * n];
    for flat in 0..total {
        let mut rest = flat;
        for r in (0..n).rev() {
            let i = rest % cells[r] + 1;
            rest /= cells[r];
            let ax = partition.axis(r);
            lo[r] = ax[0];
            hi[r] = ax[i - 1];
            lo[n + r] = ax[i - 1];
            hi[n + r] = ax[i];
        }
        lhs.add(box_increment(&big, &lo, &hi));
    }
    let sub = |axes: &[usize], func: &dyn Fn(&[f64]) -> f64| -> Option<GridFunction> {
        if axes.is_empty() {
            return None;
        }
        let part = GridPartition::new(axes.iter().map(|&r| partition.axis(r).to_vec()).collect()).ok()?;
        Some(GridFunction::from_fn(part, func))
    };
    let vp_f = match sub(&f_axes, f) {
        Some(ff) => vp(&ff, p, VpMode::Auto)?.value,
        None => f(&[]).abs(),
    };
    let vq_g = match sub(&g_axes, g) {
        Some(gg) => vp(&gg, q, VpMode::Auto)?.value,
        None => g(&[]).abs(),
    };
    let theta = 1.0 / p + 1.0 / q;
    let span = |r: usize| {
        let ax = partition.axis(r);
        w.eval(ax[0], ax[ax.len() - 1])
    };
    let mut wf = 1.0;
    for r in 0..m {
        wf *= span(r).powf(theta);
    }
    for r in m + n - k..n {
        wf *= span(r).powf(1.0 / p);
    }
    for r in m..l {
        wf *= span(r).powf(1.0 / q);
    }
    let l_val = lhs.value();
    Ok(FghReport {
        lhs: l_val,
        vp_f,
        vq_g,
        w_factor: wf,
        ratio: safe_ratio(l_val.abs(), c * vp_f * vq_g * wf),
    })
}

/// Total variation of `psi_{s,t}` over `grid` against `3 (t - s)^{2H}`.
pub fn psi_variation_ratio(s: f64, t: f64, h: f64, grid: &[f64]) -> f64 {
    let v = psi(s, t, h, grid);
    let tv: f64 = v.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    tv / (3.0 * (t - s).powf(2.0 * h))
}

/// Seeded batch of iterated-integral instances with `r <= 3` factors;
/// returns the largest ratio to the bound.
pub fn iterated_a_corpus(seed: u64, cases: usize, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return domain("need at least two grid points");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<f64> = (0..grid_points).map(|k| k as f64 / (grid_points - 1) as f64).collect();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let r = rng.random_range(1..=3);
        let h = rng.random_range(0.34..=0.5);
        let mut a = Vec::with_capacity(r);
        let mut boxes = Vec::with_capacity(r);
        for _ in 0..r {
            let s = rng.random_range(0.0..0.9);
            let t = rng.random_range(s + 0.01..=1.0);
            boxes.push((s, t));
            let amp = rng.random_range(0.1..2.0);
            let freq = rng.random_range(0.0..6.0);
            let phase = rng.random_range(0.0..6.3);
            a.push(grid.iter().map(|&x| amp * (freq * x + phase).sin()).collect());
        }
        worst = worst.max(iterated_a(&grid, &a, &boxes, h)?.ratio());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controls() {
        let pts: Vec<f64> = (0..8).map(|k| k as f64 / 7.0).collect();
        assert!(ControlFunction::Linear.superadditivity_defect(&pts) < 1e-15);
        assert!(ControlFunction::Power(1.7).superadditivity_defect(&pts) < 1e-15);
        let inc = ControlFunction::Increments {
            grid: pts.clone(),
            w: pts.iter().map(|x| x * x).collect(),
        };
        inc.validate().unwrap();
        assert!(inc.superadditivity_defect(&pts) < 1e-14);
        assert!(ControlFunction::Power(0.5).validate().is_err());
        let bad = ControlFunction::Increments {
            grid: pts.clone(),
            w: pts.iter().rev().copied().collect(),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zeta_values() {
        let z2 = zeta(2.0).unwrap();
        assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn towghi_requires_complementary_exponents() {
        let p = GridPartition::uniform(2, 2, 0.0, 1.0).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0] * x[1]);
        assert!(towghi_check(&f, &f, 2.0, 2.0).is_err());
        let r = towghi_check(&f, &f, 1.5, 1.5).unwrap();
        assert!(r.ratio_vanishing.is_some());
        assert!(r.exact);
    }

    #[test]
    fn separable_product_is_exact() {
        let pa = GridPartition::new(vec![vec![0.0, 0.3, 0.5, 1.0]]).unwrap();
        let pb = GridPartition::new(vec![vec![0.0, 0.2, 0.9, 1.0]]).unwrap();
        let f = GridFunction::from_fn(pa, |x| (5.0 * x[0]).sin());
        let g = GridFunction::from_fn(pb, |x| (7.0 * x[0]).cos());
        let r = product_pvar_separable(&f, &g, 2.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn zeta_sum_of_power_product() {
        let (p, q) = (1.5, 1.8);
        let phi = |x: &[f64]| x[0].powf(1.0 / p) * x[1].powf(1.0 / q);
        let part = GridPartition::uniform(1, 12, 0.0, 1.0).unwrap();
        let rep = zeta_sum_check(&phi, &part, &ControlFunction::Linear, 1.0, p, q).unwrap();
        assert!(rep.ratio <= 1.0, "{rep:?}");
        assert!(rep.hypothesis_ratio <= 1.0 + 1e-12);
        let bad = |x: &[f64]| 10.0 * x[0] * x[1];
        assert!(zeta_sum_check(&bad, &part, &ControlFunction::Linear, 1.0, p, q).is_err());
    }

    #[test]
    fn zeta_sum_is_homogeneous_in_the_control() {
        let (p, q) = (1.5, 1.5);
        let part = GridPartition::uniform(2, 4, 0.0, 1.0).unwrap();
        let phi = |x: &[f64]| x[0].powf(1.0 / p) * x[1].powf(1.0 / p) * x[2].powf(1.0 / q) * x[3].powf(1.0 / q);
        let a = zeta_sum_check(&phi, &part, &ControlFunction::Linear, 1.0, p, q).unwrap();
        let lam: f64 = 2.5;
        let scaled = ControlFunction::Increments {
            grid: vec![0.0, 1.0],
            w: vec![0.0, lam],
        };
        let b = zeta_sum_check(&phi, &part, &scaled, 1.0, p, q).unwrap();
        let theta = 1.0 / p + 1.0 / q;
        assert!((b.bound / a.bound - lam.powf(2.0 * theta)).abs() < 1e-10);
        assert!((b.hypothesis_ratio * lam.powf(2.0 * theta) - a.hypothesis_ratio).abs() < 1e-10);
    }

    #[test]
    fn fgh_shapes() {
        assert!(FghShape { n: 4, k: 0, l: 0, m: 0 }.validate().is_err());
        assert!(FghShape { n: 2, k: 2, l: 1, m: 1 }.validate().is_err());
        FghShape { n: 2, k: 1, l: 1, m: 1 }.validate().unwrap();
    }

    #[test]
    fn fgh_small_instance() {
        let (p, q) = (1.5, 1.5);
        let shape = FghShape { n: 2, k: 1, l: 1, m: 0 };
        let part = GridPartition::uniform(2, 4, 0.0, 1.0).unwrap();
        let f = |x: &[f64]| (2.0 * x[0]).sin();
        let phi = |x: &[f64]| x[0].powf(1.0 / p) * x[1].powf(1.0 / q);
        let g = |x: &[f64]| (3.0 * x[0]).cos();
        let r = fgh_check(shape, &f, &phi, &g, &part, &ControlFunction::Linear, 1.0, p, q).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0, "{r:?}");
    }

    #[test]
    fn psi_variation_bound() {
        let grid: Vec<f64> = (0..=400).map(|k| 2.0 * k as f64 / 400.0).collect();
        for h in [0.35, 0.4, 0.5] {
            for (s, t) in [(0.1, 0.2), (0.5, 1.5), (0.0, 2.0)] {
                assert!(psi_variation_ratio(s, t, h, &grid) <= 1.0);
            }
        }
    }

    #[test]
    fn corpora_run() {
        let c = towghi_corpus(1, 10, 4, 1.5, 1.5).unwrap();
        assert!(c.all_exact && c.max_ratio.is_finite());
        let (fail, n) = fv_sandwich_corpus(2, 20, 1.7).unwrap();
        assert_eq!((fail, n), (0, 20));
        assert!(iterated_a_corpus(3, 20, 65).unwrap() <= 1.0);
    }
}
