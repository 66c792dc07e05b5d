//! Variation norms of grid functions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::young::grid::GridFunction;

/// Largest number of sub-partitions enumerated by the exact `V_p`.
pub const MAX_ENUMERATED: usize = 1 << 20;

/// Largest number of points per axis for exact controlled variation in two
/// dimensions.
pub const CONTROLLED_MAX_POINTS: usize = 4;

/// A variation value, flagged when it is only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variation {
    pub value: f64,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VpMode {
    /// Exhaustive search; capacity error beyond [`MAX_ENUMERATED`].
    Exact,
    /// Exact when within capacity, otherwise a greedy lower bound.
    Auto,
    /// Greedy coarsening from the full partition.
    LowerBound,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("need finite p >= 1, got {p}"));
    }
    Ok(())
}

fn sum_pow(vals: &[f64], p: f64) -> f64 {
    let mut acc = crate::numerics::Compensated::new();
    for v in vals {
        acc.add(v.abs().powf(p));
    }
    acc.value()
}

/// `(sum |f(cell)|^p)^{1/p}` over the cells of the partition itself.
pub fn tilde_vp(f: &GridFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(sum_pow(&f.cell_increments(), p).powf(1.0 / p))
}

/// Number of grid-like sub-partitions whose first `N - 1` axes are
/// enumerated (the last axis is optimised by dynamic programming).
pub fn enumerated_count(f: &GridFunction) -> Option<usize> {
    let shape = f.shape();
    let bits: usize = shape[..shape.len() - 1].iter().map(|&m| m.saturating_sub(2)).sum();
    if bits >= usize::BITS as usize - 1 {
        None
    } else {
        Some(1usize << bits)
    }
}

/// Best `sum |g(cell)|^p` over sub-partitions of the last axis, for a fixed
/// partition of the other axes (`g` restricted to it).
fn last_axis_dp(g: &GridFunction, p: f64) -> f64 {
    let n = g.dims();
    let lead: Vec<usize> = (0..n - 1).collect();
    let (d, shape) = g.difference_axes(&lead);
    let m = shape[n - 1];
    let cells = d.len() / m;
    let mut best = vec![f64::NEG_INFINITY; m];
    best[0] = 0.0;
    for j in 1..m {
        for i in 0..j {
            let mut acc = 0.0;
            for c in 0..cells {
                acc += (d[c * m + j] - d[c * m + i]).abs().powf(p);
            }
            best[j] = best[j].max(best[i] + acc);
        }
    }
    best[m - 1]
}

fn subset_indices(m: usize, mask: usize) -> Vec<usize> {
    let mut out = vec![0];
    for k in 1..m - 1 {
        if mask >> (k - 1) & 1 == 1 {
            out.push(k);
        }
    }
    out.push(m - 1);
    out
}

fn vp_exact_pow(f: &GridFunction, p: f64) -> Result<f64> {
    let shape = f.shape();
    let count = enumerated_count(f).filter(|&c| c <= MAX_ENUMERATED);
    let Some(count) = count else {
        return Err(Error::Capacity {
            what: "enumerated sub-partitions",
            got: enumerated_count(f).unwrap_or(usize::MAX),
            max: MAX_ENUMERATED,
        });
    };
    let n = shape.len();
    let bits: Vec<usize> = shape[..n - 1].iter().map(|&m| m - 2).collect();
    let mut best = 0.0f64;
    for code in 0..count {
        let mut rest = code;
        let mut keep = Vec::with_capacity(n);
        for r in 0..n - 1 {
            let mask = rest & ((1usize << bits[r]) - 1);
            rest >>= bits[r];
            keep.push(subset_indices(shape[r], mask));
        }
        keep.push((0..shape[n - 1]).collect());
        best = best.max(last_axis_dp(&f.restrict(&keep)?, p));
    }
    Ok(best)
}

fn vp_greedy_pow(f: &GridFunction, p: f64) -> Result<f64> {
    let shape = f.shape();
    let mut keep: Vec<Vec<usize>> = shape.iter().map(|&m| (0..m).collect()).collect();
    let eval = |keep: &[Vec<usize>]| -> Result<f64> { Ok(sum_pow(&f.restrict(keep)?.cell_increments(), p)) };
    let mut current = eval(&keep)?;
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for r in 0..keep.len() {
            for k in 1..keep[r].len().saturating_sub(1) {
                let mut trial = keep.clone();
                trial[r].remove(k);
                let v = eval(&trial)?;
                if v > current && best.is_none_or(|b| v > b.0) {
                    best = Some((v, r, k));
                }
            }
        }
        match best {
            Some((v, r, k)) => {
                keep[r].remove(k);
                current = v;
            }
            None => break,
        }
    }
    // Polish the last axis exactly for the chosen leading axes.
    let last = keep.len() - 1;
    keep[last] = (0..shape[last]).collect();
    Ok(current.max(last_axis_dp(&f.restrict(&keep)?, p)))
}

/// Supremum of `tilde_vp` over grid-like sub-partitions.
pub fn vp(f: &GridFunction, p: f64, mode: VpMode) -> Result<Variation> {
    check_p(p)?;
    let within = enumerated_count(f).is_some_and(|c| c <= MAX_ENUMERATED);
    let (pow, exact) = match mode {
        VpMode::Exact => (vp_exact_pow(f, p)?, true),
        VpMode::Auto if within => (vp_exact_pow(f, p)?, true),
        VpMode::Auto | VpMode::LowerBound => (vp_greedy_pow(f, p)?, false),
    };
    Ok(Variation {
        value: pow.powf(1.0 / p),
        exact,
    })
}

/// `sum_A V_p(f(s_{A^c}, .); A) + |f(s)|` over non-empty axis sets `A`.
pub fn bar_vp(f: &GridFunction, p: f64, mode: VpMode) -> Result<Variation> {
    check_p(p)?;
    let n = f.dims();
    if n > 16 {
        return Err(Error::Capacity {
            what: "axes for the full variation",
            got: n,
            max: 16,
        });
    }
    let mut total = f.at(&vec![0; n]).abs();
    let mut exact = true;
    for mask in 1usize..(1 << n) {
        let axes: Vec<usize> = (0..n).filter(|&r| mask >> r & 1 == 1).collect();
        let v = vp(&f.lower_face(&axes)?, p, mode)?;
        total += v.value;
        exact &= v.exact;
    }
    Ok(Variation { value: total, exact })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlledMode {
    /// Exact search over rectangular partitions built from grid nodes; one
    /// dimension, or two with at most [`CONTROLLED_MAX_POINTS`] per axis.
    ExactSmall,
    /// Grid-like partitions only: a flagged lower bound.
    LowerBound,
}

fn tiling_best(
    inc: &dyn Fn(usize, usize, usize, usize) -> f64,
    rows: usize,
    cols: usize,
    mask: u32,
    memo: &mut HashMap<u32, f64>,
) -> f64 {
    let full = (1u32 << (rows * cols)) - 1;
    if mask == full {
        return 0.0;
    }
    if let Some(v) = memo.get(&mask) {
        return *v;
    }
    let first = (0..rows * cols).find(|&k| mask >> k & 1 == 0).unwrap();
    let (i0, j0) = (first / cols, first % cols);
    let mut best = f64::NEG_INFINITY;
    let mut max_j = cols;
    for i1 in i0..rows {
        for j1 in j0..max_j {
            let k = i1 * cols + j1;
            if mask >> k & 1 == 1 {
                max_j = j1;
                break;
            }
            let mut add = 0u32;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    add |= 1 << (i * cols + j);
                }
            }
            let v = inc(i0, i1 + 1, j0, j1 + 1) + tiling_best(inc, rows, cols, mask | add, memo);
            best = best.max(v);
        }
        if max_j == j0 {
            break;
        }
    }
    memo.insert(mask, best);
    best
}

/// Controlled p-variation: supremum of `sum |f(R)|^p` over partitions of the
/// box into rectangles with corners on grid nodes.
pub fn controlled_pvar(f: &GridFunction, p: f64, mode: ControlledMode) -> Result<Variation> {
    check_p(p)?;
    let shape = f.shape();
    match (mode, shape.len()) {
        (ControlledMode::ExactSmall, 1) => vp(f, p, VpMode::Exact),
        (ControlledMode::ExactSmall, 2) => {
            if shape.iter().any(|&m| m > CONTROLLED_MAX_POINTS) {
                return Err(Error::Capacity {
                    what: "points per axis for exact controlled variation",
                    got: *shape.iter().max().unwrap(),
                    max: CONTROLLED_MAX_POINTS,
                });
            }
            let (rows, cols) = (shape[0] - 1, shape[1] - 1);
            let inc = |a: usize, b: usize, c: usize, d: usize| {
                (f.at(&[b, d]) - f.at(&[a, d]) - f.at(&[b, c]) + f.at(&[a, c]))
                    .abs()
                    .powf(p)
            };
            let best = tiling_best(&inc, rows, cols, 0, &mut HashMap::new());
            Ok(Variation {
                value: best.powf(1.0 / p),
                exact: true,
            })
        }
        (ControlledMode::ExactSmall, n) => Err(Error::Capacity {
            what: "dimensions for exact controlled variation",
            got: n,
            max: 2,
        }),
        (ControlledMode::LowerBound, _) => {
            let v = vp(f, p, VpMode::Auto)?;
            Ok(Variation { exact: false, ..v })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::grid::GridPartition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_1d(vals: &[f64], p: f64) -> f64 {
        let m = vals.len();
        let mut best = 0.0f64;
        for mask in 0..(1usize << (m - 2)) {
            let idx = subset_indices(m, mask);
            let s: f64 = idx.windows(2).map(|w| (vals[w[1]] - vals[w[0]]).abs().powf(p)).sum();
            best = best.max(s);
        }
        best.powf(1.0 / p)
    }

    fn random_grid(rng: &mut ChaCha8Rng, shape: &[usize]) -> GridFunction {
        let axes = shape
            .iter()
            .map(|&m| {
                let mut a: Vec<f64> = (0..m).map(|k| k as f64 + rng.random_range(0.0..0.5)).collect();
                a[0] = 0.0;
                a
            })
            .collect();
        let part = GridPartition::new(axes).unwrap();
        let n = part.len();
        GridFunction::new(part, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn one_dimensional_dp_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = random_grid(&mut rng, &[9]);
            for p in [1.0, 1.5, 2.5] {
                let v = vp(&f, p, VpMode::Exact).unwrap();
                assert!((v.value - brute_1d(f.values(), p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_dimensional_exact_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let f = random_grid(&mut rng, &[4, 5]);
            let p = 1.7;
            let mut best = 0.0f64;
            for a in 0..4 {
                for b in 0..8 {
                    let keep = vec![subset_indices(4, a), subset_indices(5, b)];
                    let t = tilde_vp(&f.restrict(&keep).unwrap(), p).unwrap();
                    best = best.max(t);
                }
            }
            let v = vp(&f, p, VpMode::Exact).unwrap();
            assert!(v.exact);
            assert!((v.value - best).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_one_dimensional_variation() {
        let p = GridPartition::uniform(1, 10, 0.0, 1.0).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0] * x[0]);
        assert!((vp(&f, 1.0, VpMode::Exact).unwrap().value - 1.0).abs() < 1e-14);
        assert!((vp(&f, 2.0, VpMode::Exact).unwrap().value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lower_bound_is_below_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let f = random_grid(&mut rng, &[5, 5]);
            let e = vp(&f, 2.0, VpMode::Exact).unwrap();
            let l = vp(&f, 2.0, VpMode::LowerBound).unwrap();
            assert!(!l.exact);
            assert!(l.value <= e.value + 1e-12);
            assert!(l.value >= tilde_vp(&f, 2.0).unwrap() - 1e-12);
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let p = GridPartition::uniform(2, 30, 0.0, 1.0).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0] * x[1]);
        assert!(matches!(vp(&f, 2.0, VpMode::Exact), Err(Error::Capacity { .. })));
        assert!(!vp(&f, 2.0, VpMode::Auto).unwrap().exact);
        assert!(vp(&f, 0.5, VpMode::Auto).is_err());
    }

    #[test]
    fn controlled_dominates_grid_like() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let f = random_grid(&mut rng, &[4, 4]);
            for p in [1.0, 2.0] {
                let c = controlled_pvar(&f, p, ControlledMode::ExactSmall).unwrap();
                let v = vp(&f, p, VpMode::Exact).unwrap();
                assert!(c.value >= v.value - 1e-12);
            }
            // With p = 1 every refinement helps, so the finest tiling wins.
            let c1 = controlled_pvar(&f, 1.0, ControlledMode::ExactSmall).unwrap().value;
            assert!((c1 - tilde_vp(&f, 1.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_one_dimensional_is_vp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_grid(&mut rng, &[7]);
        let c = controlled_pvar(&f, 2.0, ControlledMode::ExactSmall).unwrap();
        assert_eq!(c, vp(&f, 2.0, VpMode::Exact).unwrap());
        let g = random_grid(&mut rng, &[5, 3]);
        assert!(controlled_pvar(&g, 2.0, ControlledMode::ExactSmall).is_err());
        assert!(!controlled_pvar(&g, 2.0, ControlledMode::LowerBound).unwrap().exact);
    }

    #[test]
    fn bar_vp_of_product() {
        // f(x, y) = x y on [0, 1]^2: faces at the origin vanish.
        let p = GridPartition::uniform(2, 3, 0.0, 1.0).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0] * x[1]);
        let b = bar_vp(&f, 1.0, VpMode::Exact).unwrap();
        assert!((b.value - 1.0).abs() < 1e-14);
        let g = GridFunction::from_fn(f.partition().clone(), |x| 1.0 + x[0] + x[1]);
        assert!((bar_vp(&g, 1.0, VpMode::Exact).unwrap().value - 3.0).abs() < 1e-14);
    }
}
