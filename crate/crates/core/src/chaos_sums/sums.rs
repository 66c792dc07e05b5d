//! Weighted sum processes on the dyadic grid and the discrete Hölder norm.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fbm_sim::FbmPath;
use crate::rough_lift::RoughLift;

/// Largest level for which the exact Hölder sup is computed.
pub const HOLDER_MAX_LEVEL: u32 = 12;

/// Weight values `F_{tau_i}`, `i = 0..=2^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSeries {
    m: u32,
    values: Vec<f64>,
}

impl WeightSeries {
    pub fn new(m: u32, values: Vec<f64>) -> Result<Self> {
        if values.len() != (1usize << m) + 1 {
            return domain(format!(
                "weight series at level {m} needs {} values, got {}",
                (1usize << m) + 1,
                values.len()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation(format!("non-finite weight at index {i}")));
        }
        Ok(Self { m, values })
    }

    pub fn constant(m: u32, c: f64) -> Self {
        Self {
            m,
            values: vec![c; (1usize << m) + 1],
        }
    }

    /// `F_t = phi(B_t)` sampled at the dyadic points of the path's level.
    pub fn from_path(path: &FbmPath, phi: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = path.d();
        let vals: Vec<Vec<f64>> = (0..d).map(|a| path.values(a)).collect();
        let n = path.refine();
        let mut state = vec![0.0; d];
        let values = (0..=(1usize << path.m()))
            .map(|i| {
                for a in 0..d {
                    state[a] = vals[a][i * n];
                }
                phi(&state)
            })
            .collect();
        Self::new(path.m(), values)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Partial sums `P_{tau_k} = sum_{i <= k} Z_i` on `D_m`, with the exponent
/// `e` of the normalisation `(2^m)^e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumProcess {
    pub m: u32,
    pub exponent: f64,
    values: Vec<f64>,
}

impl SumProcess {
    /// Builds the partial sums of per-cell terms, optionally weighted at the
    /// left endpoint.
    pub fn from_cells(m: u32, cells: &[f64], weights: Option<&WeightSeries>, exponent: f64) -> Result<Self> {
        if cells.len() != 1usize << m {
            return domain("cell count does not match the level");
        }
        if let Some(w) = weights {
            if w.m != m {
                return domain(format!("weights at level {} used at level {m}", w.m));
            }
        }
        let mut values = Vec::with_capacity(cells.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for (i, z) in cells.iter().enumerate() {
            let f = weights.map_or(1.0, |w| w.values[i]);
            acc += f * z;
            values.push(acc);
        }
        Ok(Self { m, exponent, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn index(&self, t: f64) -> usize {
        ((t * (1u64 << self.m) as f64).floor() as usize).min(self.values.len() - 1)
    }

    /// Value at `t`, constant between dyadic points.
    pub fn at(&self, t: f64) -> f64 {
        self.values[self.index(t)]
    }

    pub fn increment(&self, s: f64, t: f64) -> f64 {
        self.at(t) - self.at(s)
    }

    pub fn scale(&self) -> f64 {
        ((1u64 << self.m) as f64).powf(self.exponent)
    }

    /// `(2^m)^e` times the increment over `[s, t]`.
    pub fn normalized_increment(&self, s: f64, t: f64) -> f64 {
        self.scale() * self.increment(s, t)
    }
}

fn check_window(s: f64, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s > t {
        return domain(format!("need 0 <= s <= t <= 1, got s = {s}, t = {t}"));
    }
    Ok(())
}

fn window(m: u32, s: f64, t: f64) -> (usize, usize) {
    let scale = (1u64 << m) as f64;
    ((s * scale).floor() as usize, (t * scale).floor() as usize)
}

/// `sum_{i = floor(2^m s) + 1}^{floor(2^m t)} F_{tau_{i-1}} B^{ab}_{tau_{i-1}, tau_i}`.
pub fn weighted_levy_sum(f: &WeightSeries, lift: &RoughLift, a: usize, b: usize, s: f64, t: f64) -> Result<f64> {
    if a == b {
        return domain("weighted Lévy sums need distinct indices");
    }
    if a >= lift.d || b >= lift.d {
        return domain("component index out of range");
    }
    if f.m != lift.m {
        return domain(format!("weights at level {} but lift at level {}", f.m, lift.m));
    }
    check_window(s, t)?;
    let (k0, k1) = window(f.m, s, t);
    Ok((k0..k1).map(|i| f.values[i] * lift.area(i, a, b)).sum())
}

/// Same as [`weighted_levy_sum`] with `B^a B^b` per cell in place of the area.
pub fn weighted_product_sum(f: &WeightSeries, path: &FbmPath, a: usize, b: usize, s: f64, t: f64) -> Result<f64> {
    if a == b {
        return domain("weighted product sums need distinct indices");
    }
    if a >= path.d() || b >= path.d() {
        return domain("component index out of range");
    }
    if f.m != path.m() {
        return domain(format!("weights at level {} but path at level {}", f.m, path.m()));
    }
    check_window(s, t)?;
    let (k0, k1) = window(f.m, s, t);
    let xa = path.cell_increments(a);
    let xb = path.cell_increments(b);
    Ok((k0..k1).map(|i| f.values[i] * xa[i] * xb[i]).sum())
}

/// Whole-interval process `I^m` of weighted Lévy areas, normalised by
/// `(2^m)^{2H - 1/2}`.
pub fn levy_sum_process(f: &WeightSeries, lift: &RoughLift, a: usize, b: usize, h: f64) -> Result<SumProcess> {
    if a == b {
        return domain("weighted Lévy sums need distinct indices");
    }
    let cells: Vec<f64> = (0..lift.cells()).map(|i| lift.area(i, a, b)).collect();
    SumProcess::from_cells(lift.m, &cells, Some(f), 2.0 * h - 0.5)
}

/// Whole-interval process of weighted increment products.
pub fn product_sum_process(f: &WeightSeries, path: &FbmPath, a: usize, b: usize, h: f64) -> Result<SumProcess> {
    if a == b {
        return domain("weighted product sums need distinct indices");
    }
    let xa = path.cell_increments(a);
    let xb = path.cell_increments(b);
    let cells: Vec<f64> = xa.iter().zip(&xb).map(|(x, y)| x * y).collect();
    SumProcess::from_cells(path.m(), &cells, Some(f), 2.0 * h - 0.5)
}

/// `sup_{s != t in D_m} |F_t - F_s| / |t - s|^lambda` over a series of
/// `2^m + 1` dyadic samples.
pub fn holder_norm(values: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("Hölder exponent must lie in (0, 1), got {lambda}"));
    }
    let cells = values.len().saturating_sub(1);
    if cells == 0 || !cells.is_power_of_two() {
        return domain("series length must be 2^m + 1");
    }
    let m = cells.trailing_zeros();
    if m > HOLDER_MAX_LEVEL {
        return Err(Error::Capacity {
            what: "Hölder level m",
            got: m as usize,
            max: HOLDER_MAX_LEVEL as usize,
        });
    }
    let mesh = 1.0 / cells as f64;
    // The denominator depends on the lag only.
    let inv: Vec<f64> = (0..=cells)
        .map(|k| if k == 0 { 0.0 } else { (k as f64 * mesh).powf(-lambda) })
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..cells {
        let vi = values[i];
        for j in i + 1..=cells {
            best = best.max((values[j] - vi).abs() * inv[j - i]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm_sim::{simulate, SimSpec};
    use crate::gaussian_core::HurstModel;
    use crate::rough_lift::lift2;

    fn path(h: f64, m: u32, refine: usize, replica: u64) -> FbmPath {
        let model = HurstModel::new(h, 2).unwrap();
        simulate(&SimSpec::new(model, m, refine, 21).unwrap().with_replica(replica)).unwrap()
    }

    #[test]
    fn trivial_sums() {
        let p = path(0.4, 3, 4, 0);
        let l = lift2(&p);
        let zero = WeightSeries::constant(3, 0.0);
        let one = WeightSeries::constant(3, 1.0);
        assert_eq!(weighted_levy_sum(&zero, &l, 0, 1, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(weighted_levy_sum(&one, &l, 0, 1, 0.3, 0.3).unwrap(), 0.0);
        assert_eq!(weighted_product_sum(&zero, &p, 0, 1, 0.0, 1.0).unwrap(), 0.0);
        assert!(weighted_levy_sum(&one, &l, 1, 1, 0.0, 1.0).is_err());
        assert!(weighted_product_sum(&one, &p, 0, 0, 0.0, 1.0).is_err());
        let direct: f64 = (0..8).map(|i| l.area(i, 0, 1)).sum();
        let s = weighted_levy_sum(&one, &l, 0, 1, 0.0, 1.0).unwrap();
        assert!((s - direct).abs() < 1e-15);
        let proc_ = levy_sum_process(&one, &l, 0, 1, 0.4).unwrap();
        assert_eq!(proc_.at(0.0), 0.0);
        assert!((proc_.increment(0.25, 0.9) - weighted_levy_sum(&one, &l, 0, 1, 0.25, 0.9).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn weights_from_path_sample_dyadic_points() {
        let p = path(0.4, 2, 4, 1);
        let w = WeightSeries::from_path(&p, |b| b[0]).unwrap();
        let v = p.values(0);
        for i in 0..=4 {
            assert_eq!(w.values()[i], v[4 * i]);
        }
        let one = WeightSeries::from_path(&p, |_| 1.0).unwrap();
        assert!(one.values().iter().all(|x| *x == 1.0));
        assert!(WeightSeries::from_path(&p, |_| f64::NAN).is_err());
    }

    #[test]
    fn holder_norm_cases() {
        let m = 5;
        let n = 1usize << m;
        assert_eq!(holder_norm(&vec![2.0; n + 1], 0.4).unwrap(), 0.0);
        let lin: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        assert!((holder_norm(&lin, 0.4).unwrap() - 1.0).abs() < 1e-14);
        let rough: Vec<f64> = (0..=n).map(|i| ((i * 7919) % 13) as f64).collect();
        let coarse: Vec<f64> = rough.iter().step_by(2).copied().collect();
        assert!(holder_norm(&coarse, 0.3).unwrap() <= holder_norm(&rough, 0.3).unwrap());
        assert!(holder_norm(&vec![0.0; (1 << 13) + 1], 0.5).is_err());
        assert!(holder_norm(&lin, 1.0).is_err());
    }

    #[test]
    fn brownian_product_sum_has_unit_variance() {
        // At H = 1/2 only the diagonal terms survive: Var = 2^m * 2^{-2m}.
        let m = 4;
        let reps = 3000;
        let one = WeightSeries::constant(m, 1.0);
        let vals: Vec<f64> = (0..reps)
            .map(|r| {
                let p = path(0.5, m, 1, 1000 + r);
                let s = product_sum_process(&one, &p, 0, 1, 0.5).unwrap();
                s.normalized_increment(0.0, 1.0).powi(2)
            })
            .collect();
        let est = crate::chaos_sums::stats::mean_se(&vals);
        assert!(est.within(1.0, 4.0), "{est:?}");
    }
}
