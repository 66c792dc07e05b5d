//! Discrete Young integrals and the iterated integrals built from them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian_core::cov_rect_raw;
use crate::young::grid::{strides, GridFunction};

/// `sum_cells f(lower corner) g(cell)` on a shared partition.
pub fn discrete_young_integral(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    if f.partition() != g.partition() {
        return domain("integrand and integrator need a shared partition");
    }
    let shape = f.shape();
    let inc = g.cell_increments();
    let cell_shape: Vec<usize> = shape.iter().map(|m| m - 1).collect();
    let cst = strides(&cell_shape);
    let nst = strides(&shape);
    let mut acc = crate::numerics::Compensated::new();
    for (c, dg) in inc.iter().enumerate() {
        let off: usize = (0..shape.len()).map(|r| ((c / cst[r]) % cell_shape[r]) * nst[r]).sum();
        acc.add(f.values()[off] * dg);
    }
    Ok(acc.value())
}

/// Two-parameter indefinite integral `h(u_i, v_j) = sum_{a<i, b<j} f(u_a, v_b)
/// g(cell (a, b))`, vanishing on the lower axes.
pub fn young_compose_h(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    if f.dims() != 2 || f.partition() != g.partition() {
        return domain("composition needs two two-parameter functions on one partition");
    }
    let shape = f.shape();
    let (n0, n1) = (shape[0], shape[1]);
    let inc = g.cell_increments();
    let fv = f.values();
    let mut out = vec![0.0; n0 * n1];
    for i in 1..n0 {
        for j in 1..n1 {
            out[i * n1 + j] = out[(i - 1) * n1 + j] + out[i * n1 + j - 1] - out[(i - 1) * n1 + j - 1]
                + fv[(i - 1) * n1 + j - 1] * inc[(i - 1) * (n1 - 1) + j - 1];
        }
    }
    GridFunction::new(f.partition().clone(), out)
}

/// `psi_{s,t}(u) = R([s, t] x [0, u])` at the points of `grid`.
pub fn psi(s: f64, t: f64, h: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&u| cov_rect_raw(s, t, 0.0, u, h)).collect()
}

/// Iterated Riemann-Stieltjes integrals `A_l(t_j)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IteratedA {
    pub grid: Vec<f64>,
    /// `levels[l][j] = A_{l+1}(t_j)`.
    pub levels: Vec<Vec<f64>>,
    pub bound: f64,
}

impl IteratedA {
    pub fn sup_abs(&self) -> f64 {
        self.levels
            .last()
            .map_or(0.0, |v| v.iter().fold(0.0, |m, x| m.max(x.abs())))
    }

    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.sup_abs() / self.bound
        } else {
            0.0
        }
    }
}

/// `A_l(t_j) = sum_{k <= j} A_{l-1}(t_{k-1}) a_l(t_{k-1}) (h_l(t_k) -
/// h_l(t_{k-1}))` with `A_0 = 1` and `h_l = psi_{s_l, t_l}`, together with
/// the bound `3^r prod sup|a_l| prod (t_l - s_l)^{2H}`.
pub fn iterated_a(grid: &[f64], a: &[Vec<f64>], boxes: &[(f64, f64)], hurst: f64) -> Result<IteratedA> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("grid must be strictly increasing with two points");
    }
    if a.len() != boxes.len() || a.is_empty() {
        return domain("one integrand per interval, at least one");
    }
    if a.iter().any(|v| v.len() != grid.len()) {
        return domain("integrands must be sampled on the grid");
    }
    if boxes.iter().any(|&(s, t)| !(0.0 <= s && s < t)) {
        return domain("intervals must satisfy 0 <= s < t");
    }
    let n = grid.len();
    let mut prev = vec![1.0; n];
    let mut levels = Vec::with_capacity(a.len());
    let mut bound = 1.0;
    for (al, &(s, t)) in a.iter().zip(boxes) {
        let hl = psi(s, t, hurst, grid);
        let mut cur = vec![0.0; n];
        for k in 1..n {
            cur[k] = cur[k - 1] + prev[k - 1] * al[k - 1] * (hl[k] - hl[k - 1]);
        }
        bound *= 3.0 * al.iter().fold(0.0f64, |m, x| m.max(x.abs())) * (t - s).powf(2.0 * hurst);
        levels.push(cur.clone());
        prev = cur;
    }
    Ok(IteratedA {
        grid: grid.to_vec(),
        levels,
        bound,
    })
}
