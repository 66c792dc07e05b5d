//! Level-2 and level-3 iterated integrals of a simulated path per dyadic
//! cell.
//!
//! Convention: for `alpha < beta` the Lévy area is the left-point Riemann
//! sum over the sub-steps; the reversed pair is completed through the
//! shuffle identity `B^{ab} + B^{ba} = B^a B^b` and the diagonal is
//! `(B^a)^2 / 2`. The resulting lift satisfies Chen's relation exactly and
//! converges to the geometric lift as the number of sub-steps grows.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fbm_sim::FbmPath;

/// Lift of a single interval `[s, t]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellLift {
    pub s: f64,
    pub t: f64,
    pub d: usize,
    /// `B^a_{s,t}`.
    pub x: Vec<f64>,
    /// `B^{ab}_{s,t}` at `a * d + b`.
    pub a2: Vec<f64>,
    /// `B^{abc}_{s,t}` at `(a * d + b) * d + c`.
    pub a3: Option<Vec<f64>>,
}

impl CellLift {
    /// Lift of the zero-length interval `[t, t]`.
    pub fn identity(t: f64, d: usize, with_level3: bool) -> Self {
        Self {
            s: t,
            t,
            d,
            x: vec![0.0; d],
            a2: vec![0.0; d * d],
            a3: with_level3.then(|| vec![0.0; d * d * d]),
        }
    }

    /// Lift of a single sub-step with no finer information: the area of
    /// `alpha < beta` vanishes, the rest follows from the shuffle identity.
    pub fn atomic(s: f64, t: f64, x: &[f64]) -> Self {
        let d = x.len();
        let mut a2 = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..a + 1 {
                a2[a * d + b] = if a == b { 0.5 * x[a] * x[a] } else { x[a] * x[b] };
            }
        }
        Self {
            s,
            t,
            d,
            x: x.to_vec(),
            a2,
            a3: None,
        }
    }

    pub fn level2(&self, a: usize, b: usize) -> f64 {
        self.a2[a * self.d + b]
    }

    pub fn level3(&self, a: usize, b: usize, c: usize) -> Option<f64> {
        self.a3.as_ref().map(|v| v[(a * self.d + b) * self.d + c])
    }
}

/// Chen's relation: lift over `[s,u]` from lifts over `[s,t]` and `[t,u]`.
/// Level 3 is combined when both inputs carry it.
pub fn chen_combine(first: &CellLift, second: &CellLift) -> Result<CellLift> {
    if first.d != second.d {
        return domain("dimension mismatch in Chen combination");
    }
    let tol = 1e-12 * (1.0 + first.t.abs());
    if (first.t - second.s).abs() > tol {
        return domain(format!(
            "intervals [{}, {}] and [{}, {}] do not abut",
            first.s, first.t, second.s, second.t
        ));
    }
    Ok(chen_unchecked(first, second, false))
}

fn chen_unchecked(first: &CellLift, second: &CellLift, drop_second_level3: bool) -> CellLift {
    let d = first.d;
    let x: Vec<f64> = first.x.iter().zip(&second.x).map(|(a, b)| a + b).collect();
    let mut a2 = vec![0.0; d * d];
    for a in 0..d {
        for b in 0..d {
            let k = a * d + b;
            a2[k] = first.a2[k] + second.a2[k] + first.x[a] * second.x[b];
        }
    }
    let a3 = match (&first.a3, &second.a3, drop_second_level3) {
        (Some(f3), _, true) => Some(level3_product(first, second, f3, None)),
        (Some(f3), Some(s3), false) => Some(level3_product(first, second, f3, Some(s3))),
        _ => None,
    };
    CellLift {
        s: first.s,
        t: second.t,
        d,
        x,
        a2,
        a3,
    }
}

fn level3_product(first: &CellLift, second: &CellLift, f3: &[f64], s3: Option<&Vec<f64>>) -> Vec<f64> {
    let d = first.d;
    let mut out = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let k = (a * d + b) * d + c;
                out[k] = f3[k]
                    + s3.map_or(0.0, |v| v[k])
                    + first.a2[a * d + b] * second.x[c]
                    + first.x[a] * second.a2[b * d + c];
            }
        }
    }
    out
}

/// Per-cell lift on the dyadic grid `D_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughLift {
    pub m: u32,
    pub d: usize,
    /// Sub-steps per cell used by the Riemann sums.
    pub n: usize,
    level1: Vec<f64>,
    level2: Vec<f64>,
    level3: Option<Vec<f64>>,
}

impl RoughLift {
    pub fn cells(&self) -> usize {
        1usize << self.m
    }

    pub fn x(&self, cell: usize, a: usize) -> f64 {
        self.level1[cell * self.d + a]
    }

    pub fn area(&self, cell: usize, a: usize, b: usize) -> f64 {
        self.level2[(cell * self.d + a) * self.d + b]
    }

    pub fn has_level3(&self) -> bool {
        self.level3.is_some()
    }

    pub fn level3(&self, cell: usize, a: usize, b: usize, c: usize) -> Option<f64> {
        let d = self.d;
        self.level3.as_ref().map(|v| v[((cell * d + a) * d + b) * d + c])
    }

    pub fn cell(&self, i: usize) -> CellLift {
        let d = self.d;
        let h = 1.0 / self.cells() as f64;
        CellLift {
            s: i as f64 * h,
            t: (i + 1) as f64 * h,
            d,
            x: self.level1[i * d..(i + 1) * d].to_vec(),
            a2: self.level2[i * d * d..(i + 1) * d * d].to_vec(),
            a3: self
                .level3
                .as_ref()
                .map(|v| v[i * d * d * d..(i + 1) * d * d * d].to_vec()),
        }
    }

    /// Lift over `[0, 1]` from Chen products of all cells.
    pub fn total(&self) -> CellLift {
        let mut acc = self.cell(0);
        for i in 1..self.cells() {
            acc = chen_unchecked(&acc, &self.cell(i), false);
        }
        acc
    }

    /// Max over cells of `|B^{ab} + B^{ba} - B^a B^b|` and
    /// `|B^{aa} - (B^a)^2/2|`.
    pub fn shuffle_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for c in 0..self.cells() {
            for a in 0..d {
                for b in 0..d {
                    let lhs = self.area(c, a, b) + self.area(c, b, a);
                    let rhs = self.x(c, a) * self.x(c, b);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
        worst
    }
}

/// Level-2 lift of `path` on its dyadic cells with `path.refine()` sub-steps.
pub fn lift2(path: &FbmPath) -> RoughLift {
    let d = path.d();
    let n = path.refine();
    let cells = 1usize << path.m();
    let mut level1 = vec![0.0; cells * d];
    let mut level2 = vec![0.0; cells * d * d];
    let rows: Vec<&[f64]> = (0..d).map(|a| path.increments(a)).collect();
    let mut cum = vec![0.0; d];
    for c in 0..cells {
        cum.iter_mut().for_each(|v| *v = 0.0);
        let a2 = &mut level2[c * d * d..(c + 1) * d * d];
        for k in c * n..(c + 1) * n {
            for a in 0..d {
                for b in a + 1..d {
                    a2[a * d + b] += cum[a] * rows[b][k];
                }
            }
            for a in 0..d {
                cum[a] += rows[a][k];
            }
        }
        for a in 0..d {
            level1[c * d + a] = cum[a];
            a2[a * d + a] = 0.5 * cum[a] * cum[a];
            for b in a + 1..d {
                a2[b * d + a] = cum[a] * cum[b] - a2[a * d + b];
            }
        }
    }
    RoughLift {
        m: path.m(),
        d,
        n,
        level1,
        level2,
        level3: None,
    }
}

/// Adds level 3 by the compensated Riemann sum
/// `sum_k B^{ab}_{s,u_{k-1}} B^c_{u_{k-1},u_k} + B^a_{s,u_{k-1}} B^{bc}_{u_{k-1},u_k}`
/// over the cells of `sub`, which must refine the cells of `path`.
/// Levels 1 and 2 of the result are the Chen products of the sub-cells.
pub fn lift3(path: &FbmPath, sub: &RoughLift) -> Result<RoughLift> {
    if sub.d != path.d() {
        return domain("sub-cell lift has a different dimension");
    }
    if sub.m < path.m() {
        return domain(format!(
            "sub-cell lift at level {} does not refine level {}",
            sub.m,
            path.m()
        ));
    }
    let group = 1usize << (sub.m - path.m());
    let cells = 1usize << path.m();
    let d = path.d();
    // The sub-cells must come from this path.
    for a in 0..d {
        let coarse = path.cell_increments(a);
        for (c, v) in coarse.iter().enumerate() {
            let s: f64 = (0..group).map(|j| sub.x(c * group + j, a)).sum();
            if (s - v).abs() > 1e-9 * (1.0 + v.abs()) {
                return domain("sub-cell lift does not cover this path");
            }
        }
    }
    let mut level1 = Vec::with_capacity(cells * d);
    let mut level2 = Vec::with_capacity(cells * d * d);
    let mut level3 = Vec::with_capacity(cells * d * d * d);
    for c in 0..cells {
        let mut acc = CellLift::identity(sub.cell(c * group).s, d, true);
        for j in 0..group {
            let piece = sub.cell(c * group + j);
            acc = chen_unchecked(&acc, &piece, true);
        }
        level1.extend_from_slice(&acc.x);
        level2.extend_from_slice(&acc.a2);
        level3.extend_from_slice(acc.a3.as_ref().unwrap());
    }
    Ok(RoughLift {
        m: path.m(),
        d,
        n: group,
        level1,
        level2,
        level3: Some(level3),
    })
}

/// Gap statistics between two lifts of the same path.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct GapStats {
    pub max: f64,
    pub sum_sq: f64,
    pub count: usize,
}

impl GapStats {
    pub fn rms(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.sum_sq / self.count as f64).sqrt()
        }
    }

    pub fn merge(mut self, other: GapStats) -> GapStats {
        self.max = self.max.max(other.max);
        self.sum_sq += other.sum_sq;
        self.count += other.count;
        self
    }
}

/// Per-cell `|B^{ab}(n) - B^{ab}(n')|` over the off-diagonal pairs `a < b`.
pub fn refinement_cauchy_gap(coarse: &RoughLift, fine: &RoughLift) -> Result<GapStats> {
    if coarse.m != fine.m || coarse.d != fine.d {
        return domain("lifts live on different grids");
    }
    let scale = coarse.level1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in coarse.level1.iter().zip(&fine.level1) {
        if (a - b).abs() > 1e-9 * (1.0 + scale) {
            return domain("lifts come from different paths");
        }
    }
    let d = coarse.d;
    let mut stats = GapStats::default();
    for c in 0..coarse.cells() {
        for a in 0..d {
            for b in a + 1..d {
                let g = (coarse.area(c, a, b) - fine.area(c, a, b)).abs();
                stats.max = stats.max.max(g);
                stats.sum_sq += g * g;
                stats.count += 1;
            }
        }
    }
    Ok(stats)
}
