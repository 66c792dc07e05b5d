//! Grid-like partitions and functions on their nodes.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Product of per-axis partitions, each with at least two strictly
/// increasing points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPartition {
    axes: Vec<Vec<f64>>,
}

impl GridPartition {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return domain("a partition needs at least one axis");
        }
        for (r, ax) in axes.iter().enumerate() {
            if ax.len() < 2 {
                return domain(format!("axis {r} has fewer than two points"));
            }
            if ax.windows(2).any(|w| !(w[0] < w[1])) {
                return domain(format!("axis {r} is not strictly increasing"));
            }
            if ax.iter().any(|x| !x.is_finite()) {
                return domain(format!("axis {r} has a non-finite point"));
            }
        }
        Ok(Self { axes })
    }

    /// `n + 1` equally spaced points on `[a, b]` per axis.
    pub fn uniform(dims: usize, n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return domain("need at least one cell per axis");
        }
        let ax: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        Self::new(vec![ax; dims])
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, r: usize) -> &[f64] {
        &self.axes[r]
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    /// Points per axis.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One axis of a rectangular increment: a fixed node or an index interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisSel {
    Point(usize),
    Interval(usize, usize),
}

/// Values on every node of a grid-like partition (row-major, last axis
/// fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    partition: GridPartition,
    values: Vec<f64>,
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for r in (0..shape.len().saturating_sub(1)).rev() {
        s[r] = s[r + 1] * shape[r + 1];
    }
    s
}

impl GridFunction {
    pub fn new(partition: GridPartition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.len() {
            return domain(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                partition.len()
            ));
        }
        Ok(Self { partition, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(partition: GridPartition, f: impl Fn(&[f64]) -> f64) -> Self {
        let shape = partition.shape();
        let n = partition.len();
        let st = strides(&shape);
        let mut x = vec![0.0; shape.len()];
        let values = (0..n)
            .map(|flat| {
                for r in 0..shape.len() {
                    x[r] = partition.axes[r][(flat / st[r]) % shape[r]];
                }
                f(&x)
            })
            .collect();
        Self { partition, values }
    }

    pub fn partition(&self) -> &GridPartition {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dims(&self) -> usize {
        self.partition.dims()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.partition.shape()
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        let st = strides(&self.shape());
        self.values[idx.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// Alternating corner sum over the interval axes with the point axes
    /// held fixed.
    pub fn rect_increment(&self, sel: &[AxisSel]) -> Result<f64> {
        let shape = self.shape();
        if sel.len() != shape.len() {
            return domain(format!("{} selectors for {} axes", sel.len(), shape.len()));
        }
        for (r, s) in sel.iter().enumerate() {
            let ok = match *s {
                AxisSel::Point(i) => i < shape[r],
                AxisSel::Interval(a, b) => a <= b && b < shape[r],
            };
            if !ok {
                return domain(format!("selector {s:?} out of range on axis {r}"));
            }
        }
        let box_axes: Vec<usize> = (0..sel.len())
            .filter(|&r| matches!(sel[r], AxisSel::Interval(..)))
            .collect();
        let mut idx: Vec<usize> = sel
            .iter()
            .map(|s| match *s {
                AxisSel::Point(i) => i,
                AxisSel::Interval(a, _) => a,
            })
            .collect();
        let mut total = 0.0;
        for mask in 0..(1usize << box_axes.len()) {
            let mut lower = 0;
            for (k, &r) in box_axes.iter().enumerate() {
                if let AxisSel::Interval(a, b) = sel[r] {
                    if mask >> k & 1 == 1 {
                        idx[r] = b;
                    } else {
                        idx[r] = a;
                        lower += 1;
                    }
                }
            }
            let v = self.at(&idx);
            total += if lower % 2 == 0 { v } else { -v };
        }
        Ok(total)
    }

    /// Full rectangular increment over the whole grid.
    pub fn total_increment(&self) -> f64 {
        let sel: Vec<AxisSel> = self.shape().iter().map(|&n| AxisSel::Interval(0, n - 1)).collect();
        self.rect_increment(&sel).expect("valid selector")
    }

    /// Restriction to the nodes `keep[r]` on each axis (sorted indices).
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<GridFunction> {
        let shape = self.shape();
        if keep.len() != shape.len() {
            return domain("one index list per axis expected");
        }
        for (r, k) in keep.iter().enumerate() {
            if k.is_empty() || k.windows(2).any(|w| w[0] >= w[1]) || *k.last().unwrap() >= shape[r] {
                return domain(format!("invalid index list on axis {r}"));
            }
        }
        let axes: Vec<Vec<f64>> = keep
            .iter()
            .enumerate()
            .map(|(r, k)| k.iter().map(|&i| self.partition.axes[r][i]).collect())
            .collect();
        let new_shape: Vec<usize> = keep.iter().map(|k| k.len()).collect();
        let st_old = strides(&shape);
        let st_new = strides(&new_shape);
        let n: usize = new_shape.iter().product();
        let values = (0..n)
            .map(|flat| {
                let mut off = 0;
                for r in 0..new_shape.len() {
                    off += keep[r][(flat / st_new[r]) % new_shape[r]] * st_old[r];
                }
                self.values[off]
            })
            .collect();
        // Single-point axes are allowed here (faces); skip partition checks.
        Ok(GridFunction {
            partition: GridPartition { axes },
            values,
        })
    }

    /// Restriction to the index box `ranges[r] = (lo, hi)` inclusive.
    pub fn sub_box(&self, ranges: &[(usize, usize)]) -> Result<GridFunction> {
        let keep: Vec<Vec<usize>> = ranges.iter().map(|&(a, b)| (a..=b).collect()).collect();
        self.restrict(&keep)
    }

    /// The face `f(s_r; r not in axes)` with the other coordinates at the
    /// lower corner, as a function of the axes in `axes` (sorted).
    pub fn lower_face(&self, axes: &[usize]) -> Result<GridFunction> {
        let shape = self.shape();
        let keep: Vec<Vec<usize>> = (0..shape.len())
            .map(|r| {
                if axes.contains(&r) {
                    (0..shape[r]).collect()
                } else {
                    vec![0]
                }
            })
            .collect();
        let full = self.restrict(&keep)?;
        let axes_new: Vec<Vec<f64>> = axes.iter().map(|&r| full.partition.axes[r].clone()).collect();
        Ok(GridFunction {
            partition: GridPartition { axes: axes_new },
            values: full.values,
        })
    }

    /// Rectangular increments of all grid cells, in row-major cell order.
    pub fn cell_increments(&self) -> Vec<f64> {
        let all: Vec<usize> = (0..self.dims()).collect();
        self.difference_axes(&all).0
    }

    /// Forward differences along `axes`, leaving other axes as nodes;
    /// returns the values and the new shape.
    pub fn difference_axes(&self, axes: &[usize]) -> (Vec<f64>, Vec<usize>) {
        let mut shape = self.shape();
        let mut vals = self.values.clone();
        for &r in axes {
            let st = strides(&shape);
            let mut new_shape = shape.clone();
            new_shape[r] -= 1;
            let nst = strides(&new_shape);
            let n: usize = new_shape.iter().product();
            let mut out = vec![0.0; n];
            for (flat, o) in out.iter_mut().enumerate() {
                let mut off = 0;
                for k in 0..shape.len() {
                    off += ((flat / nst[k]) % new_shape[k]) * st[k];
                }
                *o = vals[off + st[r]] - vals[off];
            }
            vals = out;
            shape = new_shape;
        }
        (vals, shape)
    }

    /// Pointwise product of functions of disjoint variable sets: `f(x) g(y)`
    /// on the product partition.
    pub fn tensor(&self, other: &GridFunction) -> GridFunction {
        let mut axes = self.partition.axes.clone();
        axes.extend(other.partition.axes.iter().cloned());
        let mut values = Vec::with_capacity(self.values.len() * other.values.len());
        for a in &self.values {
            for b in &other.values {
                values.push(a * b);
            }
        }
        GridFunction {
            partition: GridPartition { axes },
            values,
        }
    }

    /// Pointwise product on a shared partition.
    pub fn pointwise_mul(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.partition != other.partition {
            return domain("pointwise product needs a shared partition");
        }
        Ok(GridFunction {
            partition: self.partition.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFunction {
        let p = GridPartition::new(vec![vec![0.0, 0.3, 1.0], vec![0.0, 0.5, 0.7, 1.0]]).unwrap();
        GridFunction::from_fn(p, |x| (3.0 * x[0]).sin() + x[0] * x[1] * x[1] + x[1].exp())
    }

    #[test]
    fn partition_validation() {
        assert!(GridPartition::new(vec![vec![0.0]]).is_err());
        assert!(GridPartition::new(vec![vec![0.0, 0.0]]).is_err());
        assert!(GridPartition::new(vec![]).is_err());
    }

    #[test]
    fn one_dimensional_increment() {
        let p = GridPartition::new(vec![vec![0.0, 0.2, 1.0]]).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0] * x[0]);
        assert!((f.rect_increment(&[AxisSel::Interval(0, 2)]).unwrap() - 1.0).abs() < 1e-15);
        assert!(f.rect_increment(&[AxisSel::Interval(0, 3)]).is_err());
        assert!(f.rect_increment(&[AxisSel::Interval(2, 1)]).is_err());
    }

    #[test]
    fn product_increment_factorises() {
        let p = GridPartition::new(vec![vec![0.0, 0.4, 1.0], vec![0.0, 0.1, 0.9]]).unwrap();
        let f = GridFunction::from_fn(p, |x| x[0].cos() * (x[1] + x[1].powi(3)));
        let inc = f
            .rect_increment(&[AxisSel::Interval(0, 2), AxisSel::Interval(1, 2)])
            .unwrap();
        let direct = (1f64.cos() - 1.0) * ((0.9 + 0.729) - (0.1 + 0.001));
        assert!((inc - direct).abs() < 1e-14);
    }

    #[test]
    fn increments_are_additive() {
        let f = sample();
        let whole = f
            .rect_increment(&[AxisSel::Interval(0, 2), AxisSel::Interval(0, 3)])
            .unwrap();
        let a = f
            .rect_increment(&[AxisSel::Interval(0, 1), AxisSel::Interval(0, 3)])
            .unwrap();
        let b = f
            .rect_increment(&[AxisSel::Interval(1, 2), AxisSel::Interval(0, 3)])
            .unwrap();
        assert!((whole - a - b).abs() < 1e-14);
        let cells: f64 = f.cell_increments().iter().sum();
        assert!((cells - whole).abs() < 1e-14);
        assert!((f.total_increment() - whole).abs() < 1e-15);
    }

    #[test]
    fn faces_and_restrictions() {
        let f = sample();
        let face = f.lower_face(&[1]).unwrap();
        assert_eq!(face.shape(), vec![4]);
        for j in 0..4 {
            assert_eq!(face.at(&[j]), f.at(&[0, j]));
        }
        let r = f.restrict(&[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(r.at(&[1, 0]), f.at(&[2, 1]));
        assert!(f.restrict(&[vec![2, 0], vec![1]]).is_err());
    }
}
