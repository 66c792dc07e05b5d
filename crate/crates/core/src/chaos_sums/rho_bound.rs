//! Exhaustive check of the combinatorial bound on multiple sums of a
//! summable correlation sequence.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian_core::rho;

/// Exponents `a({i, j})` on the pairs of `p` vertices, stored for `i < j`
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub p: usize,
    pub a: Vec<u32>,
}

fn pairs(p: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            v.push((i, j));
        }
    }
    v
}

impl Assignment {
    pub fn new(p: usize, a: Vec<u32>) -> Result<Self> {
        if p < 2 {
            return domain("need p >= 2");
        }
        if a.len() != p * (p - 1) / 2 {
            return domain(format!("{} pairs expected for p = {p}", p * (p - 1) / 2));
        }
        Ok(Self { p, a })
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let idx = i * self.p - i * (i + 1) / 2 + (j - i - 1);
        self.a[idx]
    }

    /// `N = sum of all exponents`.
    pub fn total(&self) -> u32 {
        self.a.iter().sum()
    }

    pub fn degree(&self, i: usize) -> u32 {
        (0..self.p).filter(|&j| j != i).map(|j| self.get(i, j)).sum()
    }

    pub fn is_admissible(&self, q: u32) -> bool {
        (0..self.p).all(|i| self.degree(i) <= q)
    }

    fn permuted(&self, perm: &[usize]) -> Vec<u32> {
        pairs(self.p).iter().map(|&(i, j)| self.get(perm[i], perm[j])).collect()
    }
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                rec(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; p], &mut out);
    out
}

/// All admissible assignments for `(p, q)`, one per orbit under relabelling
/// of the vertices (the left-hand sum is invariant under relabelling).
pub fn admissible_assignments(p: usize, q: u32) -> Vec<Assignment> {
    let np = p * (p - 1) / 2;
    let perms = permutations(p);
    let mut out = Vec::new();
    let mut a = vec![0u32; np];
    loop {
        let cand = Assignment { p, a: a.clone() };
        if cand.is_admissible(q) && perms.iter().all(|perm| cand.permuted(perm) >= cand.a) {
            out.push(cand);
        }
        // Odometer over exponents 0..=q.
        let mut k = 0;
        while k < np && a[k] == q {
            a[k] = 0;
            k += 1;
        }
        if k == np {
            break;
        }
        a[k] += 1;
    }
    out
}

/// How `|rho_H|` is turned into a sequence bounded by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Divide by `sum_{n in Z} |rho_H(n)|`.
    TwoSided,
    /// Divide by `sum_{n >= 0} |rho_H(n)|`.
    OneSided,
}

/// Normalised sequence `rho(0..len)` and the mass constant `C = 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RhoSequence {
    pub h: f64,
    pub norm: Normalization,
    pub values: Vec<f64>,
    pub mass: f64,
}

impl RhoSequence {
    pub fn new(h: f64, len: usize, norm: Normalization) -> Result<Self> {
        if !(h > 1.0 / 3.0 && h <= 0.5) {
            return domain(format!("H = {h} outside (1/3, 1/2]"));
        }
        let denom = rho_abs_mass(h, norm);
        Ok(Self {
            h,
            norm,
            values: (0..len as u64).map(|k| rho(k, h).abs() / denom).collect(),
            mass: 1.0,
        })
    }
}

/// `sum |rho_H(n)|` over `n >= 0` or over all integers. For `H < 1/2` the
/// correlations at nonzero lags are negative and sum (over the integers) to
/// `-rho_H(0)`, so the one-sided mass is `3/2` and the two-sided mass `2`.
pub fn rho_abs_mass(h: f64, norm: Normalization) -> f64 {
    let tail = if h == 0.5 { 0.0 } else { 0.5 };
    match norm {
        Normalization::OneSided => 1.0 + tail,
        Normalization::TwoSided => 1.0 + 2.0 * tail,
    }
}

/// Left-hand side `sum_{k_1..k_p} prod rho(|k_i - k_j|)^{a({i,j})}` over
/// `count` consecutive indices.
pub fn multiple_sum(assign: &Assignment, seq: &RhoSequence, count: usize) -> Result<f64> {
    if seq.values.len() < count {
        return domain("correlation table shorter than the index window");
    }
    let pw = |e: u32| -> Vec<f64> {
        let mut m = vec![0.0; count * count];
        for i in 0..count {
            for j in 0..count {
                m[i * count + j] = seq.values[i.abs_diff(j)].powi(e as i32);
            }
        }
        m
    };
    let c = count;
    match assign.p {
        2 => Ok(pw(assign.get(0, 1)).iter().sum()),
        3 => {
            let (m12, m13, m23) = (pw(assign.get(0, 1)), pw(assign.get(0, 2)), pw(assign.get(1, 2)));
            let mut total = 0.0;
            for k1 in 0..c {
                for k2 in 0..c {
                    let inner: f64 = (0..c).map(|k3| m13[k1 * c + k3] * m23[k2 * c + k3]).sum();
                    total += m12[k1 * c + k2] * inner;
                }
            }
            Ok(total)
        }
        4 => {
            let g = |i, j| pw(assign.get(i, j));
            let (m12, m13, m14, m23, m24, m34) = (g(0, 1), g(0, 2), g(0, 3), g(1, 2), g(1, 3), g(2, 3));
            let mut total = 0.0;
            let mut u = vec![0.0; c];
            let mut w = vec![0.0; c];
            for k1 in 0..c {
                for k2 in 0..c {
                    for k in 0..c {
                        u[k] = m13[k1 * c + k] * m23[k2 * c + k];
                        w[k] = m14[k1 * c + k] * m24[k2 * c + k];
                    }
                    let mut inner = 0.0;
                    for k3 in 0..c {
                        if u[k3] == 0.0 {
                            continue;
                        }
                        let row = &m34[k3 * c..(k3 + 1) * c];
                        let s: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum();
                        inner += u[k3] * s;
                    }
                    total += m12[k1 * c + k2] * inner;
                }
            }
            Ok(total)
        }
        p => Err(Error::Capacity {
            what: "number of summation indices p",
            got: p,
            max: 4,
        }),
    }
}

/// Direct `count^p` enumeration; reference for [`multiple_sum`].
pub fn multiple_sum_brute(assign: &Assignment, seq: &RhoSequence, count: usize) -> f64 {
    let p = assign.p;
    let prs = pairs(p);
    let mut k = vec![0usize; p];
    let mut total = 0.0;
    loop {
        total += prs
            .iter()
            .map(|&(i, j)| seq.values[k[i].abs_diff(k[j])].powi(assign.get(i, j) as i32))
            .product::<f64>();
        let mut pos = 0;
        while pos < p && k[pos] == count - 1 {
            k[pos] = 0;
            pos += 1;
        }
        if pos == p {
            return total;
        }
        k[pos] += 1;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundRow {
    pub m: u32,
    pub count: usize,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub assignment: Assignment,
    pub q: u32,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn worst_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.lhs / r.bound).fold(0.0, f64::max)
    }
}

/// Evaluates both sides for every `m` in `m_range` on the window `(s, t]`.
pub fn rho_sum_bound_verify(
    q: u32,
    assign: &Assignment,
    m_range: std::ops::RangeInclusive<u32>,
    s: f64,
    t: f64,
    seq: &RhoSequence,
) -> Result<BoundReport> {
    if q < 1 {
        return domain("need q >= 1");
    }
    if !assign.is_admissible(q) {
        return domain(format!("assignment {:?} has a vertex degree above q = {q}", assign.a));
    }
    if !(0.0..1.0).contains(&s) || !(s < t && t <= 1.0) {
        return domain("need 0 <= s < t <= 1");
    }
    let n = assign.total();
    let exponent = assign.p as i64 - n.div_ceil(q) as i64;
    let mut rows = Vec::new();
    for m in m_range {
        let scale = (1u64 << m) as f64;
        let count = ((t * scale).floor() - (s * scale).floor()) as usize;
        if count == 0 {
            continue;
        }
        let lhs = multiple_sum(assign, seq, count)?;
        let bound = seq.mass.powi(n as i32) * (count as f64).powi(exponent as i32);
        rows.push(BoundRow {
            m,
            count,
            lhs,
            bound,
            pass: lhs <= bound * (1.0 + 1e-12),
        });
    }
    Ok(BoundReport {
        assignment: assign.clone(),
        q,
        rows,
    })
}

/// Summary of an exhaustive sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub cases: usize,
    pub evaluations: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    pub worst_case: Option<(Assignment, u32, u32)>,
}

/// Every admissible assignment for `2 <= p <= p_max`, `1 <= q <= q_max`,
/// `m = 1..=m_max`, on `[0, 1]`.
pub fn sweep(p_max: usize, q_max: u32, m_max: u32, seq: &RhoSequence) -> Result<SweepSummary> {
    let mut summary = SweepSummary {
        cases: 0,
        evaluations: 0,
        violations: 0,
        worst_ratio: 0.0,
        worst_case: None,
    };
    for p in 2..=p_max {
        for q in 1..=q_max {
            for a in admissible_assignments(p, q) {
                let rep = rho_sum_bound_verify(q, &a, 1..=m_max, 0.0, 1.0, seq)?;
                summary.cases += 1;
                summary.evaluations += rep.rows.len();
                for r in &rep.rows {
                    if !r.pass {
                        summary.violations += 1;
                    }
                    let ratio = r.lhs / r.bound;
                    if ratio > summary.worst_ratio {
                        summary.worst_ratio = ratio;
                        summary.worst_case = Some((a.clone(), q, r.m));
                    }
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_mass_closed_form() {
        use crate::gaussian_core::rho_tail_bound;
        for h in [0.35, 0.4, 0.45] {
            let k = 20_000u64;
            let partial: f64 = (0..=k).map(|n| rho(n, h).abs()).sum();
            let tail = rho_tail_bound(k, h);
            let mass = rho_abs_mass(h, Normalization::OneSided);
            assert!(
                partial <= mass && mass <= partial + tail + 1e-12,
                "{h}: {partial} {tail}"
            );
        }
        assert_eq!(rho_abs_mass(0.5, Normalization::TwoSided), 1.0);
    }

    #[test]
    fn zero_assignment_is_tight() {
        let seq = RhoSequence::new(0.4, 64, Normalization::TwoSided).unwrap();
        let a = Assignment::new(3, vec![0, 0, 0]).unwrap();
        let rep = rho_sum_bound_verify(1, &a, 1..=5, 0.0, 1.0, &seq).unwrap();
        for r in rep.rows {
            assert_eq!(r.lhs, (r.count as f64).powi(3));
            assert_eq!(r.lhs, r.bound);
        }
    }

    #[test]
    fn single_pair_bounded_by_count() {
        let seq = RhoSequence::new(0.4, 256, Normalization::TwoSided).unwrap();
        let a = Assignment::new(2, vec![1]).unwrap();
        let rep = rho_sum_bound_verify(1, &a, 1..=8, 0.0, 1.0, &seq).unwrap();
        assert!(rep.pass(), "{:?}", rep.rows);
    }

    #[test]
    fn contraction_matches_brute_force() {
        let seq = RhoSequence::new(0.35, 16, Normalization::TwoSided).unwrap();
        for p in 2..=4 {
            for a in admissible_assignments(p, 2).into_iter().take(12) {
                let x = multiple_sum(&a, &seq, 5).unwrap();
                let y = multiple_sum_brute(&a, &seq, 5);
                assert!((x - y).abs() < 1e-12 * y.max(1.0));
            }
        }
    }

    #[test]
    fn orbit_enumeration() {
        // p = 2: exponents 0..=q on the single pair.
        assert_eq!(admissible_assignments(2, 3).len(), 4);
        // p = 3, q = 1: empty, one edge.
        assert_eq!(admissible_assignments(3, 1).len(), 2);
        assert!(Assignment::new(3, vec![2, 2, 0]).unwrap().degree(0) == 4);
        let bad = Assignment::new(3, vec![2, 2, 0]).unwrap();
        let seq = RhoSequence::new(0.4, 8, Normalization::TwoSided).unwrap();
        assert!(rho_sum_bound_verify(3, &bad, 1..=2, 0.0, 1.0, &seq).is_err());
    }

    #[test]
    fn one_sided_normalisation_breaks_the_stated_constant() {
        let seq = RhoSequence::new(0.4, 256, Normalization::OneSided).unwrap();
        let a = Assignment::new(2, vec![1]).unwrap();
        let rep = rho_sum_bound_verify(1, &a, 8..=8, 0.0, 1.0, &seq).unwrap();
        assert!(!rep.pass());
    }
}
