//! Brute-force Gaussian moments by enumerating perfect matchings.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::gaussian_core::cov_rect_raw;

/// Largest monomial degree accepted by [`isserlis_moment`].
pub const MAX_DEGREE: usize = 12;

/// `E[X_{i_1} ... X_{i_k}]` for a centred Gaussian vector with covariance
/// `cov`, as a sum over perfect matchings of products of covariances.
pub fn isserlis_moment(cov: &DMatrix<f64>, monomial: &[usize]) -> Result<f64> {
    if monomial.len() > MAX_DEGREE {
        return Err(Error::Capacity {
            what: "monomial degree",
            got: monomial.len(),
            max: MAX_DEGREE,
        });
    }
    if let Some(&i) = monomial.iter().find(|&&i| i >= cov.nrows()) {
        return domain(format!("variable {i} outside a {}-dimensional vector", cov.nrows()));
    }
    if monomial.len() % 2 == 1 {
        return Ok(0.0);
    }
    let mut idx = monomial.to_vec();
    Ok(matchings(cov, &mut idx))
}

fn matchings(cov: &DMatrix<f64>, idx: &mut [usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        2 => cov[(idx[0], idx[1])],
        n => {
            let first = idx[0];
            let mut total = 0.0;
            for k in 1..n {
                let c = cov[(first, idx[k])];
                if c == 0.0 {
                    continue;
                }
                idx.swap(1, k);
                total += c * matchings(cov, &mut idx[2..]);
                idx.swap(1, k);
            }
            total
        }
    }
}

/// Polynomial in the coordinates of a Gaussian vector.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    pub terms: Vec<(f64, Vec<usize>)>,
}

impl Poly {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: vec![(c, Vec::new())],
        }
    }

    pub fn var(i: usize) -> Self {
        Self {
            terms: vec![(1.0, vec![i])],
        }
    }

    pub fn term(coef: f64, vars: Vec<usize>) -> Self {
        Self {
            terms: vec![(coef, vars)],
        }
    }

    pub fn add(mut self, other: Poly) -> Poly {
        self.terms.extend(other.terms);
        self
    }

    pub fn scale(mut self, c: f64) -> Poly {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                let mut v = va.clone();
                v.extend_from_slice(vb);
                terms.push((a * b, v));
            }
        }
        Poly { terms }
    }

    pub fn expectation(&self, cov: &DMatrix<f64>) -> Result<f64> {
        let mut acc = crate::numerics::Compensated::new();
        for (c, v) in &self.terms {
            if *c != 0.0 {
                acc.add(c * isserlis_moment(cov, v)?);
            }
        }
        Ok(acc.value())
    }
}

/// `E[pq] - E[p]E[q]`.
pub fn poly_covariance(cov: &DMatrix<f64>, p: &Poly, q: &Poly) -> Result<f64> {
    Ok(p.mul(q).expectation(cov)? - p.expectation(cov)? * q.expectation(cov)?)
}

/// Sub-increments of `d` independent components on two cells `i`, `j` of
/// level `m`, each split into `n` equal sub-steps: the Gaussian vector on
/// which discretised cell functionals are polynomials.
#[derive(Clone, Debug)]
pub struct CellPairOracle {
    pub h: f64,
    pub m: u32,
    pub n: usize,
    pub d: usize,
    pub cov: DMatrix<f64>,
}

impl CellPairOracle {
    pub fn new(h: f64, m: u32, i: usize, j: usize, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return domain("need at least one sub-step and one component");
        }
        let cells = 1usize.checked_shl(m).unwrap_or(0);
        if i >= cells || j >= cells {
            return domain(format!("cells {i}, {j} outside level {m}"));
        }
        // Unit-scale cells, rescaled by self-similarity.
        let scale = (-(2.0 * h * m as f64) * std::f64::consts::LN_2).exp();
        let starts = [i as f64, j as f64];
        let dim = d * 2 * n;
        let step = 1.0 / n as f64;
        let mut cov = DMatrix::zeros(dim, dim);
        for c in 0..d {
            for s1 in 0..2 {
                for k1 in 0..n {
                    for s2 in 0..2 {
                        for k2 in 0..n {
                            let a = starts[s1] + k1 as f64 * step;
                            let b = starts[s2] + k2 as f64 * step;
                            cov[(c * 2 * n + s1 * n + k1, c * 2 * n + s2 * n + k2)] =
                                scale * cov_rect_raw(a, a + step, b, b + step, h);
                        }
                    }
                }
            }
        }
        Ok(Self { h, m, n, d, cov })
    }

    fn var(&self, comp: usize, slot: usize, k: usize) -> usize {
        comp * 2 * self.n + slot * self.n + k
    }

    /// Increment of component `comp` over the first `upto` sub-steps of the
    /// cell in `slot` (0 for `i`, 1 for `j`).
    pub fn partial(&self, comp: usize, slot: usize, upto: usize) -> Poly {
        (0..upto).fold(Poly::default(), |p, k| p.add(Poly::var(self.var(comp, slot, k))))
    }

    pub fn increment(&self, comp: usize, slot: usize) -> Poly {
        self.partial(comp, slot, self.n)
    }

    /// Left-point Riemann sum for the iterated integral of `a` against `b`.
    pub fn area(&self, a: usize, b: usize, slot: usize) -> Poly {
        (0..self.n).fold(Poly::default(), |p, k| {
            p.add(self.partial(a, slot, k).mul(&Poly::var(self.var(b, slot, k))))
        })
    }

    /// `X^a X^b / 2`.
    pub fn hat(&self, a: usize, b: usize, slot: usize) -> Poly {
        self.increment(a, slot).mul(&self.increment(b, slot)).scale(0.5)
    }

    /// `((X^a)^2 - 2^{-2mH}) / 2`.
    pub fn check(&self, a: usize, slot: usize) -> Poly {
        let centre = (-(2.0 * self.h * self.m as f64) * std::f64::consts::LN_2).exp();
        self.increment(a, slot)
            .mul(&self.increment(a, slot))
            .add(Poly::constant(-centre))
            .scale(0.5)
    }

    pub fn covariance(&self, p: &Poly, q: &Poly) -> Result<f64> {
        poly_covariance(&self.cov, p, q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_moments() {
        let c = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(isserlis_moment(&c, &[0, 0, 0, 0]).unwrap(), 3.0);
        assert_eq!(isserlis_moment(&c, &[0; 6]).unwrap(), 15.0);
        assert_eq!(isserlis_moment(&c, &[0, 0, 0]).unwrap(), 0.0);
        assert!(isserlis_moment(&c, &[0; 14]).is_err());
        assert!(isserlis_moment(&c, &[1, 1]).is_err());
    }

    #[test]
    fn four_variable_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
            let c = &a * a.transpose();
            let direct = c[(0, 1)] * c[(2, 3)] + c[(0, 2)] * c[(1, 3)] + c[(0, 3)] * c[(1, 2)];
            let v = isserlis_moment(&c, &[0, 1, 2, 3]).unwrap();
            assert!((v - direct).abs() < 1e-14 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn centred_square_covariance() {
        // Cov(X^2 - 1, Y^2 - 1) = 2 c^2 for unit variances.
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
        let p = Poly::term(1.0, vec![0, 0]).add(Poly::constant(-1.0));
        let q = Poly::term(1.0, vec![1, 1]).add(Poly::constant(-1.0));
        assert!((poly_covariance(&c, &p, &q).unwrap() - 0.18).abs() < 1e-15);
    }
}
