//! Small numerical helpers shared by the quadratures and the Monte Carlo code.

use nalgebra::{DMatrix, SymmetricEigen};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn fsum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Compensated::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// `x^a - y^a` for `x >= y >= 0`, accurate when `y` is close to `x`.
pub fn pow_diff(x: f64, y: f64, a: f64) -> f64 {
    debug_assert!(x >= y && y >= 0.0);
    if x == y {
        return 0.0;
    }
    let r = (x - y) / x;
    if r > 0.5 {
        x.powf(a) - y.powf(a)
    } else {
        -x.powf(a) * (a * (-r).ln_1p()).exp_m1()
    }
}

/// Richardson extrapolation over a geometric refinement `n, ratio*n, ...`
/// with a prescribed list of error exponents (error ~ sum_k c_k n^{-e_k}).
#[derive(Clone, Debug)]
pub struct Richardson {
    ratio: f64,
    exponents: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Richardson {
    /// Exponents are sorted and near-duplicates removed.
    pub fn new(ratio: f64, exponents: &[f64]) -> Self {
        let mut e: Vec<f64> = exponents.iter().copied().filter(|x| *x > 0.0).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        Self {
            ratio,
            exponents: e,
            rows: Vec::new(),
        }
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// Adds the next iterate and returns the deepest available extrapolant.
    pub fn push(&mut self, v: f64) -> f64 {
        let mut row = vec![v];
        if let Some(prev) = self.rows.last() {
            let depth = self.exponents.len().min(prev.len());
            for k in 0..depth {
                let f = self.ratio.powf(self.exponents[k]);
                let next = (f * row[k] - prev[k]) / (f - 1.0);
                row.push(next);
            }
        }
        self.rows.push(row);
        self.estimate()
    }

    pub fn estimate(&self) -> f64 {
        *self.rows.last().and_then(|r| r.last()).unwrap_or(&f64::NAN)
    }

    /// Difference between the last two deepest extrapolants, if both rows
    /// reached full depth.
    pub fn change(&self) -> Option<f64> {
        let n = self.rows.len();
        if n < 2 {
            return None;
        }
        let full = self.exponents.len() + 1;
        let (a, b) = (&self.rows[n - 2], &self.rows[n - 1]);
        if a.len() < full || b.len() < full {
            return None;
        }
        Some((b[full - 1] - a[full - 1]).abs())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]` (Golub–Welsch).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k, k - 1)] = beta;
        jac[(k - 1, k)] = beta;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    pairs.into_iter().map(|(x, w)| (mid + half * x, half * w)).unzip()
}

/// Ordinary least squares fit `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if x.len() > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LinearFit {
        slope,
        intercept,
        slope_stderr,
    }
}

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s)
    } else {
        let m = trim_zeros(mant);
        format!("{}e{}{:02}", m, if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let mut v = vec![1.0e16, 1.0, -1.0e16];
        v.extend(std::iter::repeat(1.0).take(10));
        assert_eq!(fsum(v), 11.0);
    }

    #[test]
    fn pow_diff_matches_direct() {
        for &(x, y) in &[(2.0f64, 1.0f64), (1.0e6, 1.0e6 - 1.0), (5.0, 0.0), (3.0, 2.9)] {
            let d = x.powf(0.8) - y.powf(0.8);
            assert!((pow_diff(x, y, 0.8) - d).abs() <= 1e-9 * d.abs().max(1e-300));
        }
    }

    #[test]
    fn richardson_removes_known_terms() {
        let f = |n: f64| 2.0 + 3.0 / n.powf(0.6) - 1.0 / n + 0.5 / (n * n);
        let mut r = Richardson::new(2.0, &[0.6, 1.0, 2.0]);
        let mut est = 0.0;
        for k in 2..9 {
            est = r.push(f(2f64.powi(k)));
        }
        assert!((est - 2.0).abs() < 1e-12);
        assert!(r.change().unwrap() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6, 0.0, 2.0);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(11)).sum();
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 2.0 * v).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 1.5).abs() < 1e-14);
    }

    #[test]
    fn g17_format() {
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_g17(-3.0), "-3");
    }
}
