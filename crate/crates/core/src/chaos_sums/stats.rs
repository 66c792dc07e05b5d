//! Monte Carlo summaries and a one-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::numerics::fsum;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// `|mean - target| <= k * se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }

    /// Distance to `target` in standard errors.
    pub fn z(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }
}

pub fn mean_se(values: &[f64]) -> MeanSe {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    let mean = fsum(values.iter().copied()) / n as f64;
    let var = fsum(values.iter().map(|v| (v - mean) * (v - mean))) / (n as f64 - 1.0);
    MeanSe {
        mean,
        se: (var / n as f64).sqrt(),
        n,
    }
}

/// Kolmogorov–Smirnov statistic and asymptotic p-value.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test of `samples` against `N(0, variance)`.
pub fn ks_normal(samples: &[f64], variance: f64) -> KsResult {
    let n = samples.len();
    let mut x = samples.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let law = Normal::new(0.0, variance.sqrt()).expect("positive variance");
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = law.cdf(*v);
        d = d.max(f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f);
    }
    let sn = (n as f64).sqrt();
    // Stephens' finite-sample correction of the Kolmogorov limit law.
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        n,
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn mean_se_of_constant_offset() {
        let m = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_tail_reference_points() {
        // Classical critical values: 1.36 at 5 %, 1.63 at 1 %.
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_accepts_normal_and_rejects_scaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..2000).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(ks_normal(&x, 1.0).p_value > 0.01);
        assert!(ks_normal(&x, 2.0).p_value < 1e-6);
    }
}
