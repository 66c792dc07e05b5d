//! Exact-in-law simulation of d-dimensional fBm on a dyadic grid with
//! sub-refinement.
//!
//! Random streams: component `alpha` of replica `r` under seed `s` draws
//! from ChaCha8 keyed by `s`, stream id `r`, starting at word position
//! `alpha * 2^64`. Paths are therefore a pure function of
//! `(seed, replica)` and components never share random words.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian_core::{rho, HurstModel};
use crate::numerics::fmt_g17;

pub const DEFAULT_MAX_POINTS: usize = 1 << 14;
/// Grids up to this size use the Cholesky factor under `SimMethod::Auto`.
pub const CHOLESKY_AUTO_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimMethod {
    Auto,
    Cholesky,
    Circulant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub model: HurstModel,
    /// Dyadic level of the grid `D_m`.
    pub m: u32,
    /// Sub-steps per dyadic cell.
    pub refine: usize,
    pub seed: u64,
    pub replica: u64,
    pub max_points: usize,
    pub method: SimMethod,
}

impl SimSpec {
    pub fn new(model: HurstModel, m: u32, refine: usize, seed: u64) -> Result<Self> {
        Self::with_capacity(model, m, refine, seed, DEFAULT_MAX_POINTS)
    }

    /// As [`SimSpec::new`] with a custom cap on the fine grid size.
    pub fn with_capacity(model: HurstModel, m: u32, refine: usize, seed: u64, max_points: usize) -> Result<Self> {
        let spec = Self {
            model,
            m,
            refine,
            seed,
            replica: 0,
            max_points,
            method: SimMethod::Auto,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_replica(mut self, replica: u64) -> Self {
        self.replica = replica;
        self
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }

    pub fn with_method(mut self, method: SimMethod) -> Self {
        self.method = method;
        self
    }

    pub fn cells(&self) -> usize {
        1usize << self.m
    }

    pub fn n_points(&self) -> usize {
        self.refine << self.m
    }

    /// Fine grid mesh `2^{-m} / refine`.
    pub fn mesh(&self) -> f64 {
        1.0 / self.n_points() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return domain("dyadic level m must be at least 1");
        }
        if self.m > 40 {
            return domain("dyadic level m too large");
        }
        if self.refine < 1 {
            return domain("refine must be at least 1");
        }
        let n = self.n_points();
        if n > self.max_points {
            return Err(Error::Capacity {
                what: "fine grid points",
                got: n,
                max: self.max_points,
            });
        }
        Ok(())
    }
}

/// Simulated path: one row of fine-grid increments per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub spec: SimSpec,
    increments: Vec<Vec<f64>>,
}

impl FbmPath {
    /// Wraps externally produced increments (one row per component).
    pub fn from_increments(spec: SimSpec, increments: Vec<Vec<f64>>) -> Result<Self> {
        spec.validate()?;
        if increments.len() != spec.model.d() {
            return domain("number of increment rows differs from d");
        }
        if increments.iter().any(|r| r.len() != spec.n_points()) {
            return domain("increment row length differs from the grid size");
        }
        Ok(Self { spec, increments })
    }

    pub fn d(&self) -> usize {
        self.increments.len()
    }

    pub fn m(&self) -> u32 {
        self.spec.m
    }

    pub fn refine(&self) -> usize {
        self.spec.refine
    }

    pub fn n_points(&self) -> usize {
        self.spec.n_points()
    }

    pub fn increments(&self, alpha: usize) -> &[f64] {
        &self.increments[alpha]
    }

    /// `B^alpha_t` on the fine grid, starting from `B_0 = 0`.
    pub fn values(&self, alpha: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_points() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for x in &self.increments[alpha] {
            acc += x;
            out.push(acc);
        }
        out
    }

    /// Increments over the dyadic cells of level `m`.
    pub fn cell_increments(&self, alpha: usize) -> Vec<f64> {
        self.increments[alpha]
            .chunks(self.spec.refine)
            .map(|c| c.iter().sum())
            .collect()
    }

    /// Same level, `n` sub-steps per cell obtained by summing groups of
    /// fine increments.
    pub fn with_refine(&self, n: usize) -> Result<FbmPath> {
        if n == 0 || self.spec.refine % n != 0 {
            return domain(format!("refine {} is not a multiple of {n}", self.spec.refine));
        }
        let group = self.spec.refine / n;
        let increments = self
            .increments
            .iter()
            .map(|row| row.chunks(group).map(|c| c.iter().sum()).collect())
            .collect();
        let mut spec = self.spec;
        spec.refine = n;
        Ok(FbmPath { spec, increments })
    }

    /// Relabels the same fine grid as level `level` with the matching
    /// number of sub-steps; no data changes.
    pub fn regroup(&self, level: u32) -> Result<FbmPath> {
        let total = self.n_points();
        let cells = 1usize.checked_shl(level).unwrap_or(0);
        if level < 1 || cells == 0 || cells > total || total % cells != 0 {
            return domain(format!("cannot regroup {total} points into level {level}"));
        }
        let mut spec = self.spec;
        spec.m = level;
        spec.refine = total / cells;
        Ok(FbmPath {
            spec,
            increments: self.increments.clone(),
        })
    }

    /// Write the path as CSV with header `t,B1,...,Bd`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("t");
        for a in 0..self.d() {
            header.push_str(&format!(",B{}", a + 1));
        }
        writeln!(w, "{header}")?;
        let vals: Vec<Vec<f64>> = (0..self.d()).map(|a| self.values(a)).collect();
        let mesh = self.spec.mesh();
        for i in 0..=self.n_points() {
            let mut line = fmt_g17(i as f64 * mesh);
            for v in &vals {
                line.push(',');
                line.push_str(&fmt_g17(v[i]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Aggregates increments onto the dyadic grid of level `to_level`
/// (one sub-step per cell).
pub fn coarsen(path: &FbmPath, to_level: u32) -> Result<FbmPath> {
    if to_level > path.spec.m || to_level < 1 {
        return domain(format!("cannot coarsen level {} to level {to_level}", path.spec.m));
    }
    let group = path.spec.refine << (path.spec.m - to_level);
    let increments = path
        .increments
        .iter()
        .map(|row| row.chunks(group).map(|c| c.iter().sum()).collect())
        .collect();
    let mut spec = path.spec;
    spec.m = to_level;
    spec.refine = 1;
    Ok(FbmPath { spec, increments })
}

/// Toeplitz covariance of the fine increments of one component.
pub fn increment_cov_matrix(spec: &SimSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.n_points();
    let h = spec.model.h();
    let scale = spec.mesh().powf(2.0 * h);
    let r: Vec<f64> = (0..n).map(|k| scale * rho(k as u64, h)).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| r[i.abs_diff(j)]))
}

/// Deterministic generator for one component of one replica.
pub fn component_rng(seed: u64, replica: u64, component: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng.set_word_pos((component as u128) << 64);
    rng
}

enum Factor {
    Cholesky(DMatrix<f64>),
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn Fft<f64>> },
}

type FactorKey = (u64, usize, bool);

fn factor_cache() -> &'static Mutex<HashMap<FactorKey, Arc<Factor>>> {
    static CACHE: OnceLock<Mutex<HashMap<FactorKey, Arc<Factor>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factor_for(h: f64, n: usize, circulant: bool) -> Result<Arc<Factor>> {
    let key = (h.to_bits(), n, circulant);
    if let Some(f) = factor_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(if circulant {
        build_circulant(h, n)?
    } else {
        build_cholesky(h, n)?
    });
    factor_cache().lock().unwrap().insert(key, f.clone());
    Ok(f)
}

fn build_cholesky(h: f64, n: usize) -> Result<Factor> {
    let r: Vec<f64> = (0..n).map(|k| rho(k as u64, h)).collect();
    let c = DMatrix::from_fn(n, n, |i, j| r[i.abs_diff(j)]);
    let chol = c
        .cholesky()
        .ok_or_else(|| Error::Consistency("increment covariance is not positive definite".into()))?;
    Ok(Factor::Cholesky(chol.l()))
}

fn build_circulant(h: f64, n: usize) -> Result<Factor> {
    let big = 2 * n;
    let mut c = vec![Complex64::new(0.0, 0.0); big];
    for (j, slot) in c.iter_mut().enumerate() {
        let lag = if j <= n { j } else { big - j };
        *slot = Complex64::new(rho(lag as u64, h), 0.0);
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(big);
    fft.process(&mut c);
    let max = c.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let mut sqrt_eig = Vec::with_capacity(big);
    for z in &c {
        if z.re < -1e-10 * max {
            return Err(Error::Consistency(format!(
                "circulant embedding has a negative eigenvalue {:e}",
                z.re
            )));
        }
        sqrt_eig.push((z.re.max(0.0) / big as f64).sqrt());
    }
    Ok(Factor::Circulant { sqrt_eig, fft })
}

/// Unit-variance fractional Gaussian noise of length `n` from `rng`.
fn fgn_unit<R: Rng>(factor: &Factor, n: usize, rng: &mut R) -> Vec<f64> {
    match factor {
        Factor::Cholesky(l) => {
            let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            (0..n).map(|i| (0..=i).map(|j| l[(i, j)] * z[j]).sum()).collect()
        }
        Factor::Circulant { sqrt_eig, fft } => {
            let mut w: Vec<Complex64> = sqrt_eig
                .iter()
                .map(|s| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                })
                .collect();
            fft.process(&mut w);
            w.truncate(n);
            w.into_iter().map(|z| z.re).collect()
        }
    }
}

/// Simulates the path described by `spec`.
pub fn simulate(spec: &SimSpec) -> Result<FbmPath> {
    spec.validate()?;
    let n = spec.n_points();
    let h = spec.model.h();
    let circulant = match spec.method {
        SimMethod::Cholesky => false,
        SimMethod::Circulant => true,
        SimMethod::Auto => n > CHOLESKY_AUTO_LIMIT,
    };
    let factor = factor_for(h, n, circulant)?;
    let scale = spec.mesh().powf(h);
    let increments = (0..spec.model.d())
        .map(|alpha| {
            let mut rng = component_rng(spec.seed, spec.replica, alpha);
            let mut x = fgn_unit(&factor, n, &mut rng);
            x.iter_mut().for_each(|v| *v *= scale);
            x
        })
        .collect();
    Ok(FbmPath {
        spec: *spec,
        increments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(h: f64, d: usize, m: u32, refine: usize) -> SimSpec {
        SimSpec::new(HurstModel::new(h, d).unwrap(), m, refine, 11).unwrap()
    }

    #[test]
    fn capacity_is_enforced() {
        let model = HurstModel::new(0.4, 1).unwrap();
        assert!(matches!(SimSpec::new(model, 10, 64, 0), Err(Error::Capacity { .. })));
        assert!(SimSpec::new(model, 10, 64, 0).err().is_some());
        let s = SimSpec {
            max_points: 1 << 16,
            ..spec(0.4, 1, 2, 1)
        };
        assert!(SimSpec { m: 10, refine: 64, ..s }.validate().is_ok());
    }

    #[test]
    fn deterministic_and_starts_at_zero() {
        let s = spec(0.4, 2, 4, 4).with_replica(3);
        let a = simulate(&s).unwrap();
        let b = simulate(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values(1)[0], 0.0);
        assert_ne!(a.increments(0), a.increments(1));
        let c = simulate(&s.with_replica(4)).unwrap();
        assert_ne!(a.increments(0), c.increments(0));
    }

    #[test]
    fn cov_matrix_entries() {
        let s = spec(0.4, 1, 3, 2);
        let c = increment_cov_matrix(&s).unwrap();
        let mesh = s.mesh();
        assert!((c[(0, 0)] - mesh.powf(0.8)).abs() < 1e-15);
        assert!((c[(2, 3)] / mesh.powf(0.8) - rho(1, 0.4)).abs() < 1e-12);
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                let (a, b) = (i as f64 * mesh, j as f64 * mesh);
                let r = crate::gaussian_core::cov_rect_raw(a, a + mesh, b, b + mesh, 0.4);
                assert!((c[(i, j)] - r).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn methods_share_the_law() {
        // Same covariance, different factorization: compare second moments.
        let base = spec(0.4, 1, 3, 16);
        let n = base.n_points();
        let reps = 4000;
        let mut acc = [[0.0; 2]; 2];
        for (k, method) in [SimMethod::Cholesky, SimMethod::Circulant].iter().enumerate() {
            for r in 0..reps {
                let p = simulate(&base.with_method(*method).with_replica(r)).unwrap();
                let x = p.increments(0);
                acc[k][0] += x[0] * x[0];
                acc[k][1] += x[n / 2] * x[n / 2 + 1];
            }
        }
        let var = base.mesh().powf(0.8);
        for k in 0..2 {
            let v = acc[k][0] / reps as f64;
            assert!((v - var).abs() < 4.0 * var * (2.0 / reps as f64).sqrt());
            let c = acc[k][1] / reps as f64;
            let se = var * (1.0 / reps as f64).sqrt() * 1.2;
            assert!((c - var * rho(1, 0.4)).abs() < 4.0 * se);
        }
    }

    #[test]
    fn coarsen_and_regroup() {
        let p = simulate(&spec(0.4, 2, 4, 4)).unwrap();
        let same = coarsen(&p, 4).unwrap();
        assert_eq!(same.increments(0), &p.cell_increments(0)[..]);
        let c = coarsen(&p, 2).unwrap();
        let b1 = *p.values(1).last().unwrap();
        assert!((c.values(1).last().unwrap() - b1).abs() < 1e-14);
        assert!(coarsen(&p, 5).is_err());
        let r = p.regroup(2).unwrap();
        assert_eq!(r.refine(), 16);
        assert_eq!(r.increments(0), p.increments(0));
        let w = p.with_refine(2).unwrap();
        assert_eq!(w.n_points(), 32);
        assert!(p.with_refine(3).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let p = simulate(&spec(0.4, 2, 1, 2)).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,B1,B2");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,0,0"));
    }
}
