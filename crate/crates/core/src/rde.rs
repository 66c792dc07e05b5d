//! Rough differential equations driven by a level-2 lift: the solution `Y`,
//! its Jacobian `J` and the inverse Jacobian, advanced jointly.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos_sums::WeightSeries;
use crate::error::{domain, Error, Result};
use crate::fbm_sim::{simulate, FbmPath, SimSpec};
use crate::gaussian_core::HurstModel;
use crate::numerics::linear_fit;
use crate::rough_lift::{lift2, RoughLift};

/// Coefficients `sigma: R^n -> L(R^d, R^n)` and `b: R^n -> R^n` with their
/// derivatives.
pub trait CoefficientField: Sync {
    fn state_dim(&self) -> usize;
    fn noise_dim(&self) -> usize;
    /// `n x d`; column `a` is the vector field `sigma_a`.
    fn sigma(&self, y: &DVector<f64>) -> DMatrix<f64>;
    fn b(&self, y: &DVector<f64>) -> DVector<f64>;
    /// Jacobian of each `sigma_a`, `n x n`.
    fn dsigma(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>>;
    fn db(&self, y: &DVector<f64>) -> DMatrix<f64>;
    /// Directional derivative of `D sigma_a` along `v`; central differences
    /// unless overridden.
    fn d2sigma(&self, y: &DVector<f64>, a: usize, v: &DVector<f64>) -> DMatrix<f64> {
        let scale = 1.0 + y.amax();
        let eps = 1e-5 * scale / (1.0 + v.amax());
        let plus = self.dsigma(&(y + v * eps));
        let minus = self.dsigma(&(y - v * eps));
        (&plus[a] - &minus[a]) / (2.0 * eps)
    }
}

/// `sigma_a(y) = A_a y + c_a`, `b(y) = B y + beta`.
#[derive(Clone, Debug)]
pub struct AffineField {
    pub a: Vec<DMatrix<f64>>,
    pub c: Vec<DVector<f64>>,
    pub b_mat: DMatrix<f64>,
    pub b_vec: DVector<f64>,
}

impl AffineField {
    pub fn new(a: Vec<DMatrix<f64>>, c: Vec<DVector<f64>>, b_mat: DMatrix<f64>, b_vec: DVector<f64>) -> Result<Self> {
        let n = b_vec.len();
        if a.is_empty() || a.len() != c.len() {
            return domain("need one matrix and one offset per noise component");
        }
        let square = |m: &DMatrix<f64>| m.nrows() == n && m.ncols() == n;
        if !a.iter().all(square) || !square(&b_mat) || c.iter().any(|v| v.len() != n) {
            return domain("coefficient shapes do not match the state dimension");
        }
        Ok(Self { a, c, b_mat, b_vec })
    }

    /// The scalar geometric equation `dY = Y dB`.
    pub fn geometric_1d() -> Self {
        Self {
            a: vec![DMatrix::from_element(1, 1, 1.0)],
            c: vec![DVector::zeros(1)],
            b_mat: DMatrix::zeros(1, 1),
            b_vec: DVector::zeros(1),
        }
    }

    /// `sigma = 0`, `b = c` in `n` dimensions driven by `d` components.
    pub fn constant_drift(c: DVector<f64>, d: usize) -> Self {
        let n = c.len();
        Self {
            a: vec![DMatrix::zeros(n, n); d],
            c: vec![DVector::zeros(n); d],
            b_mat: DMatrix::zeros(n, n),
            b_vec: c,
        }
    }
}

impl CoefficientField for AffineField {
    fn state_dim(&self) -> usize {
        self.b_vec.len()
    }

    fn noise_dim(&self) -> usize {
        self.a.len()
    }

    fn sigma(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.a.iter().zip(&self.c).map(|(a, c)| a * y + c).collect();
        DMatrix::from_columns(&cols)
    }

    fn b(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.b_mat * y + &self.b_vec
    }

    fn dsigma(&self, _y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.a.clone()
    }

    fn db(&self, _y: &DVector<f64>) -> DMatrix<f64> {
        self.b_mat.clone()
    }

    fn d2sigma(&self, y: &DVector<f64>, _a: usize, _v: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(y.len(), y.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    /// `Z + V_a dB^a + DV_b[V_a] BB^{ab} + V_0 dt` per cell.
    Davie,
    /// Flow over unit time of the vector field built from the increment and
    /// the antisymmetric area, integrated with `inner` classical Runge-Kutta
    /// steps.
    LogOde { inner: usize },
}

/// Joint state `(Y, J, J^{-1})`.
#[derive(Clone, Debug)]
struct State {
    y: DVector<f64>,
    j: DMatrix<f64>,
    k: DMatrix<f64>,
}

impl State {
    fn axpy(&self, c: f64, other: &State) -> State {
        State {
            y: &self.y + &other.y * c,
            j: &self.j + &other.j * c,
            k: &self.k + &other.k * c,
        }
    }

    fn scaled(&self, c: f64) -> State {
        State {
            y: &self.y * c,
            j: &self.j * c,
            k: &self.k * c,
        }
    }

    fn add(&mut self, other: &State) {
        self.y += &other.y;
        self.j += &other.j;
        self.k += &other.k;
    }

    fn is_finite(&self) -> bool {
        self.y
            .iter()
            .chain(self.j.iter())
            .chain(self.k.iter())
            .all(|x| x.is_finite())
    }
}

/// Vector fields of the augmented system at one state.
struct Fields {
    sig: DMatrix<f64>,
    dsig: Vec<DMatrix<f64>>,
}

impl Fields {
    fn at(coeff: &dyn CoefficientField, z: &State) -> Fields {
        Fields {
            sig: coeff.sigma(&z.y),
            dsig: coeff.dsigma(&z.y),
        }
    }

    /// `V_a(z) = (sigma_a, D sigma_a J, -K D sigma_a)`.
    fn v(&self, z: &State, a: usize) -> State {
        State {
            y: self.sig.column(a).into_owned(),
            j: &self.dsig[a] * &z.j,
            k: -(&z.k * &self.dsig[a]),
        }
    }

    /// `DV_a(z)[w]`.
    fn dv(&self, coeff: &dyn CoefficientField, z: &State, a: usize, w: &State) -> State {
        let d2 = coeff.d2sigma(&z.y, a, &w.y);
        State {
            y: &self.dsig[a] * &w.y,
            j: &d2 * &z.j + &self.dsig[a] * &w.j,
            k: -(&w.k * &self.dsig[a]) - &z.k * &d2,
        }
    }
}

fn drift(coeff: &dyn CoefficientField, z: &State) -> State {
    let db = coeff.db(&z.y);
    State {
        y: coeff.b(&z.y),
        j: &db * &z.j,
        k: -(&z.k * &db),
    }
}

fn davie_step(coeff: &dyn CoefficientField, z: &State, x: &[f64], area: &DMatrix<f64>, dt: f64) -> State {
    let d = x.len();
    let f = Fields::at(coeff, z);
    let vs: Vec<State> = (0..d).map(|a| f.v(z, a)).collect();
    let mut inc = drift(coeff, z).scaled(dt);
    for a in 0..d {
        inc.add(&vs[a].scaled(x[a]));
        for b in 0..d {
            if area[(a, b)] != 0.0 {
                inc.add(&f.dv(coeff, z, b, &vs[a]).scaled(area[(a, b)]));
            }
        }
    }
    inc
}

fn log_field(coeff: &dyn CoefficientField, z: &State, x: &[f64], anti: &DMatrix<f64>, dt: f64) -> State {
    let d = x.len();
    let f = Fields::at(coeff, z);
    let vs: Vec<State> = (0..d).map(|a| f.v(z, a)).collect();
    let mut out = drift(coeff, z).scaled(dt);
    for a in 0..d {
        out.add(&vs[a].scaled(x[a]));
        for b in a + 1..d {
            let w = anti[(a, b)];
            if w != 0.0 {
                let bracket = f.dv(coeff, z, b, &vs[a]).axpy(-1.0, &f.dv(coeff, z, a, &vs[b]));
                out.add(&bracket.scaled(w));
            }
        }
    }
    out
}

fn log_ode_step(
    coeff: &dyn CoefficientField,
    z: &State,
    x: &[f64],
    area: &DMatrix<f64>,
    dt: f64,
    inner: usize,
) -> State {
    let anti = (area - area.transpose()) * 0.5;
    let hstep = 1.0 / inner as f64;
    let field = |s: &State| log_field(coeff, s, x, &anti, dt);
    let mut cur = z.clone();
    for _ in 0..inner {
        let k1 = field(&cur);
        let k2 = field(&cur.axpy(0.5 * hstep, &k1));
        let k3 = field(&cur.axpy(0.5 * hstep, &k2));
        let k4 = field(&cur.axpy(hstep, &k3));
        let mut incr = k1;
        incr.add(&k2.scaled(2.0));
        incr.add(&k3.scaled(2.0));
        incr.add(&k4);
        cur = cur.axpy(hstep / 6.0, &incr);
    }
    cur.axpy(-1.0, z)
}

/// `Y`, `J` and `J^{-1}` at the dyadic points of the lift's level.
#[derive(Clone, Debug)]
pub struct RdeSolution {
    pub m: u32,
    pub scheme: Scheme,
    y: Vec<DVector<f64>>,
    j: Vec<DMatrix<f64>>,
    jinv: Vec<DMatrix<f64>>,
    /// Largest `|Y_{k+1} - Y_k|_max` over steps.
    pub max_increment: f64,
}

impl RdeSolution {
    pub fn points(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self, i: usize) -> &DVector<f64> {
        &self.y[i]
    }

    pub fn j(&self, i: usize) -> &DMatrix<f64> {
        &self.j[i]
    }

    pub fn jinv(&self, i: usize) -> &DMatrix<f64> {
        &self.jinv[i]
    }

    pub fn terminal(&self) -> &DVector<f64> {
        self.y.last().expect("at least one point")
    }

    /// `max_t ||J_t J^{-1}_t - I||_max`.
    pub fn inverse_defect(&self) -> f64 {
        self.j
            .iter()
            .zip(&self.jinv)
            .map(|(j, k)| {
                let mut p = j * k;
                for i in 0..p.nrows() {
                    p[(i, i)] -= 1.0;
                }
                p.amax()
            })
            .fold(0.0, f64::max)
    }

    /// `max_t ||J^{-1}_t - inv(J_t)||_max`, comparing the advanced inverse
    /// with direct inversion.
    pub fn inversion_gap(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, (j, k)) in self.j.iter().zip(&self.jinv).enumerate() {
            let inv = j.clone().try_inverse().ok_or_else(|| Error::Divergence {
                step: i,
                msg: "singular Jacobian".into(),
            })?;
            worst = worst.max((inv - k).amax());
        }
        Ok(worst)
    }
}

/// One step per cell of the lift.
pub fn solve(lift: &RoughLift, coeff: &dyn CoefficientField, xi: &DVector<f64>, scheme: Scheme) -> Result<RdeSolution> {
    let n = coeff.state_dim();
    let d = coeff.noise_dim();
    if xi.len() != n {
        return domain(format!("initial value has length {}, expected {n}", xi.len()));
    }
    if lift.d != d {
        return domain(format!("lift has {} components, coefficients expect {d}", lift.d));
    }
    if let Scheme::LogOde { inner: 0 } = scheme {
        return domain("log-ODE scheme needs at least one inner step");
    }
    let cells = lift.cells();
    let dt = 1.0 / cells as f64;
    let mut z = State {
        y: xi.clone(),
        j: DMatrix::identity(n, n),
        k: DMatrix::identity(n, n),
    };
    let mut sol = RdeSolution {
        m: lift.m,
        scheme,
        y: Vec::with_capacity(cells + 1),
        j: Vec::with_capacity(cells + 1),
        jinv: Vec::with_capacity(cells + 1),
        max_increment: 0.0,
    };
    sol.y.push(z.y.clone());
    sol.j.push(z.j.clone());
    sol.jinv.push(z.k.clone());
    let mut x = vec![0.0; d];
    for c in 0..cells {
        for (a, xa) in x.iter_mut().enumerate() {
            *xa = lift.x(c, a);
        }
        let area = DMatrix::from_fn(d, d, |a, b| lift.area(c, a, b));
        let inc = match scheme {
            Scheme::Davie => davie_step(coeff, &z, &x, &area, dt),
            Scheme::LogOde { inner } => log_ode_step(coeff, &z, &x, &area, dt, inner),
        };
        sol.max_increment = sol.max_increment.max(inc.y.amax());
        z.add(&inc);
        if !z.is_finite() {
            return Err(Error::Divergence {
                step: c,
                msg: "state left the finite range".into(),
            });
        }
        sol.y.push(z.y.clone());
        sol.j.push(z.j.clone());
        sol.jinv.push(z.k.clone());
    }
    Ok(sol)
}

/// `F_{tau_i} = phi(Y, J, J^{-1})` at the dyadic points of the solution.
pub fn weight_process(
    sol: &RdeSolution,
    phi: impl Fn(&DVector<f64>, &DMatrix<f64>, &DMatrix<f64>) -> f64,
) -> Result<WeightSeries> {
    let values = (0..sol.points())
        .map(|i| phi(&sol.y[i], &sol.j[i], &sol.jinv[i]))
        .collect();
    WeightSeries::new(sol.m, values)
}

/// Self-convergence over successive halvings of the step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub levels: Vec<u32>,
    /// Root-mean-square `|Y_1(m) - Y_1(m+1)|` over replicas, one per
    /// consecutive pair of levels.
    pub rms_diff: Vec<f64>,
    /// Fitted order `theta` in `diff ~ step^theta`.
    pub theta: f64,
    pub theta_stderr: f64,
    /// Self-convergence estimate at the finest level (last `rms_diff`).
    pub self_estimate: f64,
    /// Largest `||J J^{-1} - I||_max` over replicas and grid points at the
    /// finest level.
    pub inverse_defect: f64,
    /// Root-mean-square error against a closed form at the finest level.
    pub exact_rms: Option<f64>,
}

/// Solves on nested dyadic grids of one simulated path per replica and fits
/// the decay of successive differences in the first state coordinate.
#[allow(clippy::too_many_arguments)]
pub fn self_convergence(
    model: HurstModel,
    levels: &[u32],
    replicas: u64,
    seed: u64,
    coeff: &dyn CoefficientField,
    xi: &DVector<f64>,
    scheme: Scheme,
    exact: Option<&(dyn Fn(&FbmPath) -> f64 + Sync)>,
) -> Result<ConvergenceReport> {
    if levels.len() < 3 || levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return domain("need at least three consecutive levels");
    }
    if replicas == 0 {
        return domain("need at least one replica");
    }
    if model.d() != coeff.noise_dim() {
        return domain("model dimension must match the noise dimension");
    }
    let top = *levels.last().unwrap();
    let per_rep: Vec<(Vec<f64>, f64, Option<f64>)> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let path = simulate(&SimSpec::new(model, top, 1, seed)?.with_replica(r))?;
            let mut finals = Vec::with_capacity(levels.len());
            let mut defect = 0.0;
            for &m in levels {
                let lift = lift2(&path.regroup(m)?);
                let sol = solve(&lift, coeff, xi, scheme)?;
                finals.push(sol.terminal()[0]);
                if m == top {
                    defect = sol.inverse_defect();
                }
            }
            let err = exact.map(|f| finals.last().unwrap() - f(&path));
            Ok((finals, defect, err))
        })
        .collect::<Result<_>>()?;
    let pairs = levels.len() - 1;
    let rms_diff: Vec<f64> = (0..pairs)
        .map(|k| {
            let s: f64 = per_rep.iter().map(|(f, _, _)| (f[k + 1] - f[k]).powi(2)).sum();
            (s / replicas as f64).sqrt()
        })
        .collect();
    if rms_diff.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Consistency(
            "successive levels agree exactly; nothing to fit".into(),
        ));
    }
    // Step of the coarser solve in each pair.
    let xs: Vec<f64> = levels[..pairs]
        .iter()
        .map(|&m| -(m as f64) * std::f64::consts::LN_2)
        .collect();
    let ys: Vec<f64> = rms_diff.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&xs, &ys);
    let exact_rms = exact.map(|_| {
        let s: f64 = per_rep.iter().map(|(_, _, e)| e.unwrap().powi(2)).sum();
        (s / replicas as f64).sqrt()
    });
    Ok(ConvergenceReport {
        scheme,
        levels: levels.to_vec(),
        self_estimate: *rms_diff.last().unwrap(),
        rms_diff,
        theta: fit.slope,
        theta_stderr: fit.slope_stderr,
        inverse_defect: per_rep.iter().map(|(_, d, _)| *d).fold(0.0, f64::max),
        exact_rms,
    })
}

/// `xi exp(B^1_1)`, the solution of the scalar geometric equation.
pub fn geometric_closed_form(xi: f64) -> impl Fn(&FbmPath) -> f64 + Sync {
    move |path: &FbmPath| xi * path.increments(0).iter().sum::<f64>().exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(h: f64, d: usize, m: u32, refine: usize, seed: u64) -> FbmPath {
        simulate(&SimSpec::new(HurstModel::new(h, d).unwrap(), m, refine, seed).unwrap()).unwrap()
    }

    /// `sigma_1(y) = (sin y_2, cos y_1)`, `sigma_2(y) = (y_1 y_2 / 4, 1)`,
    /// `b(y) = (-y_1, y_2 / 2)`.
    struct Nonlinear {
        exact_d2: bool,
    }

    impl CoefficientField for Nonlinear {
        fn state_dim(&self) -> usize {
            2
        }
        fn noise_dim(&self) -> usize {
            2
        }
        fn sigma(&self, y: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[y[1].sin(), 0.25 * y[0] * y[1], y[0].cos(), 1.0])
        }
        fn b(&self, y: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![-y[0], 0.5 * y[1]])
        }
        fn dsigma(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
            vec![
                DMatrix::from_row_slice(2, 2, &[0.0, y[1].cos(), -y[0].sin(), 0.0]),
                DMatrix::from_row_slice(2, 2, &[0.25 * y[1], 0.25 * y[0], 0.0, 0.0]),
            ]
        }
        fn db(&self, _y: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 0.5])
        }
        fn d2sigma(&self, y: &DVector<f64>, a: usize, v: &DVector<f64>) -> DMatrix<f64> {
            if !self.exact_d2 {
                let scale = 1.0 + y.amax();
                let eps = 1e-5 * scale / (1.0 + v.amax());
                let plus = self.dsigma(&(y + v * eps));
                let minus = self.dsigma(&(y - v * eps));
                return (&plus[a] - &minus[a]) / (2.0 * eps);
            }
            match a {
                0 => DMatrix::from_row_slice(2, 2, &[0.0, -y[1].sin() * v[1], -y[0].cos() * v[0], 0.0]),
                _ => DMatrix::from_row_slice(2, 2, &[0.25 * v[1], 0.25 * v[0], 0.0, 0.0]),
            }
        }
    }

    #[test]
    fn constant_drift_is_exact() {
        let p = path(0.4, 2, 5, 2, 1);
        let c = DVector::from_vec(vec![0.7, -1.3]);
        let field = AffineField::constant_drift(c.clone(), 2);
        let xi = DVector::from_vec(vec![1.0, 2.0]);
        for scheme in [Scheme::Davie, Scheme::LogOde { inner: 2 }] {
            let sol = solve(&lift2(&p), &field, &xi, scheme).unwrap();
            for i in 0..sol.points() {
                let t = i as f64 / 32.0;
                assert!((sol.y(i) - (&xi + &c * t)).amax() < 1e-14);
                assert!((sol.j(i) - DMatrix::identity(2, 2)).amax() == 0.0);
            }
        }
    }

    #[test]
    fn initial_state() {
        let p = path(0.4, 1, 4, 1, 2);
        let sol = solve(
            &lift2(&p),
            &AffineField::geometric_1d(),
            &DVector::from_element(1, 2.0),
            Scheme::Davie,
        )
        .unwrap();
        assert_eq!(sol.y(0)[0], 2.0);
        assert_eq!(sol.j(0)[(0, 0)], 1.0);
        assert_eq!(sol.jinv(0)[(0, 0)], 1.0);
        assert_eq!(sol.points(), 17);
    }

    #[test]
    fn geometric_example_tracks_closed_form() {
        let p = path(0.45, 1, 12, 1, 3);
        let xi = 1.5;
        let exact = geometric_closed_form(xi)(&p);
        let lift = lift2(&p);
        let field = AffineField::geometric_1d();
        let x0 = DVector::from_element(1, xi);
        let dav = solve(&lift, &field, &x0, Scheme::Davie).unwrap();
        let log = solve(&lift, &field, &x0, Scheme::LogOde { inner: 1 }).unwrap();
        assert!((dav.terminal()[0] - exact).abs() < 0.05 * exact);
        assert!((log.terminal()[0] - exact).abs() < 1e-3 * exact);
        // The Jacobian of a linear equation is Y / xi.
        for sol in [&dav, &log] {
            for i in 0..sol.points() {
                assert!((sol.j(i)[(0, 0)] - sol.y(i)[0] / xi).abs() < 1e-12 * (1.0 + sol.y(i)[0].abs()));
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = path(0.45, 2, 8, 2, 4);
        let lift = lift2(&p);
        let field = Nonlinear { exact_d2: true };
        let xi = DVector::from_vec(vec![0.3, -0.2]);
        let scheme = Scheme::LogOde { inner: 2 };
        let sol = solve(&lift, &field, &xi, scheme).unwrap();
        let eps = 1e-6;
        for k in 0..2 {
            let mut e = DVector::zeros(2);
            e[k] = eps;
            let up = solve(&lift, &field, &(&xi + &e), scheme).unwrap();
            let dn = solve(&lift, &field, &(&xi - &e), scheme).unwrap();
            let col = (up.terminal() - dn.terminal()) / (2.0 * eps);
            let last = sol.j(sol.points() - 1).column(k).into_owned();
            assert!((col - last).amax() < 1e-6);
        }
        assert!(sol.inversion_gap().unwrap() < 1e-2);
    }

    #[test]
    fn finite_difference_second_derivative_agrees() {
        let p = path(0.45, 2, 7, 2, 5);
        let lift = lift2(&p);
        let xi = DVector::from_vec(vec![0.1, 0.4]);
        let a = solve(&lift, &Nonlinear { exact_d2: true }, &xi, Scheme::Davie).unwrap();
        let b = solve(&lift, &Nonlinear { exact_d2: false }, &xi, Scheme::Davie).unwrap();
        assert!((a.j(a.points() - 1) - b.j(b.points() - 1)).amax() < 1e-6);
    }

    #[test]
    fn schemes_agree_on_fine_grids() {
        let p = path(0.45, 2, 11, 1, 6);
        let xi = DVector::from_vec(vec![0.1, 0.4]);
        let field = Nonlinear { exact_d2: true };
        let a = solve(&lift2(&p), &field, &xi, Scheme::Davie).unwrap();
        let b = solve(&lift2(&p), &field, &xi, Scheme::LogOde { inner: 1 }).unwrap();
        assert!((a.terminal() - b.terminal()).amax() < 0.05);
    }

    #[test]
    fn divergence_carries_the_step() {
        let p = path(0.4, 1, 6, 1, 7);
        let field = AffineField::new(
            vec![DMatrix::from_element(1, 1, 0.0)],
            vec![DVector::zeros(1)],
            DMatrix::from_element(1, 1, 1e300),
            DVector::zeros(1),
        )
        .unwrap();
        let err = solve(&lift2(&p), &field, &DVector::from_element(1, 1.0), Scheme::Davie).unwrap_err();
        assert!(matches!(err, Error::Divergence { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn shape_errors() {
        let p = path(0.4, 2, 3, 1, 8);
        let field = AffineField::geometric_1d();
        assert!(solve(&lift2(&p), &field, &DVector::from_element(1, 1.0), Scheme::Davie).is_err());
        let p1 = path(0.4, 1, 3, 1, 8);
        assert!(solve(&lift2(&p1), &field, &DVector::zeros(2), Scheme::Davie).is_err());
        assert!(solve(&lift2(&p1), &field, &DVector::zeros(1), Scheme::LogOde { inner: 0 }).is_err());
    }

    #[test]
    fn weights_from_the_solution() {
        let p = path(0.4, 1, 6, 1, 9);
        let sol = solve(
            &lift2(&p),
            &AffineField::geometric_1d(),
            &DVector::from_element(1, 1.0),
            Scheme::LogOde { inner: 1 },
        )
        .unwrap();
        let one = weight_process(&sol, |_, _, _| 1.0).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));
        let jj = weight_process(&sol, |_, j, k| (j * k)[(0, 0)]).unwrap();
        assert!(jj.values().iter().all(|v| (v - 1.0).abs() < 1e-3));
        let from_path = WeightSeries::from_path(&p, |b| b[0]).unwrap();
        assert_eq!(from_path.values(), p.values(0).as_slice());
    }
}
