//! Fixed-step integration with implicit Runge-Kutta tableaux.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::reduce::RKTableau;

/// An autonomous or non-autonomous ODE `z' = f(t, z)`.
pub trait Problem: Sync {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, z: &[f64], out: &mut [f64]);

    fn initial_state(&self) -> Vec<f64>;

    /// `df/dz`, when available in closed form.
    fn jacobian(&self, _t: f64, _z: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn hamiltonian(&self, _z: &[f64]) -> Option<f64> {
        None
    }

    /// Exact solution from `(t0, z0)` to `t1`, when known.
    fn exact(&self, _t0: f64, _z0: &[f64], _t1: f64) -> Option<Vec<f64>> {
        None
    }
}

/// Canonical Hamiltonian test problems with `z = (q, p)` and
/// `z' = (dH/dp, -dH/dq)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `H = (p^2 + q^2) / 2`.
    Harmonic,
    /// `H = p^2 / 2 - cos q`.
    Pendulum,
    /// `H = |p|^2 / 2 - 1 / |q|`, eccentricity 0.6.
    Kepler,
}

pub const KEPLER_ECCENTRICITY: f64 = 0.6;

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "harmonic" | "harmonic_oscillator" => Ok(Preset::Harmonic),
            "pendulum" => Ok(Preset::Pendulum),
            "kepler" | "kepler2d" => Ok(Preset::Kepler),
            other => Err(Error::InvalidParameter(format!(
                "unknown problem '{other}' (expected harmonic, pendulum or kepler)"
            ))),
        }
    }
}

impl Preset {
    fn half(&self) -> usize {
        match self {
            Preset::Harmonic | Preset::Pendulum => 1,
            Preset::Kepler => 2,
        }
    }

    /// `(dH/dq, dH/dp)` stacked.
    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        match self {
            Preset::Harmonic => vec![z[0], z[1]],
            Preset::Pendulum => vec![z[0].sin(), z[1]],
            Preset::Kepler => {
                let (q1, q2) = (z[0], z[1]);
                let r3 = (q1 * q1 + q2 * q2).powf(1.5);
                vec![q1 / r3, q2 / r3, z[2], z[3]]
            }
        }
    }

    pub fn energy(&self, z: &[f64]) -> f64 {
        match self {
            Preset::Harmonic => 0.5 * (z[0] * z[0] + z[1] * z[1]),
            Preset::Pendulum => 0.5 * z[1] * z[1] - z[0].cos(),
            Preset::Kepler => {
                0.5 * (z[2] * z[2] + z[3] * z[3]) - 1.0 / (z[0] * z[0] + z[1] * z[1]).sqrt()
            }
        }
    }
}

impl Problem for Preset {
    fn name(&self) -> String {
        match self {
            Preset::Harmonic => "harmonic",
            Preset::Pendulum => "pendulum",
            Preset::Kepler => "kepler",
        }
        .into()
    }

    fn dim(&self) -> usize {
        2 * self.half()
    }

    fn rhs(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        let n = self.half();
        let g = self.gradient(z);
        for k in 0..n {
            out[k] = g[n + k];
            out[n + k] = -g[k];
        }
    }

    fn initial_state(&self) -> Vec<f64> {
        match self {
            Preset::Harmonic => vec![1.0, 0.0],
            Preset::Pendulum => vec![1.0, 0.5],
            Preset::Kepler => {
                let e = KEPLER_ECCENTRICITY;
                vec![1.0 - e, 0.0, 0.0, ((1.0 + e) / (1.0 - e)).sqrt()]
            }
        }
    }

    fn jacobian(&self, _t: f64, z: &[f64]) -> Option<DMatrix<f64>> {
        match self {
            Preset::Harmonic => Some(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])),
            Preset::Pendulum => Some(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -z[0].cos(), 0.0])),
            Preset::Kepler => None,
        }
    }

    fn hamiltonian(&self, z: &[f64]) -> Option<f64> {
        Some(self.energy(z))
    }

    fn exact(&self, t0: f64, z0: &[f64], t1: f64) -> Option<Vec<f64>> {
        match self {
            Preset::Harmonic => {
                let (s, c) = (t1 - t0).sin_cos();
                Some(vec![c * z0[0] + s * z0[1], -s * z0[0] + c * z0[1]])
            }
            _ => None,
        }
    }
}

/// `z' = M z`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProblem {
    pub matrix: DMatrix<f64>,
    pub z0: Vec<f64>,
}

impl LinearProblem {
    /// The scalar test equation `z' = lambda z`.
    pub fn scalar(lambda: f64, z0: f64) -> Self {
        LinearProblem {
            matrix: DMatrix::from_element(1, 1, lambda),
            z0: vec![z0],
        }
    }
}

impl Problem for LinearProblem {
    fn name(&self) -> String {
        "linear".into()
    }

    fn dim(&self) -> usize {
        self.z0.len()
    }

    fn rhs(&self, _t: f64, z: &[f64], out: &mut [f64]) {
        let r = &self.matrix * DVector::from_column_slice(z);
        out.copy_from_slice(r.as_slice());
    }

    fn initial_state(&self) -> Vec<f64> {
        self.z0.clone()
    }

    fn jacobian(&self, _t: f64, _z: &[f64]) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }

    fn exact(&self, t0: f64, z0: &[f64], t1: f64) -> Option<Vec<f64>> {
        let e = (&self.matrix * (t1 - t0)).exp();
        Some((e * DVector::from_column_slice(z0)).as_slice().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stage residual tolerance in the max norm, relative to `max(1, |z|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Ignore a problem-supplied Jacobian and difference numerically.
    pub finite_difference: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-13,
            max_iter: 50,
            finite_difference: false,
        }
    }
}

fn fd_jacobian(problem: &dyn Problem, t: f64, z: &[f64]) -> DMatrix<f64> {
    let d = z.len();
    let mut jac = DMatrix::zeros(d, d);
    let mut zp = z.to_vec();
    let mut fp = vec![0.0; d];
    let mut fm = vec![0.0; d];
    for k in 0..d {
        let delta = 1e-7 * (1.0 + z[k].abs());
        zp[k] = z[k] + delta;
        problem.rhs(t, &zp, &mut fp);
        zp[k] = z[k] - delta;
        problem.rhs(t, &zp, &mut fm);
        zp[k] = z[k];
        for i in 0..d {
            jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * delta);
        }
    }
    jac
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Result of a single step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub z: Vec<f64>,
    pub iterations: usize,
}

/// One step `z1 = z + h sum_i b_i f(t + c_i h, Z_i)`.
///
/// The stage increments `Y_i = Z_i - z` solve
/// `Y_i = h sum_j a_ij f(t + c_j h, z + Y_j)` by simplified Newton with the
/// Jacobian frozen at `(t, z)`; a singular iteration matrix falls back to
/// fixed-point iteration. `h` may be negative.
pub fn rk_step(
    rk: &RKTableau,
    problem: &dyn Problem,
    t: f64,
    z: &[f64],
    h: f64,
    cfg: &SolverConfig,
) -> Result<Step> {
    let s = rk.stages();
    let d = z.len();
    let n = s * d;
    let tol = cfg.tol * max_norm(z).max(1.0);

    let jac = match (cfg.finite_difference, problem.jacobian(t, z)) {
        (false, Some(j)) => j,
        _ => fd_jacobian(problem, t, z),
    };
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..s {
        for j in 0..s {
            let hij = h * rk.a[i][j];
            if hij == 0.0 {
                continue;
            }
            for p in 0..d {
                for q in 0..d {
                    m[(i * d + p, j * d + q)] -= hij * jac[(p, q)];
                }
            }
        }
    }
    let lu = m.lu();
    let newton = lu.is_invertible();
    if !newton {
        log::debug!("singular stage matrix, using fixed-point iteration");
    }

    let mut y = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut zi = vec![0.0; d];
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    loop {
        for i in 0..s {
            for p in 0..d {
                zi[p] = z[p] + y[i * d + p];
            }
            problem.rhs(t + rk.c[i] * h, &zi, &mut f[i * d..(i + 1) * d]);
        }
        for i in 0..s {
            for p in 0..d {
                let hs: f64 = (0..s).map(|j| rk.a[i][j] * f[j * d + p]).sum();
                g[i * d + p] = y[i * d + p] - h * hs;
            }
        }
        if g.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let residual = max_norm(&g);
        if residual <= tol {
            break;
        }
        if iterations >= cfg.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        if newton {
            let delta = lu
                .solve(&DVector::from_column_slice(&g))
                .ok_or(Error::NonFinite)?;
            for (yk, dk) in y.iter_mut().zip(delta.iter()) {
                *yk -= dk;
            }
        } else {
            for (yk, gk) in y.iter_mut().zip(&g) {
                *yk -= gk;
            }
        }
    }

    let mut z1 = z.to_vec();
    for p in 0..d {
        let inc: f64 = (0..s).map(|i| rk.b[i] * f[i * d + p]).sum();
        z1[p] += h * inc;
    }
    if z1.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(Step { z: z1, iterations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Newton iterations spent on the step ending at each time (0 for the start).
    pub newton_iters: Vec<usize>,
    /// `H(z_n)`, when the problem has a Hamiltonian.
    pub invariants: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    /// Rows `t,z_1..z_d,H,newton_iters` with 17 significant digits; `H` is
    /// left empty when unknown.
    pub fn to_csv(&self) -> String {
        let d = self.states.first().map_or(0, |z| z.len());
        let mut out = String::from("t");
        for k in 1..=d {
            let _ = write!(out, ",z_{k}");
        }
        out.push_str(",H,newton_iters\n");
        for (n, (t, z)) in self.times.iter().zip(&self.states).enumerate() {
            let _ = write!(out, "{t:.16e}");
            for v in z {
                let _ = write!(out, ",{v:.16e}");
            }
            match &self.invariants {
                Some(h) => {
                    let _ = write!(out, ",{:.16e}", h[n]);
                }
                None => out.push(','),
            }
            let _ = writeln!(out, ",{}", self.newton_iters[n]);
        }
        out
    }
}

/// Number of steps of size `h` spanning `[t0, t1]`, if it is an integer up
/// to rounding.
pub fn step_count(t0: f64, t1: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(Error::StepMismatch { t0, t1, h });
    }
    let n = (t1 - t0) / h;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::StepMismatch { t0, t1, h });
    }
    Ok(rounded as usize)
}

/// Repeated [`rk_step`] from `t0` to `t1` with uniform step `h`.
pub fn integrate(
    rk: &RKTableau,
    problem: &dyn Problem,
    z0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let n = step_count(t0, t1, h)?;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut iters = Vec::with_capacity(n + 1);
    let mut energy: Option<Vec<f64>> = problem.hamiltonian(z0).map(|e| {
        let mut v = Vec::with_capacity(n + 1);
        v.push(e);
        v
    });
    times.push(t0);
    states.push(z0.to_vec());
    iters.push(0);
    let mut z = z0.to_vec();
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let step = rk_step(rk, problem, t, &z, h, cfg).map_err(|e| Error::StepFailed {
            step: k + 1,
            source: Box::new(e),
        })?;
        z = step.z;
        times.push(if k + 1 == n {
            t1
        } else {
            t0 + (k + 1) as f64 * h
        });
        if let (Some(v), Some(e)) = (energy.as_mut(), problem.hamiltonian(&z)) {
            v.push(e);
        } else {
            energy = None;
        }
        states.push(z.clone());
        iters.push(step.iterations);
    }
    Ok(Trajectory {
        times,
        states,
        newton_iters: iters,
        invariants: energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub max_drift: f64,
    pub final_drift: f64,
    /// Least-squares slope of `H_n - H_0` against the step index.
    pub linear_fit_rate: f64,
}

pub fn invariant_drift(traj: &Trajectory) -> Result<Drift> {
    let h = traj
        .invariants
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("trajectory carries no invariant".into()))?;
    let h0 = h[0];
    let dev: Vec<f64> = h.iter().map(|v| v - h0).collect();
    let max_drift = dev.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let final_drift = dev.last().map_or(0.0, |v| v.abs());
    let n = dev.len() as f64;
    let linear_fit_rate = if dev.len() < 2 {
        0.0
    } else {
        let mean_x = (n - 1.0) / 2.0;
        let mean_y = dev.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (k, y) in dev.iter().enumerate() {
            let dx = k as f64 - mean_x;
            sxy += dx * (y - mean_y);
            sxx += dx * dx;
        }
        sxy / sxx
    };
    Ok(Drift {
        max_drift,
        final_drift,
        linear_fit_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`.
    pub slope: f64,
    /// Slopes between consecutive step sizes.
    pub pair_slopes: Vec<f64>,
    /// `"exact"` or `"refined"` (same method at `h_min / 20`).
    pub reference: String,
}

/// Convergence order at `t1` measured over the step sizes `hs`.
///
/// Each run is independent and executed on its own thread.
pub fn empirical_order(
    rk: &RKTableau,
    problem: &dyn Problem,
    t0: f64,
    t1: f64,
    hs: &[f64],
    cfg: &SolverConfig,
) -> Result<OrderEstimate> {
    if hs.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two step sizes".into(),
        ));
    }
    let z0 = problem.initial_state();
    let final_state = |h: f64| -> Result<Vec<f64>> {
        Ok(integrate(rk, problem, &z0, t0, t1, h, cfg)?
            .final_state()
            .to_vec())
    };
    let (reference, kind) = match problem.exact(t0, &z0, t1) {
        Some(z) => (z, "exact"),
        None => {
            let h_min = hs.iter().cloned().fold(f64::INFINITY, f64::min);
            (final_state(h_min / 20.0)?, "refined")
        }
    };
    let results: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = hs
            .iter()
            .map(|&h| scope.spawn(move || final_state(h)))
            .collect();
        handles
            .into_iter()
            .map(|hd| hd.join().expect("integration thread panicked"))
            .collect()
    });
    let mut errors = Vec::with_capacity(hs.len());
    for r in results {
        let z = r?;
        let e = z
            .iter()
            .zip(&reference)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        errors.push(e);
    }

    let i_max = (0..hs.len())
        .max_by(|&i, &j| hs[i].total_cmp(&hs[j]))
        .expect("non-empty step list");
    let floor = 100.0 * cfg.tol;
    if !(errors[i_max] > floor) {
        return Err(Error::InstrumentationLimit {
            error: errors[i_max],
            floor,
        });
    }

    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = errors
        .iter()
        .map(|e| e.max(f64::MIN_POSITIVE).ln())
        .collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let pair_slopes = lx
        .windows(2)
        .zip(ly.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(OrderEstimate {
        hs: hs.to_vec(),
        errors,
        slope: sxy / sxx,
        pair_slopes,
        reference: kind.into(),
    })
}

/// `h_0, h_0 / ratio, ..` with `count` entries.
pub fn geometric_steps(h0: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| h0 / ratio.powi(k as i32)).collect()
}
