//! Order conditions, structure residuals and linear stability of tableaux.

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use crate::cstab::ContinuousTableau;
use crate::error::Result;
use crate::poly::Poly;
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::reduce::RKTableau;

pub const DEFAULT_LEVEL_TOL: f64 = 1e-10;
pub const MAX_LEVEL: usize = 12;

/// Levels of the simplifying assumptions `B(rho)`, `C(alpha)`, `D(beta)`.
///
/// For continuous tableaux the same struct carries `(xi, eta, zeta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Levels {
    pub rho: usize,
    pub alpha: usize,
    pub beta: usize,
}

impl Levels {
    pub fn new(rho: usize, alpha: usize, beta: usize) -> Self {
        Levels { rho, alpha, beta }
    }

    /// `min(rho, 2 alpha + 2, alpha + beta + 1)`.
    pub fn order_bound(&self) -> usize {
        order_bound(*self)
    }
}

pub fn order_bound(l: Levels) -> usize {
    l.rho.min(2 * l.alpha + 2).min(l.alpha + l.beta + 1)
}

/// Length of the run `k = 1, 2, ..` for which `holds(k)` is true, capped at `max_k`.
fn run_length(max_k: usize, mut holds: impl FnMut(usize) -> bool) -> usize {
    (1..=max_k).take_while(|&k| holds(k)).count()
}

/// Discrete levels from the moment sums, each a consecutive run from `k = 1`.
pub fn simplifying_levels(rk: &RKTableau, max_k: usize, tol: f64) -> Levels {
    let max_k = max_k.min(MAX_LEVEL);
    let s = rk.stages();
    let (a, b, c) = (&rk.a, &rk.b, &rk.c);
    let pw = |x: f64, k: usize| x.powi(k as i32);

    let rho = run_length(max_k, |k| {
        let sum: f64 = (0..s).map(|i| b[i] * pw(c[i], k - 1)).sum();
        (sum - 1.0 / k as f64).abs() <= tol
    });
    let alpha = run_length(max_k, |k| {
        (0..s).all(|i| {
            let sum: f64 = (0..s).map(|j| a[i][j] * pw(c[j], k - 1)).sum();
            (sum - pw(c[i], k) / k as f64).abs() <= tol
        })
    });
    let beta = run_length(max_k, |k| {
        (0..s).all(|j| {
            let sum: f64 = (0..s).map(|i| b[i] * pw(c[i], k - 1) * a[i][j]).sum();
            (sum - b[j] * (1.0 - pw(c[j], k)) / k as f64).abs() <= tol
        })
    });
    Levels { rho, alpha, beta }
}

/// Continuous levels `(xi, eta, zeta)` by exact weighted moment integration.
pub fn cs_simplifying_levels(ct: &ContinuousTableau, max_k: usize) -> Levels {
    cs_simplifying_levels_tol(ct, max_k, DEFAULT_LEVEL_TOL)
}

pub fn cs_simplifying_levels_tol(ct: &ContinuousTableau, max_k: usize, tol: f64) -> Levels {
    let max_k = max_k.min(MAX_LEVEL);
    let basis = ct.basis();
    let bhat = ct.bhat_poly();

    let xi = run_length(max_k, |k| {
        (basis.inner(&bhat, &Poly::x_pow(k - 1)) - 1.0 / k as f64).abs() <= tol
    });
    let eta = run_length(max_k, |k| {
        let target = Poly::x_pow(k).scale(1.0 / k as f64);
        (&ct.a_sigma_moment(k) - &target).max_abs_coeff() <= tol
    });
    let zeta = run_length(max_k, |k| {
        // int Bhat(tau) tau^(k-1) Ahat(tau, sigma) w(tau) dtau, as a polynomial in sigma
        let weight_poly = &bhat * &Poly::x_pow(k - 1);
        let m: Vec<f64> = basis
            .polys()
            .iter()
            .map(|p| basis.inner(&weight_poly, p))
            .collect();
        let n = m.len();
        let coeffs: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| m[i] * ct.alpha()[i][j]).sum())
            .collect();
        let lhs = basis.combine(&coeffs);
        let rhs = (&bhat * &(&Poly::constant(1.0) - &Poly::x_pow(k))).scale(1.0 / k as f64);
        (&lhs - &rhs).max_abs_coeff() <= tol
    });
    Levels {
        rho: xi,
        alpha: eta,
        beta: zeta,
    }
}

/// Order bound for a continuous tableau reduced by a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReductionBound {
    /// Continuous levels after removing terms that vanish at the nodes.
    pub continuous: Levels,
    /// Clamped `(rho, alpha, beta)`.
    pub levels: Levels,
    pub pi_a_tau: usize,
    pub pi_a_sigma: usize,
    pub pi_b: usize,
    /// Quadrature order (exactness degree plus one).
    pub p: usize,
    pub bound: usize,
}

/// `rho = min(xi, p - pi_B)`, `alpha = min(eta, p - pi_A^sigma)`,
/// `beta = min(zeta, p - pi_A^tau - pi_B)` and their min-formula bound.
///
/// For an `s`-point Gauss-Christoffel rule every term carrying `P_s` in the
/// nodal variable vanishes; those terms are dropped first.
pub fn reduction_order_bound(ct: &ContinuousTableau, rule: &QuadratureRule) -> ReductionBound {
    let ct = match rule.kind {
        RuleKind::GaussChristoffel => ct.without_sigma_index(rule.len()),
        _ => ct.clone(),
    };
    let cont = cs_simplifying_levels(&ct, MAX_LEVEL);
    let (pi_a_tau, pi_a_sigma, pi_b) = ct.degrees();
    let p = rule.order;
    let levels = Levels {
        rho: cont.rho.min(p.saturating_sub(pi_b)),
        alpha: cont.alpha.min(p.saturating_sub(pi_a_sigma)),
        beta: cont.beta.min(p.saturating_sub(pi_a_tau + pi_b)),
    };
    ReductionBound {
        continuous: cont,
        levels,
        pi_a_tau,
        pi_a_sigma,
        pi_b,
        p,
        bound: levels.order_bound(),
    }
}

/// `max_ij |b_i a_ij + b_j a_ji - b_i b_j|`.
pub fn symplectic_residual(rk: &RKTableau) -> f64 {
    let s = rk.stages();
    let mut worst: f64 = 0.0;
    for i in 0..s {
        for j in 0..s {
            let m = rk.b[i] * rk.a[i][j] + rk.b[j] * rk.a[j][i] - rk.b[i] * rk.b[j];
            worst = worst.max(m.abs());
        }
    }
    worst
}

/// Max of `|a_{s+1-i,s+1-j} + a_ij - b_j|`, `|b_{s+1-i} - b_i|`, `|c_{s+1-i} + c_i - 1|`.
pub fn symmetric_residual(rk: &RKTableau) -> f64 {
    let s = rk.stages();
    let mut worst: f64 = 0.0;
    for i in 0..s {
        let ri = s - 1 - i;
        worst = worst
            .max((rk.b[ri] - rk.b[i]).abs())
            .max((rk.c[ri] + rk.c[i] - 1.0).abs());
        for j in 0..s {
            let rj = s - 1 - j;
            worst = worst.max((rk.a[ri][rj] + rk.a[i][j] - rk.b[j]).abs());
        }
    }
    worst
}

const GRID: usize = 20;

fn interior_grid() -> impl Iterator<Item = f64> {
    (0..GRID).map(|k| (k as f64 + 0.5) / GRID as f64)
}

/// Continuous symplecticity residual on a 20x20 interior grid, on the
/// polynomial parts (the weight factor `w(tau) w(sigma)` divides out).
pub fn cs_symplectic_residual(ct: &ContinuousTableau) -> f64 {
    let mut worst: f64 = 0.0;
    for t in interior_grid() {
        let bt = ct.bhat(t);
        for s in interior_grid() {
            let bs = ct.bhat(s);
            let r = bt * ct.ahat(t, s) + bs * ct.ahat(s, t) - bt * bs;
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Continuous symmetry residual on a 20x20 interior grid:
/// `Ahat(tau, sigma) + Ahat(1 - tau, 1 - sigma) - Bhat(sigma)` for symmetric
/// weights, `A(tau, sigma) + A(1 - tau, 1 - sigma) - B(sigma)` otherwise.
pub fn cs_symmetric_residual(ct: &ContinuousTableau) -> Result<f64> {
    let w = ct.weight();
    let mut worst: f64 = 0.0;
    for t in interior_grid() {
        for s in interior_grid() {
            let r = if w.is_symmetric() {
                ct.ahat(t, s) + ct.ahat(1.0 - t, 1.0 - s) - ct.bhat(s)
            } else {
                ct.eval_a(t, s)? + ct.eval_a(1.0 - t, 1.0 - s)? - ct.eval_b(s)?
            };
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// `R(z) = P(z) / Q(z)` with coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalFunction {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

fn horner(coeffs: &[f64], z: Complex<f64>) -> Complex<f64> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl RationalFunction {
    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        horner(&self.numerator, z) / horner(&self.denominator, z)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(Complex::new(x, 0.0)).re
    }

    /// Both polynomials rescaled so that the denominator's constant term is `q0`.
    pub fn scaled(&self, q0: f64) -> RationalFunction {
        let f = q0 / self.denominator[0];
        RationalFunction {
            numerator: self.numerator.iter().map(|c| c * f).collect(),
            denominator: self.denominator.iter().map(|c| c * f).collect(),
        }
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.numerator.len() - 1, self.denominator.len() - 1)
    }

    /// Roots of the denominator (companion-matrix eigenvalues).
    pub fn poles(&self) -> Vec<Complex<f64>> {
        poly_roots(&self.denominator)
    }
}

fn poly_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Coefficients of `det(I - z M) = 1 + c_1 z + .. + c_s z^s` (Faddeev-LeVerrier).
fn det_i_minus_z(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![1.0];
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        mk = m * (&mk + &id * c_prev);
        let ck = -mk.trace() / k as f64;
        coeffs.push(ck);
        c_prev = ck;
    }
    coeffs
}

fn trim(mut v: Vec<f64>) -> Vec<f64> {
    const TINY: f64 = 1e-13;
    while v.len() > 1 && v.last().is_some_and(|c| c.abs() < TINY) {
        v.pop();
    }
    v
}

/// `R(z) = det(I - zA + z 1 b^T) / det(I - zA)`, normalised to `Q(0) = 1`.
pub fn stability_function(rk: &RKTableau) -> RationalFunction {
    let s = rk.stages();
    let a = DMatrix::from_fn(s, s, |i, j| rk.a[i][j]);
    let num_m = DMatrix::from_fn(s, s, |i, j| rk.a[i][j] - rk.b[j]);
    RationalFunction {
        numerator: trim(det_i_minus_z(&num_m)),
        denominator: trim(det_i_minus_z(&a)),
    }
}

/// `1 + z b^T (I - zA)^{-1} 1` by a direct complex solve.
pub fn stability_direct(rk: &RKTableau, z: Complex<f64>) -> Option<Complex<f64>> {
    let s = rk.stages();
    let m = DMatrix::from_fn(s, s, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        Complex::new(d, 0.0) - z * rk.a[i][j]
    });
    let ones = DVector::from_element(s, Complex::new(1.0, 0.0));
    let x = m.lu().solve(&ones)?;
    let btx: Complex<f64> = rk.b.iter().zip(x.iter()).map(|(b, xi)| xi * *b).sum();
    Some(Complex::new(1.0, 0.0) + z * btx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AStabilityCertificate {
    pub a_stable: bool,
    pub samples: usize,
    /// Imaginary-axis sample with the largest `|R(iy)|`.
    pub worst_y: f64,
    pub worst_modulus: f64,
    /// Denominator roots as `(re, im)`.
    pub poles: Vec<(f64, f64)>,
    pub reason: String,
}

const BOUNDARY_SAMPLES: usize = 2000;
const BOUNDARY_SLACK: f64 = 1e-12;

/// Imaginary-axis sampling on `y in [1e-3, 1e6]` plus pole location.
pub fn a_stability(r: &RationalFunction) -> AStabilityCertificate {
    let (dn, dd) = r.degrees();
    let mut worst_y = 0.0;
    let mut worst_modulus: f64 = 0.0;
    for k in 0..BOUNDARY_SAMPLES {
        let e = -3.0 + 9.0 * k as f64 / (BOUNDARY_SAMPLES - 1) as f64;
        let y = 10f64.powf(e);
        let m = r.eval(Complex::new(0.0, y)).norm();
        if !(m <= worst_modulus) {
            worst_modulus = m;
            worst_y = y;
        }
    }
    let poles = r.poles();
    let pole_list: Vec<(f64, f64)> = poles.iter().map(|p| (p.re, p.im)).collect();
    let reason;
    let a_stable = if dn > dd {
        reason = format!("numerator degree {dn} exceeds denominator degree {dd}");
        false
    } else if !(worst_modulus <= 1.0 + BOUNDARY_SLACK) {
        reason = format!("|R(iy)| = {worst_modulus} > 1 at y = {worst_y}");
        false
    } else if let Some(p) = poles.iter().find(|p| !(p.re > 0.0)) {
        reason = format!("pole {} {:+}i in the closed left half-plane", p.re, p.im);
        false
    } else {
        reason = format!(
            "|R(iy)| <= 1 + {BOUNDARY_SLACK:e} on {BOUNDARY_SAMPLES} samples and all {} poles in Re z > 0",
            poles.len()
        );
        true
    };
    AStabilityCertificate {
        a_stable,
        samples: BOUNDARY_SAMPLES,
        worst_y,
        worst_modulus,
        poles: pole_list,
        reason,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub s: usize,
    pub rho: usize,
    pub alpha: usize,
    pub beta: usize,
    pub order_bound: usize,
    pub row_sum_residual: f64,
    pub symplectic_residual: f64,
    pub symmetric_residual: f64,
    pub stability: RationalFunction,
    pub a_stable: bool,
    pub certificate: AStabilityCertificate,
}

pub fn analyze(rk: &RKTableau) -> AnalysisReport {
    let levels = simplifying_levels(rk, MAX_LEVEL, DEFAULT_LEVEL_TOL);
    let stability = stability_function(rk);
    let certificate = a_stability(&stability);
    AnalysisReport {
        s: rk.stages(),
        rho: levels.rho,
        alpha: levels.alpha,
        beta: levels.beta,
        order_bound: levels.order_bound(),
        row_sum_residual: rk.row_sum_residual(),
        symplectic_residual: symplectic_residual(rk),
        symmetric_residual: symmetric_residual(rk),
        stability,
        a_stable: certificate.a_stable,
        certificate,
    }
}

impl AnalysisReport {
    pub fn summary(&self) -> String {
        format!(
            "s = {}  B({}) C({}) D({})  order >= {}\n\
             symplectic residual {:.3e}  symmetric residual {:.3e}\n\
             R(z) numerator {:?} / denominator {:?}\n\
             A-stable: {} ({})",
            self.s,
            self.rho,
            self.alpha,
            self.beta,
            self.order_bound,
            self.symplectic_residual,
            self.symmetric_residual,
            self.stability.numerator,
            self.stability.denominator,
            self.a_stable,
            self.certificate.reason
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstab::Provenance;

    fn tab(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> RKTableau {
        RKTableau::new(a, b, c, Provenance::new("test")).unwrap()
    }

    fn midpoint() -> RKTableau {
        tab(vec![vec![0.5]], vec![1.0], vec![0.5])
    }

    fn euler() -> RKTableau {
        tab(vec![vec![0.0]], vec![1.0], vec![0.0])
    }

    fn gauss2() -> RKTableau {
        let r = 3f64.sqrt() / 6.0;
        tab(
            vec![vec![0.25, 0.25 - r], vec![0.25 + r, 0.25]],
            vec![0.5, 0.5],
            vec![0.5 - r, 0.5 + r],
        )
    }

    fn lobatto3() -> RKTableau {
        tab(
            vec![
                vec![0.0, 0.0, 0.0],
                vec![5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
                vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            ],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 1.0],
        )
    }

    #[test]
    fn midpoint_levels() {
        let l = simplifying_levels(&midpoint(), 12, 1e-10);
        assert_eq!(l, Levels::new(2, 1, 1));
        assert_eq!(l.order_bound(), 2);
    }

    #[test]
    fn gauss2_levels() {
        let l = simplifying_levels(&gauss2(), 12, 1e-10);
        assert_eq!(l, Levels::new(4, 2, 2));
        assert_eq!(l.order_bound(), 4);
        assert!(simplifying_levels(&lobatto3(), 12, 1e-10).order_bound() >= 4);
    }

    #[test]
    fn order_bound_formula() {
        assert_eq!(order_bound(Levels::new(2, 1, 1)), 2);
        assert_eq!(order_bound(Levels::new(9, 3, 0)), 4);
    }

    #[test]
    fn residuals() {
        assert_eq!(symplectic_residual(&midpoint()), 0.0);
        assert_eq!(symmetric_residual(&midpoint()), 0.0);
        assert!(symplectic_residual(&lobatto3()) > 0.01);
        assert!((symmetric_residual(&euler()) - 1.0).abs() < 1e-15);
        assert!(symplectic_residual(&gauss2()) < 1e-15);
    }

    #[test]
    fn stability_functions() {
        let r = stability_function(&midpoint()).scaled(2.0);
        assert_eq!(r.numerator.len(), 2);
        assert!((r.numerator[0] - 2.0).abs() < 1e-14 && (r.numerator[1] - 1.0).abs() < 1e-14);
        assert!((r.denominator[1] + 1.0).abs() < 1e-14);

        let r = stability_function(&lobatto3()).scaled(12.0);
        let want_n = [12.0, 6.0, 1.0];
        let want_d = [12.0, -6.0, 1.0];
        assert_eq!(r.degrees(), (2, 2));
        for k in 0..3 {
            assert!((r.numerator[k] - want_n[k]).abs() < 1e-12);
            assert!((r.denominator[k] - want_d[k]).abs() < 1e-12);
        }

        let r = stability_function(&euler());
        assert_eq!(r.numerator, vec![1.0, 1.0]);
        assert_eq!(r.denominator, vec![1.0]);
    }

    #[test]
    fn determinant_form_matches_direct_solve() {
        for rk in [midpoint(), gauss2(), lobatto3()] {
            let r = stability_function(&rk);
            for (x, y) in [(-0.3, 0.2), (1.5, -2.0), (-4.0, 0.0), (0.0, 7.0)] {
                let z = Complex::new(x, y);
                let d = stability_direct(&rk, z).unwrap();
                assert!((r.eval(z) - d).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn a_stability_verdicts() {
        assert!(a_stability(&stability_function(&midpoint())).a_stable);
        assert!(a_stability(&stability_function(&lobatto3())).a_stable);
        let cert = a_stability(&stability_function(&euler()));
        assert!(!cert.a_stable);
        let r = stability_function(&euler());
        assert!((r.eval(Complex::new(0.0, 2.0)).norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn report_is_serializable() {
        let rep = analyze(&midpoint());
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["order_bound"], 2);
        assert_eq!(v["a_stable"], true);
    }
}
