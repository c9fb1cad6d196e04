//! Continuous-stage tableaux `(A(tau, sigma), B(tau), C(tau) = tau)`.
//!
//! Coefficients are held as finite expansions in an orthonormal basis
//! `{P_k}` of a weight `w`:
//!
//! ```text
//! A(tau, sigma) = Ahat(tau, sigma) w(sigma),  Ahat = sum_ij alpha[i][j] P_i(tau) P_j(sigma)
//! B(tau)        = Bhat(tau) w(tau),           Bhat = sum_j  lambda[j]   P_j(tau)
//! ```
//!
//! Column `j` of `alpha` is the expansion of `phi_j(tau)`, the factor that
//! multiplies `P_j(sigma)`. Every coefficient not set by a constructor is
//! zero.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::orthopoly::{OrthoBasis, WeightSpec, MAX_DEGREE};
use crate::poly::Poly;
use crate::quadrature::interpolatory_weights;

/// Where a tableau came from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Provenance {
            construction: construction.into(),
            ..Default::default()
        }
    }

    pub fn with_weight(mut self, w: WeightSpec) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_param(mut self, key: impl Into<String>, v: f64) -> Self {
        self.params.insert(key.into(), v);
        self
    }
}

/// Truncation pattern of the orthogonal-expansion family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `A` and `B` both summed over `j < r`.
    Balanced,
    /// `A` summed over `j <= r`, `B` over `j < r`.
    ExtendedA,
    /// `A` summed over `j < r`, `B` over `j <= r`.
    ExtendedB,
}

/// Sparse coefficient map `(i, j) -> value`.
pub type IndexMap = BTreeMap<(usize, usize), f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTableau {
    basis: OrthoBasis,
    lambda: Vec<f64>,
    alpha: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl ContinuousTableau {
    /// Assemble from raw coefficients; both are zero-padded to the basis size.
    pub fn from_parts(
        basis: OrthoBasis,
        mut lambda: Vec<f64>,
        mut alpha: Vec<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = basis.n_max() + 1;
        if lambda.len() > n || alpha.len() > n || alpha.iter().any(|row| row.len() > n) {
            return Err(Error::DegreeOutOfRange {
                index: lambda
                    .len()
                    .max(alpha.len())
                    .max(alpha.iter().map(|r| r.len()).max().unwrap_or(0))
                    - 1,
                n_max: basis.n_max(),
            });
        }
        if lambda
            .iter()
            .chain(alpha.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        lambda.resize(n, 0.0);
        alpha.resize(n, Vec::new());
        for row in alpha.iter_mut() {
            row.resize(n, 0.0);
        }
        Ok(ContinuousTableau {
            basis,
            lambda,
            alpha,
            provenance,
        })
    }

    pub fn basis(&self) -> &OrthoBasis {
        &self.basis
    }

    pub fn weight(&self) -> WeightSpec {
        self.basis.weight()
    }

    /// Expansion coefficients of `Bhat`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `alpha[i][j]`: coefficient of `P_i(tau) P_j(sigma)` in `Ahat`.
    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn set_provenance(&mut self, p: Provenance) {
        self.provenance = p;
    }

    /// `Bhat` as a polynomial.
    pub fn bhat_poly(&self) -> Poly {
        self.basis.combine(&self.lambda)
    }

    /// `phi_j(tau)`, the factor of `P_j(sigma)` in `Ahat`.
    pub fn phi(&self, j: usize) -> Poly {
        let col: Vec<f64> = self.alpha.iter().map(|row| row[j]).collect();
        self.basis.combine(&col)
    }

    pub fn bhat(&self, tau: f64) -> f64 {
        dot(&self.lambda, &self.basis.eval_all(tau))
    }

    pub fn ahat(&self, tau: f64, sigma: f64) -> f64 {
        let pt = self.basis.eval_all(tau);
        let ps = self.basis.eval_all(sigma);
        self.alpha
            .iter()
            .zip(pt.iter())
            .map(|(row, &pi)| pi * dot(row, &ps))
            .sum()
    }

    /// `A(tau, sigma) = Ahat(tau, sigma) w(sigma)`.
    pub fn eval_a(&self, tau: f64, sigma: f64) -> Result<f64> {
        check_unit(tau)?;
        check_unit(sigma)?;
        Ok(self.ahat(tau, sigma) * self.weight().eval(sigma)?)
    }

    /// `B(tau) = Bhat(tau) w(tau)`.
    pub fn eval_b(&self, tau: f64) -> Result<f64> {
        check_unit(tau)?;
        Ok(self.bhat(tau) * self.weight().eval(tau)?)
    }

    /// `int_0^1 Ahat(tau, sigma) w(sigma) sigma^(k-1) dsigma` as a polynomial in `tau`.
    pub fn a_sigma_moment(&self, k: usize) -> Poly {
        let xk = Poly::x_pow(k - 1);
        let m: Vec<f64> = self
            .basis
            .polys()
            .iter()
            .map(|p| self.basis.inner(p, &xk))
            .collect();
        let coeffs: Vec<f64> = self.alpha.iter().map(|row| dot(row, &m)).collect();
        self.basis.combine(&coeffs)
    }

    /// Max coefficient residual of `int_0^1 A(tau, sigma) dsigma = tau`.
    pub fn consistency_residual(&self) -> f64 {
        (&self.a_sigma_moment(1) - &Poly::x()).max_abs_coeff()
    }

    /// Largest row / column index carrying a nonzero coefficient:
    /// `(deg_tau Ahat, deg_sigma Ahat, deg Bhat)`.
    pub fn degrees(&self) -> (usize, usize, usize) {
        const TINY: f64 = 1e-14;
        let mut a_tau = 0;
        let mut a_sigma = 0;
        for (i, row) in self.alpha.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.abs() > TINY {
                    a_tau = a_tau.max(i);
                    a_sigma = a_sigma.max(j);
                }
            }
        }
        let b = self
            .lambda
            .iter()
            .rposition(|v| v.abs() > TINY)
            .unwrap_or(0);
        (a_tau, a_sigma, b)
    }

    /// Drop every term whose `sigma` factor is `P_index`, and `lambda[index]`.
    ///
    /// At the nodes of the `index`-point Gauss-Christoffel rule `P_index`
    /// vanishes, so the reduced Butcher tableau is unchanged.
    pub fn without_sigma_index(&self, index: usize) -> ContinuousTableau {
        let mut out = self.clone();
        if index < out.lambda.len() {
            out.lambda[index] = 0.0;
            for row in out.alpha.iter_mut() {
                row[index] = 0.0;
            }
        }
        out
    }

    /// The same tableau expanded in a basis of larger capacity.
    pub fn widened(&self, n_max: usize) -> Result<ContinuousTableau> {
        if n_max <= self.basis.n_max() {
            return Ok(self.clone());
        }
        let basis = self.basis.with_degree(n_max)?;
        ContinuousTableau::from_parts(
            basis,
            self.lambda.clone(),
            self.alpha.clone(),
            self.provenance.clone(),
        )
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { point: x })
    }
}

fn require_capacity(basis: &OrthoBasis, needed: usize, what: &str) -> Result<()> {
    if basis.n_max() < needed {
        Err(Error::InvalidParameter(format!(
            "{what} needs a basis of degree >= {needed}, got {}",
            basis.n_max()
        )))
    } else {
        Ok(())
    }
}

/// Orthogonal-expansion truncation of `A` and `B` after `r` terms.
///
/// `A = sum_j (int_0^tau P_j) P_j(sigma) w(sigma)`,
/// `B = sum_j (int_0^1 P_j) P_j(tau) w(tau)`, with the summation limits
/// chosen by `variant`.
pub fn truncated_family(
    basis: &OrthoBasis,
    r: usize,
    variant: Variant,
) -> Result<ContinuousTableau> {
    if r == 0 {
        return Err(Error::InvalidParameter(
            "truncation index r must be >= 1".into(),
        ));
    }
    require_capacity(basis, r + 1, "truncated family")?;
    let (a_terms, b_terms) = match variant {
        Variant::Balanced => (r, r),
        Variant::ExtendedA => (r + 1, r),
        Variant::ExtendedB => (r, r + 1),
    };
    let n = basis.n_max() + 1;
    let mut alpha = vec![vec![0.0; n]; n];
    for j in 0..a_terms {
        let phi = basis.expand(&basis.primitive(j)?)?;
        for (i, v) in phi.into_iter().enumerate() {
            alpha[i][j] = v;
        }
    }
    let lambda: Vec<f64> = (0..b_terms)
        .map(|j| basis.integral01(j))
        .collect::<Result<_>>()?;
    let name = match variant {
        Variant::Balanced => "truncated_balanced",
        Variant::ExtendedA => "truncated_extended_a",
        Variant::ExtendedB => "truncated_extended_b",
    };
    ContinuousTableau::from_parts(
        basis.clone(),
        lambda,
        alpha,
        Provenance::new(name).with_weight(basis.weight()).with_r(r),
    )
}

/// `xi_n = 1 / (2 sqrt(4 n^2 - 1))`.
pub fn legendre_xi(n: usize) -> f64 {
    let n = n as f64;
    0.5 / (4.0 * n * n - 1.0).sqrt()
}

/// Legendre-basis tableau with `B = 1` satisfying `C(eta)` and `D(zeta)`:
///
/// ```text
/// A = 1/2 + sum_{j<=N1} xi_{j+1} L_{j+1}(tau) L_j(sigma)
///         - sum_{j<=N2} xi_{j+1} L_{j+1}(sigma) L_j(tau)
///         + sum_{i>=zeta, j>=eta} extra(i,j) L_i(tau) L_j(sigma)
/// ```
///
/// with `N1 = max(eta-1, zeta-2)` and `N2 = max(eta-2, zeta-1)`.
pub fn legendre_general(eta: usize, zeta: usize, extra: &IndexMap) -> Result<ContinuousTableau> {
    if eta == 0 {
        return Err(Error::InvalidParameter(
            "eta must be >= 1 for a consistent tableau".into(),
        ));
    }
    for (&(i, j), v) in extra {
        if i < zeta || j < eta {
            return Err(Error::InvalidParameter(format!(
                "extra coefficient ({i},{j}) must satisfy i >= zeta={zeta}, j >= eta={eta}"
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "extra ({i},{j}) not finite"
            )));
        }
    }
    let n1 = (eta as isize - 1).max(zeta as isize - 2);
    let n2 = (eta as isize - 2).max(zeta as isize - 1);
    let top = extra
        .keys()
        .map(|&(i, j)| i.max(j))
        .chain([(n1 + 1).max(n2 + 1).max(0) as usize])
        .max()
        .unwrap_or(0);
    // one spare degree so that the C/D checks can expand x * P_top
    let degree = (top + 1).max(2);
    if degree > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    let basis = OrthoBasis::build(WeightSpec::legendre(), degree)?;
    let n = degree + 1;
    let mut alpha = vec![vec![0.0; n]; n];
    alpha[0][0] = 0.5;
    for j in 0..=n1.max(-1) {
        if j < 0 {
            break;
        }
        let j = j as usize;
        alpha[j + 1][j] += legendre_xi(j + 1);
    }
    for j in 0..=n2.max(-1) {
        if j < 0 {
            break;
        }
        let j = j as usize;
        alpha[j][j + 1] -= legendre_xi(j + 1);
    }
    for (&(i, j), &v) in extra {
        alpha[i][j] += v;
    }
    let mut prov = Provenance::new("legendre_general")
        .with_weight(WeightSpec::legendre())
        .with_param("eta", eta as f64)
        .with_param("zeta", zeta as f64);
    for (&(i, j), &v) in extra {
        prov = prov.with_param(format!("alpha_{i}_{j}"), v);
    }
    ContinuousTableau::from_parts(basis, vec![1.0], alpha, prov)
}

/// `Ahat(tau, sigma) = Bhat(sigma) (1/2 + sum coeffs(i,j) P_i(tau) P_j(sigma))`.
fn scaled_by_b(basis: &OrthoBasis, lambda: &[f64], coeffs: &IndexMap) -> Result<Vec<Vec<f64>>> {
    let n = basis.n_max() + 1;
    let bhat = basis.combine(lambda);
    let mut alpha = vec![vec![0.0; n]; n];
    // constant-in-tau part: Bhat(sigma) / 2 expressed through P_0(tau)
    let p0 = basis.eval(0, 0.5)?;
    for (k, &l) in lambda.iter().enumerate() {
        alpha[0][k] += 0.5 * l / p0;
    }
    for (&(i, j), &v) in coeffs {
        if v == 0.0 {
            continue;
        }
        if i >= n {
            return Err(Error::DegreeOutOfRange {
                index: i,
                n_max: basis.n_max(),
            });
        }
        let prod = &bhat * basis.poly(j)?;
        let gamma = basis.expand(&prod)?;
        for (k, g) in gamma.into_iter().enumerate() {
            alpha[i][k] += v * g;
        }
    }
    Ok(alpha)
}

fn coeff_degree(lambda: &[f64], coeffs: &IndexMap) -> usize {
    let b = lambda.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    coeffs
        .keys()
        .map(|&(i, j)| i.max(j + b))
        .max()
        .unwrap_or(0)
        .max(b)
}

/// Symplectic construction `A = B(sigma) (1/2 + sum skew(i,j) P_i(tau) P_j(sigma))`
/// with `skew(i,j) = -skew(j,i)`.
///
/// The basis is widened as needed to hold `Bhat * P_j`.
pub fn symplectic_skew(
    basis: &OrthoBasis,
    lambda: &[f64],
    skew: &IndexMap,
) -> Result<ContinuousTableau> {
    for (&(i, j), &v) in skew {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "skew ({i},{j}) not finite"
            )));
        }
        if i == j && v != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "skew map has nonzero diagonal entry ({i},{i})"
            )));
        }
        let mirror = skew.get(&(j, i)).copied().unwrap_or(0.0);
        if (v + mirror).abs() > 1e-15 * v.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "skew map is not antisymmetric at ({i},{j}): {v} vs {mirror}"
            )));
        }
    }
    let degree = coeff_degree(lambda, skew).max(basis.n_max());
    let basis = basis.with_degree(degree.min(MAX_DEGREE))?;
    if degree > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    let alpha = scaled_by_b(&basis, lambda, skew)?;
    let mut prov = Provenance::new("symplectic_skew").with_weight(basis.weight());
    for (&(i, j), &v) in skew {
        if i < j {
            prov = prov.with_param(format!("alpha_{i}_{j}"), v);
        }
    }
    ContinuousTableau::from_parts(basis, lambda.to_vec(), alpha, prov)
}

/// Symmetric construction `A = B(sigma) (1/2 + sum odd(i,j) P_i(tau) P_j(sigma))`
/// with `i + j` odd, for a symmetric weight and `B(sigma) = B(1 - sigma)`.
pub fn symmetric_skew(
    basis: &OrthoBasis,
    lambda: &[f64],
    oddsum: &IndexMap,
) -> Result<ContinuousTableau> {
    if !basis.weight().is_symmetric() {
        return Err(Error::InvalidParameter(format!(
            "symmetric construction needs a symmetric weight, got {}",
            basis.weight()
        )));
    }
    for (&(i, j), &v) in oddsum {
        if (i + j) % 2 == 0 && v != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "index ({i},{j}) has even sum"
            )));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "entry ({i},{j}) not finite"
            )));
        }
    }
    if let Some((k, _)) = lambda
        .iter()
        .enumerate()
        .find(|(k, v)| k % 2 == 1 && v.abs() > 1e-15)
    {
        return Err(Error::InvalidParameter(format!(
            "Bhat has odd component lambda[{k}], so B(sigma) != B(1 - sigma)"
        )));
    }
    let degree = coeff_degree(lambda, oddsum).max(basis.n_max());
    if degree > MAX_DEGREE {
        return Err(Error::DegreeCap {
            degree,
            cap: MAX_DEGREE,
        });
    }
    let basis = basis.with_degree(degree)?;
    let alpha = scaled_by_b(&basis, lambda, oddsum)?;
    let mut prov = Provenance::new("symmetric_skew").with_weight(basis.weight());
    for (&(i, j), &v) in oddsum {
        prov = prov.with_param(format!("alpha_{i}_{j}"), v);
    }
    ContinuousTableau::from_parts(basis, lambda.to_vec(), alpha, prov)
}

/// `lambda_j = int_0^1 P_j` for `j < xi`: the minimal `Bhat` meeting `B(xi)`.
pub fn bhat_truncation(basis: &OrthoBasis, xi: usize) -> Result<Vec<f64>> {
    (0..xi).map(|j| basis.integral01(j)).collect()
}

/// Chebyshev (first kind) symplectic tableau with
/// `A = (tau - sigma + 1/2) / (pi sqrt(sigma (1 - sigma)))` and
/// `B = 1 / (pi sqrt(tau (1 - tau)))`; order 2.
pub fn chebyshev_symplectic_pair() -> Result<ContinuousTableau> {
    let basis = OrthoBasis::build(WeightSpec::chebyshev_first(), 3)?;
    let lambda = bhat_truncation(&basis, 2)?;
    // Ahat = int_0^tau T_0 * T_0(sigma) + phi_1 T_1(sigma), phi_1 = -1 / (2 sqrt(pi))
    let n = basis.n_max() + 1;
    let mut alpha = vec![vec![0.0; n]; n];
    for (i, v) in basis.expand(&basis.primitive(0)?)?.into_iter().enumerate() {
        alpha[i][0] = v;
    }
    let phi1 = -1.0 / (2.0 * std::f64::consts::PI.sqrt());
    alpha[0][1] = phi1 / basis.eval(0, 0.5)?;
    ContinuousTableau::from_parts(
        basis,
        lambda,
        alpha,
        Provenance::new("chebyshev_symplectic_pair").with_weight(WeightSpec::chebyshev_first()),
    )
}

/// One-parameter symplectic and symmetric Chebyshev family.
///
/// `Bhat` meets `B(3)`; the skew part is `mu (T_1(sigma) - T_1(tau)) +
/// nu (T_1(tau) T_2(sigma) - T_2(tau) T_1(sigma))` with
/// `mu = -2 nu / (3 sqrt(pi)) - sqrt(pi) / 4` so that `C(1)` holds.
/// The family is indexed by `omega = 4 sqrt(3) nu / (27 pi)`, in which the
/// 3-stage Gauss-Christoffel reduction is affine.
pub fn chebyshev_symplectic_family(omega: f64) -> Result<ContinuousTableau> {
    use std::f64::consts::PI;
    if !omega.is_finite() {
        return Err(Error::InvalidParameter("omega must be finite".into()));
    }
    let nu = 27.0 * PI * omega / (4.0 * 3f64.sqrt());
    let mu = -2.0 * nu / (3.0 * PI.sqrt()) - PI.sqrt() / 4.0;
    let basis = OrthoBasis::build(WeightSpec::chebyshev_first(), 4)?;
    let lambda = bhat_truncation(&basis, 3)?;
    // mu T_1(sigma) = (mu / T_0) T_0(tau) T_1(sigma)
    let t0 = basis.eval(0, 0.5)?;
    let mut skew = IndexMap::new();
    skew.insert((0, 1), mu / t0);
    skew.insert((1, 0), -mu / t0);
    skew.insert((1, 2), nu);
    skew.insert((2, 1), -nu);
    let mut ct = symplectic_skew(&basis, &lambda, &skew)?;
    ct.set_provenance(
        Provenance::new("chebyshev_symplectic_family")
            .with_weight(WeightSpec::chebyshev_first())
            .with_param("omega", omega)
            .with_param("nu", nu)
            .with_param("mu", mu),
    );
    Ok(ct)
}

/// Energy-preserving collocation tableau
/// `A = sum_i (1 / b_i) int_0^tau l_i(x) dx l_i(sigma)`, `B = 1`, on the
/// Lagrange basis of `nodes`; `weights` are the unweighted interpolatory
/// weights `b_i`.
pub fn hairer_collocation(nodes: &[f64], weights: &[f64]) -> Result<ContinuousTableau> {
    let s = nodes.len();
    if s == 0 || weights.len() != s {
        return Err(Error::InvalidParameter(
            "need matching, non-empty node and weight lists".into(),
        ));
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] <= 1e-14) {
        return Err(Error::DuplicateNodes { node: w[0] });
    }
    if let Some(i) = weights.iter().position(|b| b.abs() < 1e-14) {
        return Err(Error::InvalidParameter(format!(
            "interpolatory weight b_{} vanishes",
            i + 1
        )));
    }
    let degree = s.max(2);
    let basis = OrthoBasis::build(WeightSpec::legendre(), degree)?;
    let n = degree + 1;
    let mut alpha = vec![vec![0.0; n]; n];
    for i in 0..s {
        let others: Vec<f64> = (0..s).filter(|&j| j != i).map(|j| nodes[j]).collect();
        let denom: f64 = others.iter().map(|c| nodes[i] - c).product();
        let ell = Poly::from_roots(&others).scale(1.0 / denom);
        let tau_part = basis.expand(&ell.antiderivative())?;
        let sigma_part = basis.expand(&ell)?;
        for (p, tp) in tau_part.iter().enumerate() {
            for (q, sp) in sigma_part.iter().enumerate() {
                alpha[p][q] += tp * sp / weights[i];
            }
        }
    }
    let mut prov = Provenance::new("hairer_collocation").with_weight(WeightSpec::legendre());
    for (k, c) in nodes.iter().enumerate() {
        prov = prov.with_param(format!("node_{}", k + 1), *c);
    }
    ContinuousTableau::from_parts(basis, vec![1.0], alpha, prov)
}

/// [`hairer_collocation`] with the weights computed from the nodes.
pub fn hairer_collocation_at(nodes: &[f64]) -> Result<ContinuousTableau> {
    let weights = interpolatory_weights(WeightSpec::legendre(), nodes)?;
    hairer_collocation(nodes, &weights)
}

/// Outcome of checking the symplectic side condition
/// `Bhat(sigma) (lambda_j - phi_j(sigma)) = psihat_j(sigma)` for `j >= r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Technique1Report {
    pub r: usize,
    pub lambda: Vec<f64>,
    /// `phi_j` in monomial form (powers of `x`).
    pub phi: Vec<Vec<f64>>,
    /// `psihat_j = psi_j / w` in monomial form.
    pub psi: Vec<Vec<f64>>,
    /// Max coefficient residual per index `j >= r`.
    pub residuals: Vec<(usize, f64)>,
    pub max_residual: f64,
    pub passes: bool,
}

/// Extract `lambda_j`, `phi_j`, `psi_j` from `candidate` and test the side
/// condition for every represented `j >= r`. This is a check only: passing
/// is necessary for symplecticity, not sufficient.
pub fn technique1_check(candidate: &ContinuousTableau, r: usize) -> Result<Technique1Report> {
    const TOL: f64 = 1e-11;
    let (a_tau, _, b_deg) = candidate.degrees();
    let top = (a_tau + b_deg)
        .max(candidate.basis().n_max())
        .min(MAX_DEGREE);
    let ct = candidate.widened(top)?;
    let basis = ct.basis();
    let bhat = ct.bhat_poly();
    let n = basis.n_max() + 1;

    // psihat_j(sigma) = sum_k [int Bhat(tau) P_i(tau) P_j(tau) w dtau] alpha[i][k] P_k(sigma)
    let bp: Vec<Poly> = basis.polys().iter().map(|p| &bhat * p).collect();
    let mut phi_out = Vec::new();
    let mut psi_out = Vec::new();
    let mut residuals = Vec::new();
    for j in 0..n {
        let weights: Vec<f64> = bp
            .iter()
            .map(|q| basis.inner(q, &basis.polys()[j]))
            .collect();
        let coeffs: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|i| weights[i] * ct.alpha()[i][k]).sum())
            .collect();
        let psi = basis.combine(&coeffs);
        let phi = ct.phi(j);
        if j >= r {
            let lhs = &bhat * &(&Poly::constant(ct.lambda()[j]) - &phi);
            residuals.push((j, (&lhs - &psi).max_abs_coeff()));
        }
        phi_out.push(phi.to_monomial());
        psi_out.push(psi.to_monomial());
    }
    let max_residual = residuals.iter().fold(0.0, |m: f64, (_, v)| m.max(*v));
    Ok(Technique1Report {
        r,
        lambda: ct.lambda().to_vec(),
        phi: phi_out,
        psi: psi_out,
        residuals,
        max_residual,
        passes: max_residual <= TOL,
    })
}
