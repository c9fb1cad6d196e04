//! Orthonormal polynomial systems for shifted Jacobi weights on `[0, 1]`.
//!
//! The weight `w(x) = 2^(a+b) (1-x)^a x^b` covers Legendre, both Chebyshev
//! kinds, the three simple Jacobi types and every Gegenbauer weight.
//! Polynomials are orthonormal: `int_0^1 P_i P_j w dx = delta_ij`, with
//! positive leading coefficients.
//!
//! For `a + b = -1` (Chebyshev first kind) the textbook closed form of the
//! degree-0 normalization divides by zero. Norms here come from the products
//! of the recurrence coefficients and the zeroth moment, so that case needs
//! no special treatment.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Largest polynomial degree a basis may hold.
pub const MAX_DEGREE: usize = 20;

const MOMENT_CACHE: usize = 4 * MAX_DEGREE + 16;

/// Jacobi weight `w(x) = 2^(alpha+beta) (1-x)^alpha x^beta` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl WeightSpec {
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        let w = WeightSpec { alpha, beta };
        w.validate()?;
        Ok(w)
    }

    pub const fn legendre() -> Self {
        WeightSpec {
            alpha: 0.0,
            beta: 0.0,
        }
    }

    pub const fn chebyshev_first() -> Self {
        WeightSpec {
            alpha: -0.5,
            beta: -0.5,
        }
    }

    pub const fn chebyshev_second() -> Self {
        WeightSpec {
            alpha: 0.5,
            beta: 0.5,
        }
    }

    /// `w(x) = 2x`.
    pub const fn jacobi_type_i() -> Self {
        WeightSpec {
            alpha: 0.0,
            beta: 1.0,
        }
    }

    /// `w(x) = 2(1 - x)`.
    pub const fn jacobi_type_ii() -> Self {
        WeightSpec {
            alpha: 1.0,
            beta: 0.0,
        }
    }

    /// `w(x) = 4x(1 - x)`.
    pub const fn jacobi_type_iii() -> Self {
        WeightSpec {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    pub fn gegenbauer(alpha: f64) -> Result<Self> {
        WeightSpec::jacobi(alpha, alpha)
    }

    /// The six named weights, in a fixed order.
    pub fn named() -> [WeightSpec; 6] {
        [
            WeightSpec::legendre(),
            WeightSpec::chebyshev_first(),
            WeightSpec::chebyshev_second(),
            WeightSpec::jacobi_type_i(),
            WeightSpec::jacobi_type_ii(),
            WeightSpec::jacobi_type_iii(),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0 && self.beta > -1.0)
            || !self.alpha.is_finite()
            || !self.beta.is_finite()
        {
            return Err(Error::InvalidWeight {
                alpha: self.alpha,
                beta: self.beta,
            });
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.alpha == self.beta
    }

    /// Singular (unbounded) at an endpoint.
    pub fn is_singular(&self) -> bool {
        self.alpha < 0.0 || self.beta < 0.0
    }

    pub fn name(&self) -> String {
        match (self.alpha, self.beta) {
            (a, b) if a == 0.0 && b == 0.0 => "legendre".into(),
            (a, b) if a == -0.5 && b == -0.5 => "chebyshev_first".into(),
            (a, b) if a == 0.5 && b == 0.5 => "chebyshev_second".into(),
            (a, b) if a == 0.0 && b == 1.0 => "jacobi_i".into(),
            (a, b) if a == 1.0 && b == 0.0 => "jacobi_ii".into(),
            (a, b) if a == 1.0 && b == 1.0 => "jacobi_iii".into(),
            (a, b) if a == b => format!("gegenbauer({a})"),
            (a, b) => format!("jacobi({a},{b})"),
        }
    }

    /// Pointwise value; endpoints of a singular weight are a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if (x <= 0.0 && self.beta < 0.0) || (x >= 1.0 && self.alpha < 0.0) {
            return Err(Error::Domain { point: x });
        }
        Ok((self.alpha + self.beta).exp2() * (1.0 - x).powf(self.alpha) * x.powf(self.beta))
    }

    /// `int_0^1 w(x) dx`.
    pub fn total_mass(&self) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        (a + b).exp2() * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0)
    }

    /// Moments `int_0^1 (2x-1)^k w(x) dx` for `k < len`, in extended precision.
    ///
    /// Integration by parts against `(1-t)^(a+1) (1+t)^(b+1)` gives
    /// `(k + a + b + 2) M_(k+1) = k M_(k-1) + (b - a) M_k`.
    pub(crate) fn centered_moments(&self, len: usize) -> Vec<Dd> {
        let (a, b) = (Dd::new(self.alpha), Dd::new(self.beta));
        let diff = b - a;
        let mut m = Vec::with_capacity(len.max(2));
        m.push(Dd::new(self.total_mass()));
        m.push(diff * m[0] / (a + b + Dd::new(2.0)));
        for k in 1..len.saturating_sub(1) {
            let kk = Dd::new(k as f64);
            let next = (kk * m[k - 1] + diff * m[k]) / (kk + a + b + Dd::new(2.0));
            m.push(next);
        }
        m.truncate(len);
        m
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Gamma function, exact up to rounding at integers and half-integers.
pub(crate) fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && twice == twice.round() && x < 60.0 {
        let (mut g, mut v) = if x == x.round() {
            (1.0, 1.0)
        } else {
            (std::f64::consts::PI.sqrt(), 0.5)
        };
        while v < x {
            g *= v;
            v += 1.0;
        }
        g
    } else {
        statrs::function::gamma::gamma(x)
    }
}

/// Closed-form monic recurrence coefficients of `(1-t)^a (1+t)^b` on
/// `[-1, 1]`: `T_(k+1) = (t - alpha_k) T_k - beta_k T_(k-1)`, `k = 0..=n`.
/// `beta_0` is unused and set to zero.
fn centered_recurrence(weight: &WeightSpec, n: usize) -> Vec<(Dd, Dd)> {
    let (a, b) = (Dd::new(weight.alpha), Dd::new(weight.beta));
    let one = Dd::new(1.0);
    let two = Dd::new(2.0);
    let four = Dd::new(4.0);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kk = Dd::new(k as f64);
        let s = two * kk + a + b;
        let alpha = if k == 0 {
            (b - a) / (a + b + two)
        } else {
            (b * b - a * a) / (s * (s + two))
        };
        let beta = match k {
            0 => Dd::ZERO,
            1 => {
                four * (one + a) * (one + b)
                    / ((two + a + b) * (two + a + b) * (Dd::new(3.0) + a + b))
            }
            _ => four * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + one) * (s - one)),
        };
        out.push((alpha, beta));
    }
    out
}

/// Orthonormal polynomials `P_0 .. P_n_max` for a [`WeightSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    weight: WeightSpec,
    n_max: usize,
    recurrence: Vec<(f64, f64)>,
    norms: Vec<f64>,
    polys: Vec<Poly>,
    /// Unrounded centered coefficients of `polys`.
    exact: Vec<Vec<Dd>>,
    leading: Vec<f64>,
    moments: Vec<Dd>,
}

impl OrthoBasis {
    pub fn build(weight: WeightSpec, n_max: usize) -> Result<Self> {
        weight.validate()?;
        if n_max > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: n_max,
                cap: MAX_DEGREE,
            });
        }
        let centered = centered_recurrence(&weight, n_max);
        // x = (t + 1) / 2 maps the monic coefficients to (alpha + 1) / 2 and beta / 4
        let mass = weight.total_mass();
        let recurrence: Vec<(f64, f64)> = centered
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let beta = if k == 0 { mass } else { b.to_f64() / 4.0 };
                ((a.to_f64() + 1.0) / 2.0, beta)
            })
            .collect();

        let mut norms = Vec::with_capacity(n_max + 1);
        let mut norm_sq = recurrence[0].1;
        for k in 0..=n_max {
            if k > 0 {
                norm_sq *= recurrence[k].1;
            }
            if !norm_sq.is_finite() || norm_sq < f64::MIN_POSITIVE {
                return Err(Error::NormBreakdown { degree: k, norm_sq });
            }
            norms.push(norm_sq.sqrt());
        }

        // orthonormal recurrence in t, carried in double-double:
        // sqrt(beta_(k+1)) P_(k+1) = (t - alpha_k) P_k - sqrt(beta_k) P_(k-1)
        let roots: Vec<Dd> = centered.iter().map(|&(_, b)| b.sqrt()).collect();
        let mut work: Vec<Vec<Dd>> = Vec::with_capacity(n_max + 1);
        work.push(vec![Dd::new(mass).sqrt().recip()]);
        for k in 0..n_max {
            let (ak, _) = centered[k];
            let pk = &work[k];
            let mut next = vec![Dd::ZERO; k + 2];
            for (i, &c) in pk.iter().enumerate() {
                next[i + 1] = next[i + 1] + c;
                next[i] = next[i] - ak * c;
            }
            if k > 0 {
                for (i, &c) in work[k - 1].iter().enumerate() {
                    next[i] = next[i] - roots[k] * c;
                }
            }
            let scale = roots[k + 1];
            work.push(next.into_iter().map(|c| c / scale).collect());
        }
        let polys: Vec<Poly> = work
            .iter()
            .map(|c| Poly::from_centered(c.iter().map(|d| d.to_f64()).collect()))
            .collect();

        let leading = norms.iter().map(|n| 1.0 / n).collect();
        let moments = weight.centered_moments(MOMENT_CACHE);
        Ok(OrthoBasis {
            weight,
            n_max,
            recurrence,
            norms,
            polys,
            exact: work,
            leading,
            moments,
        })
    }

    /// Same weight, different capacity.
    pub fn with_degree(&self, n_max: usize) -> Result<Self> {
        if n_max == self.n_max {
            return Ok(self.clone());
        }
        OrthoBasis::build(self.weight, n_max)
    }

    pub fn weight(&self) -> WeightSpec {
        self.weight
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Monic recurrence coefficients `(alpha_k, beta_k)`; `beta_0` is the total mass.
    pub fn recurrence(&self) -> &[(f64, f64)] {
        &self.recurrence
    }

    /// `||P*_k||_w` of the monic polynomials.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Leading coefficient (in powers of `x`) of each orthonormal `P_k`.
    pub fn leading(&self) -> &[f64] {
        &self.leading
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::DegreeOutOfRange {
                index: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    pub fn poly(&self, n: usize) -> Result<&Poly> {
        self.check(n)?;
        Ok(&self.polys[n])
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    /// Monomial coefficients (powers of `x`) of `P_n`.
    pub fn monomial_coeffs(&self, n: usize) -> Result<Vec<f64>> {
        Ok(self.poly(n)?.to_monomial())
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check(n)?;
        Ok(self.eval_all(x)[n])
    }

    /// `[P_0(x), ..., P_n_max(x)]` by the three-term recurrence.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_max + 1);
        out.push(1.0 / self.norms[0]);
        for k in 0..self.n_max {
            let (ak, bk) = self.recurrence[k];
            let prev = if k == 0 { 0.0 } else { out[k - 1] * bk.sqrt() };
            out.push(((x - ak) * out[k] - prev) / self.recurrence[k + 1].1.sqrt());
        }
        out
    }

    /// `int_0^tau P_n(x) dx` as a polynomial in `tau`.
    pub fn primitive(&self, n: usize) -> Result<Poly> {
        Ok(self.poly(n)?.antiderivative())
    }

    /// Unweighted `int_0^1 P_n(x) dx`.
    pub fn integral01(&self, n: usize) -> Result<f64> {
        Ok(self.poly(n)?.integral01())
    }

    fn moments_for(&self, len: usize) -> std::borrow::Cow<'_, [Dd]> {
        if len <= self.moments.len() {
            std::borrow::Cow::Borrowed(&self.moments[..len])
        } else {
            std::borrow::Cow::Owned(self.weight.centered_moments(len))
        }
    }

    /// `int_0^1 p(x) w(x) dx`, summed in extended precision.
    pub fn weighted_integral(&self, p: &Poly) -> f64 {
        let c = p.centered_coeffs();
        let m = self.moments_for(c.len());
        c.iter()
            .zip(m.iter())
            .fold(Dd::ZERO, |acc, (&ck, &mk)| acc + mk.mul_f64(ck))
            .to_f64()
    }

    /// `int_0^1 p q w dx` without forming the product coefficients.
    pub fn inner(&self, p: &Poly, q: &Poly) -> f64 {
        let (pc, qc) = (p.centered_coeffs(), q.centered_coeffs());
        if pc.is_empty() || qc.is_empty() {
            return 0.0;
        }
        let m = self.moments_for(pc.len() + qc.len() - 1);
        let mut acc = Dd::ZERO;
        for (i, &a) in pc.iter().enumerate() {
            for (j, &b) in qc.iter().enumerate() {
                acc = acc + (Dd::new(a) * Dd::new(b)) * m[i + j];
            }
        }
        acc.to_f64()
    }

    /// `int_0^1 x^k w(x) dx`.
    pub fn moment(&self, k: usize) -> f64 {
        self.weighted_integral(&Poly::x_pow(k))
    }

    /// Coefficients of `p` in this basis; `p` must have degree at most `n_max`.
    pub fn expand(&self, p: &Poly) -> Result<Vec<f64>> {
        let Some(d) = p.degree() else {
            return Ok(vec![0.0; self.n_max + 1]);
        };
        self.check(d)?;
        // components above the degree of p vanish by orthogonality
        Ok(self
            .polys
            .iter()
            .enumerate()
            .map(|(k, pk)| if k <= d { self.inner(p, pk) } else { 0.0 })
            .collect())
    }

    /// `sum_k coeffs[k] P_k`.
    pub fn combine(&self, coeffs: &[f64]) -> Poly {
        coeffs
            .iter()
            .zip(self.polys.iter())
            .filter(|(c, _)| **c != 0.0)
            .fold(Poly::zero(), |acc, (&c, p)| &acc + &p.scale(c))
    }

    /// Gram matrix `<P_i, P_j>_w` from exact moment summation over the
    /// double-double coefficients.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.moments_for(2 * self.n_max + 1);
        let dot = |p: &[Dd], q: &[Dd]| {
            let mut acc = Dd::ZERO;
            for (i, &a) in p.iter().enumerate() {
                for (j, &b) in q.iter().enumerate() {
                    acc = acc + a * b * m[i + j];
                }
            }
            acc.to_f64()
        };
        self.exact
            .iter()
            .map(|p| self.exact.iter().map(|q| dot(p, q)).collect())
            .collect()
    }

    /// Gram matrix of the rounded `f64` polynomials.
    pub fn rounded_gram(&self) -> Vec<Vec<f64>> {
        self.polys
            .iter()
            .map(|pi| self.polys.iter().map(|pj| self.inner(pi, pj)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gram_defect(g: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    #[test]
    fn gram_is_identity_through_degree_twelve() {
        for w in WeightSpec::named() {
            let b = OrthoBasis::build(w, 12).unwrap();
            assert!(gram_defect(&b.gram()) <= 1e-13, "{w}");
            assert!(gram_defect(&b.rounded_gram()) <= 1e-11, "{w}");
        }
    }

    #[test]
    fn legendre_first_polynomials() {
        let b = OrthoBasis::build(WeightSpec::legendre(), 1).unwrap();
        let p1 = b.monomial_coeffs(1).unwrap();
        assert!((b.eval(0, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!((p1[0] + 3f64.sqrt()).abs() < 1e-14);
        assert!((p1[1] - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        assert!((b.eval(1, 1.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_first_values() {
        let b = OrthoBasis::build(WeightSpec::chebyshev_first(), 2).unwrap();
        assert!((b.eval(0, 0.9).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((b.eval(2, 0.5).unwrap() + 2.0 / PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degree_zero_is_constant() {
        for w in WeightSpec::named() {
            let b = OrthoBasis::build(w, 0).unwrap();
            let expect = 1.0 / w.total_mass().sqrt();
            for x in [0.0, 0.4, 1.0] {
                assert!((b.eval(0, x).unwrap() - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            OrthoBasis::build(
                WeightSpec {
                    alpha: -1.0,
                    beta: 0.0
                },
                3
            ),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            OrthoBasis::build(
                WeightSpec {
                    alpha: 0.0,
                    beta: -1.5
                },
                3
            ),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            OrthoBasis::build(WeightSpec::legendre(), MAX_DEGREE + 1),
            Err(Error::DegreeCap { .. })
        ));
        let b = OrthoBasis::build(WeightSpec::legendre(), 2).unwrap();
        assert!(matches!(
            b.eval(3, 0.5),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn weight_domain_errors() {
        let w = WeightSpec::chebyshev_first();
        assert!(w.eval(0.0).is_err());
        assert!(w.eval(1.0).is_err());
        assert!((w.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((WeightSpec::jacobi_type_iii().eval(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn centered_moments_match_closed_form() {
        // w = 2x = 1 + t: M_k = (1/2) int_{-1}^{1} (t^k + t^(k+1)) dt
        let m = WeightSpec::jacobi_type_i().centered_moments(60);
        for (k, mk) in m.iter().enumerate() {
            let even = |j: usize| {
                if j.is_multiple_of(2) {
                    1.0 / (j as f64 + 1.0)
                } else {
                    0.0
                }
            };
            let exact = even(k) + even(k + 1);
            assert!((mk.to_f64() - exact).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn gamma_half_integers() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(1.3) - 0.897_470_696_306_277_2).abs() < 1e-13);
    }

    #[test]
    fn expand_recovers_coefficients() {
        let b = OrthoBasis::build(WeightSpec::chebyshev_second(), 5).unwrap();
        let coeffs = [0.5, -1.0, 0.0, 2.0, 0.25, 0.0];
        let p = b.combine(&coeffs);
        for (a, c) in b.expand(&p).unwrap().iter().zip(coeffs.iter()) {
            assert!((a - c).abs() < 1e-13);
        }
        let too_high = b.with_degree(6).unwrap().polys()[6].clone();
        assert!(b.expand(&too_high).is_err());
    }
}
