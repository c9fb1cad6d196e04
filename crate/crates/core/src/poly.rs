//! Univariate polynomials on `[0, 1]`.
//!
//! Coefficients are stored in powers of the centered variable `t = 2x - 1`,
//! so that `p(x) = sum_k c[k] * (2x - 1)^k`. Shifted orthogonal polynomials
//! are far better conditioned in this basis than in powers of `x`, and the
//! reflection `x -> 1 - x` becomes an exact sign flip of odd coefficients.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// The polynomial `x` (i.e. `(t + 1) / 2`).
    pub fn x() -> Self {
        Poly {
            coeffs: vec![0.5, 0.5],
        }
    }

    /// Build from coefficients in powers of `t = 2x - 1`.
    pub fn from_centered(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// Build from ordinary monomial coefficients in `x`.
    pub fn from_monomial(coeffs: &[f64]) -> Self {
        // Horner in polynomial arithmetic: p = c0 + x (c1 + x (c2 + ...))
        let x = Poly::x();
        let mut acc = Poly::zero();
        for &c in coeffs.iter().rev() {
            acc = &(&acc * &x) + &Poly::constant(c);
        }
        acc
    }

    /// `prod_k (x - roots[k])`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut acc = Poly::constant(1.0);
        for &r in roots {
            let factor = Poly::from_centered(vec![0.5 - r, 0.5]);
            acc = &acc * &factor;
        }
        acc
    }

    /// `x^k`.
    pub fn x_pow(k: usize) -> Self {
        let x = Poly::x();
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * &x)
    }

    pub fn centered_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Ordinary monomial coefficients in `x`, lowest degree first.
    pub fn to_monomial(&self) -> Vec<f64> {
        // (2x - 1)^k expanded binomially
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        let mut row = vec![1.0];
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                let mut next = vec![0.0; k + 1];
                for (j, &r) in row.iter().enumerate() {
                    next[j] -= r;
                    next[j + 1] += 2.0 * r;
                }
                row = next;
            }
            for (j, &r) in row.iter().enumerate() {
                out[j] += c * r;
            }
        }
        out
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree ignoring trailing coefficients with magnitude at most `tol`.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.abs() > tol)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(&c) if c == 0.0) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = 2.0 * x - 1.0;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::from_centered(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(1 - x)`.
    pub fn reflect(&self) -> Poly {
        Poly::from_centered(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// `d/dx p`.
    pub fn derivative(&self) -> Poly {
        Poly::from_centered(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| 2.0 * k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at `x = 0`.
    pub fn antiderivative(&self) -> Poly {
        // dx = dt / 2 and t = -1 at x = 0
        let mut out = vec![0.0; self.coeffs.len() + 1];
        let mut at_zero = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let v = 0.5 * c / (k + 1) as f64;
            out[k + 1] = v;
            at_zero += if k % 2 == 0 { -v } else { v };
        }
        out[0] = -at_zero;
        Poly::from_centered(out)
    }

    /// Unweighted integral over `[0, 1]`.
    pub fn integral01(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, &c)| c / (k + 1) as f64)
            .sum()
    }

    /// Largest coefficient magnitude (in the centered basis).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + o.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Poly::from_centered(coeffs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_centered(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn monomial_round_trip() {
        let m = [0.25, -1.0, 3.0, 0.5];
        let p = Poly::from_monomial(&m);
        for (a, b) in p.to_monomial().iter().zip(m.iter()) {
            assert!(close(*a, *b));
        }
        for x in [0.0, 0.3, 1.0] {
            let direct = m[0] + m[1] * x + m[2] * x * x + m[3] * x * x * x;
            assert!(close(p.eval(x), direct));
        }
    }

    #[test]
    fn antiderivative_vanishes_at_zero() {
        let p = Poly::from_monomial(&[1.0, 2.0, 3.0]);
        let q = p.antiderivative();
        assert!(close(q.eval(0.0), 0.0));
        assert!(close(q.eval(1.0), 1.0 + 1.0 + 1.0));
        assert!(close(p.integral01(), 3.0));
    }

    #[test]
    fn reflect_and_derivative() {
        let p = Poly::from_monomial(&[0.0, 0.0, 1.0]);
        assert!(close(p.reflect().eval(0.25), 0.75 * 0.75));
        assert!(close(p.derivative().eval(0.3), 0.6));
    }

    #[test]
    fn roots_constructor() {
        let p = Poly::from_roots(&[0.2, 0.7]);
        assert!(close(p.eval(0.2), 0.0));
        assert!(close(p.eval(0.7), 0.0));
        assert!(close(p.eval(1.0), 0.8 * 0.3));
    }
}
