//! Weighted interpolatory quadrature on `[0, 1]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::orthopoly::{OrthoBasis, WeightSpec};

/// Node families for fixed-node interpolatory rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFamily {
    ChebyshevGaussLobatto,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussChristoffel,
    Interpolatory(NodeFamily),
}

/// `int_0^1 f(x) w(x) dx ~ sum_i weights[i] f(nodes[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub weight: WeightSpec,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Exactness degree plus one.
    pub order: usize,
    pub kind: RuleKind,
    /// Leading coefficient of `P_s` (Gauss-Christoffel rules only); it sets
    /// the size of the remainder term.
    pub leading_coefficient: Option<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&c, &b)| b * f(c))
            .sum()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RuleKind::GaussChristoffel => "gauss_christoffel",
            RuleKind::Interpolatory(NodeFamily::ChebyshevGaussLobatto) => "chebyshev_gauss_lobatto",
            RuleKind::Interpolatory(NodeFamily::Custom) => "interpolatory",
        }
    }

    /// `max_(i) |b_(s+1-i) - b_i|, |c_(s+1-i) + c_i - 1|`.
    pub fn mirror_residual(&self) -> f64 {
        let s = self.len();
        (0..s).fold(0.0, |m: f64, i| {
            let j = s - 1 - i;
            m.max((self.weights[j] - self.weights[i]).abs())
                .max((self.nodes[j] + self.nodes[i] - 1.0).abs())
        })
    }
}

/// Gauss-Christoffel rule with nodes at the zeros of `P_s`.
///
/// Nodes are eigenvalues of the symmetric tridiagonal Jacobi matrix, then
/// polished by Newton steps on `P_s`.
pub fn gauss_christoffel(basis: &OrthoBasis, s: usize) -> Result<QuadratureRule> {
    if s == 0 || s > basis.n_max() {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Christoffel rule needs 1 <= s <= n_max ({}), got s={s}",
            basis.n_max()
        )));
    }
    let rec = basis.recurrence();
    let jacobi = DMatrix::from_fn(s, s, |i, j| {
        if i == j {
            rec[i].0
        } else if i + 1 == j {
            rec[j].1.sqrt()
        } else if j + 1 == i {
            rec[i].1.sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 1000)
        .ok_or(Error::EigenFailure { expected: s })?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure { expected: s });
    }

    let ps = basis.poly(s)?;
    let dps = ps.derivative();
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let d = dps.eval(*x);
            if d == 0.0 {
                break;
            }
            let step = ps.eval(*x) / d;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                break;
            }
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if basis.weight().is_symmetric() {
        for i in 0..s / 2 {
            let j = s - 1 - i;
            let lo = 0.5 * (nodes[i] + 1.0 - nodes[j]);
            nodes[i] = lo;
            nodes[j] = 1.0 - lo;
        }
        if s % 2 == 1 {
            nodes[s / 2] = 0.5;
        }
    }
    for &x in &nodes {
        if !(-1e-10..=1.0 + 1e-10).contains(&x) {
            return Err(Error::NodeOutOfRange { node: x });
        }
    }
    let weights = interpolatory_weights(basis.weight(), &nodes)?;
    Ok(QuadratureRule {
        weight: basis.weight(),
        nodes,
        weights,
        order: 2 * s,
        kind: RuleKind::GaussChristoffel,
        leading_coefficient: Some(basis.leading()[s]),
    })
}

/// Weights `b_i = int_0^1 l_i(x) w(x) dx` of the interpolatory rule on `nodes`.
///
/// Solved as the moment system `sum_i b_i P_k(c_i) = int P_k w`, `k < s`,
/// written in the orthonormal basis of the weight so the right-hand side is
/// `sqrt(total mass)` at `k = 0` and zero otherwise.
pub fn interpolatory_weights(weight: WeightSpec, nodes: &[f64]) -> Result<Vec<f64>> {
    let s = nodes.len();
    if s == 0 {
        return Err(Error::InvalidParameter("at least one node required".into()));
    }
    for &c in nodes {
        if !(0.0..=1.0).contains(&c) || !c.is_finite() {
            return Err(Error::NodeOutOfRange { node: c });
        }
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if let Some(w) = sorted.windows(2).find(|w| w[1] - w[0] <= 1e-14) {
        return Err(Error::DuplicateNodes { node: w[0] });
    }

    let basis = OrthoBasis::build(weight, s - 1)?;
    let values: Vec<Vec<f64>> = nodes.iter().map(|&c| basis.eval_all(c)).collect();
    let system = DMatrix::from_fn(s, s, |k, i| values[i][k]);
    let mut rhs = DVector::zeros(s);
    rhs[0] = weight.total_mass().sqrt();
    let weights = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("singular interpolation system".into()))?;
    Ok(weights.iter().copied().collect())
}

/// Fixed-node interpolatory rule; the order is measured by moment checks.
pub fn interpolatory_rule(
    weight: WeightSpec,
    nodes: &[f64],
    family: NodeFamily,
) -> Result<QuadratureRule> {
    let weights = interpolatory_weights(weight, nodes)?;
    let mut rule = QuadratureRule {
        weight,
        nodes: nodes.to_vec(),
        weights,
        order: 0,
        kind: RuleKind::Interpolatory(family),
        leading_coefficient: None,
    };
    rule.order = exactness_degree(&rule, 2 * nodes.len() + 1, 1e-12)? + 1;
    Ok(rule)
}

/// Largest `d <= max_degree` such that the rule integrates `x^k w` exactly
/// (to `tol`) for every `k <= d`.
pub fn exactness_degree(rule: &QuadratureRule, max_degree: usize, tol: f64) -> Result<usize> {
    let basis = OrthoBasis::build(rule.weight, 0)?;
    let mut degree = 0;
    for k in 0..=max_degree {
        let exact = basis.moment(k);
        let approx = rule.apply(|x| x.powi(k as i32));
        if (exact - approx).abs() > tol * exact.abs().max(1.0) {
            break;
        }
        degree = k;
    }
    Ok(degree)
}

/// `c_i = (1 + cos((s - i) pi / (s - 1))) / 2`, `i = 1..s`, mirrored exactly about 1/2.
pub fn chebyshev_gauss_lobatto_nodes(s: usize) -> Result<Vec<f64>> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!(
            "Chebyshev-Gauss-Lobatto rule needs s >= 2, got {s}"
        )));
    }
    let mut nodes = vec![0.0; s];
    for i in 0..s.div_ceil(2) {
        let angle = (s - 1 - i) as f64 * PI / (s - 1) as f64;
        let c = 0.5 * (1.0 + angle.cos());
        nodes[i] = c;
        nodes[s - 1 - i] = 1.0 - c;
    }
    nodes[0] = 0.0;
    nodes[s - 1] = 1.0;
    if s % 2 == 1 {
        nodes[s / 2] = 0.5;
    }
    Ok(nodes)
}

/// Chebyshev-Gauss-Lobatto nodes with interpolatory weights for `weight`.
pub fn chebyshev_gauss_lobatto(weight: WeightSpec, s: usize) -> Result<QuadratureRule> {
    let nodes = chebyshev_gauss_lobatto_nodes(s)?;
    interpolatory_rule(weight, &nodes, NodeFamily::ChebyshevGaussLobatto)
}
