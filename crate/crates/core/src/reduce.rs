//! Reduction of a continuous tableau to an `s`-stage Butcher tableau, and
//! tableau serialization.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::cstab::{ContinuousTableau, Provenance};
use crate::error::{Error, Result};
use crate::orthopoly::WeightSpec;
use crate::quadrature::QuadratureRule;

/// How quadrature weights are combined with the continuous coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    /// `a_ij = b_j Ahat(c_i, c_j)`; the rule must carry the tableau's weight.
    Weighted,
    /// `a_ij = b_j A(c_i, c_j)` with an unweighted (Legendre) rule applied to
    /// the full integrand.
    Unweighted,
}

impl ReductionMode {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionMode::Weighted => "weighted",
            ReductionMode::Unweighted => "unweighted",
        }
    }
}

/// A standard Runge-Kutta method `(A, b, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RKTableau {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub provenance: Provenance,
}

impl RKTableau {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>, provenance: Provenance) -> Result<Self> {
        let s = b.len();
        if s == 0 {
            return Err(Error::InvalidParameter(
                "tableau needs at least one stage".into(),
            ));
        }
        if c.len() != s || a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidParameter(format!(
                "inconsistent tableau shape: |b| = {s}, |c| = {}, A is {}x{}",
                c.len(),
                a.len(),
                a.first().map_or(0, |r| r.len())
            )));
        }
        if a.iter()
            .flatten()
            .chain(&b)
            .chain(&c)
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite);
        }
        if let Some(&x) = c.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::NodeOutOfRange { node: x });
        }
        if let Some(w) = c.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "abscissae must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(RKTableau {
            a,
            b,
            c,
            provenance,
        })
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// `max_i |sum_j a_ij - c_i|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.c)
            .map(|(row, ci)| (row.iter().sum::<f64>() - ci).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference to `other`, or infinity on shape mismatch.
    pub fn max_abs_diff(&self, other: &RKTableau) -> f64 {
        if self.stages() != other.stages() {
            return f64::INFINITY;
        }
        let a = self
            .a
            .iter()
            .flatten()
            .zip(other.a.iter().flatten())
            .map(|(x, y)| (x - y).abs());
        let b = self.b.iter().zip(&other.b).map(|(x, y)| (x - y).abs());
        let c = self.c.iter().zip(&other.c).map(|(x, y)| (x - y).abs());
        a.chain(b).chain(c).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serialize(self, Format::Json)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }
}

/// Collapse `ct` with `rule`:
/// `a_ij = b_j Ahat(c_i, c_j)`, `b_i = b_i Bhat(c_i)` in weighted mode and
/// the same with the weight multiplied back in for unweighted mode.
pub fn to_rk(
    ct: &ContinuousTableau,
    rule: &QuadratureRule,
    mode: ReductionMode,
) -> Result<RKTableau> {
    let w = ct.weight();
    let node_weight: Box<dyn Fn(f64) -> Result<f64>> = match mode {
        ReductionMode::Weighted => {
            if rule.weight != w {
                return Err(Error::WeightMismatch {
                    rule: rule.weight.name(),
                    tableau: w.name(),
                });
            }
            Box::new(|_| Ok(1.0))
        }
        ReductionMode::Unweighted => {
            if rule.weight != WeightSpec::legendre() {
                return Err(Error::WeightMismatch {
                    rule: rule.weight.name(),
                    tableau: WeightSpec::legendre().name(),
                });
            }
            Box::new(move |x| w.eval(x))
        }
    };
    let s = rule.len();
    let c = rule.nodes.clone();
    let wc: Vec<f64> = c.iter().map(|&x| node_weight(x)).collect::<Result<_>>()?;
    let a: Vec<Vec<f64>> = (0..s)
        .map(|i| {
            (0..s)
                .map(|j| rule.weights[j] * wc[j] * ct.ahat(c[i], c[j]))
                .collect()
        })
        .collect();
    let b: Vec<f64> = (0..s)
        .map(|i| rule.weights[i] * wc[i] * ct.bhat(c[i]))
        .collect();

    let mut prov = ct.provenance().clone();
    prov.quadrature = Some(rule.kind_name().to_string());
    prov.mode = Some(mode.name().to_string());
    prov.s = Some(s);
    let rk = RKTableau::new(a, b, c, prov)?;

    // row sums reproduce c whenever the rule integrates Ahat(c_i, .) w exactly
    let (_, deg_sigma, _) = ct.degrees();
    if mode == ReductionMode::Weighted
        && deg_sigma < rule.order
        && ct.consistency_residual() < 1e-12
    {
        let res = rk.row_sum_residual();
        if res > 1e-12 {
            log::warn!("row-sum residual {res:e} exceeds 1e-12 for a consistent source");
        }
    }
    Ok(rk)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
    Latex,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "latex" | "tex" => Ok(Format::Latex),
            other => Err(Error::Format(format!("unknown format '{other}'"))),
        }
    }
}

/// 17 significant digits; enough to round-trip every `f64`.
fn num17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Shortest form after rounding to 15 significant digits, for display.
fn pretty(x: f64) -> String {
    let r: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn json_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| num17(x)).collect();
    format!("[{}]", items.join(", "))
}

pub fn serialize(rk: &RKTableau, format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<String> =
                rk.a.iter()
                    .map(|r| format!("    {}", json_vec(r)))
                    .collect();
            let prov = serde_json::to_string(&rk.provenance).expect("provenance is serializable");
            format!(
                "{{\n  \"s\": {},\n  \"A\": [\n{}\n  ],\n  \"b\": {},\n  \"c\": {},\n  \"provenance\": {}\n}}\n",
                rk.stages(),
                rows.join(",\n"),
                json_vec(&rk.b),
                json_vec(&rk.c),
                prov
            )
        }
        Format::Markdown => {
            let s = rk.stages();
            let mut out = String::new();
            let _ = writeln!(out, "| c |{}", " |".repeat(s));
            let _ = writeln!(out, "|---:|{}", "---:|".repeat(s));
            for (ci, row) in rk.c.iter().zip(&rk.a) {
                let cells: Vec<String> = row.iter().map(|&v| pretty(v)).collect();
                let _ = writeln!(out, "| {} | {} |", pretty(*ci), cells.join(" | "));
            }
            let cells: Vec<String> = rk.b.iter().map(|&v| pretty(v)).collect();
            let _ = writeln!(out, "| **b** | {} |", cells.join(" | "));
            out
        }
        Format::Latex => {
            let s = rk.stages();
            let mut out = String::new();
            let _ = writeln!(out, "\\begin{{array}}{{c|{}}}", "c".repeat(s));
            for (ci, row) in rk.c.iter().zip(&rk.a) {
                let cells: Vec<String> = row.iter().map(|&v| pretty(v)).collect();
                let _ = writeln!(out, "{} & {}\\\\[2pt]", pretty(*ci), cells.join(" & "));
            }
            let cells: Vec<String> = rk.b.iter().map(|&v| pretty(v)).collect();
            let _ = writeln!(out, "\\hline & {}", cells.join(" & "));
            out.push_str("\\end{array}\n");
            out
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableauFile {
    s: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    #[serde(default)]
    provenance: Provenance,
}

pub fn parse_json(text: &str) -> Result<RKTableau> {
    let f: TableauFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if f.s != f.b.len() {
        return Err(Error::Format(format!(
            "field 's' = {} disagrees with |b| = {}",
            f.s,
            f.b.len()
        )));
    }
    RKTableau::new(f.a, f.b, f.c, f.provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstab::{truncated_family, Variant};
    use crate::orthopoly::OrthoBasis;
    use crate::quadrature::{chebyshev_gauss_lobatto, gauss_christoffel};

    fn midpoint() -> RKTableau {
        let basis = OrthoBasis::build(WeightSpec::legendre(), 2).unwrap();
        let ct = truncated_family(&basis, 1, Variant::Balanced).unwrap();
        let rule = gauss_christoffel(&basis, 1).unwrap();
        to_rk(&ct, &rule, ReductionMode::Weighted).unwrap()
    }

    #[test]
    fn midpoint_from_balanced_r1() {
        let rk = midpoint();
        assert!((rk.a[0][0] - 0.5).abs() < 1e-15);
        assert!((rk.b[0] - 1.0).abs() < 1e-15);
        assert!((rk.c[0] - 0.5).abs() < 1e-15);
        assert_eq!(rk.provenance.s, Some(1));
    }

    #[test]
    fn lobatto_three_point() {
        let basis = OrthoBasis::build(WeightSpec::legendre(), 3).unwrap();
        let ct = truncated_family(&basis, 2, Variant::Balanced).unwrap();
        let rule = chebyshev_gauss_lobatto(WeightSpec::legendre(), 3).unwrap();
        let rk = to_rk(&ct, &rule, ReductionMode::Unweighted).unwrap();
        let want = [
            [0.0, 0.0, 0.0],
            [5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((rk.a[i][j] - want[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        let basis = OrthoBasis::build(WeightSpec::chebyshev_first(), 3).unwrap();
        let ct = truncated_family(&basis, 1, Variant::Balanced).unwrap();
        let leg = OrthoBasis::build(WeightSpec::legendre(), 3).unwrap();
        let rule = gauss_christoffel(&leg, 2).unwrap();
        assert!(matches!(
            to_rk(&ct, &rule, ReductionMode::Weighted),
            Err(Error::WeightMismatch { .. })
        ));
        // unweighted with Lobatto nodes hits the singular endpoint
        let lob = chebyshev_gauss_lobatto(WeightSpec::legendre(), 3).unwrap();
        assert!(matches!(
            to_rk(&ct, &lob, ReductionMode::Unweighted),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let basis = OrthoBasis::build(WeightSpec::jacobi_type_iii(), 4).unwrap();
        let ct = truncated_family(&basis, 3, Variant::Balanced).unwrap();
        let rule = gauss_christoffel(&basis, 3).unwrap();
        let rk = to_rk(&ct, &rule, ReductionMode::Weighted).unwrap();
        let text = serialize(&rk, Format::Json);
        let back = parse_json(&text).unwrap();
        assert_eq!(back, rk);
        assert_eq!(serialize(&back, Format::Json), text);
    }

    #[test]
    fn midpoint_json_shape() {
        let text = serialize(&midpoint(), Format::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["s"], 1);
        assert_eq!(v["A"][0][0], 0.5);
        assert_eq!(v["b"][0], 1.0);
        assert_eq!(v["c"][0], 0.5);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(parse_json("{").is_err());
        assert!(parse_json(r#"{"s":1,"A":[[0.5]],"b":[1],"c":[0.5],"extra":1}"#).is_err());
        assert!(parse_json(r#"{"s":2,"A":[[0.5]],"b":[1],"c":[0.5]}"#).is_err());
        assert!(parse_json(r#"{"s":2,"A":[[0,0],[0,0]],"b":[0.5,0.5],"c":[0.6,0.4]}"#).is_err());
        assert!(parse_json(r#"{"s":1,"A":[[0.5]],"b":[1],"c":[0.5]}"#).is_ok());
    }

    #[test]
    fn latex_layout() {
        let tex = serialize(&midpoint(), Format::Latex);
        assert!(tex.starts_with("\\begin{array}{c|c}"));
        assert!(tex.contains("\\hline & 1"));
        let md = serialize(&midpoint(), Format::Markdown);
        assert!(md.contains("| 0.5 | 0.5 |"));
    }
}
