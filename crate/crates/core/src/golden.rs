//! Reference Butcher tableaux with closed-form (surd) entries, paired with
//! the construction path that regenerates each one.
//!
//! Tables are numbered 1 to 7:
//!
//! | id | tableaux | construction |
//! |----|----------|--------------|
//! | 1 | 3 | Legendre, balanced `r = 1, 2, 2`, Chebyshev-Gauss-Lobatto `s = 2, 3, 4` (unweighted) |
//! | 2 | 3 | Jacobi I / II / III, balanced `r = 2`, Gauss-Christoffel `s = 2` |
//! | 3 | 3 | Jacobi III, balanced `r = s = 1, 2, 3` |
//! | 4 | 3 | Chebyshev first kind, balanced `r = s = 1, 2, 3` |
//! | 5 | 3 | Chebyshev second kind, balanced `r = s = 1, 2, 3` |
//! | 6 | 2 | Chebyshev symplectic pair, Gauss-Christoffel `s = 1, 2` |
//! | 7 | 1 per `omega` | Chebyshev symplectic family, Gauss-Christoffel `s = 3` |

use serde::Serialize;

use crate::cstab::{self, ContinuousTableau, Variant};
use crate::error::{Error, Result};
use crate::orthopoly::{OrthoBasis, WeightSpec};
use crate::quadrature::{chebyshev_gauss_lobatto, gauss_christoffel};
use crate::reduce::{to_rk, RKTableau, ReductionMode};

/// Parameter values of the table-7 family checked by default.
pub const DEFAULT_OMEGAS: [f64; 3] = [0.0, 0.05, 0.1];

/// Closed-form entries of one tableau.
#[derive(Debug, Clone, PartialEq)]
pub struct Golden {
    pub table: u8,
    pub label: String,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

fn g(table: u8, label: impl Into<String>, a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Golden {
    Golden {
        table,
        label: label.into(),
        a,
        b,
        c,
    }
}

fn midpoint(table: u8, label: &str) -> Golden {
    g(table, label, vec![vec![0.5]], vec![1.0], vec![0.5])
}

/// Second entry of table 4 with `a_22 = (4 + sqrt 2) / 16`. The variant
/// `(4 + 2 sqrt 2) / 16` breaks `a_21 + a_22 = c_2` and disagrees with the
/// construction; see [`TABLE4_VARIANT_A22`].
fn table4_middle() -> Golden {
    let s2 = 2f64.sqrt();
    g(
        4,
        "chebyshev_first r=2",
        vec![
            vec![(4.0 - s2) / 16.0, (4.0 - 3.0 * s2) / 16.0],
            vec![(4.0 + 3.0 * s2) / 16.0, (4.0 + s2) / 16.0],
        ],
        vec![0.5, 0.5],
        vec![(2.0 - s2) / 4.0, (2.0 + s2) / 4.0],
    )
}

/// Incorrect variant of `a_22` in the second tableau of table 4.
pub const TABLE4_VARIANT_A22: f64 = (4.0 + 2.0 * std::f64::consts::SQRT_2) / 16.0;

/// Golden entries of table `id` (table 7 at the given `omega`).
pub fn golden(id: u8, omega: f64) -> Result<Vec<Golden>> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    let s6 = 6f64.sqrt();
    let s21 = 21f64.sqrt();
    let jacobi3_r2 = |table: u8| {
        g(
            table,
            "jacobi_iii r=2",
            vec![
                vec![(5.0 + s5) / 20.0, (5.0 - 3.0 * s5) / 20.0],
                vec![(5.0 + 3.0 * s5) / 20.0, (5.0 - s5) / 20.0],
            ],
            vec![0.5, 0.5],
            vec![(5.0 - s5) / 10.0, (5.0 + s5) / 10.0],
        )
    };
    let out = match id {
        1 => vec![
            g(
                1,
                "legendre r=1 lobatto s=2",
                vec![vec![0.0, 0.0], vec![0.5, 0.5]],
                vec![0.5, 0.5],
                vec![0.0, 1.0],
            ),
            g(
                1,
                "legendre r=2 lobatto s=3",
                vec![
                    vec![0.0, 0.0, 0.0],
                    vec![5.0 / 24.0, 1.0 / 3.0, -1.0 / 24.0],
                    vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                ],
                vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                vec![0.0, 0.5, 1.0],
            ),
            g(
                1,
                "legendre r=2 lobatto s=4",
                vec![
                    vec![0.0, 0.0, 0.0, 0.0],
                    vec![13.0 / 288.0, 17.0 / 72.0, -1.0 / 72.0, -5.0 / 288.0],
                    vec![7.0 / 96.0, 11.0 / 24.0, 5.0 / 24.0, 1.0 / 96.0],
                    vec![1.0 / 18.0, 4.0 / 9.0, 4.0 / 9.0, 1.0 / 18.0],
                ],
                vec![1.0 / 18.0, 4.0 / 9.0, 4.0 / 9.0, 1.0 / 18.0],
                vec![0.0, 0.25, 0.75, 1.0],
            ),
        ],
        2 => vec![
            g(
                2,
                "jacobi_i r=2",
                vec![
                    vec![(12.0 + 3.0 * s6) / 40.0, (12.0 - 7.0 * s6) / 40.0],
                    vec![(12.0 + 7.0 * s6) / 40.0, (12.0 - 3.0 * s6) / 40.0],
                ],
                vec![(6.0 + s6) / 12.0, (6.0 - s6) / 12.0],
                vec![(6.0 - s6) / 10.0, (6.0 + s6) / 10.0],
            ),
            g(
                2,
                "jacobi_ii r=2",
                vec![
                    vec![(24.0 - s6) / 120.0, (24.0 - 11.0 * s6) / 120.0],
                    vec![(24.0 + 11.0 * s6) / 120.0, (24.0 + s6) / 120.0],
                ],
                vec![(6.0 - s6) / 12.0, (6.0 + s6) / 12.0],
                vec![(4.0 - s6) / 10.0, (4.0 + s6) / 10.0],
            ),
            jacobi3_r2(2),
        ],
        3 => vec![
            midpoint(3, "jacobi_iii r=1"),
            jacobi3_r2(3),
            g(
                3,
                "jacobi_iii r=3",
                vec![
                    vec![
                        7.0 / 36.0 + s21 / 84.0,
                        1.0 / 9.0 - s21 / 21.0,
                        7.0 / 36.0 - s21 / 28.0,
                    ],
                    vec![7.0 / 36.0 + s21 / 24.0, 1.0 / 9.0, 7.0 / 36.0 - s21 / 24.0],
                    vec![
                        7.0 / 36.0 + s21 / 28.0,
                        1.0 / 9.0 + s21 / 21.0,
                        7.0 / 36.0 - s21 / 84.0,
                    ],
                ],
                vec![7.0 / 18.0, 2.0 / 9.0, 7.0 / 18.0],
                vec![(7.0 - s21) / 14.0, 0.5, (7.0 + s21) / 14.0],
            ),
        ],
        4 => vec![
            midpoint(4, "chebyshev_first r=1"),
            table4_middle(),
            g(
                4,
                "chebyshev_first r=3",
                vec![
                    vec![
                        1.0 / 9.0 - s3 / 48.0,
                        5.0 / 18.0 - s3 / 6.0,
                        1.0 / 9.0 - s3 / 16.0,
                    ],
                    vec![1.0 / 9.0 + s3 / 12.0, 5.0 / 18.0, 1.0 / 9.0 - s3 / 12.0],
                    vec![
                        1.0 / 9.0 + s3 / 16.0,
                        5.0 / 18.0 + s3 / 6.0,
                        1.0 / 9.0 + s3 / 48.0,
                    ],
                ],
                vec![2.0 / 9.0, 5.0 / 9.0, 2.0 / 9.0],
                vec![(2.0 - s3) / 4.0, 0.5, (2.0 + s3) / 4.0],
            ),
        ],
        5 => vec![
            midpoint(5, "chebyshev_second r=1"),
            g(
                5,
                "chebyshev_second r=2",
                vec![vec![5.0 / 16.0, -1.0 / 16.0], vec![9.0 / 16.0, 3.0 / 16.0]],
                vec![0.5, 0.5],
                vec![0.25, 0.75],
            ),
            g(
                5,
                "chebyshev_second r=3",
                vec![
                    vec![
                        1.0 / 6.0 + s2 / 48.0,
                        1.0 / 6.0 - s2 / 6.0,
                        1.0 / 6.0 - 5.0 * s2 / 48.0,
                    ],
                    vec![1.0 / 6.0 + s2 / 8.0, 1.0 / 6.0, 1.0 / 6.0 - s2 / 8.0],
                    vec![
                        1.0 / 6.0 + 5.0 * s2 / 48.0,
                        1.0 / 6.0 + s2 / 6.0,
                        1.0 / 6.0 - s2 / 48.0,
                    ],
                ],
                vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
                vec![(2.0 - s2) / 4.0, 0.5, (2.0 + s2) / 4.0],
            ),
        ],
        6 => vec![
            midpoint(6, "chebyshev_pair s=1"),
            g(
                6,
                "chebyshev_pair s=2",
                vec![vec![0.25, (1.0 - s2) / 4.0], vec![(1.0 + s2) / 4.0, 0.25]],
                vec![0.5, 0.5],
                vec![(2.0 - s2) / 4.0, (2.0 + s2) / 4.0],
            ),
        ],
        7 => {
            let w = omega;
            vec![g(
                7,
                format!("chebyshev_family omega={w}"),
                vec![
                    vec![
                        1.0 / 9.0,
                        (10.0 - 5.0 * s3) / 36.0 + 5.0 * w,
                        (1.0 - s3) / 9.0 - 5.0 * w,
                    ],
                    vec![
                        (2.0 + s3) / 18.0 - 2.0 * w,
                        5.0 / 18.0,
                        (2.0 - s3) / 18.0 + 2.0 * w,
                    ],
                    vec![
                        (1.0 + s3) / 9.0 + 5.0 * w,
                        (10.0 + 5.0 * s3) / 36.0 - 5.0 * w,
                        1.0 / 9.0,
                    ],
                ],
                vec![2.0 / 9.0, 5.0 / 9.0, 2.0 / 9.0],
                vec![(2.0 - s3) / 4.0, 0.5, (2.0 + s3) / 4.0],
            )]
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no table {other}; expected 1..=7"
            )))
        }
    };
    Ok(out)
}

fn balanced(weight: WeightSpec, r: usize) -> Result<ContinuousTableau> {
    let basis = OrthoBasis::build(weight, r + 1)?;
    cstab::truncated_family(&basis, r, Variant::Balanced)
}

fn gc(ct: &ContinuousTableau, s: usize) -> Result<RKTableau> {
    let basis = ct.basis().with_degree(ct.basis().n_max().max(s))?;
    let rule = gauss_christoffel(&basis, s)?;
    to_rk(ct, &rule, ReductionMode::Weighted)
}

/// Regenerate table `id` from its construction path.
pub fn regenerate(id: u8, omega: f64) -> Result<Vec<RKTableau>> {
    let lobatto = |r: usize, s: usize| -> Result<RKTableau> {
        let ct = balanced(WeightSpec::legendre(), r)?;
        let rule = chebyshev_gauss_lobatto(WeightSpec::legendre(), s)?;
        to_rk(&ct, &rule, ReductionMode::Unweighted)
    };
    let family = |w: WeightSpec| -> Result<Vec<RKTableau>> {
        (1..=3).map(|r| gc(&balanced(w, r)?, r)).collect()
    };
    match id {
        1 => Ok(vec![lobatto(1, 2)?, lobatto(2, 3)?, lobatto(2, 4)?]),
        2 => [
            WeightSpec::jacobi_type_i(),
            WeightSpec::jacobi_type_ii(),
            WeightSpec::jacobi_type_iii(),
        ]
        .into_iter()
        .map(|w| gc(&balanced(w, 2)?, 2))
        .collect(),
        3 => family(WeightSpec::jacobi_type_iii()),
        4 => family(WeightSpec::chebyshev_first()),
        5 => family(WeightSpec::chebyshev_second()),
        6 => {
            let ct = cstab::chebyshev_symplectic_pair()?;
            Ok(vec![gc(&ct, 1)?, gc(&ct, 2)?])
        }
        7 => Ok(vec![gc(&cstab::chebyshev_symplectic_family(omega)?, 3)?]),
        other => Err(Error::InvalidParameter(format!(
            "no table {other}; expected 1..=7"
        ))),
    }
}

/// One entry that differs from its reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryDiff {
    pub entry: String,
    pub computed: f64,
    pub expected: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableauCheck {
    pub table: u8,
    pub label: String,
    pub max_diff: f64,
    pub passes: bool,
    pub mismatches: Vec<EntryDiff>,
}

fn compare(rk: &RKTableau, want: &Golden, tol: f64) -> TableauCheck {
    let mut entries = Vec::new();
    let s = want.b.len();
    if rk.stages() != s {
        return TableauCheck {
            table: want.table,
            label: want.label.clone(),
            max_diff: f64::INFINITY,
            passes: false,
            mismatches: vec![EntryDiff {
                entry: "s".into(),
                computed: rk.stages() as f64,
                expected: s as f64,
                diff: f64::INFINITY,
            }],
        };
    }
    for i in 0..s {
        for j in 0..s {
            entries.push((format!("a_{}{}", i + 1, j + 1), rk.a[i][j], want.a[i][j]));
        }
        entries.push((format!("b_{}", i + 1), rk.b[i], want.b[i]));
        entries.push((format!("c_{}", i + 1), rk.c[i], want.c[i]));
    }
    let mut max_diff: f64 = 0.0;
    let mut mismatches = Vec::new();
    for (entry, computed, expected) in entries {
        let diff = (computed - expected).abs();
        max_diff = max_diff.max(diff);
        if !(diff <= tol) {
            mismatches.push(EntryDiff {
                entry,
                computed,
                expected,
                diff,
            });
        }
    }
    TableauCheck {
        table: want.table,
        label: want.label.clone(),
        max_diff,
        passes: mismatches.is_empty(),
        mismatches,
    }
}

/// Regenerate table `id` and diff it entrywise against the golden values.
pub fn reproduce(id: u8, omega: f64, tol: f64) -> Result<Vec<TableauCheck>> {
    let want = golden(id, omega)?;
    let got = regenerate(id, omega)?;
    Ok(got
        .iter()
        .zip(&want)
        .map(|(rk, w)| compare(rk, w, tol))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_reproduces() {
        for id in 1..=7 {
            for check in reproduce(id, 0.05, 1e-12).unwrap() {
                assert!(check.passes, "{check:?}");
            }
        }
    }

    #[test]
    fn table4_variant_entry_breaks_row_sum() {
        let t = table4_middle();
        assert!((t.a[1][0] + t.a[1][1] - t.c[1]).abs() < 1e-15);
        assert!((t.a[1][0] + TABLE4_VARIANT_A22 - t.c[1]).abs() > 0.05);
    }

    #[test]
    fn unknown_table() {
        assert!(golden(8, 0.0).is_err());
        assert!(regenerate(0, 0.0).is_err());
    }
}
