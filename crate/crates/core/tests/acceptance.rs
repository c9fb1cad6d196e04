//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! (visible with `--nocapture`) before asserting.

#![allow(clippy::needless_range_loop)]

use std::time::Instant;

use csrk::analyze::{
    a_stability, cs_simplifying_levels, stability_function, symmetric_residual, symplectic_residual,
};
use csrk::cstab::{self, IndexMap};
use csrk::golden;
use csrk::integrate::{self, empirical_order, geometric_steps, Preset, Problem, SolverConfig};
use csrk::orthopoly::{OrthoBasis, WeightSpec};
use csrk::poly::Poly;
use csrk::quadrature::gauss_christoffel;
use csrk::reduce::{to_rk, RKTableau, ReductionMode};
use csrk::{Provenance, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u8, ok: bool, detail: &str) {
    println!(
        "criterion {n}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn balanced(w: WeightSpec, r: usize) -> cstab::ContinuousTableau {
    let basis = OrthoBasis::build(w, r + 1).unwrap();
    cstab::truncated_family(&basis, r, Variant::Balanced).unwrap()
}

fn gc_reduce(ct: &cstab::ContinuousTableau, s: usize) -> RKTableau {
    let basis = OrthoBasis::build(ct.weight(), s).unwrap();
    let rule = gauss_christoffel(&basis, s).unwrap();
    to_rk(ct, &rule, ReductionMode::Weighted).unwrap()
}

fn gauss_legendre(r: usize) -> RKTableau {
    gc_reduce(&balanced(WeightSpec::legendre(), r), r)
}

/// Closed-form Gauss-Legendre tableaux with 1, 2, 3 stages.
fn gauss_legendre_closed_form(r: usize) -> RKTableau {
    let (a, b, c) = match r {
        1 => (vec![vec![0.5]], vec![1.0], vec![0.5]),
        2 => {
            let q = 3f64.sqrt() / 6.0;
            (
                vec![vec![0.25, 0.25 - q], vec![0.25 + q, 0.25]],
                vec![0.5, 0.5],
                vec![0.5 - q, 0.5 + q],
            )
        }
        3 => {
            let q = 15f64.sqrt();
            (
                vec![
                    vec![5.0 / 36.0, 2.0 / 9.0 - q / 15.0, 5.0 / 36.0 - q / 30.0],
                    vec![5.0 / 36.0 + q / 24.0, 2.0 / 9.0, 5.0 / 36.0 - q / 24.0],
                    vec![5.0 / 36.0 + q / 30.0, 2.0 / 9.0 + q / 15.0, 5.0 / 36.0],
                ],
                vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
                vec![0.5 - q / 10.0, 0.5, 0.5 + q / 10.0],
            )
        }
        _ => unreachable!(),
    };
    RKTableau::new(a, b, c, Provenance::new("closed_form")).unwrap()
}

#[test]
fn criterion_1_table_reproduction() {
    let start = Instant::now();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for id in 1..=7u8 {
        let omegas: &[f64] = if id == 7 { &[0.0, 0.05] } else { &[0.0] };
        for &w in omegas {
            for check in golden::reproduce(id, w, 1e-12).unwrap() {
                count += 1;
                worst = worst.max(check.max_diff);
                if !check.passes {
                    failures.push(format!("{} {}", check.table, check.label));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && count == 19 && elapsed < 5.0;
    report(
        1,
        ok,
        &format!(
            "{count} tableaux, worst entry diff {worst:.1e}, {elapsed:.2} s, failures {failures:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_stability_functions() {
    let t1 = golden::regenerate(1, 0.0).unwrap();
    let midpoint = gauss_legendre(1);
    let close = |got: &[f64], want: &[f64]| {
        got.len() == want.len() && got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-12)
    };
    let r1 = stability_function(&midpoint).scaled(2.0);
    let mut ok = close(&r1.numerator, &[2.0, 1.0]) && close(&r1.denominator, &[2.0, -1.0]);
    ok &= a_stability(&r1).a_stable;
    for rk in &t1[1..] {
        let r = stability_function(rk).scaled(12.0);
        ok &= close(&r.numerator, &[12.0, 6.0, 1.0]) && close(&r.denominator, &[12.0, -6.0, 1.0]);
        ok &= a_stability(&r).a_stable;
    }
    report(
        2,
        ok,
        "midpoint (2+z)/(2-z); Lobatto-node methods (12+6z+z^2)/(12-6z+z^2); all A-stable",
    );
    assert!(ok);
}

/// `int_0^1 x^k 2^(a+b) (1-x)^a x^b dx = 2^(a+b) B(b+k+1, a+1)`.
fn beta_moment(w: WeightSpec, k: usize) -> f64 {
    let (a, b) = (w.alpha, w.beta);
    let ln_beta = statrs::function::gamma::ln_gamma(b + k as f64 + 1.0)
        + statrs::function::gamma::ln_gamma(a + 1.0)
        - statrs::function::gamma::ln_gamma(a + b + k as f64 + 2.0);
    2f64.powf(a + b) * ln_beta.exp()
}

#[test]
fn criterion_3_gauss_christoffel_exactness() {
    let mut worst_exact: f64 = 0.0;
    let mut sharp_everywhere = true;
    let mut sharp_somewhere = [false; 6];
    for s in 1..=5 {
        for (wi, w) in WeightSpec::named().into_iter().enumerate() {
            let basis = OrthoBasis::build(w, s).unwrap();
            let rule = gauss_christoffel(&basis, s).unwrap();
            for k in 0..=2 * s {
                let q: f64 = rule.apply(|x| x.powi(k as i32));
                let err = (q - beta_moment(w, k)).abs();
                if k < 2 * s {
                    worst_exact = worst_exact.max(err);
                } else if err > 1e-12 {
                    sharp_somewhere[wi] = true;
                } else {
                    sharp_everywhere = false;
                }
            }
        }
    }
    let ok = worst_exact <= 1e-12 && sharp_somewhere.iter().any(|&b| b);
    report(
        3,
        ok,
        &format!(
            "max error on k <= 2s-1: {worst_exact:.1e}; k = 2s fails for every (weight, s): {sharp_everywhere}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_empirical_orders() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let (t0, t1) = (0.0, 4.0);
    let mut cases: Vec<(String, RKTableau, f64, Vec<f64>)> = Vec::new();
    let sweep = geometric_steps(0.5, 2.0, 5);
    for (i, rk) in golden::regenerate(2, 0.0).unwrap().into_iter().enumerate() {
        cases.push((format!("table 2 method {}", i + 1), rk, 2.0, sweep.clone()));
    }
    for id in [3u8, 4, 5] {
        let rk = golden::regenerate(id, 0.0).unwrap().pop().unwrap();
        cases.push((format!("table {id} r=3"), rk, 4.0, sweep.clone()));
    }
    for w in [0.0, 0.01, 0.05] {
        let rk = golden::regenerate(7, w).unwrap().pop().unwrap();
        cases.push((format!("table 7 omega={w}"), rk, 4.0, sweep.clone()));
    }
    for r in 1..=3 {
        // the 6th-order sweep is kept above the rounding floor
        let hs = if r == 3 {
            geometric_steps(1.0, 2.0, 5)
        } else {
            sweep.clone()
        };
        cases.push((
            format!("Gauss-Legendre r={r}"),
            gauss_legendre(r),
            2.0 * r as f64,
            hs,
        ));
    }
    let mut all = true;
    for (name, rk, want, hs) in &cases {
        let est = empirical_order(rk, &Preset::Pendulum, t0, t1, hs, &cfg).unwrap();
        let ok = (est.slope - want).abs() <= 0.2;
        all &= ok;
        println!(
            "    {name}: slope {:.3} (expected {want}) pairs {:.2?}",
            est.slope, est.pair_slopes
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    all &= elapsed < 60.0;
    report(
        4,
        all,
        &format!(
            "{} sweeps of 5 step sizes on the pendulum, {elapsed:.2} s",
            cases.len()
        ),
    );
    assert!(all);
}

#[test]
fn criterion_5_structure_preservation() {
    let cfg = SolverConfig::default();
    let mut symplectic: Vec<(String, RKTableau)> = Vec::new();
    for (i, rk) in golden::regenerate(6, 0.0).unwrap().into_iter().enumerate() {
        symplectic.push((format!("table 6 #{}", i + 1), rk));
    }
    for w in [0.0, 0.05] {
        symplectic.push((
            format!("table 7 omega={w}"),
            golden::regenerate(7, w).unwrap().remove(0),
        ));
    }
    for r in 1..=5 {
        symplectic.push((format!("Gauss-Legendre r={r}"), gauss_legendre(r)));
    }
    let mut ok = true;
    let mut worst_res: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    for (name, rk) in &symplectic {
        let res = symplectic_residual(rk);
        worst_res = worst_res.max(res);
        let z0 = Preset::Harmonic.initial_state();
        let traj =
            integrate::integrate(rk, &Preset::Harmonic, &z0, 0.0, 1000.0, 0.1, &cfg).unwrap();
        assert_eq!(traj.steps(), 10_000);
        let drift = integrate::invariant_drift(&traj).unwrap().max_drift;
        worst_drift = worst_drift.max(drift);
        if res > 1e-12 || drift > 1e-9 {
            ok = false;
            println!("    {name}: residual {res:.1e}, drift {drift:.1e}");
        }
    }

    // every symmetric tableau among the reference set is self-adjoint
    let mut candidates: Vec<RKTableau> = Vec::new();
    for id in 1..=7u8 {
        candidates.extend(golden::regenerate(id, 0.05).unwrap());
    }
    candidates.extend((1..=5).map(gauss_legendre));
    let mut symmetric = 0;
    let mut worst_return: f64 = 0.0;
    for rk in &candidates {
        if symmetric_residual(rk) > 1e-12 {
            continue;
        }
        symmetric += 1;
        let z0 = Preset::Pendulum.initial_state();
        let fwd = integrate::rk_step(rk, &Preset::Pendulum, 0.0, &z0, 0.1, &cfg).unwrap();
        let back = integrate::rk_step(rk, &Preset::Pendulum, 0.1, &fwd.z, -0.1, &cfg).unwrap();
        let err = back
            .z
            .iter()
            .zip(&z0)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        worst_return = worst_return.max(err);
    }
    ok &= worst_return <= 10.0 * cfg.tol && symmetric > 0;
    report(
        5,
        ok,
        &format!(
            "{} symplectic tableaux: residual <= {worst_res:.1e}, harmonic drift over 1e4 steps <= {worst_drift:.1e}; \
             {symmetric} symmetric tableaux return within {worst_return:.1e}",
            symplectic.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_collapse_identity() {
    let mut worst: f64 = 0.0;
    for r in 2..=4 {
        for w in WeightSpec::named() {
            let hi = gc_reduce(&balanced(w, r), r - 1);
            let lo = gc_reduce(&balanced(w, r - 1), r - 1);
            worst = worst.max(hi.max_abs_diff(&lo));
        }
    }
    let ok = worst <= 1e-13;
    report(
        6,
        ok,
        &format!("r = 2, 3, 4 over six weights, max entry diff {worst:.1e}"),
    );
    assert!(ok);
}

/// Random symplectic construction satisfying `C(eta0)` (Legendre, `Bhat = 1`)
/// or `C(1)` (other weights), with skew entries in `[-1, 1]` on indices up to 4.
/// `None` when a solved entry leaves `[-1, 1]`.
fn random_symplectic(rng: &mut ChaCha8Rng, legendre: bool) -> Option<cstab::ContinuousTableau> {
    let mut skew = IndexMap::new();
    let put = |m: &mut IndexMap, i: usize, j: usize, v: f64| {
        m.insert((i, j), v);
        m.insert((j, i), -v);
    };
    if legendre {
        let basis = OrthoBasis::build(WeightSpec::legendre(), 4).unwrap();
        let eta0 = rng.gen_range(1..=3usize);
        for j in 0..eta0 {
            put(&mut skew, j + 1, j, cstab::legendre_xi(j + 1));
        }
        for i in eta0..=4 {
            for j in (i + 1)..=4 {
                if rng.gen_bool(0.7) {
                    put(&mut skew, i, j, rng.gen_range(-1.0..=1.0));
                }
            }
        }
        Some(cstab::symplectic_skew(&basis, &[1.0], &skew).unwrap())
    } else {
        let w = WeightSpec::named()[rng.gen_range(1..6)];
        let basis = OrthoBasis::build(w, 4).unwrap();
        let lambda = cstab::bhat_truncation(&basis, rng.gen_range(2..=4)).unwrap();
        for i in 1..=4 {
            for j in (i + 1)..=4 {
                if rng.gen_bool(0.5) {
                    put(&mut skew, i, j, rng.gen_range(-1.0..=1.0));
                }
            }
        }
        // column 0 solves the C(1) equations sum_j alpha_ij lambda_j = <x - 1/2, P_i>
        let target = basis.expand(&(&Poly::x() - &Poly::constant(0.5))).unwrap();
        for i in 1..=4 {
            let rest: f64 = (1..lambda.len())
                .map(|j| skew.get(&(i, j)).copied().unwrap_or(0.0) * lambda[j])
                .sum();
            let v = (target[i] - rest) / lambda[0];
            if v.abs() > 1.0 {
                return None;
            }
            if v != 0.0 {
                put(&mut skew, i, 0, v);
            }
        }
        Some(cstab::symplectic_skew(&basis, &lambda, &skew).unwrap())
    }
}

#[test]
fn criterion_7_closure_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut violations = 0;
    let mut eta_seen = std::collections::BTreeSet::new();
    let mut rejected = 0;
    let mut largest: f64 = 0.0;
    for k in 0..50 {
        let ct = loop {
            match random_symplectic(&mut rng, k % 2 == 0) {
                Some(ct) => break ct,
                None => rejected += 1,
            }
        };
        let entries = ct.provenance().params.values();
        largest = entries.fold(largest, |m, v| m.max(v.abs()));
        let l = cs_simplifying_levels(&ct, 12);
        eta_seen.insert(l.alpha);
        if l.beta < l.rho.min(l.alpha) {
            violations += 1;
            println!(
                "    sample {k}: xi {} eta {} zeta {}",
                l.rho, l.alpha, l.beta
            );
        }
    }
    let ok = violations == 0;
    report(
        7,
        ok,
        &format!("50 seeded samples ({rejected} redrawn), max |entry| {largest:.3}, eta values {eta_seen:?}, {violations} violations"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_hairer_collocation() {
    let mut worst: f64 = 0.0;
    for r in 1..=3 {
        let basis = OrthoBasis::build(WeightSpec::legendre(), r).unwrap();
        let rule = gauss_christoffel(&basis, r).unwrap();
        let ct = cstab::hairer_collocation_at(&rule.nodes).unwrap();
        let rk = to_rk(&ct, &rule, ReductionMode::Weighted).unwrap();
        worst = worst.max(rk.max_abs_diff(&gauss_legendre_closed_form(r)));
        worst = worst.max(rk.max_abs_diff(&gauss_legendre(r)));
    }
    let ok = worst <= 1e-12;
    report(
        8,
        ok,
        &format!("r = 1, 2, 3 against closed-form Gauss-Legendre, max diff {worst:.1e}"),
    );
    assert!(ok);
}
