//! Energy behaviour on an eccentric Kepler orbit, symplectic against plain.

use csrk::golden;
use csrk::integrate::{integrate, invariant_drift, Preset, Problem, SolverConfig};

fn main() -> csrk::Result<()> {
    let z0 = Preset::Kepler.initial_state();
    let cases = [
        (
            "symplectic Chebyshev s=2",
            golden::regenerate(6, 0.0)?.remove(1),
        ),
        (
            "non-symplectic Jacobi s=2",
            golden::regenerate(2, 0.0)?.remove(0),
        ),
    ];
    for (name, rk) in &cases {
        let traj = integrate(
            rk,
            &Preset::Kepler,
            &z0,
            0.0,
            100.0,
            0.01,
            &SolverConfig::default(),
        )?;
        let d = invariant_drift(&traj)?;
        println!(
            "{name:<28} max |H - H0| {:.2e}  final {:.2e}  trend {:+.2e}/step",
            d.max_drift, d.final_drift, d.linear_fit_rate
        );
    }
    Ok(())
}
