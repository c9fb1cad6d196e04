//! Empirical convergence order on the pendulum.

use csrk::golden;
use csrk::integrate::{empirical_order, geometric_steps, Preset, SolverConfig};

fn main() -> csrk::Result<()> {
    let hs = geometric_steps(0.5, 2.0, 5);
    for id in [2u8, 3, 4, 5] {
        for (k, rk) in golden::regenerate(id, 0.0)?.iter().enumerate() {
            let est = empirical_order(
                rk,
                &Preset::Pendulum,
                0.0,
                4.0,
                &hs,
                &SolverConfig::default(),
            )?;
            let errors: Vec<String> = est.errors.iter().map(|e| format!("{e:.2e}")).collect();
            println!(
                "table {id} #{}: slope {:.3}  errors [{}]",
                k + 1,
                est.slope,
                errors.join(", ")
            );
        }
    }
    Ok(())
}
