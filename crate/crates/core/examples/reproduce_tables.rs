//! Regenerate every reference table and report the worst entry difference.

use csrk::golden;

fn main() -> csrk::Result<()> {
    for id in 1..=7u8 {
        let omegas: &[f64] = if id == 7 {
            &golden::DEFAULT_OMEGAS
        } else {
            &[0.0]
        };
        for &w in omegas {
            for check in golden::reproduce(id, w, 1e-12)? {
                println!(
                    "table {id} {:<32} max diff {:.1e} {}",
                    check.label,
                    check.max_diff,
                    if check.passes { "ok" } else { "MISMATCH" }
                );
            }
        }
    }
    Ok(())
}
