//! Stability functions and A-stability of a few reduced tableaux.

use csrk::analyze::{a_stability, stability_function};
use csrk::golden;

fn main() -> csrk::Result<()> {
    for id in [1u8, 3, 4, 6] {
        for (k, rk) in golden::regenerate(id, 0.0)?.iter().enumerate() {
            let r = stability_function(rk);
            let cert = a_stability(&r);
            println!(
                "table {id} #{}: P = {:.6?}  Q = {:.6?}  A-stable: {} (max |R(iy)| {:.3})",
                k + 1,
                r.numerator,
                r.denominator,
                cert.a_stable,
                cert.worst_modulus
            );
        }
    }
    Ok(())
}
