//! Build orthonormal bases for the named weights and check them.

use csrk::orthopoly::{OrthoBasis, WeightSpec};

fn main() -> csrk::Result<()> {
    for w in WeightSpec::named() {
        let basis = OrthoBasis::build(w, 12)?;
        let gram = basis.gram();
        let defect = gram
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, v)| if i == j { (v - 1.0).abs() } else { v.abs() })
            })
            .fold(0.0, f64::max);
        println!(
            "{:<16} mass {:.6}  P_3(0.25) = {:+.6}  |G - I| = {defect:.1e}",
            w.name(),
            w.total_mass(),
            basis.eval(3, 0.25)?
        );
    }
    let cheb = OrthoBasis::build(WeightSpec::chebyshev_first(), 3)?;
    println!(
        "Chebyshev P_2 in powers of x: {:?}",
        cheb.monomial_coeffs(2)?
    );
    Ok(())
}
