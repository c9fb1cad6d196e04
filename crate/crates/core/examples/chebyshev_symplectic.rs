//! Symplectic Chebyshev constructions: continuous residuals, reduced tableaux
//! and the one-parameter family.

use csrk::analyze::{cs_simplifying_levels, cs_symplectic_residual, symplectic_residual};
use csrk::cstab;
use csrk::orthopoly::{OrthoBasis, WeightSpec};
use csrk::quadrature::gauss_christoffel;
use csrk::reduce::{serialize, to_rk, Format, ReductionMode};

fn main() -> csrk::Result<()> {
    let pair = cstab::chebyshev_symplectic_pair()?;
    println!(
        "pair: continuous residual {:.1e}, levels {:?}",
        cs_symplectic_residual(&pair),
        cs_simplifying_levels(&pair, 12)
    );
    let basis = OrthoBasis::build(WeightSpec::chebyshev_first(), 3)?;
    for s in 1..=2 {
        let rk = to_rk(
            &pair,
            &gauss_christoffel(&basis, s)?,
            ReductionMode::Weighted,
        )?;
        println!(
            "s = {s}, residual {:.1e}\n{}",
            symplectic_residual(&rk),
            serialize(&rk, Format::Markdown)
        );
    }
    for omega in [0.0, 0.05, 0.1] {
        let fam = cstab::chebyshev_symplectic_family(omega)?;
        let rk = to_rk(
            &fam,
            &gauss_christoffel(&basis, 3)?,
            ReductionMode::Weighted,
        )?;
        println!(
            "omega = {omega}: residual {:.1e}, a_11 = {:.12}",
            symplectic_residual(&rk),
            rk.a[0][0]
        );
    }
    Ok(())
}
