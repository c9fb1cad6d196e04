//! Balanced truncated Legendre tableaux reduce to the Gauss-Legendre methods.

use csrk::analyze::analyze;
use csrk::orthopoly::{OrthoBasis, WeightSpec};
use csrk::quadrature::gauss_christoffel;
use csrk::reduce::{serialize, to_rk, Format, ReductionMode};
use csrk::{cstab, Variant};

fn main() -> csrk::Result<()> {
    for r in 1..=3 {
        let basis = OrthoBasis::build(WeightSpec::legendre(), r + 1)?;
        let ct = cstab::truncated_family(&basis, r, Variant::Balanced)?;
        let rule = gauss_christoffel(&OrthoBasis::build(WeightSpec::legendre(), r)?, r)?;
        let rk = to_rk(&ct, &rule, ReductionMode::Weighted)?;
        println!("r = {r}\n{}", serialize(&rk, Format::Markdown));
        println!("{}\n", analyze(&rk).summary());
    }
    Ok(())
}
