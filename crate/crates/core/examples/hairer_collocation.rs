//! Collocation written as a continuous tableau, reduced back to Gauss methods.

use csrk::cstab;
use csrk::orthopoly::{OrthoBasis, WeightSpec};
use csrk::quadrature::gauss_christoffel;
use csrk::reduce::{serialize, to_rk, Format, ReductionMode};

fn main() -> csrk::Result<()> {
    for r in 1..=3 {
        let rule = gauss_christoffel(&OrthoBasis::build(WeightSpec::legendre(), r)?, r)?;
        let ct = cstab::hairer_collocation_at(&rule.nodes)?;
        let rk = to_rk(&ct, &rule, ReductionMode::Weighted)?;
        println!("r = {r}\n{}", serialize(&rk, Format::Latex));
    }
    Ok(())
}
