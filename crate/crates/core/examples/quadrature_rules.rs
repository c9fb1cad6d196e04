//! Gauss-Christoffel and Chebyshev-Gauss-Lobatto rules and their exactness.

use csrk::orthopoly::{OrthoBasis, WeightSpec};
use csrk::quadrature::{chebyshev_gauss_lobatto, exactness_degree, gauss_christoffel};

fn main() -> csrk::Result<()> {
    for w in WeightSpec::named() {
        let basis = OrthoBasis::build(w, 3)?;
        let rule = gauss_christoffel(&basis, 3)?;
        println!(
            "{:<16} nodes {:.6?} weights {:.6?} exact to degree {}",
            w.name(),
            rule.nodes,
            rule.weights,
            exactness_degree(&rule, 12, 1e-12)?
        );
    }
    let lobatto = chebyshev_gauss_lobatto(WeightSpec::legendre(), 3)?;
    println!(
        "Lobatto s=3 ({}): nodes {:?} weights {:?}",
        lobatto.kind_name(),
        lobatto.nodes,
        lobatto.weights
    );
    Ok(())
}
