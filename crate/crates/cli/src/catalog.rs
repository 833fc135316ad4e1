//! Named triples and modules reachable from the command line.

use anyhow::{bail, Result};
use clap::ValueEnum;
use ncgp::algebra::FiniteAlgebra;
use ncgp::khomology::FredholmModule;
use ncgp::triple::{
    amplified_two_point, amplify, lattice_line, point_character, product, pullback_module, two_point, SpectralTriple,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Catalog {
    /// ℂ² on ℂ², `D = λ⁻¹σₓ`.
    TwoPoint,
    /// ℂ² on ℂ⁴ through two copies, scale `μ`.
    AmplifiedTwoPoint,
    /// Pullback module `F₊` viewed as a triple.
    Pullback,
    /// `amplify(two_point(λ))`.
    Amplify,
    /// Lattice line with `--points` sites and unit spacing.
    LatticeLine,
    /// `two_point(λ) × amplified_two_point(μ)`.
    Product,
}

pub fn triple(which: Catalog, lambda: f64, mu: f64, points: usize) -> Result<SpectralTriple> {
    Ok(match which {
        Catalog::TwoPoint => two_point(lambda)?,
        Catalog::AmplifiedTwoPoint => amplified_two_point(mu)?,
        Catalog::Pullback => pullback_module(&point_character(&FiniteAlgebra::commutative(2), 0)?)?.as_triple()?,
        Catalog::Amplify => amplify(&two_point(lambda)?)?,
        Catalog::LatticeLine => lattice_line(points, 1.0)?,
        Catalog::Product => product(&two_point(lambda)?, &amplified_two_point(mu)?)?,
    })
}

/// The four modules of the ℂ² pairing table: `F₁`, `F₂`, `F₊`, `F₋`.
pub fn modules(lambda: f64, mu: f64) -> Result<Vec<(&'static str, FredholmModule)>> {
    if !(lambda > 0.0 && mu > 0.0) {
        bail!("λ and μ must be positive");
    }
    let c2 = FiniteAlgebra::commutative(2);
    Ok(vec![
        ("F1", FredholmModule::from_triple(&two_point(lambda)?)?),
        ("F2", FredholmModule::from_triple(&amplified_two_point(mu)?)?),
        ("F+", pullback_module(&point_character(&c2, 0)?)?),
        ("F-", pullback_module(&point_character(&c2, 1)?)?),
    ])
}
