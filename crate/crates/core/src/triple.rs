//! Finite spectral triples, the graded product `D₁⊗1 + γ₁⊗D₂`, and the
//! catalog of concrete triples over `ℂ`, `ℂ²` and a lattice line.

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteAlgebra, Representation};
use crate::error::{mismatch, Error, Result};
use crate::khomology::FredholmModule;
use crate::operator::{
    anticommutator, check_grading, raw_commutator, tensor, ComplexMatrix, HermitianOperator, C64, NUMERIC_TOL, ZERO,
};

/// `(A, H, D)` with optional grading `γ`, all finite-dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleRepr", into = "TripleRepr")]
pub struct SpectralTriple {
    rep: Representation,
    dirac: HermitianOperator,
    grading: Option<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    algebra: FiniteAlgebra,
    representation: Representation,
    dirac: ComplexMatrix,
    grading: Option<ComplexMatrix>,
}

impl TryFrom<TripleRepr> for SpectralTriple {
    type Error = Error;

    fn try_from(r: TripleRepr) -> Result<Self> {
        if !r.algebra.same_shape(r.representation.algebra()) {
            return Err(Error::AlgebraMismatch("triple algebra differs from representation algebra".into()));
        }
        SpectralTriple::new(r.representation, HermitianOperator::new(r.dirac)?, r.grading)
    }
}

impl From<SpectralTriple> for TripleRepr {
    fn from(t: SpectralTriple) -> Self {
        TripleRepr {
            algebra: t.rep.algebra().clone(),
            representation: t.rep,
            dirac: t.dirac.into_matrix(),
            grading: t.grading,
        }
    }
}

impl SpectralTriple {
    pub fn new(rep: Representation, dirac: HermitianOperator, grading: Option<ComplexMatrix>) -> Result<Self> {
        let n = rep.hilbert_dim();
        if dirac.dim() != n {
            return Err(mismatch(format!("Dirac of size {n}"), dirac.dim()));
        }
        if let Some(g) = &grading {
            if g.rows() != n {
                return Err(mismatch(format!("grading of size {n}"), g.rows()));
            }
            check_grading(g)?;
            if anticommutator(g, dirac.matrix()).max_abs() > NUMERIC_TOL {
                return Err(Error::NotGrading("grading does not anticommute with D".into()));
            }
            for img in rep.basis_images().iter().flatten() {
                if raw_commutator(g, img).max_abs() > NUMERIC_TOL {
                    return Err(Error::NotGrading("grading does not commute with the algebra".into()));
                }
            }
        }
        Ok(Self { rep, dirac, grading })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.rep.algebra()
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn dirac(&self) -> &HermitianOperator {
        &self.dirac
    }

    pub fn grading(&self) -> Option<&ComplexMatrix> {
        self.grading.as_ref()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.rep.hilbert_dim()
    }

    /// The algebra unit acts as the identity.
    pub fn is_unital(&self) -> bool {
        self.rep.is_unital()
    }

    /// Same triple with `D` replaced by `s·D`.
    pub fn with_scaled_dirac(&self, s: f64) -> Self {
        Self {
            rep: self.rep.clone(),
            dirac: self.dirac.scale(s),
            grading: self.grading.clone(),
        }
    }

    /// Same triple with a different Dirac operator, re-validated.
    pub fn with_dirac(&self, dirac: HermitianOperator) -> Result<Self> {
        Self::new(self.rep.clone(), dirac, self.grading.clone())
    }

    /// Same algebra and Dirac with a different grading (or none), re-validated.
    pub fn with_grading(&self, grading: Option<ComplexMatrix>) -> Result<Self> {
        Self::new(self.rep.clone(), self.dirac.clone(), grading)
    }
}

/// Graded product: `A₁⊗A₂`, `π₁⊗π₂`, `D = D₁⊗1 + γ₁⊗D₂`, grading
/// `γ₁⊗γ₂` when the second factor is graded.
pub fn product(t1: &SpectralTriple, t2: &SpectralTriple) -> Result<SpectralTriple> {
    let g1 = t1
        .grading
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the first factor of a product must be graded".into()))?;
    let rep = Representation::tensor(&t1.rep, &t2.rep);
    let id2 = ComplexMatrix::identity(t2.hilbert_dim());
    let d = &tensor(t1.dirac.matrix(), &id2) + &tensor(g1, t2.dirac.matrix());
    let grading = t2.grading.as_ref().map(|g2| tensor(g1, g2));
    SpectralTriple::new(rep, HermitianOperator::symmetrized(&d)?, grading)
}

/// Doubling `H ↦ H ⊕ H`, `π ↦ π ⊕ 0`, `D ↦ [[D, 1], [1, −D]]`,
/// `γ ↦ diag(γ, −γ)`.
pub fn amplify(t: &SpectralTriple) -> Result<SpectralTriple> {
    let n = t.hilbert_dim();
    let rep = t.rep.pad_zero(n);
    let mut d = ComplexMatrix::zeros(2 * n, 2 * n);
    let id = ComplexMatrix::identity(n);
    d.set_block(0, 0, t.dirac.matrix());
    d.set_block(0, n, &id);
    d.set_block(n, 0, &id);
    d.set_block(n, n, &-t.dirac.matrix());
    let grading = t.grading.as_ref().map(|g| g.direct_sum(&-g));
    SpectralTriple::new(rep, HermitianOperator::new(d)?, grading)
}

fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

/// `ℂ²` on `ℂ²` with `D = λ⁻¹σₓ`, `γ = diag(1, −1)`.
pub fn two_point(lambda: f64) -> Result<SpectralTriple> {
    check_positive("lambda", lambda)?;
    SpectralTriple::new(
        Representation::diagonal(2),
        HermitianOperator::new(sigma_x().scale_real(1.0 / lambda))?,
        Some(ComplexMatrix::real_diag(&[1.0, -1.0])),
    )
}

/// Amplification of `(ℂ², diag, 0, I₂)` with `D₂ = 2μ⁻¹F₂`.
pub fn amplified_two_point(mu: f64) -> Result<SpectralTriple> {
    check_positive("mu", mu)?;
    let base = SpectralTriple::new(
        Representation::diagonal(2),
        HermitianOperator::zeros(2),
        Some(ComplexMatrix::identity(2)),
    )?;
    Ok(amplify(&base)?.with_scaled_dirac(2.0 / mu))
}

/// One-point space `ℂ` on `ℂ` with `D = 0`.
pub fn trivial() -> SpectralTriple {
    SpectralTriple::new(
        Representation::diagonal(1),
        HermitianOperator::zeros(1),
        Some(ComplexMatrix::identity(1)),
    )
    .expect("trivial triple is valid")
}

/// `n` grid points with spacing `h` and half the central-difference
/// discretization of `i d/dx`, open boundary.
pub fn lattice_line(n: usize, h: f64) -> Result<SpectralTriple> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("lattice needs at least 3 points, got {n}")));
    }
    check_positive("h", h)?;
    let w = 1.0 / (4.0 * h);
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C64::new(0.0, -w)
        } else if i == j + 1 {
            C64::new(0.0, w)
        } else {
            ZERO
        }
    });
    SpectralTriple::new(Representation::diagonal(n), HermitianOperator::new(d)?, None)
}

/// `two_point(λ) × 2·amplify(lattice_line(n, h))`: two copies of the
/// lattice line at distance `λ`, coupled through a non-unital factor.
pub fn two_sheeted_lattice(lambda: f64, n: usize, h: f64) -> Result<SpectralTriple> {
    let sheet = amplify(&lattice_line(n, h)?)?.with_scaled_dirac(2.0);
    product(&two_point(lambda)?, &sheet)
}

/// Fredholm module over `A` pulled back along a character `χ: A → ℂ`:
/// `π(a) = diag(χ(a), 0)`, `F = σₓ`, `γ = diag(1, −1)`.
pub fn pullback_module(chi: &Representation) -> Result<FredholmModule> {
    if chi.hilbert_dim() != 1 {
        return Err(mismatch("one-dimensional character", chi.hilbert_dim()));
    }
    FredholmModule::new(chi.pad_zero(1), sigma_x(), ComplexMatrix::real_diag(&[1.0, -1.0]))
}

/// Evaluation at point `k` of `ℂⁿ`, as a one-dimensional representation.
pub fn point_character(algebra: &FiniteAlgebra, k: usize) -> Result<Representation> {
    if !algebra.is_commutative() {
        return Err(Error::Unsupported("point characters need a commutative algebra".into()));
    }
    if k >= algebra.num_blocks() {
        return Err(Error::InvalidInput(format!("point {k} out of range")));
    }
    let placements: Vec<Vec<usize>> = (0..algebra.num_blocks())
        .map(|i| if i == k { vec![0] } else { vec![] })
        .collect();
    Representation::block_embedding(algebra, 1, &placements)
}
