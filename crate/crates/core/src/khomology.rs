//! Even Fredholm modules and the index pairing with K-theory projections,
//! `⟨[F], [p]⟩ = ½ Tr(γ F [F, π(p)])`.

use serde::Serialize;

use crate::algebra::{AlgebraElement, FiniteAlgebra, Representation};
use crate::error::{mismatch, Error, Result};
use crate::operator::{
    anticommutator, check_grading, raw_commutator, ComplexMatrix, HermitianOperator, NUMERIC_TOL, STRUCTURAL_TOL,
};
use crate::triple::SpectralTriple;

/// `(A, H, F, γ)` with `F = Fᴴ`, `F² = 1`, `γF = −Fγ`, `[γ, π(a)] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FredholmModule {
    rep: Representation,
    f: ComplexMatrix,
    grading: ComplexMatrix,
}

impl FredholmModule {
    pub fn new(rep: Representation, f: ComplexMatrix, grading: ComplexMatrix) -> Result<Self> {
        let n = rep.hilbert_dim();
        if f.rows() != n || !f.is_square() {
            return Err(mismatch(format!("F of size {n}"), f.rows()));
        }
        if grading.rows() != n {
            return Err(mismatch(format!("grading of size {n}"), grading.rows()));
        }
        if !f.is_hermitian(STRUCTURAL_TOL) {
            return Err(Error::InvariantViolation("F is not self-adjoint".into()));
        }
        if !(&f * &f).approx_eq(&ComplexMatrix::identity(n), STRUCTURAL_TOL) {
            return Err(Error::InvariantViolation("F² ≠ 1".into()));
        }
        check_grading(&grading)?;
        if anticommutator(&grading, &f).max_abs() > NUMERIC_TOL {
            return Err(Error::NotGrading("grading does not anticommute with F".into()));
        }
        for img in rep.basis_images().iter().flatten() {
            if raw_commutator(&grading, img).max_abs() > NUMERIC_TOL {
                return Err(Error::NotGrading("grading does not commute with the algebra".into()));
            }
        }
        Ok(Self { rep, f, grading })
    }

    /// Normalized module of an even triple: the phase `sign(D)`, i.e. the
    /// limit of `D(1+D²)^{-1/2}` after rescaling `D`. Needs `D` invertible.
    pub fn from_triple(t: &SpectralTriple) -> Result<Self> {
        let grading = t
            .grading()
            .ok_or_else(|| Error::InvalidInput("Fredholm modules need a graded triple".into()))?
            .clone();
        let f = bounded_transform(t.dirac());
        let sign = f.eigh();
        let smallest = sign.values.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if smallest <= 1e-12 {
            return Err(Error::Unsupported("sign(D) needs an invertible Dirac operator".into()));
        }
        let f = sign.map_spectrum(f64::signum).hermitian_part();
        Self::new(t.representation().clone(), f, grading)
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.rep.algebra()
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn f(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn grading(&self) -> &ComplexMatrix {
        &self.grading
    }

    /// `(A, H, F)` viewed as a spectral triple with `D = F`.
    pub fn as_triple(&self) -> Result<SpectralTriple> {
        SpectralTriple::new(
            self.rep.clone(),
            HermitianOperator::new(self.f.clone())?,
            Some(self.grading.clone()),
        )
    }

    pub fn direct_sum(a: &Self, b: &Self) -> Result<Self> {
        Self::new(
            Representation::direct_sum(&a.rep, &b.rep)?,
            a.f.direct_sum(&b.f),
            a.grading.direct_sum(&b.grading),
        )
    }

    /// Conjugates `π`, `F` and `γ` by a unitary.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        let uh = u.adjoint();
        Self::new(
            self.rep.conjugate(u)?,
            &(u * &self.f) * &uh,
            &(u * &self.grading) * &uh,
        )
    }
}

/// `D (1 + D²)^{-1/2}`.
pub fn bounded_transform(d: &HermitianOperator) -> HermitianOperator {
    let eig = d.eigh();
    let m = eig.map_spectrum(|x| x / (1.0 + x * x).sqrt());
    HermitianOperator::symmetrized(&m).expect("spectral calculus preserves hermiticity")
}

/// A projection `p = p* = p²` in `Mₙ(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    n: usize,
    entries: Vec<AlgebraElement>,
}

impl Projection {
    /// `entries` is the row-major `n × n` array of algebra elements.
    pub fn new(n: usize, entries: Vec<AlgebraElement>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(mismatch(n * n, entries.len()));
        }
        let algebra = entries[0].algebra().clone();
        for e in &entries {
            if !e.algebra().same_shape(&algebra) {
                return Err(Error::AlgebraMismatch("projection entries live in different algebras".into()));
            }
        }
        let p = Self { n, entries };
        for i in 0..n {
            for j in 0..n {
                let adj = p.entry(j, i).adjoint();
                if adj.max_abs_diff(p.entry(i, j)) > STRUCTURAL_TOL {
                    return Err(Error::InvariantViolation("p ≠ p*".into()));
                }
                let mut sq = AlgebraElement::zero(&algebra);
                for k in 0..n {
                    sq = sq.add(&p.entry(i, k).mul(p.entry(k, j))?)?;
                }
                if sq.max_abs_diff(p.entry(i, j)) > STRUCTURAL_TOL {
                    return Err(Error::InvariantViolation("p ≠ p²".into()));
                }
            }
        }
        Ok(p)
    }

    /// A projection of the algebra itself, as a `1 × 1` matrix.
    pub fn scalar(p: AlgebraElement) -> Result<Self> {
        Self::new(1, vec![p])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i * self.n + j]
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        self.entries[0].algebra()
    }

    /// `π(p)` on `ℂⁿ ⊗ H`, block `(i, j)` being `π(p_ij)`.
    fn represent(&self, rep: &Representation) -> Result<ComplexMatrix> {
        let h = rep.hilbert_dim();
        let mut out = ComplexMatrix::zeros(self.n * h, self.n * h);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_block(i * h, j * h, &rep.apply(self.entry(i, j))?);
            }
        }
        Ok(out)
    }
}

/// `½ Tr(γ F [F, π(p)])` with `F`, `γ` amplified to `ℂⁿ ⊗ H`.
pub fn chern_pairing(m: &FredholmModule, p: &Projection) -> Result<f64> {
    if !p.algebra().same_shape(m.algebra()) {
        return Err(Error::AlgebraMismatch("projection and module algebras differ".into()));
    }
    let n = p.size();
    let pi_p = p.represent(&m.rep)?;
    let id = ComplexMatrix::identity(n);
    let f = crate::operator::tensor(&id, &m.f);
    let g = crate::operator::tensor(&id, &m.grading);
    let value = (&g * &f).trace_product(&raw_commutator(&f, &pi_p)) * 0.5;
    if value.im.abs() > NUMERIC_TOL {
        return Err(Error::InvariantViolation(format!("pairing has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re)
}

/// Pairings of a module over `ℂ²` with `p₊ = (1, 0)` and `p₋ = (0, 1)`.
pub fn pairing_vector(m: &FredholmModule) -> Result<(f64, f64)> {
    let alg = m.algebra();
    if alg.blocks() != [1, 1] {
        return Err(Error::AlgebraMismatch(format!("expected ℂ², found blocks {:?}", alg.blocks())));
    }
    let plus = Projection::scalar(AlgebraElement::from_real_values(alg, &[1.0, 0.0])?)?;
    let minus = Projection::scalar(AlgebraElement::from_real_values(alg, &[0.0, 1.0])?)?;
    Ok((chern_pairing(m, &plus)?, chern_pairing(m, &minus)?))
}
