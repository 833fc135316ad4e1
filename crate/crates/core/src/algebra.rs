//! Finite-dimensional C*-algebras `⊕ M_{n_i}(ℂ)`, their (possibly
//! non-unital) representations, and states given by block density matrices.
//!
//! Tensor-product algebras remember their two factors. Block `(i, j)` of
//! `A₁ ⊗ A₂` sits at index `i * k₂ + j` and is identified with
//! `M_{n_i} ⊗ M_{m_j}` through [`tensor`], so that product states and slice
//! maps can be computed directly on coordinates.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::operator::{eigh, tensor, ComplexMatrix, C64, ONE, STRUCTURAL_TOL, ZERO};

/// `⊕ᵢ M_{nᵢ}(ℂ)`, optionally remembering a factorization `A₁ ⊗ A₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Box<(FiniteAlgebra, FiniteAlgebra)>>,
}

impl FiniteAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidInput("an algebra needs at least one non-empty block".into()));
        }
        Ok(Self { blocks, factors: None })
    }

    /// `ℂᵏ`, functions on `k` points.
    pub fn commutative(k: usize) -> Self {
        Self::new(vec![1; k]).expect("k must be positive")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    /// Real dimension of the self-adjoint part, `Σ nᵢ²`.
    pub fn real_dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn factors(&self) -> Option<(&FiniteAlgebra, &FiniteAlgebra)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    /// Same block structure; factorization metadata is ignored.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }

    pub fn tensor(a: &Self, b: &Self) -> Self {
        let blocks = a
            .blocks
            .iter()
            .flat_map(|&n| b.blocks.iter().map(move |&m| n * m))
            .collect();
        Self {
            blocks,
            factors: Some(Box::new((a.clone(), b.clone()))),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "blocks {:?} vs {:?}",
                self.blocks, other.blocks
            )))
        }
    }
}

/// An element of a [`FiniteAlgebra`], one square matrix per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement {
    algebra: FiniteAlgebra,
    block_matrices: Vec<ComplexMatrix>,
}

impl AlgebraElement {
    pub fn new(algebra: FiniteAlgebra, block_matrices: Vec<ComplexMatrix>) -> Result<Self> {
        if block_matrices.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), block_matrices.len()));
        }
        for (m, &n) in block_matrices.iter().zip(&algebra.blocks) {
            if m.rows() != n || m.cols() != n {
                return Err(mismatch(format!("{n}x{n}"), format!("{}x{}", m.rows(), m.cols())));
            }
        }
        Ok(Self { algebra, block_matrices })
    }

    pub fn zero(algebra: &FiniteAlgebra) -> Self {
        let block_matrices = algebra.blocks.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        Self { algebra: algebra.clone(), block_matrices }
    }

    pub fn unit(algebra: &FiniteAlgebra) -> Self {
        let block_matrices = algebra.blocks.iter().map(|&n| ComplexMatrix::identity(n)).collect();
        Self { algebra: algebra.clone(), block_matrices }
    }

    /// Element of a commutative algebra from its values at the points.
    pub fn from_values(algebra: &FiniteAlgebra, values: &[C64]) -> Result<Self> {
        if !algebra.is_commutative() {
            return Err(Error::Unsupported("from_values needs a commutative algebra".into()));
        }
        if values.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), values.len()));
        }
        let block_matrices = values.iter().map(|&z| ComplexMatrix::diag(&[z])).collect();
        Ok(Self { algebra: algebra.clone(), block_matrices })
    }

    pub fn from_real_values(algebra: &FiniteAlgebra, values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_values(algebra, &v)
    }

    /// Value at each point of a commutative algebra.
    pub fn values(&self) -> Option<Vec<C64>> {
        self.algebra
            .is_commutative()
            .then(|| self.block_matrices.iter().map(|m| m[(0, 0)]).collect())
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.block_matrices
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            block_matrices: self.block_matrices.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.block_matrices.iter().all(|m| m.is_hermitian(tol))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        let block_matrices = self
            .block_matrices
            .iter()
            .zip(&other.block_matrices)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self { algebra: self.algebra.clone(), block_matrices })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.linear_combination(ONE, other, ONE)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            block_matrices: self.block_matrices.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// `s * self + t * other`.
    pub fn linear_combination(&self, s: C64, other: &Self, t: C64) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        let block_matrices = self
            .block_matrices
            .iter()
            .zip(&other.block_matrices)
            .map(|(a, b)| &a.scale(s) + &b.scale(t))
            .collect();
        Ok(Self { algebra: self.algebra.clone(), block_matrices })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if !self.algebra.same_shape(&other.algebra) {
            return f64::INFINITY;
        }
        self.block_matrices
            .iter()
            .zip(&other.block_matrices)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// `a₁ ⊗ a₂` on the tensor-product algebra.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        let algebra = FiniteAlgebra::tensor(&a.algebra, &b.algebra);
        let block_matrices = a
            .block_matrices
            .iter()
            .flat_map(|x| b.block_matrices.iter().map(move |y| tensor(x, y)))
            .collect();
        Self { algebra, block_matrices }
    }

    /// Real coordinates of a self-adjoint element in [`self_adjoint_basis`] order.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.algebra.real_dim());
        for m in &self.block_matrices {
            let n = m.rows();
            for r in 0..n {
                x.push(m[(r, r)].re);
            }
            for r in 0..n {
                for s in r + 1..n {
                    let z = (m[(r, s)] + m[(s, r)].conj()) * 0.5;
                    x.push(z.re);
                    x.push(z.im);
                }
            }
        }
        x
    }

    /// Inverse of [`AlgebraElement::real_coordinates`].
    pub fn from_real_coordinates(algebra: &FiniteAlgebra, x: &[f64]) -> Result<Self> {
        if x.len() != algebra.real_dim() {
            return Err(mismatch(algebra.real_dim(), x.len()));
        }
        let mut it = x.iter().copied();
        let mut block_matrices = Vec::with_capacity(algebra.num_blocks());
        for &n in &algebra.blocks {
            let mut m = ComplexMatrix::zeros(n, n);
            for r in 0..n {
                m[(r, r)] = C64::new(it.next().unwrap(), 0.0);
            }
            for r in 0..n {
                for s in r + 1..n {
                    let re = it.next().unwrap();
                    let im = it.next().unwrap();
                    m[(r, s)] = C64::new(re, im);
                    m[(s, r)] = C64::new(re, -im);
                }
            }
            block_matrices.push(m);
        }
        Ok(Self { algebra: algebra.clone(), block_matrices })
    }
}

/// Canonical real basis of the self-adjoint part: per block, the diagonal
/// units `E_rr`, then for each `r < s` the pair `E_rs + E_sr`,
/// `i(E_rs - E_sr)`.
pub fn self_adjoint_basis(algebra: &FiniteAlgebra) -> Vec<AlgebraElement> {
    let dim = algebra.real_dim();
    (0..dim)
        .map(|k| {
            let mut x = vec![0.0; dim];
            x[k] = 1.0;
            AlgebraElement::from_real_coordinates(algebra, &x).expect("length matches")
        })
        .collect()
}

/// A *-representation on `ℂ^hilbert_dim`, stored as the images of the
/// matrix units `E_rs` of every block (row-major within a block).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RepresentationRepr")]
pub struct Representation {
    algebra: FiniteAlgebra,
    hilbert_dim: usize,
    basis_images: Vec<Vec<ComplexMatrix>>,
}

#[derive(Deserialize)]
struct RepresentationRepr {
    algebra: FiniteAlgebra,
    hilbert_dim: usize,
    basis_images: Vec<Vec<ComplexMatrix>>,
}

impl TryFrom<RepresentationRepr> for Representation {
    type Error = Error;

    fn try_from(r: RepresentationRepr) -> Result<Self> {
        Representation::new(r.algebra, r.hilbert_dim, r.basis_images)
    }
}

impl Representation {
    /// Validates shapes and the *-homomorphism relations on matrix units.
    pub fn new(algebra: FiniteAlgebra, hilbert_dim: usize, basis_images: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if hilbert_dim == 0 {
            return Err(Error::InvalidInput("hilbert_dim must be positive".into()));
        }
        if basis_images.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), basis_images.len()));
        }
        for (imgs, &n) in basis_images.iter().zip(&algebra.blocks) {
            if imgs.len() != n * n {
                return Err(mismatch(n * n, imgs.len()));
            }
            for m in imgs {
                if m.rows() != hilbert_dim || m.cols() != hilbert_dim {
                    return Err(mismatch(hilbert_dim, format!("{}x{}", m.rows(), m.cols())));
                }
            }
        }
        let rep = Self { algebra, hilbert_dim, basis_images };
        rep.check_homomorphism()?;
        Ok(rep)
    }

    fn check_homomorphism(&self) -> Result<()> {
        let blocks = &self.algebra.blocks;
        let zero = ComplexMatrix::zeros(self.hilbert_dim, self.hilbert_dim);
        for (bi, &n) in blocks.iter().enumerate() {
            for r in 0..n {
                for s in 0..n {
                    let e_rs = &self.basis_images[bi][r * n + s];
                    let e_sr = &self.basis_images[bi][s * n + r];
                    if !e_rs.adjoint().approx_eq(e_sr, STRUCTURAL_TOL) {
                        return Err(Error::InvariantViolation(format!(
                            "π(E_{r}{s})ᴴ ≠ π(E_{s}{r}) in block {bi}"
                        )));
                    }
                    for (bj, &m) in blocks.iter().enumerate() {
                        for t in 0..m {
                            for u in 0..m {
                                let prod = e_rs * &self.basis_images[bj][t * m + u];
                                let expected = if bi == bj && s == t {
                                    &self.basis_images[bi][r * n + u]
                                } else {
                                    &zero
                                };
                                if !prod.approx_eq(expected, STRUCTURAL_TOL) {
                                    return Err(Error::InvariantViolation(format!(
                                        "π is not multiplicative on blocks {bi}, {bj}"
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Places copies of each block along the diagonal of the Hilbert space.
    ///
    /// `placements[i]` lists the offsets where block `i` is repeated; every
    /// copy occupies `nᵢ` consecutive coordinates. Coordinates not covered
    /// by any copy lie in the kernel of every `π(a)`.
    pub fn block_embedding(algebra: &FiniteAlgebra, hilbert_dim: usize, placements: &[Vec<usize>]) -> Result<Self> {
        if placements.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), placements.len()));
        }
        let mut used = vec![false; hilbert_dim];
        let mut basis_images = Vec::with_capacity(algebra.num_blocks());
        for (offsets, &n) in placements.iter().zip(&algebra.blocks) {
            for &o in offsets {
                if o + n > hilbert_dim {
                    return Err(Error::InvalidInput(format!("block copy at {o} exceeds dimension {hilbert_dim}")));
                }
                for k in o..o + n {
                    if std::mem::replace(&mut used[k], true) {
                        return Err(Error::InvalidInput(format!("block copies overlap at {k}")));
                    }
                }
            }
            let mut imgs = Vec::with_capacity(n * n);
            for r in 0..n {
                for s in 0..n {
                    let mut m = ComplexMatrix::zeros(hilbert_dim, hilbert_dim);
                    for &o in offsets {
                        m[(o + r, o + s)] = ONE;
                    }
                    imgs.push(m);
                }
            }
            basis_images.push(imgs);
        }
        Self::new(algebra.clone(), hilbert_dim, basis_images)
    }

    /// `ℂᵏ` acting diagonally on `ℂᵏ`.
    pub fn diagonal(k: usize) -> Self {
        let algebra = FiniteAlgebra::commutative(k);
        let placements: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
        Self::block_embedding(&algebra, k, &placements).expect("diagonal embedding is valid")
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn basis_images(&self) -> &[Vec<ComplexMatrix>] {
        &self.basis_images
    }

    /// `π(a)`.
    pub fn apply(&self, a: &AlgebraElement) -> Result<ComplexMatrix> {
        self.algebra.check_same(&a.algebra)?;
        let mut out = ComplexMatrix::zeros(self.hilbert_dim, self.hilbert_dim);
        for ((imgs, block), &n) in self.basis_images.iter().zip(&a.block_matrices).zip(&self.algebra.blocks) {
            for r in 0..n {
                for s in 0..n {
                    let z = block[(r, s)];
                    if z != ZERO {
                        out.add_scaled(z, &imgs[r * n + s]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `π(e)` for the algebra unit `e`.
    pub fn unit_image(&self) -> ComplexMatrix {
        self.apply(&AlgebraElement::unit(&self.algebra)).expect("same algebra")
    }

    pub fn is_unital(&self) -> bool {
        self.unit_image()
            .approx_eq(&ComplexMatrix::identity(self.hilbert_dim), STRUCTURAL_TOL)
    }

    /// Trivial kernel on the algebra. Checked on each block's unit, which
    /// suffices since a block is simple.
    pub fn is_faithful(&self) -> bool {
        self.basis_images.iter().zip(&self.algebra.blocks).all(|(imgs, &n)| {
            let unit: f64 = (0..n).map(|r| imgs[r * n + r].frobenius_norm()).sum();
            unit > STRUCTURAL_TOL
        })
    }

    /// `π₁ ⊗ π₂` on `H₁ ⊗ H₂`.
    pub fn tensor(a: &Self, b: &Self) -> Self {
        let algebra = FiniteAlgebra::tensor(&a.algebra, &b.algebra);
        let mut basis_images = Vec::with_capacity(algebra.num_blocks());
        for (ia, &n) in a.algebra.blocks.iter().enumerate() {
            for (ib, &m) in b.algebra.blocks.iter().enumerate() {
                let nm = n * m;
                let mut imgs = Vec::with_capacity(nm * nm);
                for row in 0..nm {
                    for col in 0..nm {
                        let (r1, r2) = (row / m, row % m);
                        let (s1, s2) = (col / m, col % m);
                        imgs.push(tensor(
                            &a.basis_images[ia][r1 * n + s1],
                            &b.basis_images[ib][r2 * m + s2],
                        ));
                    }
                }
                basis_images.push(imgs);
            }
        }
        Self {
            algebra,
            hilbert_dim: a.hilbert_dim * b.hilbert_dim,
            basis_images,
        }
    }

    /// `π₁ ⊕ π₂` for two representations of the same algebra.
    pub fn direct_sum(a: &Self, b: &Self) -> Result<Self> {
        a.algebra.check_same(&b.algebra)?;
        let basis_images = a
            .basis_images
            .iter()
            .zip(&b.basis_images)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.direct_sum(q)).collect())
            .collect();
        Ok(Self {
            algebra: a.algebra.clone(),
            hilbert_dim: a.hilbert_dim + b.hilbert_dim,
            basis_images,
        })
    }

    /// `π ⊕ 0` on `H ⊕ ℂᵏ`.
    pub fn pad_zero(&self, extra: usize) -> Self {
        let zero = ComplexMatrix::zeros(extra, extra);
        let basis_images = self
            .basis_images
            .iter()
            .map(|imgs| imgs.iter().map(|m| m.direct_sum(&zero)).collect())
            .collect();
        Self {
            algebra: self.algebra.clone(),
            hilbert_dim: self.hilbert_dim + extra,
            basis_images,
        }
    }

    /// `u π(·) uᴴ`; `u` must be unitary.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.hilbert_dim || !u.is_square() {
            return Err(mismatch(self.hilbert_dim, u.rows()));
        }
        let uh = u.adjoint();
        let basis_images = self
            .basis_images
            .iter()
            .map(|imgs| imgs.iter().map(|m| &(u * m) * &uh).collect())
            .collect();
        Ok(Self {
            algebra: self.algebra.clone(),
            hilbert_dim: self.hilbert_dim,
            basis_images,
        })
    }
}

/// A state `φ(a) = Σᵢ tr(ρᵢ aᵢ)` with positive `ρᵢ` of total trace one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr")]
pub struct State {
    algebra: FiniteAlgebra,
    densities: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
struct StateRepr {
    #[serde(default)]
    algebra: Option<FiniteAlgebra>,
    densities: Vec<ComplexMatrix>,
}

impl TryFrom<StateRepr> for State {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        let algebra = match r.algebra {
            Some(a) => a,
            None => FiniteAlgebra::new(r.densities.iter().map(ComplexMatrix::rows).collect())?,
        };
        State::new(algebra, r.densities)
    }
}

impl State {
    pub fn new(algebra: FiniteAlgebra, densities: Vec<ComplexMatrix>) -> Result<Self> {
        if densities.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), densities.len()));
        }
        let mut total = 0.0;
        for (rho, &n) in densities.iter().zip(&algebra.blocks) {
            if rho.rows() != n || rho.cols() != n {
                return Err(mismatch(format!("{n}x{n}"), format!("{}x{}", rho.rows(), rho.cols())));
            }
            if !rho.is_hermitian(STRUCTURAL_TOL) {
                return Err(Error::InvariantViolation("density is not Hermitian".into()));
            }
            let lowest = eigh(rho).values[0];
            if lowest < -STRUCTURAL_TOL {
                return Err(Error::InvariantViolation(format!("density has eigenvalue {lowest:.3e}")));
            }
            total += rho.trace().re;
        }
        if (total - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::InvariantViolation(format!("densities have total trace {total}")));
        }
        Ok(Self { algebra, densities })
    }

    /// Probability weights on the points of a commutative algebra.
    pub fn from_weights(algebra: &FiniteAlgebra, weights: &[f64]) -> Result<Self> {
        if !algebra.is_commutative() {
            return Err(Error::Unsupported("from_weights needs a commutative algebra".into()));
        }
        if weights.len() != algebra.num_blocks() {
            return Err(mismatch(algebra.num_blocks(), weights.len()));
        }
        let densities = weights.iter().map(|&w| ComplexMatrix::real_diag(&[w])).collect();
        Self::new(algebra.clone(), densities)
    }

    /// Evaluation at point `k` of a commutative algebra.
    pub fn point(algebra: &FiniteAlgebra, k: usize) -> Result<Self> {
        if k >= algebra.num_blocks() {
            return Err(Error::InvalidInput(format!("point {k} out of range")));
        }
        let mut w = vec![0.0; algebra.num_blocks()];
        w[k] = 1.0;
        Self::from_weights(algebra, &w)
    }

    /// `tr(·)/N` spread over all blocks, `N = Σ nᵢ`.
    pub fn maximally_mixed(algebra: &FiniteAlgebra) -> Self {
        let total: usize = algebra.blocks.iter().sum();
        let w = 1.0 / total as f64;
        let densities = algebra
            .blocks
            .iter()
            .map(|&n| ComplexMatrix::identity(n).scale_real(w))
            .collect();
        Self { algebra: algebra.clone(), densities }
    }

    /// Random state: Wishart-type densities, normalized jointly.
    pub fn random<R: Rng + ?Sized>(algebra: &FiniteAlgebra, rng: &mut R) -> Self {
        let mut densities: Vec<ComplexMatrix> = algebra
            .blocks
            .iter()
            .map(|&n| {
                let g = ComplexMatrix::from_fn(n, n, |_, _| {
                    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                (&g * &g.adjoint()).hermitian_part()
            })
            .collect();
        let total: f64 = densities.iter().map(|r| r.trace().re).sum();
        for rho in &mut densities {
            *rho = rho.scale_real(1.0 / total);
        }
        Self { algebra: algebra.clone(), densities }
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[ComplexMatrix] {
        &self.densities
    }

    /// `φ(a) = Σᵢ tr(ρᵢ aᵢ)`.
    pub fn eval(&self, a: &AlgebraElement) -> Result<C64> {
        self.algebra.check_same(&a.algebra)?;
        Ok(self
            .densities
            .iter()
            .zip(&a.block_matrices)
            .map(|(rho, x)| rho.trace_product(x))
            .sum())
    }

    /// Convex combination `t·self + (1−t)·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("mixing weight {t} outside [0, 1]")));
        }
        let densities = self
            .densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| &a.scale_real(t) + &b.scale_real(1.0 - t))
            .collect();
        Ok(Self { algebra: self.algebra.clone(), densities })
    }

    /// Pure states of a commutative algebra, one per point.
    pub fn pure_states(algebra: &FiniteAlgebra) -> Result<Vec<Self>> {
        if !algebra.is_commutative() {
            return Err(Error::Unsupported(
                "pure-state enumeration is only available for commutative algebras".into(),
            ));
        }
        (0..algebra.num_blocks()).map(|k| Self::point(algebra, k)).collect()
    }
}

/// `φ₁ ⊗ φ₂`, with densities `ρᵢ ⊗ σⱼ` on block `(i, j)`.
pub fn product_state(a: &State, b: &State) -> State {
    let algebra = FiniteAlgebra::tensor(&a.algebra, &b.algebra);
    let densities = a
        .densities
        .iter()
        .flat_map(|x| b.densities.iter().map(move |y| tensor(x, y)))
        .collect();
    State { algebra, densities }
}

/// Which tensor factor a slice map keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `(φ ⊗ id)(a)`: the state eats the first factor.
    Left,
    /// `(id ⊗ φ)(a)`: the state eats the second factor.
    Right,
}

/// Slice map of `a ∈ A₁ ⊗ A₂` by a state on the eaten factor.
pub fn slice_map(a: &AlgebraElement, phi: &State, side: Side) -> Result<AlgebraElement> {
    let (first, second) = a.algebra.factors().ok_or(Error::NoFactorization)?;
    let eaten = match side {
        Side::Right => second,
        Side::Left => first,
    };
    eaten.check_same(&phi.algebra)?;
    let kept = match side {
        Side::Right => first,
        Side::Left => second,
    };
    let k2 = second.num_blocks();
    let mut out = AlgebraElement::zero(kept);
    for (i, &n) in first.blocks.iter().enumerate() {
        for (j, &m) in second.blocks.iter().enumerate() {
            let x = &a.block_matrices[i * k2 + j];
            match side {
                Side::Right => {
                    let rho = &phi.densities[j];
                    let dst = &mut out.block_matrices[i];
                    for r1 in 0..n {
                        for s1 in 0..n {
                            let mut acc = ZERO;
                            for r2 in 0..m {
                                for s2 in 0..m {
                                    acc += x[(r1 * m + r2, s1 * m + s2)] * rho[(s2, r2)];
                                }
                            }
                            dst[(r1, s1)] += acc;
                        }
                    }
                }
                Side::Left => {
                    let rho = &phi.densities[i];
                    let dst = &mut out.block_matrices[j];
                    for r2 in 0..m {
                        for s2 in 0..m {
                            let mut acc = ZERO;
                            for r1 in 0..n {
                                for s1 in 0..n {
                                    acc += x[(r1 * m + r2, s1 * m + s2)] * rho[(s1, r1)];
                                }
                            }
                            dst[(r2, s2)] += acc;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
