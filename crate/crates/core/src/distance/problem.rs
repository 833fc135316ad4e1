use crate::algebra::{self_adjoint_basis, AlgebraElement, State};
use crate::error::{Error, Result};
use crate::operator::{eigh, raw_commutator, ComplexMatrix, C64, I};
use crate::triple::SpectralTriple;

/// Relative size (in Frobenius norm) below which a commutator direction is
/// treated as structurally zero.
const NULL_REL: f64 = 1e-9;
/// Objective component along a unit null direction that makes the
/// distance infinite.
pub(crate) const INFINITY_THRESHOLD: f64 = 1e-10;

/// Hermitian matrix `Σ sⱼ (gⱼ wⱼᴴ + wⱼ gⱼᴴ)`.
#[derive(Debug, Clone)]
pub(crate) struct LowRank {
    pub terms: Vec<(f64, Vec<C64>, Vec<C64>)>,
}

impl LowRank {
    /// `i[D, P]` from `P = Σ sⱼ wⱼ wⱼᴴ`: each term contributes
    /// `(iDw) wᴴ + w (iDw)ᴴ`.
    fn commutator(d: &ComplexMatrix, p: &ComplexMatrix) -> Self {
        let eig = eigh(p);
        let n = p.rows();
        let terms = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > NULL_REL)
            .map(|(j, &v)| {
                let w: Vec<C64> = (0..n).map(|i| eig.vectors[(i, j)] * v.abs().sqrt()).collect();
                let g = d.mul_vec(&w).into_iter().map(|x| x * I).collect();
                (v.signum(), g, w)
            })
            .collect();
        Self { terms }
    }

    #[cfg(test)]
    pub fn dense(&self, n: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(n, n);
        for (s, g, w) in &self.terms {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += (g[i] * w[j].conj() + w[i] * g[j].conj()) * *s;
                }
            }
        }
        out
    }
}

/// The linear program `sup c·x s.t. ‖Σ xₖ Mₖ‖ ≤ 1`, where `Mₖ = i[D, π(bₖ)]`
/// for the canonical self-adjoint basis `bₖ`.
pub(crate) struct DistanceProblem {
    /// Objective in basis coordinates, `cₖ = φ(bₖ) − φ′(bₖ)`.
    pub c: Vec<f64>,
    /// `Mₖ`, Hermitian.
    pub generators: Vec<ComplexMatrix>,
    /// The same `Mₖ` in factored form.
    pub factors: Vec<LowRank>,
}

/// Problem restricted to the orthogonal complement of the commutator
/// kernel, in coordinates where the generators are Frobenius-orthonormal.
pub(crate) struct ReducedProblem {
    /// Whitened generators `M′ⱼ = Σₖ qⱼₖ Mₖ / √λⱼ`.
    pub generators: Vec<ComplexMatrix>,
    /// Objective in whitened coordinates.
    pub c: Vec<f64>,
    /// Column `j` maps whitened coordinate `j` back to basis coordinates.
    pub back: Vec<Vec<f64>>,
    /// Factored basis generators; whitened generator `j` is
    /// `Σₖ back[j][k] Mₖ`.
    pub factors: Vec<LowRank>,
}

pub(crate) enum Reduction {
    /// A kernel direction (basis coordinates, unit norm) with positive
    /// objective: the distance is unbounded along it.
    Infinite(Vec<f64>),
    Finite(ReducedProblem),
}

impl DistanceProblem {
    pub fn new(t: &SpectralTriple, phi: &State, psi: &State) -> Result<Self> {
        let alg = t.algebra();
        if !phi.algebra().same_shape(alg) || !psi.algebra().same_shape(alg) {
            return Err(Error::AlgebraMismatch("states do not live on the triple's algebra".into()));
        }
        let d = t.dirac().matrix();
        let mut c = Vec::with_capacity(alg.real_dim());
        let mut generators = Vec::with_capacity(alg.real_dim());
        let mut factors = Vec::with_capacity(alg.real_dim());
        for b in self_adjoint_basis(alg) {
            c.push((phi.eval(&b)? - psi.eval(&b)?).re);
            let pb = t.representation().apply(&b)?;
            generators.push(raw_commutator(d, &pb).scale(I).hermitian_part());
            factors.push(LowRank::commutator(d, &pb));
        }
        Ok(Self { c, generators, factors })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn reduce(&self) -> Reduction {
        let m = self.dim();
        let mut gram = ComplexMatrix::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let v = C64::new(self.generators[k].trace_product(&self.generators[l]).re, 0.0);
                gram[(k, l)] = v;
                gram[(l, k)] = v;
            }
        }
        let eig = eigh(&gram);
        // Gram eigenvalues carry absolute roundoff near ε·top, far above the
        // squared cutoff, so classify each direction by the Frobenius norm
        // of its assembled commutator instead
        let dirs: Vec<(Vec<f64>, ComplexMatrix)> = (0..m)
            .map(|j| {
                let q: Vec<f64> = (0..m).map(|k| eig.vectors[(k, j)].re).collect();
                let mq = assemble(&self.generators, &q);
                (q, mq)
            })
            .collect();
        let top = dirs.iter().map(|(_, mq)| mq.frobenius_norm()).fold(0.0, f64::max);
        let cutoff = NULL_REL * top;

        let mut generators = Vec::new();
        let mut c = Vec::new();
        let mut back = Vec::new();
        let mut worst_null: Option<(f64, Vec<f64>)> = None;
        for (q, mq) in dirs {
            let cq: f64 = self.objective(&q);
            let norm = mq.frobenius_norm();
            if norm <= cutoff || top == 0.0 {
                if cq.abs() > INFINITY_THRESHOLD
                    && worst_null.as_ref().map_or(true, |(v, _)| cq.abs() > *v)
                {
                    let sign = cq.signum();
                    worst_null = Some((cq.abs(), q.iter().map(|x| x * sign).collect()));
                }
                continue;
            }
            let s = 1.0 / norm;
            generators.push(mq.scale_real(s));
            c.push(cq * s);
            back.push(q.iter().map(|x| x * s).collect());
        }
        match worst_null {
            Some((_, dir)) => Reduction::Infinite(dir),
            None => Reduction::Finite(ReducedProblem { generators, c, back, factors: self.factors.clone() }),
        }
    }
}

impl ReducedProblem {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.generators.first().map_or(0, ComplexMatrix::rows)
    }

    pub fn assemble(&self, y: &[f64]) -> ComplexMatrix {
        assemble(&self.generators, y)
    }

    /// Basis coordinates of the whitened point `y`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let m = self.back.first().map_or(0, Vec::len);
        let mut x = vec![0.0; m];
        for (yj, col) in y.iter().zip(&self.back) {
            for (xk, ck) in x.iter_mut().zip(col) {
                *xk += yj * ck;
            }
        }
        x
    }
}

pub(crate) fn assemble(mats: &[ComplexMatrix], x: &[f64]) -> ComplexMatrix {
    let n = mats.first().map_or(0, ComplexMatrix::rows);
    let mut out = ComplexMatrix::zeros(n, n);
    for (m, &xk) in mats.iter().zip(x) {
        if xk != 0.0 {
            out.add_scaled(C64::new(xk, 0.0), m);
        }
    }
    out
}

/// Self-adjoint element with the given basis coordinates.
pub(crate) fn element(t: &SpectralTriple, x: &[f64]) -> AlgebraElement {
    AlgebraElement::from_real_coordinates(t.algebra(), x).expect("coordinate count matches algebra")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{product, two_point, two_sheeted_lattice, amplified_two_point};

    #[test]
    fn factored_generators_match_dense() {
        let t = product(&two_point(2.0).unwrap(), &amplified_two_point(1.0).unwrap()).unwrap();
        let t2 = two_sheeted_lattice(0.5, 3, 1.0).unwrap();
        for t in [t, t2] {
            let s = State::point(t.algebra(), 0).unwrap();
            let p = DistanceProblem::new(&t, &s, &s).unwrap();
            for (m, f) in p.generators.iter().zip(&p.factors) {
                assert!(f.dense(t.hilbert_dim()).max_abs_diff(m) < 1e-13);
            }
        }
    }
}
