use super::{ComplexMatrix, C64, ZERO};

/// Eigen-decomposition of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` is the unit eigenvector
/// for `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi. Only the Hermitian part of `m` is used.
pub fn eigh(m: &ComplexMatrix) -> HermitianEigen {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale == 0.0 || n == 1 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return HermitianEigen { values, vectors: v };
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 || r < 1e-18 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let n = a.rows();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = [[c, s e^{iθ}], [-s e^{-iθ}, c]] on the (p, q) plane
    let jpq = phase * s;
    let jqp = -phase.conj() * s;
    let cc = C64::new(c, 0.0);

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cc + akq * jqp;
        a[(k, q)] = akp * jpq + akq * cc;
    }
    // A <- Jᴴ A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cc * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + cc * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cc + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * cc;
    }
}

impl HermitianEigen {
    /// Rebuilds `Σ f(λ_k) v_k v_kᴴ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        m.hermitian_part()
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 8, 16, 33] {
            let h = random_hermitian(n, &mut rng);
            let eig = eigh(&h);
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            let back = eig.map_spectrum(|x| x);
            assert!(back.approx_eq(&h, 1e-12), "n={n}");
            let vhv = &eig.vectors.adjoint() * &eig.vectors;
            assert!(vhv.approx_eq(&ComplexMatrix::identity(n), 1e-12));
        }
    }

    #[test]
    fn pauli_y_spectrum() {
        let sy = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(0.0, -1.0),
            (1, 0) => C64::new(0.0, 1.0),
            _ => ZERO,
        });
        let eig = eigh(&sy);
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_spectrum() {
        let h = ComplexMatrix::real_diag(&[2.0, 2.0, -1.0, 2.0]);
        let eig = eigh(&h);
        assert_eq!(eig.values, vec![-1.0, 2.0, 2.0, 2.0]);
        assert_eq!(eig.max_abs_value(), 2.0);
    }
}
