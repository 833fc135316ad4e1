use super::{ComplexMatrix, C64, ZERO};

/// Lower-triangular factor `L` of a Hermitian positive-definite `A = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    /// Returns `None` when `a` is not numerically positive definite.
    pub fn factor(a: &ComplexMatrix) -> Option<Self> {
        let n = a.rows();
        debug_assert!(a.is_square());
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Some(Self { l })
    }

    /// `log det A`.
    pub fn log_det(&self) -> f64 {
        (0..self.l.rows()).map(|i| self.l[(i, i)].re.ln()).sum::<f64>() * 2.0
    }

    /// `L⁻¹`, by forward substitution.
    pub fn inverse_factor(&self) -> ComplexMatrix {
        let n = self.l.rows();
        let mut linv = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { C64::new(1.0, 0.0) } else { ZERO };
                for k in col..i {
                    s -= self.l[(i, k)] * linv[(k, col)];
                }
                linv[(i, col)] = s / self.l[(i, i)];
            }
        }
        linv
    }

    /// `A⁻¹ = L⁻ᴴ L⁻¹`, Hermitian by construction.
    pub fn inverse(&self) -> ComplexMatrix {
        let linv = self.inverse_factor();
        (&linv.adjoint() * &linv).hermitian_part()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_log_det() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(4.0 + i as f64, 0.0)
            } else if i < j {
                C64::new(0.5, 0.25 * (j - i) as f64)
            } else {
                C64::new(0.5, -0.25 * (i - j) as f64)
            }
        });
        let ch = Cholesky::factor(&a).unwrap();
        let prod = &a * &ch.inverse();
        assert!(prod.approx_eq(&ComplexMatrix::identity(3), 1e-13));
        let linv = ch.inverse_factor();
        assert!((&(&linv * &a) * &linv.adjoint()).approx_eq(&ComplexMatrix::identity(3), 1e-13));
        let eig = super::super::eigh(&a);
        let expected: f64 = eig.values.iter().map(|x| x.ln()).sum();
        assert!((ch.log_det() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let a = ComplexMatrix::real_diag(&[1.0, -1.0]);
        assert!(Cholesky::factor(&a).is_none());
        assert!(Cholesky::factor(&ComplexMatrix::zeros(2, 2)).is_none());
    }
}
