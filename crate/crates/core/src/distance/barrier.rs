//! Log-barrier interior-point method for
//!
//! ```text
//!     maximize  c·y   subject to   −I ⪯ Σ yⱼ Mⱼ ⪯ I
//! ```
//!
//! with Frobenius-orthonormal Hermitian `Mⱼ`. The pair of LMIs is the
//! block-diagonal form of `[[I, M], [M, I]] ⪰ 0`. Each central point yields
//! a dual matrix `W = ((I − M)⁻¹ − (I + M)⁻¹)/t`; after an exact projection
//! onto `⟨Mⱼ, W⟩ = cⱼ` its trace norm is a certified upper bound, since
//! `c·y = ⟨M(y), W⟩ ≤ ‖M(y)‖·‖W‖₁`.

use super::problem::{LowRank, ReducedProblem};
use crate::operator::{eigh, hermitian_norm, Cholesky, ComplexMatrix, C64};

const MAX_NEWTON: usize = 80;
const MAX_OUTER: usize = 40;
const BARRIER_GROWTH: f64 = 16.0;
/// Newton decrement at which a point counts as centered. Both bounds are
/// valid off the central path, so this only trades certificate quality
/// for iterations.
const CENTERING: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct BarrierOutcome {
    /// Feasible point on the boundary `‖M(y)‖ = 1`.
    pub y: Vec<f64>,
    pub lower: f64,
    /// Best certified upper bound, `+∞` if none was produced.
    pub upper: f64,
    pub converged: bool,
}

/// Cholesky data of `A = I − M` and `B = I + M`.
struct Factors {
    /// `L_A⁻¹`, `L_B⁻¹`.
    la: ComplexMatrix,
    lb: ComplexMatrix,
    log_det: f64,
}

fn factor(m: &ComplexMatrix) -> Option<Factors> {
    let n = m.rows();
    let id = ComplexMatrix::identity(n);
    let a = Cholesky::factor(&(&id - m))?;
    let b = Cholesky::factor(&(&id + m))?;
    Some(Factors {
        log_det: a.log_det() + b.log_det(),
        la: a.inverse_factor(),
        lb: b.inverse_factor(),
    })
}

impl Factors {
    fn dual_matrix(&self, t: f64) -> ComplexMatrix {
        let a_inv = &self.la.adjoint() * &self.la;
        let b_inv = &self.lb.adjoint() * &self.lb;
        (&a_inv - &b_inv).scale_real(1.0 / t)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `L X Lᴴ` for a factored Hermitian `X`, appended as real coordinates
/// (diagonal, then `√2·Re`, `√2·Im` of the upper triangle) in which the
/// Euclidean inner product is `tr(XY)`; returns its trace.
fn push_congruence(out: &mut Vec<f64>, l: &ComplexMatrix, x: &LowRank) -> f64 {
    let n = l.rows();
    let start = out.len();
    out.resize(start + n * n, 0.0);
    let mut trace = 0.0;
    for (s, g, w) in &x.terms {
        let a = l.mul_vec(g);
        let b = l.mul_vec(w);
        let mut k = start;
        for i in 0..n {
            let d = (a[i] * b[i].conj()).re * 2.0 * s;
            out[k] += d;
            trace += d;
            k += 1;
            for j in i + 1..n {
                let e = (a[i] * b[j].conj() + b[i] * a[j].conj()) * (std::f64::consts::SQRT_2 * s);
                out[k] += e.re;
                out[k + 1] += e.im;
                k += 2;
            }
        }
    }
    trace
}

/// Gradient of the barrier objective and the columns `V` with Hessian
/// `VᵀV`, in whitened coordinates.
fn newton_system(p: &ReducedProblem, f: &Factors, t: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = p.hilbert_dim();
    let mut raw_cols = Vec::with_capacity(p.factors.len());
    let mut raw_grad = Vec::with_capacity(p.factors.len());
    for x in &p.factors {
        let mut col = Vec::with_capacity(2 * n * n);
        let ta = push_congruence(&mut col, &f.la, x);
        let tb = push_congruence(&mut col, &f.lb, x);
        raw_grad.push(ta - tb);
        raw_cols.push(col);
    }
    let mut grad = Vec::with_capacity(p.dim());
    let mut cols = Vec::with_capacity(p.dim());
    for (back, cj) in p.back.iter().zip(&p.c) {
        let mut col = vec![0.0; 2 * n * n];
        let mut g = -t * cj;
        for ((bk, raw), rg) in back.iter().zip(&raw_cols).zip(&raw_grad) {
            if *bk != 0.0 {
                g += bk * rg;
                for (o, r) in col.iter_mut().zip(raw) {
                    *o += bk * r;
                }
            }
        }
        grad.push(g);
        cols.push(col);
    }
    (grad, cols)
}

/// Newton step `d` with `VᵀV d = −g`, from a Householder QR of the
/// columns of `V`. Factoring `V` rather than `VᵀV` keeps the step accurate
/// deep into the central path, where the Hessian condition number grows
/// like `t²`.
fn newton_step(mut cols: Vec<Vec<f64>>, g: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let rows = cols.first().map_or(0, Vec::len);
    if rows < m {
        return None;
    }
    let mut r = vec![0.0; m * m];
    for k in 0..m {
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|x| x * x).sum();
        r[k * m + k] = alpha;
        for j in k + 1..m {
            if vn2 > 0.0 {
                let proj: f64 = v.iter().zip(&cols[j][k..]).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vn2;
                for (x, vi) in cols[j][k..].iter_mut().zip(&v) {
                    *x -= proj * vi;
                }
            }
            r[k * m + j] = cols[j][k];
        }
    }
    let scale = (0..m).fold(0.0_f64, |a, k| a.max(r[k * m + k].abs()));
    if (0..m).any(|k| !(r[k * m + k].abs() > 1e-15 * scale)) {
        return None;
    }
    // Rᵀ z = −g, then R d = z
    let mut z = vec![0.0; m];
    for i in 0..m {
        let mut acc = -g[i];
        for k in 0..i {
            acc -= r[k * m + i] * z[k];
        }
        z[i] = acc / r[i * m + i];
    }
    let mut d = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = z[i];
        for k in i + 1..m {
            acc -= r[i * m + k] * d[k];
        }
        d[i] = acc / r[i * m + i];
    }
    Some(d)
}

/// Trace norm of the projection of `w` onto `{W : ⟨Mⱼ, W⟩ = cⱼ}`.
pub(crate) fn certificate(p: &ReducedProblem, w: &ComplexMatrix) -> f64 {
    let mut w = w.hermitian_part();
    // generators are orthonormal, so one correction pass is exact up to
    // roundoff; a second pass mops that up
    for _ in 0..2 {
        for (m, &cj) in p.generators.iter().zip(&p.c) {
            let r = m.trace_product(&w).re - cj;
            w.add_scaled(C64::new(-r, 0.0), m);
        }
    }
    eigh(&w).values.iter().map(|x| x.abs()).sum()
}

/// Feasible boundary point and its objective, from any `y` with `c·y > 0`.
fn boundary_point(p: &ReducedProblem, y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let norm = hermitian_norm(&p.assemble(y));
    if !(norm > 0.0) {
        return None;
    }
    let scaled: Vec<f64> = y.iter().map(|v| v / norm).collect();
    let value = dot(&p.c, &scaled);
    Some((scaled, value))
}

/// Stops once `upper − lower ≤ tol·max(floor, lower)`.
pub(crate) fn solve(p: &ReducedProblem, tol: f64, floor: f64) -> BarrierOutcome {
    let m = p.dim();
    let n = p.hilbert_dim();
    let c = &p.c;
    let mut y = vec![0.0; m];
    let mut t = 1.0;
    let mut best_lower = 0.0;
    let mut best_y = vec![0.0; m];
    let mut best_upper = f64::INFINITY;
    let mut stalled = 0;

    let Some(mut current) = factor(&p.assemble(&y)) else {
        return BarrierOutcome { y, lower: 0.0, upper: f64::INFINITY, converged: false };
    };
    for _ in 0..MAX_OUTER {
        for _ in 0..MAX_NEWTON {
            let f = &current;
            let log_det = f.log_det;
            let (grad, cols) = newton_system(p, f, t);
            let Some(dir) = newton_step(cols, &grad) else { break };
            let decrement = -dot(&grad, &dir);
            if decrement / 2.0 <= CENTERING {
                break;
            }
            // barrier change along the step, formed from differences so the
            // large linear term does not swamp it at high t
            let c_dir = dot(c, &dir);
            let slope = dot(&grad, &dir);
            let mut s = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial: Vec<f64> = y.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                if let Some(ft) = factor(&p.assemble(&trial)) {
                    let change = -t * s * c_dir - (ft.log_det - log_det);
                    if change <= 0.25 * s * slope {
                        y = trial;
                        current = ft;
                        moved = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }

        let w = current.dual_matrix(t);
        let upper = certificate(p, &w);
        let mut improved = false;
        if upper < best_upper {
            best_upper = upper;
            improved = true;
        }
        if let Some((yb, value)) = boundary_point(p, &y) {
            if value > best_lower {
                best_lower = value;
                best_y = yb;
                improved = true;
            }
        }
        stalled = if improved { 0 } else { stalled + 1 };
        if best_upper - best_lower <= tol * best_lower.max(floor) {
            return BarrierOutcome {
                y: best_y,
                lower: best_lower,
                upper: best_upper,
                converged: true,
            };
        }
        if stalled >= 3 || 2.0 * n as f64 / t < 1e-3 * tol * best_lower.max(floor) {
            // the central path is exhausted; further progress is roundoff
            break;
        }
        t *= BARRIER_GROWTH;
    }
    BarrierOutcome {
        y: best_y,
        lower: best_lower,
        upper: best_upper.max(best_lower),
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_problem(c: Vec<f64>) -> ReducedProblem {
        // Mⱼ = E_jj: the feasible set is the cube, optimum is ‖c‖₁
        let n = c.len();
        let generators = (0..n).map(|j| ComplexMatrix::unit(n, j, j)).collect();
        let back = (0..n)
            .map(|j| (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let factors = (0..n)
            .map(|j| {
                let e: Vec<C64> = (0..n).map(|k| C64::new(if k == j { 1.0 } else { 0.0 }, 0.0)).collect();
                LowRank { terms: vec![(0.5, e.clone(), e)] }
            })
            .collect();
        ReducedProblem { generators, c, back, factors }
    }

    #[test]
    fn cube_optimum_is_l1_norm() {
        let p = diag_problem(vec![0.5, -1.5, 2.0]);
        let out = solve(&p, 1e-9, 1.0);
        assert!(out.converged, "{out:?}");
        assert!((out.lower - 4.0).abs() < 1e-8, "{out:?}");
        assert!(out.upper >= 4.0 - 1e-12);
        assert!(out.upper - out.lower < 1e-8 * 4.0);
    }

    #[test]
    fn newton_step_solves_normal_equations() {
        let cols = vec![vec![2.0, 0.0, 1.0], vec![1.0, 3.0, 0.0]];
        let g = [1.0, -2.0];
        let d = newton_step(cols.clone(), &g).unwrap();
        let h = |i: usize, j: usize| dot(&cols[i], &cols[j]);
        for i in 0..2 {
            let lhs = h(i, 0) * d[0] + h(i, 1) * d[1];
            assert!((lhs + g[i]).abs() < 1e-13);
        }
        assert!(newton_step(vec![vec![1.0, 0.0], vec![2.0, 0.0]], &g).is_none());
    }
}
