//! Multi-start supergradient ascent on `c·y / ‖M(y)‖` over the unit sphere.
//! Slow and uncertified, but entirely independent of the barrier method;
//! used as a fallback for the lower bound and as a cross-check in tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::problem::ReducedProblem;
use crate::operator::eigh;

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub random_starts: usize,
    pub iterations: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { random_starts: 32, iterations: 400, step: 0.5, seed: 0 }
    }
}

/// Value `c·y/‖M(y)‖` and a supergradient of it. The norm's subgradient
/// comes from the eigenvector of the largest `|eigenvalue|`; ties within
/// 1e-12 go to the lowest index.
fn ratio_and_supergradient(p: &ReducedProblem, y: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = p.assemble(y);
    let eig = eigh(&m);
    let top = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if !(top > 0.0) {
        return None;
    }
    let j = eig.values.iter().position(|v| v.abs() >= top - 1e-12)?;
    let sign = eig.values[j].signum();
    let v = eig.vectors.column(j);
    let dg: Vec<f64> = p
        .generators
        .iter()
        .map(|mk| {
            let mv = mk.mul_vec(&v);
            sign * v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        })
        .collect();
    let cy: f64 = p.c.iter().zip(y).map(|(a, b)| a * b).sum();
    let f = cy / top;
    let grad = p.c.iter().zip(&dg).map(|(ck, gk)| (ck - f * gk) / top).collect();
    Some((f, grad))
}

fn normalize(y: &mut [f64]) -> bool {
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0) {
        return false;
    }
    y.iter_mut().for_each(|v| *v /= n);
    true
}

fn climb(p: &ReducedProblem, mut y: Vec<f64>, opts: &AscentOptions) -> Option<(f64, Vec<f64>)> {
    if !normalize(&mut y) {
        return None;
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..opts.iterations {
        let (f, g) = ratio_and_supergradient(p, &y)?;
        if best.as_ref().map_or(true, |(b, _)| f > *b) {
            best = Some((f, y.clone()));
        }
        // tangent component only; the ratio is constant along rays
        let radial: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
        let tangent: Vec<f64> = g.iter().zip(&y).map(|(a, b)| a - radial * b).collect();
        let gn = tangent.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-14 {
            break;
        }
        let eta = opts.step / ((k + 1) as f64).sqrt();
        for (yi, ti) in y.iter_mut().zip(&tangent) {
            *yi += eta * ti / gn;
        }
        if !normalize(&mut y) {
            break;
        }
    }
    best
}

/// Best ratio over all starts and the point achieving it, scaled onto the
/// boundary `‖M(y)‖ = 1`. Ties go to the earliest start.
pub(crate) fn solve(p: &ReducedProblem, opts: &AscentOptions) -> (f64, Vec<f64>) {
    let n = p.dim();
    let mut starts: Vec<Vec<f64>> = vec![p.c.clone()];
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[j] = s;
            starts.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    }

    let mut best = (0.0, vec![0.0; n]);
    for start in starts {
        if let Some((f, y)) = climb(p, start, opts) {
            if f > best.0 {
                best = (f, y);
            }
        }
    }
    onto_boundary(p, best)
}

/// Single climb from a given point, for polishing another method's answer.
pub(crate) fn polish(p: &ReducedProblem, y: &[f64], opts: &AscentOptions) -> (f64, Vec<f64>) {
    let best = climb(p, y.to_vec(), opts).unwrap_or((0.0, vec![0.0; p.dim()]));
    onto_boundary(p, best)
}

fn onto_boundary(p: &ReducedProblem, mut best: (f64, Vec<f64>)) -> (f64, Vec<f64>) {
    let norm = eigh(&p.assemble(&best.1))
        .values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if norm > 0.0 {
        best.1.iter_mut().for_each(|v| *v /= norm);
    }
    best
}
