//! Wasserstein-1 distance on finite metric spaces, computed from both sides
//! of Kantorovich duality: the transport plan (primal) and a 1-Lipschitz
//! potential (dual).

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::lp;

const METRIC_TOL: f64 = 1e-12;
const MARGINAL_TOL: f64 = 1e-10;
/// Largest accepted difference between the primal and dual optimum.
pub const DUALITY_GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    coords: Vec<Vec<f64>>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, coords: Vec<Vec<f64>>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidInput("metric space needs at least one point".into()));
        }
        if labels.len() != n {
            return Err(mismatch(n, labels.len()));
        }
        if coords.len() != n {
            return Err(mismatch(n, coords.len()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(mismatch(n, row.len()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero self-distance at point {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInput(format!("invalid distance {d} between {i} and {j}")));
                }
                if (d - dist[j][i]).abs() > METRIC_TOL {
                    return Err(Error::InvalidInput(format!("distance is not symmetric at ({i}, {j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + METRIC_TOL {
                        return Err(Error::InvalidInput(format!(
                            "triangle inequality fails for ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(Self { labels, coords, dist })
    }

    /// Points of `ℝᵈ` with the Euclidean metric.
    pub fn euclidean(coords: Vec<Vec<f64>>) -> Result<Self> {
        let dist = coords
            .iter()
            .map(|p| {
                coords
                    .iter()
                    .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        let labels = (0..coords.len()).map(|i| i.to_string()).collect();
        Self::new(labels, coords, dist)
    }

    /// Points on the real line.
    pub fn line(points: &[f64]) -> Result<Self> {
        Self::euclidean(points.iter().map(|&x| vec![x]).collect())
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }
}

/// Cartesian product with the Pythagorean metric `√(d₁² + d₂²)`. Point
/// `(i, j)` has index `i·|s₂| + j`.
pub fn product_space(s1: &FiniteMetricSpace, s2: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    let (n1, n2) = (s1.len(), s2.len());
    let idx = |k: usize| (k / n2, k % n2);
    let mut labels = Vec::with_capacity(n1 * n2);
    let mut coords = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            labels.push(format!("({},{})", s1.labels[i], s2.labels[j]));
            coords.push(s1.coords[i].iter().chain(&s2.coords[j]).copied().collect());
        }
    }
    let dist = (0..n1 * n2)
        .map(|a| {
            let (i, j) = idx(a);
            (0..n1 * n2)
                .map(|b| {
                    let (k, l) = idx(b);
                    s1.dist[i][k].hypot(s2.dist[j][l])
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::new(labels, coords, dist)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Measure {
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one point".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidInput(format!("invalid weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > METRIC_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn dirac(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidInput(format!("point {k} out of range for {n} points")));
        }
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        Self::new(w)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `λ δ₁ + (1 − λ) δ₀` on the two points `{0, 1}`.
    pub fn bernoulli(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("λ must lie in [0, 1], got {lambda}")));
        }
        Self::new(vec![1.0 - lambda, lambda])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Product measure, indexed like [`product_space`].
    pub fn product(&self, other: &Self) -> Self {
        let weights = self
            .weights
            .iter()
            .flat_map(|a| other.weights.iter().map(move |b| a * b))
            .collect();
        Self { weights }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct W1Result {
    pub value: f64,
    /// Optimal transport cost.
    pub primal: f64,
    /// `Σ f·(μ − μ′)` at the returned potential.
    pub dual: f64,
    /// 1-Lipschitz potential, normalized so its value at the first point is 0.
    pub potential: Vec<f64>,
    /// `plan[i][j]` is the mass moved from point `i` of `μ` to point `j` of `μ′`.
    pub plan: Vec<Vec<f64>>,
}

fn transport(space: &FiniteMetricSpace, mu: &[f64], nu: &[f64]) -> Result<(f64, Vec<Vec<f64>>)> {
    let n = space.len();
    let cost: Vec<f64> = (0..n * n).map(|k| space.dist[k / n][k % n]).collect();
    let mut a = Vec::with_capacity(2 * n);
    let mut b = Vec::with_capacity(2 * n);
    for i in 0..n {
        a.push((0..n * n).map(|k| if k / n == i { 1.0 } else { 0.0 }).collect());
        b.push(mu[i]);
    }
    for j in 0..n {
        a.push((0..n * n).map(|k| if k % n == j { 1.0 } else { 0.0 }).collect());
        b.push(nu[j]);
    }
    let sol = lp::minimize(&cost, &a, &b)?;
    let plan = (0..n).map(|i| sol.x[i * n..(i + 1) * n].to_vec()).collect();
    Ok((sol.objective, plan))
}

/// Maximizes `Σ fᵢ pᵢ` over potentials with `fᵢ − fⱼ ≤ dᵢⱼ` and `f₀ = 0`.
/// With `gᵢ = fᵢ + d(i, 0) ≥ 0` the constraints read
/// `gᵢ − gⱼ ≤ dᵢⱼ + d(i, 0) − d(j, 0)`, whose right-hand sides are
/// nonnegative, so the slack basis is feasible from the start.
fn potential(space: &FiniteMetricSpace, p: &[f64]) -> Result<Vec<f64>> {
    let n = space.len();
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let d0: Vec<f64> = (0..n).map(|i| space.dist[i][0]).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
    let vars = n + pairs.len();
    let mut cost = vec![0.0; vars];
    for i in 0..n {
        cost[i] = -p[i];
    }
    let mut a = Vec::with_capacity(pairs.len() + 1);
    let mut b = Vec::with_capacity(pairs.len() + 1);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let mut row = vec![0.0; vars];
        row[i] = 1.0;
        row[j] = -1.0;
        row[n + k] = 1.0;
        a.push(row);
        b.push((space.dist[i][j] + d0[i] - d0[j]).max(0.0));
    }
    // pins g₀ = 0, i.e. f₀ = 0
    let mut row = vec![0.0; vars];
    row[0] = 1.0;
    a.push(row);
    b.push(0.0);
    let sol = lp::minimize(&cost, &a, &b)?;
    Ok((0..n).map(|i| sol.x[i] - d0[i]).collect())
}

pub fn w1(space: &FiniteMetricSpace, mu: &Measure, nu: &Measure) -> Result<W1Result> {
    let n = space.len();
    if mu.len() != n {
        return Err(mismatch(n, mu.len()));
    }
    if nu.len() != n {
        return Err(mismatch(n, nu.len()));
    }
    let (primal, plan) = transport(space, &mu.weights, &nu.weights)?;
    let diff: Vec<f64> = mu.weights.iter().zip(&nu.weights).map(|(a, b)| a - b).collect();
    let f = potential(space, &diff)?;
    let dual: f64 = f.iter().zip(&diff).map(|(a, b)| a * b).sum();

    for i in 0..n {
        let out: f64 = plan[i].iter().sum();
        let inn: f64 = plan.iter().map(|row| row[i]).sum();
        if (out - mu.weights[i]).abs() > MARGINAL_TOL || (inn - nu.weights[i]).abs() > MARGINAL_TOL {
            return Err(Error::Solver(format!("transport plan misses marginal at point {i}")));
        }
        for j in 0..n {
            if f[i] - f[j] > space.dist[i][j] + METRIC_TOL {
                return Err(Error::Solver(format!("potential violates the Lipschitz bound at ({i}, {j})")));
            }
        }
    }
    if (primal - dual).abs() > DUALITY_GAP_TOL {
        return Err(Error::Solver(format!("duality gap {:e} exceeds tolerance", primal - dual)));
    }
    Ok(W1Result { value: primal, primal, dual, potential: f, plan })
}

/// `λ + √2 (1 − λ)`, the Wasserstein-to-Pythagoras ratio for
/// `φ_λ ⊗ φ_λ` against `φ₀ ⊗ φ₀` on the unit square.
pub fn k_lambda(lambda: f64) -> f64 {
    lambda + std::f64::consts::SQRT_2 * (1.0 - lambda)
}
