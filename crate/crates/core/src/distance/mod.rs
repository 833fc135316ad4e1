//! Connes' spectral distance
//!
//! ```text
//!     d(φ, φ′) = sup { φ(a) − φ′(a) : a = a*, ‖[D, π(a)]‖ ≤ 1 }
//! ```
//!
//! for finite spectral triples. Writing `a = Σ xₖ bₖ` over the canonical
//! self-adjoint basis turns this into a linear objective over the unit ball
//! of the seminorm `x ↦ ‖[D, π(x)]‖`. Directions in the kernel of the
//! seminorm either do not move the objective (gauge) or make the distance
//! infinite; the rest is solved as a semidefinite program with certified
//! lower and upper bounds.

mod ascent;
mod barrier;
mod problem;

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, State};
use crate::error::{Error, Result};
use crate::operator::{commutator, op_norm};
use crate::triple::SpectralTriple;

pub use ascent::AscentOptions;
use problem::{DistanceProblem, Reduction};

/// Default relative tolerance for catalog computations.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceStatus {
    /// `upper − lower ≤ tol·max(1, lower)`.
    Finite,
    Infinite,
    /// The solver ran out of budget; the interval is still certified.
    Bracket,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceResult {
    #[serde(with = "extended_real")]
    pub lower: f64,
    #[serde(with = "extended_real")]
    pub upper: f64,
    pub status: DistanceStatus,
    /// For finite results a feasible element attaining `lower`; for infinite
    /// ones an element commuting with `D` on which the states differ.
    pub optimizer: AlgebraElement,
}

impl DistanceResult {
    pub fn is_infinite(&self) -> bool {
        self.status == DistanceStatus::Infinite
    }

    /// Midpoint of the bracket, `+∞` for infinite distances.
    pub fn value(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            0.5 * (self.lower + self.upper)
        }
    }
}

impl fmt::Display for DistanceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            DistanceStatus::Infinite => write!(f, "inf"),
            DistanceStatus::Finite => write!(f, "{}", self.value()),
            DistanceStatus::Bracket => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

/// `+∞` travels as the string `"inf"`, everything else as a JSON number.
pub mod extended_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    /// Run the ascent oracle even when the barrier method converged.
    pub always_ascend: bool,
    pub ascent: AscentOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, always_ascend: false, ascent: AscentOptions::default() }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

pub fn spectral_distance(t: &SpectralTriple, phi: &State, psi: &State, tol: f64) -> Result<DistanceResult> {
    spectral_distance_with(t, phi, psi, &SolverOptions::with_tol(tol))
}

pub fn spectral_distance_with(
    t: &SpectralTriple,
    phi: &State,
    psi: &State,
    opts: &SolverOptions,
) -> Result<DistanceResult> {
    if !(opts.tol > 0.0) || !opts.tol.is_finite() {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let problem = DistanceProblem::new(t, phi, psi)?;
    let alg = t.algebra();
    let zero = || DistanceResult {
        lower: 0.0,
        upper: 0.0,
        status: DistanceStatus::Finite,
        optimizer: AlgebraElement::zero(alg),
    };
    let c_norm = problem.c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if c_norm == 0.0 {
        return Ok(zero());
    }

    let mut reduced = match problem.reduce() {
        Reduction::Infinite(dir) => {
            return Ok(DistanceResult {
                lower: f64::INFINITY,
                upper: f64::INFINITY,
                status: DistanceStatus::Infinite,
                optimizer: problem::element(t, &dir),
            })
        }
        Reduction::Finite(r) => r,
    };
    if reduced.dim() == 0 || reduced.c.iter().all(|v| *v == 0.0) {
        return Ok(zero());
    }
    reduced.c.iter_mut().for_each(|v| *v /= c_norm);

    // work in units where ‖c‖ = 1; the whitened optimum lies in [1, √N]
    let inner_tol = 0.5 * opts.tol;
    let out = barrier::solve(&reduced, inner_tol, 1.0 / c_norm);
    let mut y = out.y;
    let mut lower_hat = out.lower;
    if !out.converged || opts.always_ascend {
        // a stalled barrier run still leaves a good point to climb from;
        // the full multi-start search is only needed without one
        let (v, ya) = if lower_hat > 0.0 && !opts.always_ascend {
            ascent::polish(&reduced, &y, &opts.ascent)
        } else {
            ascent::solve(&reduced, &opts.ascent)
        };
        if v > lower_hat {
            lower_hat = v;
            y = ya;
        }
    }
    let upper_hat = out.upper;

    // re-evaluate on the actual element so the reported numbers are exact
    // for the returned optimizer
    let mut a = problem::element(t, &reduced.lift(&y));
    let norm = op_norm(&commutator(t.dirac(), &t.representation().apply(&a)?)?)?;
    if norm > 1.0 {
        a = a.scale((1.0 / norm).into());
    }
    let lower = (phi.eval(&a)? - psi.eval(&a)?).re.max(0.0);
    if lower == 0.0 && lower_hat <= 0.0 {
        a = AlgebraElement::zero(alg);
    }
    let upper = (upper_hat * c_norm).max(lower);
    let status = if upper - lower <= opts.tol * lower.max(1.0) {
        DistanceStatus::Finite
    } else {
        DistanceStatus::Bracket
    };
    Ok(DistanceResult { lower, upper, status, optimizer: a })
}

/// Pairwise distances; only the upper triangle is solved, the diagonal is
/// zero by definition.
pub fn distance_matrix(t: &SpectralTriple, states: &[State], tol: f64) -> Result<Vec<Vec<DistanceResult>>> {
    if states.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 states, got {}", states.len())));
    }
    let n = states.len();
    let zero = DistanceResult {
        lower: 0.0,
        upper: 0.0,
        status: DistanceStatus::Finite,
        optimizer: AlgebraElement::zero(t.algebra()),
    };
    let mut out = vec![vec![zero; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = spectral_distance(t, &states[i], &states[j], tol)?;
            out[j][i] = DistanceResult {
                optimizer: d.optimizer.scale((-1.0).into()),
                ..d.clone()
            };
            out[i][j] = d;
        }
    }
    Ok(out)
}

/// `max { αx + βy : α, β ≥ 0, α² + β² ≤ 1 }`, which is `√(x² + y²)` for
/// nonnegative arguments (Cauchy–Schwarz, with equality along `(x, y)`).
pub fn quarter_disk_sup(x: f64, y: f64) -> f64 {
    x.max(0.0).hypot(y.max(0.0))
}
