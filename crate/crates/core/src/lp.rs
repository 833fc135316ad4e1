//! Small dense linear programs in equality form,
//!
//! ```text
//!     minimize c·x   subject to   A x = b,  x ≥ 0,
//! ```
//!
//! solved by a two-phase tableau simplex. Pricing is Dantzig's rule, with a
//! switch to Bland's rule after a run of degenerate pivots so the method
//! cannot cycle. Unit columns already present in `A` seed the starting
//! basis; only the remaining rows get artificial variables.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: &[bool]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| {
                if !allowed[j] {
                    return 0.0;
                }
                let z: f64 = self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.t[i][j]).sum();
                cost[j] - z
            })
            .collect()
    }

    fn value(&self, cost: &[f64]) -> f64 {
        self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.t[i][self.cols]).sum()
    }

    /// Runs simplex iterations for `cost` over the `allowed` columns.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], max_iter: usize) -> Result<()> {
        let scale = cost.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let mut degenerate = 0;
        let mut last = self.value(cost);
        for _ in 0..max_iter {
            let rc = self.reduced_costs(cost, allowed);
            let bland = degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                (0..self.cols).find(|&j| rc[j] < -COST_EPS * scale)
            } else {
                (0..self.cols)
                    .filter(|&j| rc[j] < -COST_EPS * scale)
                    .min_by(|&a, &b| rc[a].total_cmp(&rc[b]))
            };
            let Some(c) = entering else { return Ok(()) };

            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[c];
                if a > PIVOT_EPS {
                    let ratio = row[self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - PIVOT_EPS
                                || (ratio <= lr + PIVOT_EPS && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            self.pivot(r, c);
            let now = self.value(cost);
            if now < last - PIVOT_EPS * scale {
                degenerate = 0;
            } else {
                degenerate += 1;
            }
            last = now;
        }
        Err(Error::Solver("simplex iteration limit reached".into()))
    }
}

/// Minimizes `c·x` subject to `A x = b`, `x ≥ 0`. `a` is given row-wise.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("constraint matrix shape does not match".into()));
    }
    if c.iter().chain(b).chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite LP data".into()));
    }

    // normalize to b ≥ 0
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (row, &bi) in a.iter().zip(b) {
        if bi < 0.0 {
            rows.push(row.iter().map(|v| -v).collect());
            rhs.push(-bi);
        } else {
            rows.push(row.clone());
            rhs.push(bi);
        }
    }

    // reuse unit columns as the starting basis where possible
    let mut basis: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let mut hit = None;
        let mut unit = true;
        for (i, row) in rows.iter().enumerate() {
            let v = row[j];
            if v == 0.0 {
                continue;
            }
            if v == 1.0 && hit.is_none() {
                hit = Some(i);
            } else {
                unit = false;
                break;
            }
        }
        if let (true, Some(i)) = (unit, hit) {
            if basis[i].is_none() {
                basis[i] = Some(j);
            }
        }
    }
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
    let total = n + artificial_rows.len();

    let mut t: Vec<Vec<f64>> = rows
        .into_iter()
        .zip(&rhs)
        .map(|(mut row, &bi)| {
            row.resize(total, 0.0);
            row.push(bi);
            row
        })
        .collect();
    for (k, &i) in artificial_rows.iter().enumerate() {
        t[i][n + k] = 1.0;
        basis[i] = Some(n + k);
    }
    let mut tab = Tableau { t, basis: basis.into_iter().map(Option::unwrap).collect(), cols: total };
    let max_iter = 50 * (total + m) + 1000;

    if !artificial_rows.is_empty() {
        let mut phase1 = vec![0.0; total];
        phase1[n..].iter_mut().for_each(|v| *v = 1.0);
        tab.optimize(&phase1, &vec![true; total], max_iter)?;
        let infeasibility = tab.value(&phase1);
        let scale = rhs.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            return Err(Error::Solver(format!("linear program is infeasible (residual {infeasibility:e})")));
        }
        // drive zero-level artificials out of the basis; rows where that is
        // impossible are redundant and dropped
        let mut i = 0;
        while i < tab.basis.len() {
            if tab.basis[i] >= n {
                match (0..n).find(|&j| tab.t[i][j].abs() > 1e-9) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = c.to_vec();
    cost.resize(total, 0.0);
    let allowed: Vec<bool> = (0..total).map(|j| j < n).collect();
    tab.optimize(&cost, &allowed, max_iter)?;

    let mut x = vec![0.0; n];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = tab.t[i][total].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}
