//! Internal feasibility solver for box-constrained linear systems:
//! does x ∈ [0,1]ⁿ with M·x = t exist?
//!
//! A dense phase-1 simplex with Bland's rule answers the question exactly at
//! the scales used here (a few dozen variables).  Feasible answers come with
//! the point found; infeasible answers come with a separating functional
//! that is re-verified arithmetically before being returned, so a negative
//! verdict is always certified:
//!
//!   u·t  >  Σ_j max(0, (uᵀM)_j)  ≥  u·(M·x)   for every x ∈ [0,1]ⁿ.

use crate::realmat::RealMatrix;

/// Feasibility threshold on the phase-1 objective and on certificates.
pub(crate) const TOL_LP: f64 = 1e-8;

const MAX_PIVOTS: usize = 10_000;
const PIVOT_EPS: f64 = 1e-11;

/// Outcome of a box-feasibility question.
#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    /// A point x ∈ [0,1]ⁿ with M·x = t (within tolerance).
    Feasible { x: Vec<f64> },
    /// No such point; `separating` is u above, `margin` the verified gap
    /// u·t − Σ_j max(0, (uᵀM)_j) > 0.
    Infeasible { separating: Vec<f64>, margin: f64 },
    /// The solver could not certify either answer.
    Inconclusive { reason: String },
}

/// Decides whether M·x = t has a solution in the unit box [0,1]ⁿ.
pub(crate) fn box_feasible(m: &RealMatrix, t: &[f64]) -> LpOutcome {
    let rows = m.rows;
    let n = m.cols;
    assert_eq!(t.len(), rows, "rhs length mismatch");

    // Standard form: variables [x, s] ≥ 0 with
    //   (±)(M x)        = (±)t      (rows flipped so the rhs is ≥ 0)
    //   x_j + s_j       = 1
    // plus one artificial variable per row; phase 1 minimizes their sum.
    let r_total = rows + n;
    let c_orig = 2 * n;
    let c_total = c_orig + r_total;
    let width = c_total + 1; // + rhs column

    let mut flip = vec![1.0f64; rows];
    let mut tab = vec![0.0f64; (r_total + 1) * width];
    let idx = |r: usize, c: usize| r * width + c;

    for i in 0..rows {
        if t[i] < 0.0 {
            flip[i] = -1.0;
        }
        for j in 0..n {
            tab[idx(i, j)] = flip[i] * m.get(i, j);
        }
        tab[idx(i, c_orig + i)] = 1.0;
        tab[idx(i, c_total)] = flip[i] * t[i];
    }
    for k in 0..n {
        let r = rows + k;
        tab[idx(r, k)] = 1.0;
        tab[idx(r, n + k)] = 1.0;
        tab[idx(r, c_orig + r)] = 1.0;
        tab[idx(r, c_total)] = 1.0;
    }

    // Objective row (reduced costs for min Σ artificials with the artificial
    // basis): cost_j − Σ_i tab[i][j]; the rhs cell carries −(objective).
    let obj = r_total;
    for j in 0..c_total {
        let colsum: f64 = (0..r_total).map(|i| tab[idx(i, j)]).sum();
        let cost = if j >= c_orig { 1.0 } else { 0.0 };
        tab[idx(obj, j)] = cost - colsum;
    }
    let rhs_sum: f64 = (0..r_total).map(|i| tab[idx(i, c_total)]).sum();
    tab[idx(obj, c_total)] = -rhs_sum;

    let mut basis: Vec<usize> = (0..r_total).map(|i| c_orig + i).collect();

    let mut pivots = 0;
    loop {
        // Bland: entering = lowest-index original column with negative
        // reduced cost (artificials never re-enter).
        let mut entering = None;
        for j in 0..c_orig {
            if tab[idx(obj, j)] < -PIVOT_EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { break };

        // Ratio test; ties broken by the lowest basis index (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..r_total {
            let a = tab[idx(i, e)];
            if a > PIVOT_EPS {
                let ratio = tab[idx(i, c_total)] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15
                            || ((ratio - lr).abs() <= 1e-15 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, _)) = leave else {
            // Phase 1 is bounded below; an unbounded direction is numerics.
            return LpOutcome::Inconclusive {
                reason: "phase-1 simplex found an unbounded direction".into(),
            };
        };

        // Pivot on (l, e).
        let piv = tab[idx(l, e)];
        for j in 0..width {
            tab[idx(l, j)] /= piv;
        }
        for i in 0..=r_total {
            if i == l {
                continue;
            }
            let f = tab[idx(i, e)];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                tab[idx(i, j)] -= f * tab[idx(l, j)];
            }
        }
        basis[l] = e;

        pivots += 1;
        if pivots > MAX_PIVOTS {
            return LpOutcome::Inconclusive {
                reason: format!("phase-1 simplex exceeded {MAX_PIVOTS} pivots"),
            };
        }
    }

    let objective = -tab[idx(obj, c_total)];
    if objective <= TOL_LP {
        // Read off x and verify M·x = t directly.
        let mut x = vec![0.0f64; n];
        for i in 0..r_total {
            if basis[i] < n {
                x[basis[i]] = tab[idx(i, c_total)].clamp(0.0, 1.0);
            }
        }
        let resid = m
            .matvec(&x)
            .iter()
            .zip(t)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        if resid > 50.0 * TOL_LP {
            return LpOutcome::Inconclusive {
                reason: format!("claimed-feasible point has residual {resid:.3e}"),
            };
        }
        return LpOutcome::Feasible { x };
    }

    // Infeasible: the dual vector sits in the artificial reduced costs,
    // y_i = 1 − objrow[artificial_i]; undo the row flips for the first
    // `rows` components (the box-row components are folded into the
    // verified margin below).
    let mut u = vec![0.0f64; rows];
    for i in 0..rows {
        u[i] = flip[i] * (1.0 - tab[idx(obj, c_orig + i)]);
    }
    // Verify separation over the box: u·t must exceed Σ_j max(0, (uᵀM)_j).
    let ut: f64 = u.iter().zip(t).map(|(a, b)| a * b).sum();
    let um = m.tmatvec(&u);
    let support: f64 = um.iter().map(|&v| v.max(0.0)).sum();
    let margin = ut - support;
    if margin <= TOL_LP {
        return LpOutcome::Inconclusive {
            reason: format!(
                "simplex reported infeasible (objective {objective:.3e}) but the certificate margin is {margin:.3e}"
            ),
        };
    }
    LpOutcome::Infeasible {
        separating: u,
        margin,
    }
}
