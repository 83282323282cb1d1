//! Classical statistical models on finite outcome sets: probability vectors
//! on the simplex, effects in the unit hypercube, Markov kernels, and sharp
//! versus fuzzy random variables.
//!
//! The pairing is the plain Euclidean inner product ⟨p, a⟩ = Σ_k p_k a_k.
//! A sharp random variable is a kernel whose rows are Dirac; every
//! row-stochastic matrix is a fuzzy random variable, and pushing a state
//! through one is ordinary matrix action q_j = Σ_k p_k K_kj.

use rand::Rng;
use thiserror::Error;

/// Probability tolerance for simplex/hypercube membership and row sums.
pub const PROB_TOL: f64 = 1e-9;

/// Largest outcome-set size for which subsets are representable as `u64`
/// bitmasks.
pub const MAX_MASK_OUTCOMES: usize = 63;

/// Errors raised by classical-model routines.
#[derive(Debug, Error)]
pub enum CmodelError {
    #[error("outcome space must have at least one point")]
    Empty,
    #[error("entry {index} = {value:.6} lies outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {0:.9}, expected 1")]
    NotNormalized(f64),
    #[error("length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("kernel row {row} sums to {sum:.9}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("kernel entry ({row},{col}) = {value:.6} lies outside [0, 1]")]
    KernelOutOfRange { row: usize, col: usize, value: f64 },
    #[error("outcome subsets need at most {MAX_MASK_OUTCOMES} outcomes, got {0}")]
    TooManyOutcomes(usize),
    #[error("function value {value} is not an outcome index below {size}")]
    BadFunctionValue { value: usize, size: usize },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
}

/// A finite outcome set with optional display labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOutcomeSpace {
    size: usize,
    labels: Vec<String>,
}

impl FiniteOutcomeSpace {
    pub fn new(size: usize) -> Result<Self, CmodelError> {
        if size == 0 {
            return Err(CmodelError::Empty);
        }
        Ok(Self {
            size,
            labels: (0..size).map(|k| k.to_string()).collect(),
        })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self, CmodelError> {
        if labels.is_empty() {
            return Err(CmodelError::Empty);
        }
        Ok(Self {
            size: labels.len(),
            labels,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Point of the probability simplex.  Construction clamps tiny negative
/// entries (above −[`PROB_TOL`]) to zero and records that it did so.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    p: Vec<f64>,
    /// True when construction clamped a small negative entry.
    pub clamped: bool,
}

impl ClassicalState {
    pub fn new(p: Vec<f64>) -> Result<Self, CmodelError> {
        if p.is_empty() {
            return Err(CmodelError::Empty);
        }
        let mut clamped = false;
        let mut q = Vec::with_capacity(p.len());
        for (k, &x) in p.iter().enumerate() {
            if !x.is_finite() {
                return Err(CmodelError::NonFinite(k));
            }
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x) {
                return Err(CmodelError::OutOfRange { index: k, value: x });
            }
            if x < 0.0 {
                clamped = true;
                q.push(0.0);
            } else {
                q.push(x);
            }
        }
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(CmodelError::NotNormalized(sum));
        }
        Ok(Self { p: q, clamped })
    }

    /// Dirac point measure δ_k.
    pub fn dirac(n: usize, k: usize) -> Result<Self, CmodelError> {
        if k >= n {
            return Err(CmodelError::BadFunctionValue { value: k, size: n });
        }
        let mut p = vec![0.0; n];
        p[k] = 1.0;
        Ok(Self { p, clamped: false })
    }

    /// Uniform distribution on n outcomes.
    pub fn uniform(n: usize) -> Result<Self, CmodelError> {
        if n == 0 {
            return Err(CmodelError::Empty);
        }
        Ok(Self {
            p: vec![1.0 / n as f64; n],
            clamped: false,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Point of the unit hypercube: a classical effect 0 ≤ a_k ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalEffect {
    a: Vec<f64>,
}

impl ClassicalEffect {
    pub fn new(a: Vec<f64>) -> Result<Self, CmodelError> {
        if a.is_empty() {
            return Err(CmodelError::Empty);
        }
        for (k, &x) in a.iter().enumerate() {
            if !x.is_finite() {
                return Err(CmodelError::NonFinite(k));
            }
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x) {
                return Err(CmodelError::OutOfRange { index: k, value: x });
            }
        }
        Ok(Self { a })
    }

    /// Indicator function of the subset given as a bitmask.
    pub fn indicator(n: usize, mask: u64) -> Result<Self, CmodelError> {
        if n > MAX_MASK_OUTCOMES {
            return Err(CmodelError::TooManyOutcomes(n));
        }
        Ok(Self {
            a: (0..n)
                .map(|k| if mask & (1 << k) != 0 { 1.0 } else { 0.0 })
                .collect(),
        })
    }

    pub fn zero(n: usize) -> Self {
        Self { a: vec![0.0; n] }
    }

    pub fn unit(n: usize) -> Self {
        Self { a: vec![1.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// ⟨p, a⟩ = Σ_k p_k a_k.
pub fn classical_pair(p: &ClassicalState, a: &ClassicalEffect) -> Result<f64, CmodelError> {
    if p.len() != a.len() {
        return Err(CmodelError::LengthMismatch {
            got: a.len(),
            expected: p.len(),
        });
    }
    Ok(p.probabilities()
        .iter()
        .zip(a.values())
        .map(|(x, y)| x * y)
        .sum())
}

/// Complement a′ = 1 − a, componentwise.
pub fn classical_complement(a: &ClassicalEffect) -> ClassicalEffect {
    ClassicalEffect {
        a: a.values().iter().map(|x| 1.0 - x).collect(),
    }
}

/// Partial sum a ⊕ b, defined exactly when every component of a + b stays
/// ≤ 1 (within [`PROB_TOL`]).  `None` means undefined.
pub fn classical_osum(a: &ClassicalEffect, b: &ClassicalEffect) -> Option<ClassicalEffect> {
    assert_eq!(a.len(), b.len(), "classical_osum: length mismatch");
    let sum: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x + y)
        .collect();
    if sum.iter().any(|&x| x > 1.0 + PROB_TOL) {
        return None;
    }
    Some(ClassicalEffect {
        a: sum.into_iter().map(|x| x.min(1.0)).collect(),
    })
}

/// Decomposes a simplex point into vertex contributions: the pairs
/// (k, p_k) with p_k > 0.
pub fn vertex_decomposition(p: &ClassicalState) -> Vec<(usize, f64)> {
    p.probabilities()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(k, &w)| (k, w))
        .collect()
}

/// Row-stochastic matrix K: n source outcomes × m target outcomes.
/// Row k is the distribution of the (fuzzy) random variable at source
/// point k.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKernel {
    rows: usize,
    cols: usize,
    k: Vec<f64>, // row-major
}

impl MarkovKernel {
    pub fn new(rows: usize, cols: usize, k: Vec<f64>) -> Result<Self, CmodelError> {
        if rows == 0 || cols == 0 {
            return Err(CmodelError::Empty);
        }
        if k.len() != rows * cols {
            return Err(CmodelError::LengthMismatch {
                got: k.len(),
                expected: rows * cols,
            });
        }
        for r in 0..rows {
            let mut sum = 0.0;
            for c in 0..cols {
                let v = k[r * cols + c];
                if !v.is_finite() {
                    return Err(CmodelError::NonFinite(r * cols + c));
                }
                if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
                    return Err(CmodelError::KernelOutOfRange {
                        row: r,
                        col: c,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(CmodelError::RowNotStochastic { row: r, sum });
            }
        }
        Ok(Self { rows, cols, k })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.k[r * self.cols + c]
    }

    /// Row r as a distribution over target outcomes.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.k[r * self.cols..(r + 1) * self.cols]
    }

    /// Kernel composition: first `self`, then `other`.
    pub fn compose(&self, other: &MarkovKernel) -> Result<MarkovKernel, CmodelError> {
        if self.cols != other.rows {
            return Err(CmodelError::LengthMismatch {
                got: other.rows,
                expected: self.cols,
            });
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for r in 0..self.rows {
            for m in 0..self.cols {
                let w = self.get(r, m);
                if w == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[r * other.cols + c] += w * other.get(m, c);
                }
            }
        }
        MarkovKernel::new(self.rows, other.cols, out)
    }

    /// True when every entry is 0 or 1 (within tol), i.e. the kernel is the
    /// kernel of a sharp random variable.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.k
            .iter()
            .all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
    }

    /// Random row-stochastic matrix (rows drawn from a flat Dirichlet).
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> MarkovKernel {
        let mut k = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let mut row: Vec<f64> = (0..cols)
                .map(|_| -rng.gen_range(1e-12..1.0f64).ln())
                .collect();
            let s: f64 = row.iter().sum();
            for v in &mut row {
                *v /= s;
            }
            k.extend(row);
        }
        MarkovKernel::new(rows, cols, k).expect("normalized rows")
    }
}

/// Sharp (deterministic) random variable: a function F from source outcomes
/// to target outcomes, realized as a Dirac-row kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharpRandomVariable {
    map: Vec<usize>,
    target_size: usize,
}

impl SharpRandomVariable {
    pub fn new(map: Vec<usize>, target_size: usize) -> Result<Self, CmodelError> {
        if map.is_empty() || target_size == 0 {
            return Err(CmodelError::Empty);
        }
        for &v in &map {
            if v >= target_size {
                return Err(CmodelError::BadFunctionValue {
                    value: v,
                    size: target_size,
                });
            }
        }
        Ok(Self { map, target_size })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// The kernel with rows δ_{F(k)}.
    pub fn kernel(&self) -> MarkovKernel {
        let rows = self.map.len();
        let cols = self.target_size;
        let mut k = vec![0.0; rows * cols];
        for (r, &v) in self.map.iter().enumerate() {
            k[r * cols + v] = 1.0;
        }
        MarkovKernel::new(rows, cols, k).expect("dirac rows are stochastic")
    }
}

/// Builds the Dirac-row kernel of an outcome function directly.
pub fn kernel_from_function(f: &[usize], target_size: usize) -> Result<MarkovKernel, CmodelError> {
    Ok(SharpRandomVariable::new(f.to_vec(), target_size)?.kernel())
}

/// Pushforward of a state through a kernel: q_j = Σ_k p_k K_kj.
pub fn kernel_pushforward(
    k: &MarkovKernel,
    p: &ClassicalState,
) -> Result<ClassicalState, CmodelError> {
    if p.len() != k.rows() {
        return Err(CmodelError::LengthMismatch {
            got: p.len(),
            expected: k.rows(),
        });
    }
    let mut q = vec![0.0; k.cols()];
    for (j, qj) in q.iter_mut().enumerate() {
        *qj = (0..k.rows())
            .map(|r| p.probabilities()[r] * k.get(r, j))
            .sum();
    }
    ClassicalState::new(q)
}

/// The effect a_k = Σ_{j ∈ X} K_kj induced on the source by a target
/// outcome subset X (bitmask).  Pairing a state with it reproduces the
/// pushforward probability of X.
pub fn kernel_effect(k: &MarkovKernel, mask: u64) -> Result<ClassicalEffect, CmodelError> {
    if k.cols() > MAX_MASK_OUTCOMES {
        return Err(CmodelError::TooManyOutcomes(k.cols()));
    }
    let a: Vec<f64> = (0..k.rows())
        .map(|r| {
            (0..k.cols())
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| k.get(r, j))
                .sum()
        })
        .collect();
    ClassicalEffect::new(a.into_iter().map(|x| x.min(1.0)).collect())
}
