//! Dense complex matrices, Hermitian eigendecomposition, and the operator
//! side of finite-dimensional statistical models: density operators, effect
//! operators, POVMs, and the trace pairing between them.
//!
//! Everything here is written for small dimensions (d ≤ 16 in practice).
//! Robustness and auditability win over speed: the eigensolver is a cyclic
//! Jacobi iteration whose output is easy to verify (`V D V†` reconstruction),
//! and every typed wrapper re-validates its defining inequalities on
//! construction.

use num_complex::Complex;
use thiserror::Error;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Tolerance for hermiticity, trace and normalization defects.
pub const TOL: f64 = 1e-9;
/// Tolerance applied to eigenvalue bounds (positivity, ≤ 1).
pub const TOL_PSD: f64 = 1e-9;

/// Errors raised by matrix and operator routines.
#[derive(Debug, Error)]
pub enum OperatorError {
    /// Matrix data length does not match the declared square dimension.
    #[error("matrix data has length {len}, expected {dim}x{dim} = {expected}")]
    BadShape {
        len: usize,
        dim: usize,
        expected: usize,
    },
    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    /// Two operands act on different dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// A declared tensor factorization does not multiply out to the dimension.
    #[error("dimension {dim} does not factor as {d1}x{d2}")]
    BadFactorization { dim: usize, d1: usize, d2: usize },
    /// Hermitian-only routine called on a matrix that is not Hermitian.
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.1e})")]
    NotHermitian { defect: f64, tol: f64 },
    /// Typed constructor rejected its input; the report lists the violations.
    #[error("validation failed: {0}")]
    Invalid(ValidationReport),
    /// The Jacobi sweep did not reach the off-diagonal threshold.
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
}

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a `dim × dim` matrix from row-major data, rejecting wrong
    /// lengths and non-finite entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self, OperatorError> {
        if data.len() != dim * dim {
            return Err(OperatorError::BadShape {
                len: data.len(),
                dim,
                expected: dim * dim,
            });
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(OperatorError::NonFinite {
                    row: idx / dim,
                    col: idx % dim,
                });
            }
        }
        Ok(Self { dim, data })
    }

    /// Zero matrix.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix entry by entry from a closure over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Rank-one projector |v⟩⟨v| / ⟨v|v⟩ onto the given vector.
    pub fn projector_onto(v: &[C64]) -> Result<Self, OperatorError> {
        let dim = v.len();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(OperatorError::NonFinite { row: 0, col: 0 });
        }
        Ok(Self::from_fn(dim, |i, j| v[i] * v[j].conj() / norm2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.dim + j] = z;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix add: dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix sub: dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(C64::new(x, 0.0))
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul: dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise deviation from `X = X†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Hermitian part `(X + X†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real coordinates of a Hermitian matrix in the orthonormal basis
    /// {E_kk} ∪ {(E_jk+E_kj)/√2} ∪ {i(E_jk−E_kj)/√2}: first the d diagonal
    /// entries, then per off-diagonal position (j<k, row-major) the pair
    /// (√2·Re x_jk, √2·Im x_jk).  For Hermitian x, y this vectorization is a
    /// Frobenius isometry: tr[x·y] = coords(x)·coords(y).
    pub fn herm_coords(&self) -> Vec<f64> {
        let d = self.dim;
        let mut v = Vec::with_capacity(d * d);
        for k in 0..d {
            v.push(self.get(k, k).re);
        }
        let s = std::f64::consts::SQRT_2;
        for j in 0..d {
            for k in (j + 1)..d {
                let z = self.get(j, k);
                v.push(s * z.re);
                v.push(s * z.im);
            }
        }
        v
    }

    /// Inverse of [`herm_coords`](Self::herm_coords); builds the Hermitian
    /// matrix with the given coordinates.
    pub fn from_herm_coords(dim: usize, coords: &[f64]) -> Result<Self, OperatorError> {
        if coords.len() != dim * dim {
            return Err(OperatorError::BadShape {
                len: coords.len(),
                dim,
                expected: dim * dim,
            });
        }
        let mut m = Self::zeros(dim);
        for (k, &c) in coords.iter().take(dim).enumerate() {
            m.set(k, k, C64::new(c, 0.0));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut idx = dim;
        for j in 0..dim {
            for k in (j + 1)..dim {
                let re = coords[idx] * s;
                let im = coords[idx + 1] * s;
                idx += 2;
                m.set(j, k, C64::new(re, im));
                m.set(k, j, C64::new(re, -im));
            }
        }
        Ok(m)
    }
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of
    /// `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Operates on the Hermitian part of the input, so callers that need a strict
/// hermiticity guarantee must check [`ComplexMatrix::hermiticity_defect`]
/// themselves.  Off-diagonal mass is annihilated pairwise with complex
/// rotations until it falls below `1e-14 · ‖A‖_F`; for d ≤ 16 this converges
/// in a handful of sweeps.
pub fn eigh(m: &ComplexMatrix) -> Result<EigenDecomposition, OperatorError> {
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    if d <= 1 {
        return Ok(EigenDecomposition {
            eigenvalues: (0..d).map(|i| a.get(i, i).re).collect(),
            eigenvectors: v,
        });
    }

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                let b = apq.norm();
                if b <= stop / (d * d) as f64 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / b;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = phase * (t * c);

                // Column rotation A ← A·J, J = [[c, σ], [−σ̄, c]] on (p,q).
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c - akq * sigma.conj());
                    a.set(k, q, akp * sigma + akq * c);
                }
                // Row rotation A ← J†·A.
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c - aqk * sigma);
                    a.set(q, k, apk * sigma.conj() + aqk * c);
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                a.set(p, p, C64::new(app - t * b, 0.0));
                a.set(q, q, C64::new(aqq + t * b, 0.0));

                // Accumulate the eigenvector columns.
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * sigma.conj());
                    v.set(k, q, vkp * sigma + vkq * c);
                }
            }
        }
    }
    if !converged {
        // One final measurement so near-threshold cases are not rejected.
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() > stop * 10.0 {
            return Err(OperatorError::NoConvergence(JACOBI_MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |i, j| v.get(i, order[j]));
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// What a matrix is being validated as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationKind {
    State,
    Effect,
    PovmElement,
}

/// Defect measurements for one matrix; `passed` summarizes them against
/// [`TOL`] / [`TOL_PSD`].  Validation never fails hard — callers that need
/// rejection use the typed constructors.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub kind: ValidationKind,
    pub hermiticity_defect: f64,
    /// `|tr − 1|`, present for states only.
    pub trace_defect: Option<f64>,
    /// Smallest and largest eigenvalue of the Hermitian part.
    pub eigenvalue_range: (f64, f64),
    pub passed: bool,
    pub violations: Vec<String>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "{:?}: ok", self.kind)
        } else {
            write!(f, "{:?}: {}", self.kind, self.violations.join("; "))
        }
    }
}

/// Measures how far `m` is from being a valid state / effect and reports the
/// defects instead of throwing.
pub fn validate(m: &ComplexMatrix, kind: ValidationKind) -> ValidationReport {
    let herm = m.hermiticity_defect();
    let eig = eigh(m).expect("eigh on hermitian part");
    let lo = *eig.eigenvalues.first().unwrap();
    let hi = *eig.eigenvalues.last().unwrap();
    let mut violations = Vec::new();
    if herm > TOL {
        violations.push(format!("hermiticity defect {herm:.3e} > {TOL:.1e}"));
    }
    let trace_defect = match kind {
        ValidationKind::State => {
            let td = (m.trace().re - 1.0).abs().max(m.trace().im.abs());
            if td > TOL {
                violations.push(format!("trace defect {td:.3e} > {TOL:.1e}"));
            }
            Some(td)
        }
        _ => None,
    };
    if lo < -TOL_PSD {
        violations.push(format!("eigenvalue {lo:.3e} below 0"));
    }
    if matches!(kind, ValidationKind::Effect | ValidationKind::PovmElement) && hi > 1.0 + TOL_PSD {
        violations.push(format!("eigenvalue {hi:.6} above 1"));
    }
    ValidationReport {
        kind,
        hermiticity_defect: herm,
        trace_defect,
        eigenvalue_range: (lo, hi),
        passed: violations.is_empty(),
        violations,
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite within
/// tolerance.  Constructor rejects anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, OperatorError> {
        let report = validate(&matrix, ValidationKind::State);
        if !report.passed {
            return Err(OperatorError::Invalid(report));
        }
        Ok(Self { matrix })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Pure state |v⟩⟨v| (v is normalized internally).
    pub fn pure(v: &[C64]) -> Result<Self, OperatorError> {
        Self::new(ComplexMatrix::projector_onto(v)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Largest eigenvalue; equals 1 within tolerance exactly for pure states.
    pub fn purity_top_eigenvalue(&self) -> f64 {
        let eig = eigh(&self.matrix).expect("eigh");
        *eig.eigenvalues.last().unwrap()
    }
}

/// Effect operator: Hermitian with spectrum in [0, 1] within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectOperator {
    matrix: ComplexMatrix,
}

impl EffectOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, OperatorError> {
        let report = validate(&matrix, ValidationKind::Effect);
        if !report.passed {
            return Err(OperatorError::Invalid(report));
        }
        Ok(Self { matrix })
    }

    /// Null effect O.
    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    /// Unit effect I.
    pub fn unit(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// True when the spectrum sits in {0, 1} within `tol` (i.e. a projection).
    pub fn is_projection(&self, tol: f64) -> bool {
        let eig = eigh(&self.matrix).expect("eigh");
        eig.eigenvalues
            .iter()
            .all(|&l| l.abs() <= tol || (l - 1.0).abs() <= tol)
    }
}

/// Validation results for a candidate POVM.
#[derive(Debug, Clone)]
pub struct PovmValidationReport {
    pub element_reports: Vec<ValidationReport>,
    /// Largest entrywise deviation of Σ_k a_k from the identity.
    pub normalization_defect: f64,
    pub passed: bool,
}

/// Checks each candidate element and the normalization Σ_k a_k = I.
pub fn validate_povm(elements: &[ComplexMatrix]) -> PovmValidationReport {
    let element_reports: Vec<ValidationReport> = elements
        .iter()
        .map(|m| validate(m, ValidationKind::PovmElement))
        .collect();
    let normalization_defect = if elements.is_empty() {
        f64::INFINITY
    } else {
        let d = elements[0].dim();
        let mut sum = ComplexMatrix::zeros(d);
        for m in elements {
            sum = sum.add(m);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    };
    let passed = element_reports.iter().all(|r| r.passed) && normalization_defect <= TOL;
    PovmValidationReport {
        element_reports,
        normalization_defect,
        passed,
    }
}

/// Discrete observable: a finite family of effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<EffectOperator>,
    labels: Vec<String>,
}

impl Povm {
    /// Validates every element and the normalization before accepting.
    pub fn new(
        effects: Vec<EffectOperator>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, OperatorError> {
        let mats: Vec<ComplexMatrix> = effects.iter().map(|e| e.matrix().clone()).collect();
        let report = validate_povm(&mats);
        if !report.passed {
            let kind = ValidationKind::PovmElement;
            return Err(OperatorError::Invalid(ValidationReport {
                kind,
                hermiticity_defect: 0.0,
                trace_defect: None,
                eigenvalue_range: (0.0, 0.0),
                passed: false,
                violations: vec![format!(
                    "POVM normalization defect {:.3e} or element failure",
                    report.normalization_defect
                )],
            }));
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != effects.len() {
                    return Err(OperatorError::DimensionMismatch {
                        left: l.len(),
                        right: effects.len(),
                    });
                }
                l
            }
            None => (0..effects.len()).map(|k| k.to_string()).collect(),
        };
        Ok(Self { effects, labels })
    }

    pub fn effects(&self) -> &[EffectOperator] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Effect of the outcome subset given as a bitmask over outcome indices.
    pub fn subset_effect(&self, mask: u64) -> EffectOperator {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d);
        for (k, e) in self.effects.iter().enumerate() {
            if mask & (1 << k) != 0 {
                sum = sum.add(e.matrix());
            }
        }
        EffectOperator::new(sum).expect("subset of a POVM is an effect")
    }
}

/// Raw trace pairing tr[ρ·a] between two matrices of matching dimension.
pub fn pair_raw(rho: &ComplexMatrix, a: &ComplexMatrix) -> Result<C64, OperatorError> {
    if rho.dim() != a.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: rho.dim(),
            right: a.dim(),
        });
    }
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += rho.get(i, j) * a.get(j, i);
        }
    }
    Ok(acc)
}

/// Probability of effect `a` in state `rho`: tr[ρ·a], clamped to [0, 1] in
/// the returned value.  Use [`pair_raw`] when the unclamped number is needed.
pub fn pair(rho: &DensityOperator, a: &EffectOperator) -> Result<f64, OperatorError> {
    let raw = pair_raw(rho.matrix(), a.matrix())?;
    debug_assert!(
        raw.im.abs() <= 1e-9,
        "pairing imaginary part {:.3e}",
        raw.im
    );
    Ok(raw.re.clamp(0.0, 1.0))
}

/// Complement effect a′ = I − a; an involution on the effect set.
pub fn effect_complement(a: &EffectOperator) -> EffectOperator {
    let m = ComplexMatrix::identity(a.dim()).sub(a.matrix());
    EffectOperator::new(m).expect("complement of an effect is an effect")
}

/// Partial sum a ⊕ b, defined exactly when a + b is still an effect.
/// `None` means undefined; partiality is a value, not an error.
pub fn effect_osum(a: &EffectOperator, b: &EffectOperator) -> Option<EffectOperator> {
    assert_eq!(a.dim(), b.dim(), "effect_osum: dimension mismatch");
    let sum = a.matrix().add(b.matrix());
    let eig = eigh(&sum).expect("eigh");
    if *eig.eigenvalues.last().unwrap() > 1.0 + TOL_PSD {
        return None;
    }
    Some(EffectOperator::new(sum).expect("a+b within [O, I]"))
}

/// Kronecker product x ⊗ y.
pub fn tensor(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let (dx, dy) = (x.dim(), y.dim());
    let d = dx * dy;
    ComplexMatrix::from_fn(d, |i, j| {
        let (i1, i2) = (i / dy, i % dy);
        let (j1, j2) = (j / dy, j % dy);
        x.get(i1, j1) * y.get(i2, j2)
    })
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of a matrix on a declared d1·d2 factorization.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    d1: usize,
    d2: usize,
    keep: Keep,
) -> Result<ComplexMatrix, OperatorError> {
    if d1 * d2 != m.dim() {
        return Err(OperatorError::BadFactorization {
            dim: m.dim(),
            d1,
            d2,
        });
    }
    let out = match keep {
        Keep::First => ComplexMatrix::from_fn(d1, |i1, j1| {
            (0..d2).map(|k| m.get(i1 * d2 + k, j1 * d2 + k)).sum()
        }),
        Keep::Second => ComplexMatrix::from_fn(d2, |i2, j2| {
            (0..d1).map(|k| m.get(k * d2 + i2, k * d2 + j2)).sum()
        }),
    };
    Ok(out)
}

/// Partial trace of a state; the result is validated as a state again.
pub fn partial_trace(
    rho: &DensityOperator,
    d1: usize,
    d2: usize,
    keep: Keep,
) -> Result<DensityOperator, OperatorError> {
    let m = partial_trace_matrix(rho.matrix(), d1, d2, keep)?;
    DensityOperator::new(m)
}

/// Trace norm ‖x‖₁.  With `hermitian = true` the input must be Hermitian
/// (within [`TOL`]) and the norm is the sum of absolute eigenvalues;
/// otherwise singular values are used.
pub fn trace_norm(x: &ComplexMatrix, hermitian: bool) -> Result<f64, OperatorError> {
    if hermitian {
        let defect = x.hermiticity_defect();
        if defect > TOL {
            return Err(OperatorError::NotHermitian { defect, tol: TOL });
        }
        let eig = eigh(x)?;
        Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
    } else {
        let gram = x.adjoint().matmul(x);
        let eig = eigh(&gram)?;
        Ok(eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum())
    }
}

/// Trace distance ‖ρ − ρ′‖₁ between two states.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64, OperatorError> {
    if a.dim() != b.dim() {
        return Err(OperatorError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    trace_norm(&a.matrix().sub(b.matrix()), true)
}
