//! The classical picture behind a quantum model: probability measures on the
//! pure states, effects lifted to functions on that space, and measurements
//! turned into pure-state kernels.
//!
//! The reduction from measures to density operators is many-to-one, and the
//! helpers here make both halves of that story concrete: [`reduce`] performs
//! the averaging, [`preimage_multiplicity_demo`] exhibits two measures with
//! the same reduction that classical indicator effects still separate, and
//! [`chsh_classical`] runs a Bell-type correlation experiment entirely in
//! kernel language, reproducing the quantum values.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::cmodel::{CmodelError, MarkovKernel};
use crate::operators::{
    pair, pair_raw, tensor, trace_distance, ComplexMatrix, DensityOperator, EffectOperator,
    OperatorError, Povm,
};
use crate::qubit_cayley::{random_sphere_direction, PauliBasis};
use crate::sampling;

/// Eigenvalue slack for accepting a density operator as pure.
pub const PURITY_TOL: f64 = 1e-9;

/// Trace-distance radius inside which two atoms count as the same point.
pub const ATOM_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("mesh needs at least {min} points, got {n}")]
    MeshTooSmall { n: usize, min: usize },
    #[error("mesh points must share one dimension (found {a} and {b})")]
    MeshDimensionMismatch { a: usize, b: usize },
    #[error("atom {index} is not pure (top eigenvalue {top})")]
    AtomNotPure { index: usize, top: f64 },
    #[error("atom {index} has negative weight {weight}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("measure has no atoms")]
    EmptyMeasure,
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("effect is not a projection (idempotency defect {defect:.3e})")]
    NotProjection { defect: f64 },
    #[error("projection is trivial (0 or identity); its lift is constant")]
    TrivialProjection,
    #[error("direction {index} has norm {norm}, expected a unit vector")]
    NotUnit { index: usize, norm: f64 },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Classical(#[from] CmodelError),
}

/// A finite set of pure states standing in for the full pure-state space.
#[derive(Debug, Clone)]
pub struct PureStateMesh {
    dim: usize,
    points: Vec<DensityOperator>,
}

impl PureStateMesh {
    /// Wraps a list of pure states after checking purity and equal dimension.
    pub fn new(points: Vec<DensityOperator>) -> Result<Self, CanonicalError> {
        if points.is_empty() {
            return Err(CanonicalError::MeshTooSmall { n: 0, min: 1 });
        }
        let dim = points[0].dim();
        for (index, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(CanonicalError::MeshDimensionMismatch { a: dim, b: p.dim() });
            }
            let top = p.purity_top_eigenvalue();
            if top < 1.0 - PURITY_TOL {
                return Err(CanonicalError::AtomNotPure { index, top });
            }
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DensityOperator] {
        &self.points
    }
}

/// Evenly spread `n` pure qubit states over the sphere (golden-angle spiral:
/// latitudes z_i = 1 − 2(i+½)/n, azimuths advance by π(3−√5)).
pub fn bloch_mesh(n: usize) -> Result<PureStateMesh, CanonicalError> {
    if n < 4 {
        return Err(CanonicalError::MeshTooSmall { n, min: 4 });
    }
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let basis = PauliBasis::new();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = golden * i as f64;
        let u = [r * phi.cos(), r * phi.sin(), z];
        points.push(direction_state(&basis, u)?);
    }
    PureStateMesh::new(points)
}

/// Pure state ½(I + u·σ) for a unit Bloch vector u.
fn direction_state(basis: &PauliBasis, u: [f64; 3]) -> Result<DensityOperator, CanonicalError> {
    let m = basis.identity().add(&basis.dot(u)).scale_re(0.5);
    Ok(DensityOperator::new(m)?)
}

/// A finitely supported probability measure on pure states.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<(DensityOperator, f64)>,
}

impl AtomicMeasure {
    /// Validates purity of each atom, nonnegativity of the weights (entries
    /// above −10⁻¹² are clamped to zero) and total weight 1.
    pub fn new(atoms: Vec<(DensityOperator, f64)>) -> Result<Self, CanonicalError> {
        if atoms.is_empty() {
            return Err(CanonicalError::EmptyMeasure);
        }
        let dim = atoms[0].0.dim();
        let mut clean = Vec::with_capacity(atoms.len());
        let mut sum = 0.0;
        for (index, (omega, w)) in atoms.into_iter().enumerate() {
            if omega.dim() != dim {
                return Err(CanonicalError::DimensionMismatch {
                    context: format!("atom {index} has dim {}, expected {dim}", omega.dim()),
                });
            }
            let top = omega.purity_top_eigenvalue();
            if top < 1.0 - PURITY_TOL {
                return Err(CanonicalError::AtomNotPure { index, top });
            }
            if w < -1e-12 {
                return Err(CanonicalError::NegativeWeight { index, weight: w });
            }
            let w = w.max(0.0);
            sum += w;
            clean.push((omega, w));
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CanonicalError::WeightSum { sum });
        }
        Ok(Self { dim, atoms: clean })
    }

    /// Point mass at a single pure state.
    pub fn dirac(omega: DensityOperator) -> Result<Self, CanonicalError> {
        Self::new(vec![(omega, 1.0)])
    }

    /// Spectral preimage of an arbitrary state: one atom per eigenvector,
    /// weighted by its eigenvalue (eigenvalues below 10⁻¹² are dropped and
    /// the rest renormalized).
    pub fn from_state(rho: &DensityOperator) -> Result<Self, CanonicalError> {
        let eig = crate::operators::eigh(rho.matrix())?;
        let d = rho.dim();
        let mut atoms = Vec::new();
        let mut total = 0.0;
        for k in 0..d {
            let lambda = eig.eigenvalues[k];
            if lambda <= 1e-12 {
                continue;
            }
            let col: Vec<Complex<f64>> = (0..d).map(|r| eig.eigenvectors.get(r, k)).collect();
            let proj = ComplexMatrix::projector_onto(&col)?;
            atoms.push((DensityOperator::new(proj)?, lambda));
            total += lambda;
        }
        if atoms.is_empty() {
            return Err(CanonicalError::EmptyMeasure);
        }
        for a in &mut atoms {
            a.1 /= total;
        }
        Self::new(atoms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(DensityOperator, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Merges atoms lying within `tol` trace distance of an earlier atom.
    pub fn deduped(&self, tol: f64) -> Result<Self, CanonicalError> {
        let mut reps: Vec<(DensityOperator, f64)> = Vec::new();
        for (omega, w) in &self.atoms {
            let mut merged = false;
            for (rep, rw) in reps.iter_mut() {
                if trace_distance(rep, omega)? <= tol {
                    *rw += w;
                    merged = true;
                    break;
                }
            }
            if !merged {
                reps.push((omega.clone(), *w));
            }
        }
        Self::new(reps)
    }

    /// Whether two measures have the same atoms (within `tol` trace
    /// distance) carrying the same weights (within `tol`).
    pub fn same_measure(&self, other: &Self, tol: f64) -> Result<bool, CanonicalError> {
        if self.dim != other.dim {
            return Ok(false);
        }
        let a = self.deduped(tol)?;
        let b = other.deduped(tol)?;
        if a.len() != b.len() {
            return Ok(false);
        }
        let mut used = vec![false; b.len()];
        for (omega, w) in &a.atoms {
            let mut found = false;
            for (j, (tau, v)) in b.atoms.iter().enumerate() {
                if used[j] {
                    continue;
                }
                if trace_distance(omega, tau)? <= tol && (w - v).abs() <= tol {
                    used[j] = true;
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Expectation ∫ f_a dμ = Σᵢ wᵢ tr[ωᵢ a] of a lifted effect.
    pub fn effect_expectation(&self, a: &EffectOperator) -> Result<f64, CanonicalError> {
        let mut total = 0.0;
        for (omega, w) in &self.atoms {
            total += w * pair(omega, a)?;
        }
        Ok(total)
    }
}

/// Barycenter Σᵢ wᵢ ωᵢ of an atomic measure: the unique state every lifted
/// effect sees when it only looks at expectations.
pub fn reduce(mu: &AtomicMeasure) -> Result<DensityOperator, CanonicalError> {
    let d = mu.dim();
    let mut acc = ComplexMatrix::zeros(d);
    for (omega, w) in mu.atoms() {
        acc = acc.add(&omega.matrix().scale_re(*w));
    }
    Ok(DensityOperator::new(acc)?)
}

/// An effect viewed as the function ω ↦ tr[ω a] on pure states.
#[derive(Debug, Clone)]
pub struct LiftedEffect {
    effect: EffectOperator,
}

/// Lifts an effect to its pure-state expectation function.
pub fn lift_effect(effect: EffectOperator) -> LiftedEffect {
    LiftedEffect { effect }
}

impl LiftedEffect {
    /// Value at a single pure state, clamped into [0, 1].
    pub fn eval(&self, omega: &DensityOperator) -> Result<f64, CanonicalError> {
        Ok(pair(omega, &self.effect)?)
    }

    /// Expectation against an atomic measure.
    pub fn expectation(&self, mu: &AtomicMeasure) -> Result<f64, CanonicalError> {
        mu.effect_expectation(&self.effect)
    }

    pub fn effect(&self) -> &EffectOperator {
        &self.effect
    }
}

/// A measurement viewed as a stochastic kernel on pure states: each pure
/// state is sent to its outcome distribution.
#[derive(Debug, Clone)]
pub struct PureStateKernel {
    povm: Povm,
}

impl PureStateKernel {
    pub fn new(povm: Povm) -> Self {
        Self { povm }
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// Probability of outcome `k` at the pure state ω.
    pub fn outcome_probability(
        &self,
        omega: &DensityOperator,
        k: usize,
    ) -> Result<f64, CanonicalError> {
        Ok(pair(omega, &self.povm.effects()[k])?)
    }

    /// The full outcome distribution at ω.
    pub fn row(&self, omega: &DensityOperator) -> Result<Vec<f64>, CanonicalError> {
        self.povm
            .effects()
            .iter()
            .map(|e| pair(omega, e).map_err(CanonicalError::from))
            .collect()
    }

    /// Probability of the outcome set selected by `mask` (bit k ⇔ outcome k).
    pub fn masked_probability(
        &self,
        omega: &DensityOperator,
        mask: u64,
    ) -> Result<f64, CanonicalError> {
        let e = self.povm.subset_effect(mask);
        Ok(pair(omega, &e)?)
    }

    /// Outcome distribution of the measurement under an atomic measure,
    /// i.e. the kernel integrated against μ.
    pub fn distribution(&self, mu: &AtomicMeasure) -> Result<Vec<f64>, CanonicalError> {
        let n = self.povm.len();
        let mut out = vec![0.0; n];
        for (omega, w) in mu.atoms() {
            let row = self.row(omega)?;
            for (o, r) in out.iter_mut().zip(&row) {
                *o += w * r;
            }
        }
        Ok(out)
    }
}

/// Tabulates a measurement's pure-state kernel over a mesh, giving a
/// finite row-stochastic matrix (mesh point i ↦ outcome distribution).
pub fn kernel_of_povm(povm: &Povm, mesh: &PureStateMesh) -> Result<MarkovKernel, CanonicalError> {
    if povm.dim() != mesh.dim() {
        return Err(CanonicalError::DimensionMismatch {
            context: format!("povm dim {} vs mesh dim {}", povm.dim(), mesh.dim()),
        });
    }
    let kernel = PureStateKernel::new(povm.clone());
    let mut entries = Vec::with_capacity(mesh.len() * povm.len());
    for omega in mesh.points() {
        entries.extend(kernel.row(omega)?);
    }
    Ok(MarkovKernel::new(mesh.len(), povm.len(), entries)?)
}

/// How the lift of a sharp effect spreads over [0, 1] on a mesh.
#[derive(Debug, Clone)]
pub struct FuzzinessProfile {
    /// Number of mesh points evaluated.
    pub count: usize,
    /// Smallest value of the lift on the mesh.
    pub min: f64,
    /// Largest value of the lift on the mesh.
    pub max: f64,
    /// Counts per decile bin [k/10, (k+1)/10); the last bin includes 1.
    pub deciles: [usize; 10],
}

/// Evaluates the lift of a nontrivial projection over a mesh and bins the
/// values into deciles.  Even though the effect is sharp, its lift takes
/// every intermediate value: that spread is what the profile records.
pub fn fuzziness_profile(
    effect: &EffectOperator,
    mesh: &PureStateMesh,
) -> Result<FuzzinessProfile, CanonicalError> {
    if !effect.is_projection(1e-6) {
        let sq = effect.matrix().matmul(effect.matrix());
        let defect = sq.max_abs_diff(effect.matrix());
        return Err(CanonicalError::NotProjection { defect });
    }
    let d = effect.dim();
    let tr = effect.matrix().trace().re;
    if tr < 0.5 || tr > d as f64 - 0.5 {
        // Rank 0 or full rank: the lift is constant 0 or 1.
        return Err(CanonicalError::TrivialProjection);
    }
    if effect.dim() != mesh.dim() {
        return Err(CanonicalError::DimensionMismatch {
            context: format!("effect dim {} vs mesh dim {}", effect.dim(), mesh.dim()),
        });
    }
    let lift = lift_effect(effect.clone());
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut deciles = [0usize; 10];
    for omega in mesh.points() {
        let v = lift.eval(omega)?;
        min = min.min(v);
        max = max.max(v);
        let bin = ((v * 10.0).floor() as usize).min(9);
        deciles[bin] += 1;
    }
    Ok(FuzzinessProfile {
        count: mesh.len(),
        min,
        max,
        deciles,
    })
}

/// Two distinct measures on pure states with the same barycenter, plus the
/// evidence: every effect expectation agrees, while a classical indicator
/// of the first measure's support tells them apart.
#[derive(Debug)]
pub struct PreimageDemo {
    pub mu1: AtomicMeasure,
    pub mu2: AtomicMeasure,
    /// Common barycenter (the maximally mixed state).
    pub reduced: DensityOperator,
    /// Trace distance between the two barycenters.
    pub reduction_gap: f64,
    /// Largest |∫f_a dμ₁ − ∫f_a dμ₂| over the sampled effects.
    pub max_effect_gap: f64,
    /// Number of effects sampled for the gap.
    pub effects_checked: usize,
    /// (∫χ dμ₁, ∫χ dμ₂) for the indicator χ of μ₁'s support.
    pub indicator_values: (f64, f64),
    /// Whether the measures differ as measures.
    pub distinct: bool,
}

/// Builds the equal-mixture measures on the ±z and ±x pure states.  Both
/// reduce to the maximally mixed state — no effect expectation separates
/// them — yet as classical objects they are different, and the indicator of
/// {±z} assigns them expectations 1 and 0.
pub fn preimage_multiplicity_demo(
    effect_samples: usize,
    seed: u64,
) -> Result<PreimageDemo, CanonicalError> {
    let basis = PauliBasis::new();
    let z_plus = direction_state(&basis, [0.0, 0.0, 1.0])?;
    let z_minus = direction_state(&basis, [0.0, 0.0, -1.0])?;
    let x_plus = direction_state(&basis, [1.0, 0.0, 0.0])?;
    let x_minus = direction_state(&basis, [-1.0, 0.0, 0.0])?;

    let mu1 = AtomicMeasure::new(vec![(z_plus.clone(), 0.5), (z_minus.clone(), 0.5)])?;
    let mu2 = AtomicMeasure::new(vec![(x_plus, 0.5), (x_minus, 0.5)])?;

    let r1 = reduce(&mu1)?;
    let r2 = reduce(&mu2)?;
    let reduction_gap = trace_distance(&r1, &r2)?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_effect_gap = 0.0f64;
    for _ in 0..effect_samples {
        let a = sampling::random_effect(2, &mut rng);
        let gap = (mu1.effect_expectation(&a)? - mu2.effect_expectation(&a)?).abs();
        max_effect_gap = max_effect_gap.max(gap);
    }

    // Classical indicator of μ₁'s support: 1 on atoms within merge distance
    // of {±z}, 0 elsewhere.
    let support = [&z_plus, &z_minus];
    let indicator = |mu: &AtomicMeasure| -> Result<f64, CanonicalError> {
        let mut total = 0.0;
        for (omega, w) in mu.atoms() {
            for s in support {
                if trace_distance(omega, s)? <= ATOM_MERGE_TOL {
                    total += w;
                    break;
                }
            }
        }
        Ok(total)
    };
    let indicator_values = (indicator(&mu1)?, indicator(&mu2)?);
    let distinct = !mu1.same_measure(&mu2, ATOM_MERGE_TOL)?;

    Ok(PreimageDemo {
        mu1,
        mu2,
        reduced: r1,
        reduction_gap,
        max_effect_gap,
        effects_checked: effect_samples,
        indicator_values,
        distinct,
    })
}

/// Measurement directions for a two-party correlation experiment.  All four
/// must be unit vectors.
#[derive(Debug, Clone, Copy)]
pub struct ChshSettings {
    pub a: [f64; 3],
    pub a_prime: [f64; 3],
    pub b: [f64; 3],
    pub b_prime: [f64; 3],
}

impl ChshSettings {
    pub fn new(
        a: [f64; 3],
        a_prime: [f64; 3],
        b: [f64; 3],
        b_prime: [f64; 3],
    ) -> Result<Self, CanonicalError> {
        for (index, u) in [a, a_prime, b, b_prime].iter().enumerate() {
            let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(CanonicalError::NotUnit { index, norm });
            }
        }
        Ok(Self {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// Directions in the x–z plane from angles in degrees:
    /// θ ↦ (sin θ, 0, cos θ).
    pub fn from_angles_deg(angles: [f64; 4]) -> Self {
        let dir = |deg: f64| {
            let t = deg.to_radians();
            [t.sin(), 0.0, t.cos()]
        };
        Self {
            a: dir(angles[0]),
            a_prime: dir(angles[1]),
            b: dir(angles[2]),
            b_prime: dir(angles[3]),
        }
    }

    /// The standard maximal-violation geometry: a = z, a′ = x, and b, b′
    /// along the diagonals (±x + z)/√2.
    pub fn tsirelson() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: [0.0, 0.0, 1.0],
            a_prime: [1.0, 0.0, 0.0],
            b: [s, 0.0, s],
            b_prime: [-s, 0.0, s],
        }
    }

    fn pairs(&self) -> [([f64; 3], [f64; 3]); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// Result of a correlation experiment over the four setting pairs
/// (a,b), (a,b′), (a′,b), (a′,b′).
#[derive(Debug, Clone)]
pub struct ChshResult {
    /// The largest |±E₁ ± E₂ ± E₃ ± E₄| over sign patterns with an odd
    /// number of minus signs.
    pub s_value: f64,
    /// Correlations E(a,b), E(a,b′), E(a′,b), E(a′,b′).
    pub correlations: [f64; 4],
    /// The sign pattern achieving `s_value`.
    pub signs: [f64; 4],
    /// Joint outcome distributions (++, +−, −+, −−) per setting pair, when
    /// the computation produced them.
    pub joints: Option<[[f64; 4]; 4]>,
}

/// All sign patterns with exactly one minus; the three-minus patterns give
/// the same absolute values.
const SIGN_PATTERNS: [[f64; 4]; 4] = [
    [-1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0, -1.0],
];

fn maximize_combination(e: [f64; 4]) -> (f64, [f64; 4]) {
    let mut best = f64::NEG_INFINITY;
    let mut best_signs = SIGN_PATTERNS[0];
    for signs in SIGN_PATTERNS {
        let v = (signs[0] * e[0] + signs[1] * e[1] + signs[2] * e[2] + signs[3] * e[3]).abs();
        if v > best {
            best = v;
            best_signs = signs;
        }
    }
    (best, best_signs)
}

/// Projector onto the two-qubit singlet (|01⟩ − |10⟩)/√2.
pub fn singlet_state() -> Result<DensityOperator, CanonicalError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = [
        Complex::new(0.0, 0.0),
        Complex::new(s, 0.0),
        Complex::new(-s, 0.0),
        Complex::new(0.0, 0.0),
    ];
    Ok(DensityOperator::new(ComplexMatrix::projector_onto(&amps)?)?)
}

/// The two-outcome measurement along direction u: effects ½(I ± u·σ).
fn direction_effects(basis: &PauliBasis, u: [f64; 3]) -> (ComplexMatrix, ComplexMatrix) {
    let id = basis.identity();
    let s = basis.dot(u);
    let plus = id.add(&s).scale_re(0.5);
    let minus = id.sub(&s).scale_re(0.5);
    (plus, minus)
}

/// Runs the correlation experiment in the classical picture: the singlet
/// becomes a point measure on two-qubit pure states, each setting pair a
/// four-outcome product measurement, and every correlation is read off a
/// pure-state kernel.
pub fn chsh_classical(settings: &ChshSettings) -> Result<ChshResult, CanonicalError> {
    let basis = PauliBasis::new();
    let mu = AtomicMeasure::dirac(singlet_state()?)?;

    let mut correlations = [0.0f64; 4];
    let mut joints = [[0.0f64; 4]; 4];
    for (idx, (u, v)) in settings.pairs().into_iter().enumerate() {
        let (up, um) = direction_effects(&basis, u);
        let (vp, vm) = direction_effects(&basis, v);
        let elements = vec![
            EffectOperator::new(tensor(&up, &vp))?,
            EffectOperator::new(tensor(&up, &vm))?,
            EffectOperator::new(tensor(&um, &vp))?,
            EffectOperator::new(tensor(&um, &vm))?,
        ];
        let labels = ["++", "+-", "-+", "--"].map(str::to_owned).to_vec();
        let povm = Povm::new(elements, Some(labels))?;
        let kernel = PureStateKernel::new(povm);
        let dist = kernel.distribution(&mu)?;
        joints[idx] = [dist[0], dist[1], dist[2], dist[3]];
        correlations[idx] = dist[0] - dist[1] - dist[2] + dist[3];
    }

    let (s_value, signs) = maximize_combination(correlations);
    Ok(ChshResult {
        s_value,
        correlations,
        signs,
        joints: Some(joints),
    })
}

/// Runs the same experiment by direct expectation of the product
/// observables (u·σ) ⊗ (v·σ) in the singlet state.
pub fn chsh_quantum(settings: &ChshSettings) -> Result<ChshResult, CanonicalError> {
    let basis = PauliBasis::new();
    let rho = singlet_state()?;

    let mut correlations = [0.0f64; 4];
    for (idx, (u, v)) in settings.pairs().into_iter().enumerate() {
        let obs = tensor(&basis.dot(u), &basis.dot(v));
        correlations[idx] = pair_raw(rho.matrix(), &obs)?.re;
    }

    let (s_value, signs) = maximize_combination(correlations);
    Ok(ChshResult {
        s_value,
        correlations,
        signs,
        joints: None,
    })
}

/// Summary of a randomized search over measurement settings.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub trials: usize,
    /// Largest correlation combination seen.
    pub max_s: f64,
    /// The settings achieving it.
    pub best: ChshSettings,
}

/// Draws `trials` random setting quadruples and records the largest
/// correlation combination.  The supremum over all settings is 2·√2, and a
/// long sweep gets close to it without ever crossing.
pub fn chsh_random_sweep(trials: usize, seed: u64) -> Result<SweepReport, CanonicalError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut max_s = f64::NEG_INFINITY;
    let mut best = ChshSettings::tsirelson();
    for _ in 0..trials.max(1) {
        let settings = ChshSettings::new(
            random_sphere_direction(&mut rng),
            random_sphere_direction(&mut rng),
            random_sphere_direction(&mut rng),
            random_sphere_direction(&mut rng),
        )?;
        let result = chsh_quantum(&settings)?;
        if result.s_value > max_s {
            max_s = result.s_value;
            best = settings;
        }
    }
    Ok(SweepReport {
        trials: trials.max(1),
        max_s,
        best,
    })
}
