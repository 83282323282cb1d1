//! Valuations on effects and their extension to states.
//!
//! A valuation assigns each effect a number in [0, 1] with v(O) = 0 and
//! v(I) = 1.  When it is additive on coexisting pairs — v(a ⊞ b) =
//! v(a) + v(b) whenever the sum stays below I — it is the restriction of a
//! linear functional, and in finite dimension that functional is tr[ρ ·] for
//! a unique density operator ρ.  This module makes the reconstruction
//! concrete: evaluate the valuation on a spanning family of effects, solve
//! for the Hermitian matrix behind it, and report honestly when the result
//! fails to be a state or fails to reproduce the valuation on fresh
//! effects (which is how non-additive valuations are caught).

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::operators::{
    effect_osum, eigh, pair_raw, validate, ComplexMatrix, DensityOperator, EffectOperator,
    OperatorError, ValidationKind, ValidationReport, C64,
};
use crate::realmat::{self, RealMatrix};
use crate::sampling;

/// Number of fresh effects used to cross-check a reconstruction.
const CONSISTENCY_SAMPLES: usize = 64;

#[derive(Debug, Error)]
pub enum ValuationError {
    #[error("valuations need dimension ≥ 2, got {dim}")]
    BadDimension { dim: usize },
    #[error("spanning effect family is rank {rank}, needs {needed}")]
    BasisRankDeficient { rank: usize, needed: usize },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// A function on the effects of a d-level system.  Linearity is *not*
/// assumed; the point of the module is to test for it.
pub struct EffectValuation {
    dim: usize,
    f: Box<dyn Fn(&EffectOperator) -> f64>,
}

impl fmt::Debug for EffectValuation {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt.debug_struct("EffectValuation")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl EffectValuation {
    pub fn new(dim: usize, f: impl Fn(&EffectOperator) -> f64 + 'static) -> Self {
        Self {
            dim,
            f: Box::new(f),
        }
    }

    /// The valuation a ↦ tr[ρ a] of a state: additive and normalized by
    /// construction.
    pub fn from_state(rho: &DensityOperator) -> Self {
        let m = rho.matrix().clone();
        Self::new(rho.dim(), move |a| {
            pair_raw(&m, a.matrix()).expect("matching dimensions").re
        })
    }

    /// The square of a state's valuation, a ↦ tr[ρ a]².  Normalized (O ↦ 0,
    /// I ↦ 1) but not additive — the standard counterexample showing that
    /// normalization alone does not force linearity.
    pub fn squared_pairing(rho: &DensityOperator) -> Self {
        let m = rho.matrix().clone();
        Self::new(rho.dim(), move |a| {
            let p = pair_raw(&m, a.matrix()).expect("matching dimensions").re;
            p * p
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, a: &EffectOperator) -> f64 {
        assert_eq!(
            a.dim(),
            self.dim,
            "valuation applied to an effect of the wrong dimension"
        );
        (self.f)(a)
    }
}

/// A family of d² effects spanning the Hermitian matrices: the diagonal
/// projectors E_kk, plus for every pair j < k the rank-one projectors onto
/// (eⱼ + e_k)/√2 and (eⱼ + i·e_k)/√2.  All are projections, so they are
/// effects without rescaling.
pub fn effect_operator_basis(d: usize) -> Result<Vec<EffectOperator>, ValuationError> {
    if d < 2 {
        return Err(ValuationError::BadDimension { dim: d });
    }
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[k] = C64::new(1.0, 0.0);
        let m = ComplexMatrix::projector_onto(&v)?;
        out.push(EffectOperator::new(m)?);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut re = vec![C64::new(0.0, 0.0); d];
            re[j] = C64::new(1.0, 0.0);
            re[k] = C64::new(1.0, 0.0);
            out.push(EffectOperator::new(ComplexMatrix::projector_onto(&re)?)?);

            let mut im = vec![C64::new(0.0, 0.0); d];
            im[j] = C64::new(1.0, 0.0);
            im[k] = C64::new(0.0, 1.0);
            out.push(EffectOperator::new(ComplexMatrix::projector_onto(&im)?)?);
        }
    }
    debug_assert_eq!(out.len(), d * d);
    Ok(out)
}

/// What extending a valuation to a state produced.
#[derive(Debug)]
pub enum ValuationOutcome {
    /// The solving matrix is a state.  `residual` is the largest
    /// |v(a) − tr[ρ a]| over fresh effects; small residual certifies that
    /// the valuation really is the state's.
    State {
        state: DensityOperator,
        residual: f64,
    },
    /// The solving matrix fails state validation; kept with its report and
    /// the cross-check residual as evidence.
    NotAState {
        matrix: ComplexMatrix,
        report: ValidationReport,
        residual: f64,
    },
}

impl ValuationOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            ValuationOutcome::State { residual, .. } => *residual,
            ValuationOutcome::NotAState { residual, .. } => *residual,
        }
    }
}

/// Solves tr[X aₐ] = v(aₐ) over the spanning family for the Hermitian X,
/// then cross-checks X against the valuation on fresh random effects plus
/// the trivial ones.  Additive normalized valuations come back as
/// [`ValuationOutcome::State`] with a tiny residual; anything else is
/// exposed either by validation or by the residual.
pub fn state_from_valuation(
    v: &EffectValuation,
    seed: u64,
) -> Result<ValuationOutcome, ValuationError> {
    let d = v.dim();
    let basis = effect_operator_basis(d)?;
    let n = d * d;
    let mut a = RealMatrix::zeros(n, n);
    for (row, e) in basis.iter().enumerate() {
        for (col, x) in e.matrix().herm_coords().into_iter().enumerate() {
            a.set(row, col, x);
        }
    }
    let rank = realmat::rank(&a);
    if rank < n {
        return Err(ValuationError::BasisRankDeficient { rank, needed: n });
    }
    let rhs: Vec<f64> = basis.iter().map(|e| v.value(e)).collect();
    let (w, _, _) = realmat::lstsq(&a, &rhs);
    let matrix = ComplexMatrix::from_herm_coords(d, &w)?;

    let mut residual = 0.0f64;
    let check = |e: &EffectOperator, residual: &mut f64| {
        let predicted = pair_raw(&matrix, e.matrix())
            .expect("matching dimensions")
            .re;
        *residual = residual.max((predicted - v.value(e)).abs());
    };
    check(&EffectOperator::zero(d), &mut residual);
    check(&EffectOperator::unit(d), &mut residual);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..CONSISTENCY_SAMPLES {
        let e = sampling::random_effect(d, &mut rng);
        check(&e, &mut residual);
    }

    let report = validate(&matrix, ValidationKind::State);
    if report.passed {
        let state = DensityOperator::new(matrix)?;
        Ok(ValuationOutcome::State { state, residual })
    } else {
        Ok(ValuationOutcome::NotAState {
            matrix,
            report,
            residual,
        })
    }
}

/// Evidence from sampling the additivity law v(a ⊞ b) = v(a) + v(b).
#[derive(Debug, Clone, Copy)]
pub struct AdditivityReport {
    /// Pairs actually tested (draws whose sum left the effect interval are
    /// skipped and not counted).
    pub trials: usize,
    pub max_defect: f64,
}

/// Samples coexisting pairs and measures the worst additivity defect.  The
/// second summand is generated as √(I−a)·c·√(I−a) with c a random effect,
/// which keeps a + b below I by construction.
pub fn verify_additivity(
    v: &EffectValuation,
    trials: usize,
    seed: u64,
) -> Result<AdditivityReport, ValuationError> {
    let d = v.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut tested = 0usize;
    let mut max_defect = 0.0f64;
    for _ in 0..trials {
        let a = sampling::random_effect(d, &mut rng);
        let c = sampling::random_effect(d, &mut rng);
        let complement = crate::operators::effect_complement(&a);
        let s = psd_sqrt(complement.matrix())?;
        let b_matrix = s.matmul(c.matrix()).matmul(&s).hermitian_part();
        let b = EffectOperator::new(b_matrix)?;
        let Some(sum) = effect_osum(&a, &b) else {
            // Rounding pushed an eigenvalue just past 1; the pair is not a
            // usable probe, not a defect.
            continue;
        };
        let defect = (v.value(&sum) - v.value(&a) - v.value(&b)).abs();
        max_defect = max_defect.max(defect);
        tested += 1;
    }
    Ok(AdditivityReport {
        trials: tested,
        max_defect,
    })
}

/// Aggregate outcome of repeated state → valuation → state round trips.
#[derive(Debug, Clone, Copy)]
pub struct ValuationRoundTrip {
    pub trials: usize,
    /// Trials whose extension failed to validate as a state.
    pub failures: usize,
    /// Largest trace distance between a drawn state and the state recovered
    /// from its valuation.
    pub max_state_distance: f64,
    /// Largest cross-check residual over all trials.
    pub max_residual: f64,
}

/// Draws random states, turns each into its effect valuation, extends the
/// valuation back to a state, and reports the worst round-trip error.
pub fn valuation_round_trip(
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<ValuationRoundTrip, ValuationError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut max_state_distance = 0.0f64;
    let mut max_residual = 0.0f64;
    for t in 0..trials {
        let rho = sampling::random_density(d, &mut rng);
        let v = EffectValuation::from_state(&rho);
        let check_seed = seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        match state_from_valuation(&v, check_seed)? {
            ValuationOutcome::State { state, residual } => {
                max_residual = max_residual.max(residual);
                let dist = crate::operators::trace_distance(&rho, &state)?;
                max_state_distance = max_state_distance.max(dist);
            }
            ValuationOutcome::NotAState { residual, .. } => {
                max_residual = max_residual.max(residual);
                failures += 1;
            }
        }
    }
    Ok(ValuationRoundTrip {
        trials,
        failures,
        max_state_distance,
        max_residual,
    })
}

/// Operator square root of a positive semidefinite matrix, with tiny
/// negative eigenvalues clamped to zero.
fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, OperatorError> {
    let eig = eigh(m)?;
    let d = m.dim();
    let mut diag = ComplexMatrix::zeros(d);
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        diag.set(k, k, C64::new(lambda.max(0.0).sqrt(), 0.0));
    }
    let u = &eig.eigenvectors;
    Ok(u.matmul(&diag).matmul(&u.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::trace_distance;

    const SEED: u64 = 0x5ee_d004;

    #[test]
    fn basis_members_are_projections_spanning_everything() {
        for d in [2usize, 3, 4] {
            let basis = effect_operator_basis(d).unwrap();
            assert_eq!(basis.len(), d * d);
            for e in &basis {
                assert!(e.is_projection(1e-12));
            }
            let mut m = RealMatrix::zeros(d * d, d * d);
            for (row, e) in basis.iter().enumerate() {
                for (col, x) in e.matrix().herm_coords().into_iter().enumerate() {
                    m.set(row, col, x);
                }
            }
            assert_eq!(realmat::rank(&m), d * d, "basis must span at d = {d}");
        }
        assert!(matches!(
            effect_operator_basis(1),
            Err(ValuationError::BadDimension { dim: 1 })
        ));
    }

    #[test]
    fn state_valuations_reconstruct_their_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED);
        for d in [2usize, 3] {
            for _ in 0..20 {
                let rho = sampling::random_density(d, &mut rng);
                let v = EffectValuation::from_state(&rho);
                match state_from_valuation(&v, SEED ^ 1).unwrap() {
                    ValuationOutcome::State { state, residual } => {
                        assert!(residual < 1e-12, "residual {residual}");
                        assert!(trace_distance(&rho, &state).unwrap() < 1e-9);
                    }
                    other => panic!("state valuation must extend, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn state_valuations_are_additive() {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 2);
        for d in [2usize, 3] {
            let rho = sampling::random_density(d, &mut rng);
            let v = EffectValuation::from_state(&rho);
            let report = verify_additivity(&v, 200, SEED ^ 3).unwrap();
            assert!(
                report.trials > 150,
                "most draws must be usable, got {}",
                report.trials
            );
            assert!(report.max_defect < 1e-12, "defect {}", report.max_defect);
        }
    }

    #[test]
    fn normalization_of_state_valuations() {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 4);
        let rho = sampling::random_density(3, &mut rng);
        let v = EffectValuation::from_state(&rho);
        assert!(v.value(&EffectOperator::zero(3)).abs() < 1e-15);
        assert!((v.value(&EffectOperator::unit(3)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squared_valuation_is_normalized_but_not_additive() {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 5);
        let rho = sampling::random_pure(2, &mut rng);
        let v = EffectValuation::squared_pairing(&rho);

        assert!(v.value(&EffectOperator::zero(2)).abs() < 1e-15);
        assert!((v.value(&EffectOperator::unit(2)) - 1.0).abs() < 1e-12);

        let additivity = verify_additivity(&v, 200, SEED ^ 6).unwrap();
        assert!(
            additivity.max_defect > 1e-2,
            "squaring must break additivity, defect {}",
            additivity.max_defect
        );

        let outcome = state_from_valuation(&v, SEED ^ 7).unwrap();
        assert!(
            outcome.residual() > 1e-3,
            "no state reproduces a squared valuation, residual {}",
            outcome.residual()
        );
    }

    #[test]
    fn round_trip_report_covers_both_dimensions() {
        for d in [2usize, 3] {
            let report = valuation_round_trip(d, 10, SEED ^ 9).unwrap();
            assert_eq!(report.trials, 10);
            assert_eq!(report.failures, 0);
            assert!(report.max_state_distance < 1e-9, "d = {d}: {report:?}");
            assert!(report.max_residual < 1e-12);
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha12Rng::seed_from_u64(SEED ^ 8);
        for d in [2usize, 3, 5] {
            let a = sampling::random_effect(d, &mut rng);
            let s = psd_sqrt(a.matrix()).unwrap();
            let back = s.matmul(&s);
            assert!(back.max_abs_diff(a.matrix()) < 1e-10);
        }
    }
}
