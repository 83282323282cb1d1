//! Cayley coordinates for the qubit: states as Bloch vectors in the unit
//! ball, effects as 4-vectors (a₀, **a**) in the diamond
//! 0 ≤ ½(a₀ ± |**a**|) ≤ 1, and the pairing ½(a₀ + **a**·**r**).
//!
//! The coordinate map x ↦ (tr[x], tr[x σ₁], tr[x σ₂], tr[x σ₃]) with inverse
//! x = ½(x₀I + **x**·σ) is a linear bijection between Hermitian 2×2 matrices
//! and R⁴; it sends the state space onto the closed unit ball and the effect
//! interval onto the diamond, and it is an isometry for the trace norm:
//! ‖½(a₀I + **a**·σ)‖₁ = max{|a₀|, |**a**|}.

use crate::operators::{ComplexMatrix, DensityOperator, EffectOperator, C64, TOL};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Errors raised by the Cayley-coordinate routines.
#[derive(Debug, Error)]
pub enum CayleyError {
    #[error("expected a 2x2 matrix, got {0}x{0}")]
    WrongDimension(usize),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("Bloch vector has norm {0:.6}, outside the unit ball")]
    OutsideBall(f64),
    #[error("({a0:.6}, |a|={norm:.6}) violates the effect inequalities: {which}")]
    OutsideDiamond { a0: f64, norm: f64, which: String },
}

/// The operator basis (I, σ₁, σ₂, σ₃).
#[derive(Debug, Clone)]
pub struct PauliBasis {
    mats: [ComplexMatrix; 4],
}

impl PauliBasis {
    pub fn new() -> Self {
        let c = C64::new;
        let i2 = ComplexMatrix::identity(2);
        let sx = ComplexMatrix::new(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap();
        let sy = ComplexMatrix::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let sz = ComplexMatrix::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]).unwrap();
        Self {
            mats: [i2, sx, sy, sz],
        }
    }

    /// Basis element k ∈ {0,1,2,3}; index 0 is the identity.
    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.mats[k]
    }

    pub fn identity(&self) -> &ComplexMatrix {
        &self.mats[0]
    }

    /// **u**·σ for a real 3-vector.
    pub fn dot(&self, u: [f64; 3]) -> ComplexMatrix {
        self.mats[1]
            .scale_re(u[0])
            .add(&self.mats[2].scale_re(u[1]))
            .add(&self.mats[3].scale_re(u[2]))
    }
}

impl Default for PauliBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Qubit state in Bloch form: the 4-vector (r₀, **r**) with r₀ = 1 and
/// |**r**| ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub r0: f64,
    pub r: [f64; 3],
}

impl BlochState {
    /// Accepts a Bloch vector inside the closed unit ball (within [`TOL`]).
    pub fn new(r: [f64; 3]) -> Result<Self, CayleyError> {
        let norm = vec_norm(r);
        if norm > 1.0 + TOL {
            return Err(CayleyError::OutsideBall(norm));
        }
        Ok(Self { r0: 1.0, r })
    }

    /// Coordinates as a flat 4-vector (r₀, r₁, r₂, r₃).
    pub fn coords(&self) -> [f64; 4] {
        [self.r0, self.r[0], self.r[1], self.r[2]]
    }

    /// Density operator ½(r₀I + **r**·σ).
    pub fn to_density(&self) -> DensityOperator {
        state_from_bloch(self.r).expect("ball membership was checked on construction")
    }
}

/// Qubit effect in Cayley form: (a₀, **a**) with 0 ≤ ½(a₀ ± |**a**|) ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyEffect {
    pub a0: f64,
    pub a: [f64; 3],
}

impl CayleyEffect {
    /// Accepts a 4-vector inside the diamond; the error names the violated
    /// inequality.
    pub fn new(a0: f64, a: [f64; 3]) -> Result<Self, CayleyError> {
        check_diamond(a0, a)?;
        Ok(Self { a0, a })
    }

    pub fn zero() -> Self {
        Self {
            a0: 0.0,
            a: [0.0; 3],
        }
    }

    pub fn unit() -> Self {
        Self {
            a0: 2.0,
            a: [0.0; 3],
        }
    }

    /// Sharp effect (projection) ½(I + **u**·σ) for a unit direction.
    pub fn projection(u: [f64; 3]) -> Result<Self, CayleyError> {
        let norm = vec_norm(u);
        if (norm - 1.0).abs() > 1e-6 {
            return Err(CayleyError::OutsideBall(norm));
        }
        Self::new(1.0, u)
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.a0, self.a[0], self.a[1], self.a[2]]
    }

    /// Effect operator ½(a₀I + **a**·σ).
    pub fn to_effect(&self) -> EffectOperator {
        effect_from_cayley(self.a0, self.a).expect("diamond membership was checked on construction")
    }

    /// Complement (2 − a₀, −**a**); stays in the diamond.
    pub fn complement(&self) -> Self {
        Self {
            a0: 2.0 - self.a0,
            a: [-self.a[0], -self.a[1], -self.a[2]],
        }
    }
}

fn vec_norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// The four diamond inequalities 0 ≤ ½(a₀ − |a|), 0 ≤ ½(a₀ + |a|),
/// ½(a₀ − |a|) ≤ 1, ½(a₀ + |a|) ≤ 1, reported individually.
fn check_diamond(a0: f64, a: [f64; 3]) -> Result<(), CayleyError> {
    let norm = vec_norm(a);
    let lo = 0.5 * (a0 - norm);
    let hi = 0.5 * (a0 + norm);
    let mut violated = Vec::new();
    if lo < -TOL {
        violated.push("(a0 - |a|)/2 >= 0");
    }
    if hi < -TOL {
        violated.push("(a0 + |a|)/2 >= 0");
    }
    if lo > 1.0 + TOL {
        violated.push("(a0 - |a|)/2 <= 1");
    }
    if hi > 1.0 + TOL {
        violated.push("(a0 + |a|)/2 <= 1");
    }
    if violated.is_empty() {
        Ok(())
    } else {
        Err(CayleyError::OutsideDiamond {
            a0,
            norm,
            which: violated.join(", "),
        })
    }
}

/// Coordinates (x₀, **x**) of a Hermitian 2×2 matrix:
/// x₀ = tr[x], x_k = tr[x σ_k]; the inverse is x = ½(x₀I + **x**·σ).
pub fn cayley_decompose(x: &ComplexMatrix) -> Result<(f64, [f64; 3]), CayleyError> {
    if x.dim() != 2 {
        return Err(CayleyError::WrongDimension(x.dim()));
    }
    let defect = x.hermiticity_defect();
    if defect > TOL {
        return Err(CayleyError::NotHermitian(defect));
    }
    let x0 = x.get(0, 0).re + x.get(1, 1).re;
    // For Hermitian x (so x10 = conj(x01)):
    //   tr[x σ₁] = x01 + x10 = 2 Re x01
    //   tr[x σ₂] = i(x01 − x10) = −2 Im x01
    //   tr[x σ₃] = x00 − x11
    let x01 = x.get(0, 1);
    let v = [2.0 * x01.re, -2.0 * x01.im, x.get(0, 0).re - x.get(1, 1).re];
    Ok((x0, v))
}

/// Density operator ½(I + **r**·σ) for a Bloch vector in the unit ball.
pub fn state_from_bloch(r: [f64; 3]) -> Result<DensityOperator, CayleyError> {
    let norm = vec_norm(r);
    if norm > 1.0 + TOL {
        return Err(CayleyError::OutsideBall(norm));
    }
    let p = PauliBasis::new();
    let m = p.identity().add(&p.dot(r)).scale_re(0.5);
    Ok(DensityOperator::new(m).expect("ball membership implies a valid state"))
}

/// Effect operator ½(a₀I + **a**·σ) for a Cayley 4-vector in the diamond.
pub fn effect_from_cayley(a0: f64, a: [f64; 3]) -> Result<EffectOperator, CayleyError> {
    check_diamond(a0, a)?;
    let p = PauliBasis::new();
    let m = p.identity().scale_re(a0).add(&p.dot(a)).scale_re(0.5);
    Ok(EffectOperator::new(m).expect("diamond membership implies a valid effect"))
}

/// The pairing in coordinates: ⟨ρ, a⟩ = ½(a₀ + **a**·**r**).
pub fn cayley_pair(state: &BlochState, effect: &CayleyEffect) -> f64 {
    0.5 * (effect.a0
        + effect.a[0] * state.r[0]
        + effect.a[1] * state.r[1]
        + effect.a[2] * state.r[2])
}

/// Uniform random point of the closed unit ball (rejection from the cube).
pub fn random_state(rng: &mut impl Rng) -> BlochState {
    loop {
        let r = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        if vec_norm(r) <= 1.0 {
            return BlochState { r0: 1.0, r };
        }
    }
}

/// Uniform random direction on the unit sphere (normalized Gaussian).
pub fn random_sphere_direction(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = vec_norm(v);
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Uniform random point of the effect diamond (rejection from its bounding
/// box a₀ ∈ [0,2], **a** ∈ [−1,1]³; the acceptance rate is about 13%).
pub fn random_effect(rng: &mut impl Rng) -> CayleyEffect {
    loop {
        let a0: f64 = rng.gen_range(0.0..=2.0);
        let a = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        if vec_norm(a) <= a0.min(2.0 - a0) {
            return CayleyEffect { a0, a };
        }
    }
}
