//! Seeded random generators for states, effects, and Hermitian matrices in
//! arbitrary small dimension.  Every demo and report in this crate drives
//! its randomness through a caller-supplied RNG so runs are reproducible
//! from a single seed.

use crate::operators::{eigh, ComplexMatrix, DensityOperator, EffectOperator, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Random Hermitian matrix with independent Gaussian entries (GUE-style,
/// unnormalized).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                m.set(i, i, C64::new(rng.sample(StandardNormal), 0.0));
            } else {
                let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                let z = z * std::f64::consts::FRAC_1_SQRT_2;
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
    }
    m
}

/// Random density operator from a Ginibre matrix: G·G† normalized to unit
/// trace.  Full rank with probability one.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    DensityOperator::new(gg.scale_re(1.0 / tr)).expect("Ginibre construction is a state")
}

/// Random pure state |ψ⟩⟨ψ| with Haar-distributed ψ.
pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityOperator::pure(&v).expect("nonzero Gaussian vector")
}

/// Random effect: U·diag(u₁…u_d)·U† with uniform eigenvalues in [0, 1] and
/// the eigenbasis of a random Hermitian matrix.
pub fn random_effect(dim: usize, rng: &mut impl Rng) -> EffectOperator {
    let basis = eigh(&random_hermitian(dim, rng))
        .expect("eigh")
        .eigenvectors;
    let evs: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let d = ComplexMatrix::from_fn(dim, |i, j| {
        if i == j {
            C64::new(evs[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let m = basis.matmul(&d).matmul(&basis.adjoint());
    EffectOperator::new(m).expect("spectrum inside [0,1]")
}

/// Random projection of rank 1: |ψ⟩⟨ψ| viewed as an effect.
pub fn random_rank_one_projection(dim: usize, rng: &mut impl Rng) -> EffectOperator {
    let rho = random_pure(dim, rng);
    EffectOperator::new(rho.matrix().clone()).expect("projector is an effect")
}

/// Random probability vector from a flat Dirichlet distribution.
pub fn random_simplex_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| -rng.gen_range(1e-300..1.0f64).ln())
        .collect();
    let s: f64 = w.iter().sum();
    for v in &mut w {
        *v /= s;
    }
    w
}
