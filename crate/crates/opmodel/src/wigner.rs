//! Discretized Wigner quasi-probability tables for one continuous degree of
//! freedom (ħ = 1).
//!
//! Wave functions live on a uniform symmetric position grid with the right
//! endpoint excluded, so zero is a grid point when the count is even.  The
//! transform is
//!
//!   W(q, p) = (Δq/π) Σⱼ ψ*(q + yⱼ) ψ(q − yⱼ) e^{2ip·yⱼ},   yⱼ = j·Δq,
//!
//! with the shift window clipped to the grid.  The companion momentum grid
//! of [`Grid1D::conjugate_momentum`] has Δp = π/(N·Δq), which makes both
//! marginal sums collapse by exact roots-of-unity cancellation — position
//! and momentum marginals then agree with |ψ(q)|² and |φ(p)|² up to
//! aliasing terms that are negligible for well-contained states.
//!
//! Negative table entries are the non-classicality witness; [`WignerTable`]
//! reports its most negative entry with its location.

use std::f64::consts::PI;

use num_complex::Complex;
use thiserror::Error;

use crate::operators::{ComplexMatrix, C64};

/// Relative slack allowed on ‖ψ‖² before a wave function is rejected.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("bad grid: {context}")]
    BadGrid { context: String },
    #[error("wave function is not normalized: ‖ψ‖² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// A uniform grid min, min+step, …, min+(n−1)·step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    min: f64,
    step: f64,
    n: usize,
}

impl Grid1D {
    /// Grid of `n` points covering [−extent, extent) with the right endpoint
    /// excluded; `n` must be even so that 0 itself is the point at n/2.
    pub fn symmetric(extent: f64, n: usize) -> Result<Self, WignerError> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(WignerError::BadGrid {
                context: format!("extent {extent} must be positive"),
            });
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(WignerError::BadGrid {
                context: format!("need an even count ≥ 4, got {n}"),
            });
        }
        Ok(Self {
            min: -extent,
            step: 2.0 * extent / n as f64,
            n,
        })
    }

    /// The momentum grid conjugate to a position grid: same count, spacing
    /// π/(N·Δq), symmetric about 0.  This is the spacing at which the
    /// marginal sums of a Wigner table telescope exactly.
    pub fn conjugate_momentum(q: &Grid1D) -> Self {
        let step = PI / (q.n as f64 * q.step);
        Self {
            min: -0.5 * q.n as f64 * step,
            step,
            n: q.n,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.min + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn min(&self) -> f64 {
        self.min
    }
}

/// A normalized wave function sampled on a [`Grid1D`], with the rectangle
/// rule as inner product: ‖ψ‖² = Δq·Σ|ψᵢ|².
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Grid1D,
    values: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<Self, WignerError> {
        if values.len() != grid.len() {
            return Err(WignerError::DimensionMismatch {
                context: format!("{} samples on a {}-point grid", values.len(), grid.len()),
            });
        }
        let norm_sq = grid.step() * values.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
            return Err(WignerError::NotNormalized { norm_sq });
        }
        Ok(Self { grid, values })
    }

    fn from_samples(grid: Grid1D, mut raw: Vec<C64>) -> Result<Self, WignerError> {
        let norm_sq = grid.step() * raw.iter().map(|v| v.norm_sqr()).sum::<f64>();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(WignerError::NotNormalized { norm_sq });
        }
        let scale = 1.0 / norm_sq.sqrt();
        for v in raw.iter_mut() {
            *v *= scale;
        }
        Self::new(grid, raw)
    }

    /// The harmonic-oscillator ground state π^{−1/4}·e^{−q²/2}, normalized
    /// exactly in the discrete inner product.
    pub fn gaussian_ground(grid: Grid1D) -> Result<Self, WignerError> {
        let raw = grid
            .points()
            .into_iter()
            .map(|q| Complex::new((-0.5 * q * q).exp(), 0.0))
            .collect();
        Self::from_samples(grid, raw)
    }

    /// The first excited oscillator state, proportional to q·e^{−q²/2}.
    pub fn first_excited(grid: Grid1D) -> Result<Self, WignerError> {
        let raw = grid
            .points()
            .into_iter()
            .map(|q| Complex::new(q * (-0.5 * q * q).exp(), 0.0))
            .collect();
        Self::from_samples(grid, raw)
    }

    /// A coherent state centred at (q₀, p₀): e^{−(q−q₀)²/2 + i·p₀·q}.
    pub fn coherent(grid: Grid1D, q0: f64, p0: f64) -> Result<Self, WignerError> {
        let raw = grid
            .points()
            .into_iter()
            .map(|q| {
                let mag = (-0.5 * (q - q0) * (q - q0)).exp();
                Complex::from_polar(mag, p0 * q)
            })
            .collect();
        Self::from_samples(grid, raw)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// |ψ(qᵢ)|², a density with respect to dq.
    pub fn position_density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// |φ(pₘ)|² with φ(p) = (Δq/√(2π))·Σᵢ ψᵢ e^{−i·p·qᵢ}.
    pub fn momentum_density(&self, p_grid: &Grid1D) -> Vec<f64> {
        let dq = self.grid.step();
        let scale = dq / (2.0 * PI).sqrt();
        p_grid
            .points()
            .into_iter()
            .map(|p| {
                let mut acc = Complex::new(0.0, 0.0);
                for (i, v) in self.values.iter().enumerate() {
                    let q = self.grid.point(i);
                    acc += v * Complex::from_polar(1.0, -p * q);
                }
                (scale * acc).norm_sqr()
            })
            .collect()
    }

    /// The projector kernel K(qᵤ, qᵥ) = ψ(qᵤ)·ψ*(qᵥ) as a matrix, suitable
    /// for [`wigner_from_position_kernel`] and for mixing states.
    pub fn position_kernel(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, |u, v| self.values[u] * self.values[v].conj())
    }
}

/// e^{2i·pₘ·j·Δq} for every momentum index m and shift j ≥ 0.
fn phase_table(p_grid: &Grid1D, dq: f64, n: usize) -> Vec<Vec<C64>> {
    p_grid
        .points()
        .into_iter()
        .map(|p| {
            (0..n)
                .map(|j| Complex::from_polar(1.0, 2.0 * p * j as f64 * dq))
                .collect()
        })
        .collect()
}

/// The Wigner table of a pure state on the product of its position grid and
/// a chosen momentum grid.
pub fn wigner_transform(psi: &WaveFunction, p_grid: &Grid1D) -> WignerTable {
    let q_grid = *psi.grid();
    let n = q_grid.len();
    let dq = q_grid.step();
    let phases = phase_table(p_grid, dq, n);
    let psi_v = psi.values();

    let mut values = vec![0.0f64; n * p_grid.len()];
    for i in 0..n {
        let window = i.min(n - 1 - i);
        let diag = psi_v[i].norm_sqr();
        for (m, row) in phases.iter().enumerate() {
            // j and −j contribute conjugate terms, so only the real part of
            // the j ≥ 1 half-sum survives (doubled).
            let mut acc = diag;
            for j in 1..=window {
                let cross = psi_v[i + j].conj() * psi_v[i - j];
                acc += 2.0 * (cross * row[j]).re;
            }
            values[i * p_grid.len() + m] = dq / PI * acc;
        }
    }
    WignerTable {
        q_grid,
        p_grid: *p_grid,
        values,
    }
}

/// The Wigner table of a (possibly mixed) state given by its position
/// kernel K(qᵤ, qᵥ) = ⟨qᵤ|ρ|qᵥ⟩·(weight 1 per grid cell, i.e. tr over the
/// grid is Δq·Σᵢ K(qᵢ, qᵢ) = 1).
pub fn wigner_from_position_kernel(
    kernel: &ComplexMatrix,
    q_grid: &Grid1D,
    p_grid: &Grid1D,
) -> Result<WignerTable, WignerError> {
    let n = q_grid.len();
    if kernel.dim() != n {
        return Err(WignerError::DimensionMismatch {
            context: format!(
                "kernel is {}×{} on a {}-point grid",
                kernel.dim(),
                kernel.dim(),
                n
            ),
        });
    }
    let defect = kernel.hermiticity_defect();
    if defect > 1e-9 {
        return Err(WignerError::DimensionMismatch {
            context: format!("kernel is not Hermitian (defect {defect:.3e})"),
        });
    }
    let dq = q_grid.step();
    let phases = phase_table(p_grid, dq, n);

    let mut values = vec![0.0f64; n * p_grid.len()];
    for i in 0..n {
        let window = i.min(n - 1 - i);
        let diag = kernel.get(i, i).re;
        for (m, row) in phases.iter().enumerate() {
            let mut acc = diag;
            for (j, phase) in row.iter().enumerate().take(window + 1).skip(1) {
                // ⟨q+y|ρ|q−y⟩·e^{−2ipy}; the j ↔ −j pair is again conjugate.
                let cross = kernel.get(i + j, i - j);
                acc += 2.0 * (cross * phase.conj()).re;
            }
            values[i * p_grid.len() + m] = dq / PI * acc;
        }
    }
    Ok(WignerTable {
        q_grid: *q_grid,
        p_grid: *p_grid,
        values,
    })
}

/// The most negative table entry and where it sits.
#[derive(Debug, Clone, Copy)]
pub struct NegativityWitness {
    pub value: f64,
    pub q: f64,
    pub p: f64,
    pub q_index: usize,
    pub p_index: usize,
}

/// W(qᵢ, pₘ) on a rectangular grid, stored row-major over q.
#[derive(Debug, Clone)]
pub struct WignerTable {
    q_grid: Grid1D,
    p_grid: Grid1D,
    values: Vec<f64>,
}

impl WignerTable {
    pub fn q_grid(&self) -> &Grid1D {
        &self.q_grid
    }

    pub fn p_grid(&self) -> &Grid1D {
        &self.p_grid
    }

    pub fn value(&self, q_index: usize, p_index: usize) -> f64 {
        self.values[q_index * self.p_grid.len() + p_index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Position marginal Δp·Σₘ W(qᵢ, pₘ), comparable to |ψ(qᵢ)|².
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.p_grid.step();
        (0..self.q_grid.len())
            .map(|i| {
                dp * (0..self.p_grid.len())
                    .map(|m| self.value(i, m))
                    .sum::<f64>()
            })
            .collect()
    }

    /// Momentum marginal Δq·Σᵢ W(qᵢ, pₘ), comparable to |φ(pₘ)|².
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let dq = self.q_grid.step();
        (0..self.p_grid.len())
            .map(|m| {
                dq * (0..self.q_grid.len())
                    .map(|i| self.value(i, m))
                    .sum::<f64>()
            })
            .collect()
    }

    /// Total mass Δq·Δp·ΣΣ W — should be 1 for a normalized state.
    pub fn total_mass(&self) -> f64 {
        self.q_grid.step() * self.p_grid.step() * self.values.iter().sum::<f64>()
    }

    /// The most negative entry; a negative value certifies that no joint
    /// classical distribution over the grid reproduces this table.
    pub fn min_entry(&self) -> NegativityWitness {
        let mut best = NegativityWitness {
            value: f64::INFINITY,
            q: 0.0,
            p: 0.0,
            q_index: 0,
            p_index: 0,
        };
        for i in 0..self.q_grid.len() {
            for m in 0..self.p_grid.len() {
                let v = self.value(i, m);
                if v < best.value {
                    best = NegativityWitness {
                        value: v,
                        q: self.q_grid.point(i),
                        p: self.p_grid.point(m),
                        q_index: i,
                        p_index: m,
                    };
                }
            }
        }
        best
    }

    /// Affine combination Σ λₖ·Wₖ of tables on identical grids.
    pub fn mix(components: &[(f64, &WignerTable)]) -> Result<WignerTable, WignerError> {
        let Some(((_, first), rest)) = components.split_first() else {
            return Err(WignerError::DimensionMismatch {
                context: "empty mixture".into(),
            });
        };
        let weight_sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (weight_sum - 1.0).abs() > 1e-9 {
            return Err(WignerError::DimensionMismatch {
                context: format!("mixture weights sum to {weight_sum}, expected 1"),
            });
        }
        for (_, t) in rest {
            if t.q_grid != first.q_grid || t.p_grid != first.p_grid {
                return Err(WignerError::DimensionMismatch {
                    context: "mixture components live on different grids".into(),
                });
            }
        }
        let mut values = vec![0.0f64; first.values.len()];
        for (w, t) in components {
            for (out, v) in values.iter_mut().zip(&t.values) {
                *out += w * v;
            }
        }
        Ok(WignerTable {
            q_grid: first.q_grid,
            p_grid: first.p_grid,
            values,
        })
    }
}

/// 2π·Δq·Δp·ΣΣ Wₐ·W_b, the discrete version of the overlap formula
/// tr[ρₐ·ρ_b] = 2π·∫∫ Wₐ·W_b.
pub fn overlap(a: &WignerTable, b: &WignerTable) -> Result<f64, WignerError> {
    if a.q_grid != b.q_grid || a.p_grid != b.p_grid {
        return Err(WignerError::DimensionMismatch {
            context: "overlap needs tables on identical grids".into(),
        });
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok(2.0 * PI * a.q_grid.step() * a.p_grid.step() * dot)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_PI: f64 = 1.0 / PI;

    fn standard() -> (Grid1D, Grid1D) {
        let q = Grid1D::symmetric(8.0, 256).unwrap();
        let p = Grid1D::conjugate_momentum(&q);
        (q, p)
    }

    #[test]
    fn grids_contain_zero_exactly() {
        let (q, p) = standard();
        assert_eq!(q.point(128), 0.0);
        assert_eq!(p.point(128), 0.0);
        assert_eq!(q.len(), 256);
        assert!((q.step() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn odd_or_tiny_grids_are_refused() {
        assert!(Grid1D::symmetric(8.0, 255).is_err());
        assert!(Grid1D::symmetric(8.0, 2).is_err());
        assert!(Grid1D::symmetric(0.0, 256).is_err());
        assert!(Grid1D::symmetric(-1.0, 256).is_err());
    }

    #[test]
    fn ground_state_peaks_at_one_over_pi() {
        let (q, p) = standard();
        let psi = WaveFunction::gaussian_ground(q).unwrap();
        let table = wigner_transform(&psi, &p);
        let at_origin = table.value(128, 128);
        assert!(
            (at_origin - INV_PI).abs() < 1e-9,
            "W(0,0) = {at_origin}, want {INV_PI}"
        );
        assert!((table.total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn first_excited_state_reaches_minus_one_over_pi_at_the_origin() {
        let (q, p) = standard();
        let psi = WaveFunction::first_excited(q).unwrap();
        let table = wigner_transform(&psi, &p);
        let witness = table.min_entry();
        assert!(
            (witness.value + INV_PI).abs() < 1e-9,
            "deepest value {} vs −1/π",
            witness.value
        );
        assert_eq!((witness.q_index, witness.p_index), (128, 128));
        assert!(witness.q.abs() < 1e-12);
        assert!(witness.p.abs() < 1e-12);
    }

    #[test]
    fn marginals_match_position_and_momentum_densities() {
        let (q, p) = standard();
        for psi in [
            WaveFunction::gaussian_ground(q).unwrap(),
            WaveFunction::first_excited(q).unwrap(),
            WaveFunction::coherent(q, 1.5, -2.0).unwrap(),
        ] {
            let table = wigner_transform(&psi, &p);
            let pos = table.position_marginal();
            for (got, want) in pos.iter().zip(psi.position_density()) {
                assert!(
                    (got - want).abs() < 1e-4,
                    "position marginal off: {got} vs {want}"
                );
            }
            let mom = table.momentum_marginal();
            for (got, want) in mom.iter().zip(psi.momentum_density(&p)) {
                assert!(
                    (got - want).abs() < 1e-4,
                    "momentum marginal off: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn coherent_states_have_no_visible_negativity() {
        let (q, p) = standard();
        let psi = WaveFunction::coherent(q, 1.5, -2.0).unwrap();
        let table = wigner_transform(&psi, &p);
        assert!(
            table.min_entry().value >= -1e-6,
            "min {}",
            table.min_entry().value
        );
    }

    #[test]
    fn overlap_reproduces_state_overlaps() {
        let (q, p) = standard();
        let ground = wigner_transform(&WaveFunction::gaussian_ground(q).unwrap(), &p);
        let excited = wigner_transform(&WaveFunction::first_excited(q).unwrap(), &p);
        let cross = overlap(&ground, &excited).unwrap();
        assert!(
            cross.abs() < 1e-3,
            "orthogonal states must not overlap, got {cross}"
        );
        let self_overlap = overlap(&ground, &ground).unwrap();
        assert!(
            (self_overlap - 1.0).abs() < 1e-3,
            "purity 1 expected, got {self_overlap}"
        );
    }

    #[test]
    fn kernel_route_agrees_with_pure_route_and_is_affine() {
        let (q, p) = standard();
        let a = WaveFunction::gaussian_ground(q).unwrap();
        let b = WaveFunction::first_excited(q).unwrap();
        let wa = wigner_transform(&a, &p);
        let wb = wigner_transform(&b, &p);

        let via_kernel = wigner_from_position_kernel(&a.position_kernel(), &q, &p).unwrap();
        let worst = wa
            .values()
            .iter()
            .zip(via_kernel.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12, "kernel and pure routes disagree by {worst}");

        // Mix at the kernel level, transform, and compare with mixing the
        // finished tables: both must give the same quasi-distribution.
        let lambda = 0.3;
        let mixed_kernel = a
            .position_kernel()
            .scale_re(lambda)
            .add(&b.position_kernel().scale_re(1.0 - lambda));
        let from_kernel = wigner_from_position_kernel(&mixed_kernel, &q, &p).unwrap();
        let from_tables = WignerTable::mix(&[(lambda, &wa), (1.0 - lambda, &wb)]).unwrap();
        let worst = from_kernel
            .values()
            .iter()
            .zip(from_tables.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12, "affinity broken by {worst}");
        // A proper mixture of these two is less negative than ψ₁ alone but
        // still negative at the origin.
        let min = from_tables.min_entry();
        assert!(min.value < 0.0 && min.value > -INV_PI);
    }

    #[test]
    fn unnormalized_samples_are_refused() {
        let q = Grid1D::symmetric(8.0, 256).unwrap();
        let values = vec![C64::new(1.0, 0.0); 256];
        match WaveFunction::new(q, values) {
            Err(WignerError::NotNormalized { norm_sq }) => {
                assert!((norm_sq - 16.0).abs() < 1e-9);
            }
            other => panic!("expected a normalization refusal, got {other:?}"),
        }
        let short = vec![C64::new(0.0, 0.0); 17];
        assert!(matches!(
            WaveFunction::new(q, short),
            Err(WignerError::DimensionMismatch { .. })
        ));
    }
}
