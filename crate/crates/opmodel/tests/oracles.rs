//! Frozen expected values and independent re-computations.
//!
//! Every oracle here either pins a number that was computed by hand (or by a
//! closed-form expression independent of the library code), or re-derives a
//! library result through a second implementation written in this file.
//! These tests are the guard rail: library refactors must keep hitting the
//! same numbers.

use opmodel::canonical::{
    bloch_mesh, chsh_classical, chsh_quantum, fuzziness_profile, kernel_of_povm, lift_effect,
    preimage_multiplicity_demo, reduce, AtomicMeasure, ChshSettings,
};
use opmodel::cmodel::{
    classical_pair, kernel_effect, kernel_from_function, kernel_pushforward, ClassicalEffect,
    ClassicalState, MarkovKernel,
};
use opmodel::maps::{
    cayley_presentation_map, effect_representable, good_embedding_report, povm_embedding,
    sic_qubit_povm, FeasibilityStatus, Verdict,
};
use opmodel::operators::{
    eigh, pair, pair_raw, tensor, trace_norm, ComplexMatrix, DensityOperator, EffectOperator, C64,
};
use opmodel::qubit_cayley::{cayley_decompose, state_from_bloch, PauliBasis};
use opmodel::wigner::{wigner_transform, Grid1D, WaveFunction};

const INV_SQRT3: f64 = 0.5773502691896258;

// ---------------------------------------------------------------------------
// Independent helpers (no library internals).

/// Rank of a real matrix by plain Gauss elimination with partial pivoting.
fn gauss_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let (nr, nc) = (m.len(), if m.is_empty() { 0 } else { m[0].len() });
    let mut rank = 0;
    let mut col = 0;
    while rank < nr && col < nc {
        let (pivot_row, pivot_val) = (rank..nr)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_val <= tol {
            col += 1;
            continue;
        }
        m.swap(rank, pivot_row);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col].abs() > 0.0 {
                let f = row[col] / pivot[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// tr[a·b] straight from the matrix entries.
fn direct_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let d = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// The mesh directions as the meshing formula states them, re-derived here.
fn fibonacci_direction(i: usize, n: usize) -> [f64; 3] {
    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let phi = i as f64 * golden;
    [r * phi.cos(), r * phi.sin(), z]
}

fn tetrahedron_directions() -> [[f64; 3]; 4] {
    let s = INV_SQRT3;
    [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
}

// ---------------------------------------------------------------------------
// Frozen constants.

#[test]
fn tetrahedron_statistics_of_the_north_pole_are_frozen() {
    let povm = sic_qubit_povm();
    let rho = state_from_bloch([0.0, 0.0, 1.0]).unwrap();
    let frozen = [
        0.39433756729740645,
        0.10566243270259355,
        0.10566243270259355,
        0.39433756729740645,
    ];
    // Route 1: trace pairing.
    for (e, want) in povm.effects().iter().zip(frozen) {
        assert!((pair(&rho, e).unwrap() - want).abs() < 1e-15);
    }
    // Route 2: the statistics map applied to four-vector coordinates.
    let map = povm_embedding(&povm).unwrap();
    let probs = map.apply(&[1.0, 0.0, 0.0, 1.0]);
    for (p, want) in probs.iter().zip(frozen) {
        assert!((p - want).abs() < 1e-15);
    }
    // Route 3: the closed form ¼(1 + n·ẑ).
    for (k, n) in tetrahedron_directions().iter().enumerate() {
        let closed = 0.25 * (1.0 + n[2]);
        assert!((closed - frozen[k]).abs() < 1e-15);
    }
}

#[test]
fn tsirelson_combination_is_frozen_on_both_routes() {
    let frozen = 2.8284271247461903; // 2·√2
    let settings = ChshSettings::tsirelson();
    let q = chsh_quantum(&settings).unwrap();
    assert!(
        (q.s_value - frozen).abs() < 1e-12,
        "quantum route gave {}",
        q.s_value
    );
    let c = chsh_classical(&settings).unwrap();
    assert!(
        (c.s_value - frozen).abs() < 1e-12,
        "kernel route gave {}",
        c.s_value
    );
    for (a, b) in q.correlations.iter().zip(c.correlations) {
        assert!((a - b).abs() < 1e-12);
    }
    // Each joint distribution is a genuine probability vector.
    for joint in c.joints.unwrap() {
        assert!((joint.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(joint.iter().all(|&p| p >= -1e-12));
    }
}

#[test]
#[allow(clippy::approx_constant)] // the decimal literal is the frozen value under test
fn phase_space_peak_values_are_frozen() {
    let frozen = 0.3183098861837907; // 1/π
    let q = Grid1D::symmetric(8.0, 256).unwrap();
    let p = Grid1D::conjugate_momentum(&q);
    assert!((p.step() - std::f64::consts::PI / 16.0).abs() < 1e-15);

    let ground = wigner_transform(&WaveFunction::gaussian_ground(q).unwrap(), &p);
    assert!((ground.value(128, 128) - frozen).abs() < 1e-9);

    let excited = wigner_transform(&WaveFunction::first_excited(q).unwrap(), &p);
    assert!((excited.value(128, 128) + frozen).abs() < 1e-9);
}

#[test]
fn second_pauli_component_sign_convention() {
    // x = [[0, i/2], [−i/2, 0]] has tr[x·σ₂] = −2·Im(x₀₁) = −1.
    let x = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, 0.5),
        (1, 0) => C64::new(0.0, -0.5),
        _ => C64::new(0.0, 0.0),
    });
    let basis = PauliBasis::new();
    let via_trace = direct_trace_product(&x, basis.element(2));
    assert!((via_trace.re + 1.0).abs() < 1e-15);
    assert!(via_trace.im.abs() < 1e-15);
    let (t, a) = cayley_decompose(&x).unwrap();
    assert!(t.abs() < 1e-15);
    assert!((a[1] + 1.0).abs() < 1e-15);
}

#[test]
fn trace_norm_of_a_known_indefinite_matrix() {
    // diag(3, −1) has trace norm 4.
    let m = ComplexMatrix::from_fn(2, |i, j| {
        if i == j {
            C64::new(if i == 0 { 3.0 } else { -1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    assert!((trace_norm(&m, true).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn eigensolver_agrees_with_hand_diagonalized_matrices() {
    // σ₁ has eigenvalues ∓1 with eigenvectors (1, ∓1)/√2.
    let basis = PauliBasis::new();
    let eig = eigh(basis.element(1)).unwrap();
    assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
    assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
    let m = ComplexMatrix::from_fn(2, |i, j| C64::new(if i == j { 2.0 } else { 1.0 }, 0.0));
    let eig = eigh(&m).unwrap();
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
    assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-12);
}

// ---------------------------------------------------------------------------
// Independent re-computations of library results.

#[test]
fn hermitian_coordinates_are_a_trace_isometry() {
    // 1000 random Hermitian pairs: tr[x·y] must equal the coordinate dot
    // product, with the trace computed entry-wise in this file.
    let mut rng_state = 0x243f_6a88_85a3_08d3u64;
    let mut next = move || {
        // xorshift*: independent of the library's generators.
        rng_state ^= rng_state >> 12;
        rng_state ^= rng_state << 25;
        rng_state ^= rng_state >> 27;
        (rng_state.wrapping_mul(0x2545_f491_4f6c_dd1d) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for trial in 0..1000 {
        let d = 2 + trial % 4;
        let x = ComplexMatrix::from_fn(d, |_, _| C64::new(next(), next())).hermitian_part();
        let y = ComplexMatrix::from_fn(d, |_, _| C64::new(next(), next())).hermitian_part();
        let direct = direct_trace_product(&x, &y);
        let dot: f64 = x
            .herm_coords()
            .iter()
            .zip(y.herm_coords())
            .map(|(a, b)| a * b)
            .sum();
        assert!(direct.im.abs() < 1e-12);
        assert!(
            (direct.re - dot).abs() <= 1e-10 * (1.0 + direct.re.abs()),
            "trial {trial}: tr = {}, dot = {dot}",
            direct.re
        );
    }
}

#[test]
fn mesh_kernel_matches_its_closed_form() {
    // For the two-outcome measurement along +z, the kernel entry at mesh
    // point i must be ½(1 + z_i) with z_i from the meshing formula.
    let n = 500;
    let mesh = bloch_mesh(n).unwrap();
    let basis = PauliBasis::new();
    let plus = EffectOperator::new(basis.identity().add(basis.element(3)).scale_re(0.5)).unwrap();
    let minus = opmodel::operators::effect_complement(&plus);
    let povm = opmodel::operators::Povm::new(vec![plus, minus], None).unwrap();
    let kernel = kernel_of_povm(&povm, &mesh).unwrap();
    for i in 0..n {
        let u = fibonacci_direction(i, n);
        let expected = 0.5 * (1.0 + u[2]);
        assert!(
            (kernel.get(i, 0) - expected).abs() < 1e-12,
            "row {i}: {} vs {expected}",
            kernel.get(i, 0)
        );
        assert!((kernel.get(i, 0) + kernel.get(i, 1) - 1.0).abs() < 1e-12);
    }
    // The mesh points themselves match the direction formula.
    for (i, omega) in mesh.points().iter().enumerate().step_by(37) {
        let u = fibonacci_direction(i, n);
        let expected = state_from_bloch(u).unwrap();
        let gap = opmodel::operators::trace_distance(omega, &expected).unwrap();
        assert!(gap < 1e-12, "mesh point {i} off by {gap}");
    }
}

#[test]
fn lifted_effects_reproduce_the_kernel_columns() {
    let mesh = bloch_mesh(100).unwrap();
    let povm = sic_qubit_povm();
    let kernel = kernel_of_povm(&povm, &mesh).unwrap();
    for (k, e) in povm.effects().iter().enumerate() {
        let lift = lift_effect(e.clone());
        for (i, omega) in mesh.points().iter().enumerate() {
            assert!((lift.eval(omega).unwrap() - kernel.get(i, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn classical_duality_against_hand_computed_pushforward() {
    // Kernel rows: outcome 0 → (1,0), outcome 1 → (0,1), outcome 2 → (½,½).
    let kernel = MarkovKernel::new(3, 2, vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5]).unwrap();
    let p = ClassicalState::new(vec![0.2, 0.3, 0.5]).unwrap();
    let pushed = kernel_pushforward(&kernel, &p).unwrap();
    assert!((pushed.probabilities()[0] - 0.45).abs() < 1e-15);
    assert!((pushed.probabilities()[1] - 0.55).abs() < 1e-15);

    // ⟨k·p, 1_B⟩ = ⟨p, k(1_B)⟩ for every outcome mask.
    for mask in 0u64..4 {
        let b = ClassicalEffect::indicator(2, mask).unwrap();
        let lhs = classical_pair(&pushed, &b).unwrap();
        let pulled = kernel_effect(&kernel, mask).unwrap();
        let rhs = classical_pair(&p, &pulled).unwrap();
        assert!((lhs - rhs).abs() < 1e-14, "mask {mask}: {lhs} vs {rhs}");
    }

    // A sharp kernel from a function behaves like composition with it.
    let f = kernel_from_function(&[1, 0, 1], 2).unwrap();
    let pushed_f = kernel_pushforward(&f, &p).unwrap();
    assert!((pushed_f.probabilities()[0] - 0.3).abs() < 1e-15);
    assert!((pushed_f.probabilities()[1] - 0.7).abs() < 1e-15);
}

#[test]
fn rank_decisions_match_gauss_elimination() {
    let maps = [
        (cayley_presentation_map().unwrap(), 4usize),
        (povm_embedding(&sic_qubit_povm()).unwrap(), 4),
    ];
    for (map, expected) in &maps {
        let rows = map.matrix_rows();
        assert_eq!(map.rank(), *expected);
        assert_eq!(gauss_rank(&rows, 1e-10), *expected);
    }

    // A two-outcome statistics map drops rank to 2 in both implementations.
    let basis = PauliBasis::new();
    let plus = EffectOperator::new(basis.identity().add(basis.element(3)).scale_re(0.5)).unwrap();
    let minus = opmodel::operators::effect_complement(&plus);
    let povm = opmodel::operators::Povm::new(vec![plus, minus], None).unwrap();
    let map = povm_embedding(&povm).unwrap();
    assert_eq!(map.rank(), 2);
    assert_eq!(gauss_rank(&map.matrix_rows(), 1e-10), 2);
}

#[test]
fn tetrahedron_obstruction_constant_is_two_over_sqrt_three() {
    // max over hypercube corners x of |Σ xₖ·nₖ| is 2/√3 ≈ 1.1547 < 2: no
    // 0/1 combination of tetrahedron directions reaches the sphere, which is
    // why sharp effects cannot be represented through the statistics map.
    let dirs = tetrahedron_directions();
    let mut best = 0.0f64;
    for mask in 0u32..16 {
        let mut v = [0.0f64; 3];
        for (k, n) in dirs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                for c in 0..3 {
                    v[c] += n[c];
                }
            }
        }
        best = best.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
    }
    let frozen = 2.0 / 3.0f64.sqrt();
    assert!((best - frozen).abs() < 1e-12, "corner maximum {best}");
    assert!(
        best < 2.0 - 0.8,
        "the gap to the sphere radius must be wide"
    );
}

#[test]
fn certificates_for_sharp_directions_hold_under_brute_force() {
    let map = povm_embedding(&sic_qubit_povm()).unwrap();
    let dual = map.dual();
    let rows = dual.matrix_rows();
    let apply = |x: &[f64; 4]| -> Vec<f64> {
        rows.iter()
            .map(|r| r.iter().zip(x).map(|(m, v)| m * v).sum())
            .collect()
    };

    for u in [
        [0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0],
        [INV_SQRT3, INV_SQRT3, INV_SQRT3],
    ] {
        let target = vec![1.0, u[0], u[1], u[2]];
        let FeasibilityStatus::Infeasible { certificate } = effect_representable(&dual, &target)
        else {
            panic!("sharp direction {u:?} must be infeasible");
        };
        // Every hypercube corner obeys the separating threshold; the target
        // value beats it by a wide margin.
        for mask in 0u32..16 {
            let x = [
                (mask & 1) as f64,
                ((mask >> 1) & 1) as f64,
                ((mask >> 2) & 1) as f64,
                ((mask >> 3) & 1) as f64,
            ];
            let image = apply(&x);
            let v: f64 = certificate
                .direction
                .iter()
                .zip(&image)
                .map(|(a, b)| a * b)
                .sum();
            assert!(v <= certificate.threshold + 1e-9);
        }
        let at_target: f64 = certificate
            .direction
            .iter()
            .zip(&target)
            .map(|(a, b)| a * b)
            .sum();
        assert!((at_target - certificate.value_at_target).abs() < 1e-12);
        assert!(certificate.value_at_target > certificate.threshold + 0.05);
    }
}

#[test]
fn measure_averaging_and_preimage_multiplicity() {
    // Two hand-built measures with the same barycenter.
    let z_plus = state_from_bloch([0.0, 0.0, 1.0]).unwrap();
    let z_minus = state_from_bloch([0.0, 0.0, -1.0]).unwrap();
    let mu = AtomicMeasure::new(vec![(z_plus, 0.5), (z_minus, 0.5)]).unwrap();
    let rho = reduce(&mu).unwrap();
    let mixed = DensityOperator::maximally_mixed(2);
    assert!(opmodel::operators::trace_distance(&rho, &mixed).unwrap() < 1e-15);

    let demo = preimage_multiplicity_demo(64, 0xdecaf).unwrap();
    assert!(demo.reduction_gap < 1e-12);
    assert!(demo.max_effect_gap < 1e-12);
    assert!(demo.distinct);
    assert!((demo.indicator_values.0 - 1.0).abs() < 1e-12);
    assert!(demo.indicator_values.1.abs() < 1e-12);
}

#[test]
fn sharp_effect_lift_spreads_over_the_whole_unit_interval() {
    let n = 10_000;
    let mesh = bloch_mesh(n).unwrap();
    let basis = PauliBasis::new();
    let proj = EffectOperator::new(basis.identity().add(basis.element(3)).scale_re(0.5)).unwrap();
    let profile = fuzziness_profile(&proj, &mesh).unwrap();
    assert_eq!(profile.count, n);
    assert!(profile.min < 1e-3, "min {}", profile.min);
    assert!(profile.max > 1.0 - 1e-3, "max {}", profile.max);
    // The z-lift is (1+z)/2 with z evenly meshed, so every decile holds
    // about a tenth of the points.
    for (k, &c) in profile.deciles.iter().enumerate() {
        assert!(
            (c as i64 - (n / 10) as i64).abs() <= (n / 100) as i64,
            "decile {k} holds {c}"
        );
    }
}

#[test]
fn embedding_verdicts_are_stable_across_seeds() {
    let good = cayley_presentation_map().unwrap();
    let bad = povm_embedding(&sic_qubit_povm()).unwrap();
    for seed in [1u64, 42, 0xfeed_beef] {
        assert_eq!(
            good_embedding_report(&good, 10, seed).unwrap().verdict,
            Verdict::Good
        );
        assert_eq!(
            good_embedding_report(&bad, 10, seed).unwrap().verdict,
            Verdict::NotGood
        );
    }
}

#[test]
fn singlet_correlation_closed_form() {
    // E(u, v) = −u·v for the singlet; check against the library on a grid of
    // angle pairs, through both computation routes.
    let angles = [0.0f64, 30.0, 45.0, 90.0, 135.0];
    for &ta in &angles {
        for &tb in &angles {
            let (ra, rb) = (ta.to_radians(), tb.to_radians());
            let u = [ra.sin(), 0.0, ra.cos()];
            let v = [rb.sin(), 0.0, rb.cos()];
            let settings = ChshSettings::new(u, u, v, v).unwrap();
            let closed = -(u[0] * v[0] + u[1] * v[1] + u[2] * v[2]);
            let q = chsh_quantum(&settings).unwrap();
            let c = chsh_classical(&settings).unwrap();
            assert!((q.correlations[0] - closed).abs() < 1e-12);
            assert!((c.correlations[0] - closed).abs() < 1e-12);
        }
    }
}

#[test]
fn partial_trace_oracle_on_a_product_state() {
    // For ρ ⊗ σ the reduction must return ρ exactly, and pairing with a ⊗ I
    // must equal pairing of the reduction with a.
    let rho = state_from_bloch([0.3, -0.2, 0.5]).unwrap();
    let sigma = state_from_bloch([-0.1, 0.7, 0.2]).unwrap();
    let joint = tensor(rho.matrix(), sigma.matrix());
    let reduced =
        opmodel::operators::partial_trace_matrix(&joint, 2, 2, opmodel::operators::Keep::First)
            .unwrap();
    assert!(reduced.max_abs_diff(rho.matrix()) < 1e-14);

    let basis = PauliBasis::new();
    let a = basis
        .identity()
        .add(&basis.dot([0.2, 0.1, -0.4]))
        .scale_re(0.5);
    let lifted = tensor(&a, basis.identity());
    let lhs = pair_raw(&joint, &lifted).unwrap().re;
    let rhs = pair_raw(&reduced, &a).unwrap().re;
    assert!((lhs - rhs).abs() < 1e-14);
}
