use mtq_core::linalg::CMatrix;
use mtq_core::qstate::{Hamiltonian, PureState, TubulinParams, UnitaryOperator, DEFAULT_TUNNELING};
use mtq_core::{seed, Complex64};
use proptest::prelude::*;
use rand::Rng;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// exp(-i Δ σx t)|0> = cos(Δt)|0> - i sin(Δt)|1>
fn rabi_closed_form(delta: f64, t: f64) -> [Complex64; 2] {
    [
        c((delta * t).cos()),
        Complex64::new(0.0, -(delta * t).sin()),
    ]
}

#[test]
fn single_qubit_flip_follows_closed_form() {
    let params = TubulinParams {
        bias: 0.0,
        tunneling: DEFAULT_TUNNELING,
        coupling: 0.0,
    };
    let h = Hamiltonian::uniform(1, &params, &[]).unwrap();
    let prop = h.propagator().unwrap();
    let dt = 1e-13;
    let mut s = PureState::ground(1).unwrap();
    for step in 1..=200 {
        prop.step(&mut s, dt).unwrap();
        let t = dt * step as f64;
        let expected = rabi_closed_form(DEFAULT_TUNNELING, t);
        for (a, b) in s.amplitudes().iter().zip(&expected) {
            assert!((a - b).norm() < 1e-11, "t={t}");
        }
    }
    let mut s = PureState::ground(1).unwrap();
    let flip = std::f64::consts::FRAC_PI_2 / DEFAULT_TUNNELING;
    s.schrodinger_step(&h, flip).unwrap();
    assert!((s.probability(1).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn evolution_norm_drift_over_1000_steps() {
    let mut rng = seed::rng(21);
    for n in 1..=4 {
        let biases: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2e11 - 1e11).collect();
        let tunnel: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2e11).collect();
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        let h = Hamiltonian::tubulin(n, &biases, &tunnel, 3e10, &edges).unwrap();
        let prop = h.propagator().unwrap();
        let mut s = PureState::random(n, &mut rng).unwrap();
        for _ in 0..1000 {
            prop.step(&mut s, 1e-12).unwrap();
        }
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-10, "n={n}");
    }
}

#[test]
fn evolution_preserves_inner_products() {
    let mut rng = seed::rng(22);
    let h = Hamiltonian::uniform(3, &TubulinParams::default(), &[(0, 1), (1, 2)]).unwrap();
    let prop = h.propagator().unwrap();
    for _ in 0..20 {
        let mut a = PureState::random(3, &mut rng).unwrap();
        let mut b = PureState::random(3, &mut rng).unwrap();
        let before = a.inner_product(&b).unwrap();
        prop.step(&mut a, 7e-12).unwrap();
        prop.step(&mut b, 7e-12).unwrap();
        assert!((a.inner_product(&b).unwrap() - before).norm() < 1e-9);
    }
}

fn random_unitary_with_eigenbasis(
    rng: &mut mtq_core::SimRng,
    n: usize,
) -> (CMatrix, Vec<Complex64>, UnitaryOperator) {
    // eigenbasis from the propagator of a random Hermitian matrix
    let dim = 1 << n;
    let mut h = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for col in r..dim {
            let z = Complex64::new(
                rng.random::<f64>() - 0.5,
                if r == col {
                    0.0
                } else {
                    rng.random::<f64>() - 0.5
                },
            );
            h[(r, col)] = z;
            h[(col, r)] = z.conj();
        }
    }
    let basis = Hamiltonian::from_matrix(n, h)
        .unwrap()
        .propagator()
        .unwrap()
        .unitary(1.0)
        .unwrap();
    let v = basis.matrix().clone();
    let phases: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
        .collect();
    let mut vd = v.clone();
    for col in 0..dim {
        for r in 0..dim {
            vd[(r, col)] *= phases[col];
        }
    }
    let u = UnitaryOperator::new(vd.matmul(&v.adjoint()).unwrap()).unwrap();
    (v, phases, u)
}

#[test]
fn eigenvectors_are_scaled_by_eigenvalues() {
    let mut rng = seed::rng(23);
    for n in 1..=3 {
        let (v, phases, u) = random_unitary_with_eigenbasis(&mut rng, n);
        let dim = 1 << n;
        for k in 0..dim {
            let col: Vec<Complex64> = (0..dim).map(|r| v[(r, k)]).collect();
            let mut s = PureState::new(n, col.clone()).unwrap();
            let targets: Vec<usize> = (0..n).collect();
            s.apply_operator(&u, &targets).unwrap();
            for (out, x) in s.amplitudes().iter().zip(&col) {
                assert!((out - x * phases[k]).norm() < 1e-10);
            }
        }
    }
    // the symmetric 2x2 operator A has eigenvalues ±1
    let a = UnitaryOperator::hadamard();
    let theta = std::f64::consts::PI / 8.0;
    let plus = PureState::from_real(1, &[theta.cos(), theta.sin()]).unwrap();
    let mut s = plus.clone();
    s.apply_operator(&a, &[0]).unwrap();
    for (x, y) in s.amplitudes().iter().zip(plus.amplitudes()) {
        assert!((x - y).norm() < 1e-12);
    }
}

#[test]
fn operator_application_preserves_inner_products() {
    let mut rng = seed::rng(24);
    let (_, _, u) = random_unitary_with_eigenbasis(&mut rng, 2);
    for _ in 0..50 {
        let mut a = PureState::random(4, &mut rng).unwrap();
        let mut b = PureState::random(4, &mut rng).unwrap();
        let before = a.inner_product(&b).unwrap();
        a.apply_operator(&u, &[3, 1]).unwrap();
        b.apply_operator(&u, &[3, 1]).unwrap();
        assert!((a.inner_product(&b).unwrap() - before).norm() < 1e-9);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

/// Matrix of `op` acting on `targets` of an `n`-qubit register, built by
/// brute force over every basis pair.
fn embed(op: &UnitaryOperator, targets: &[usize], n: usize) -> Vec<Vec<Complex64>> {
    let dim = 1 << n;
    let sub = |idx: usize| {
        targets
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | ((idx >> q & 1) << j))
    };
    let mask: usize = targets.iter().map(|&q| 1 << q).sum();
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|col| {
                    if r & !mask != col & !mask {
                        c(0.0)
                    } else {
                        op.matrix()[(sub(r), sub(col))]
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn apply_operator_matches_full_matrix_embedding() {
    let mut rng = seed::rng(25);
    let (_, _, u) = random_unitary_with_eigenbasis(&mut rng, 2);
    for targets in [[0, 1], [1, 0], [2, 0], [3, 2]] {
        let s = PureState::random(4, &mut rng).unwrap();
        let full = embed(&u, &targets, 4);
        let expected: Vec<Complex64> = full
            .iter()
            .map(|row| row.iter().zip(s.amplitudes()).map(|(a, b)| a * b).sum())
            .collect();
        let mut got = s.clone();
        got.apply_operator(&u, &targets).unwrap();
        for (x, y) in got.amplitudes().iter().zip(&expected) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn uniform_three_qubit_probabilities_by_enumeration() {
    let s = PureState::uniform(3).unwrap();
    let total: f64 = (0..8).map(|i| s.probability(i).unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for i in 0..8 {
        assert!((s.probability(i).unwrap() - 0.125).abs() < 1e-15);
    }
}

#[test]
fn tensor_products_of_random_states_are_normalized() {
    let mut rng = seed::rng(26);
    for _ in 0..100 {
        let na = rng.random_range(1..=3);
        let nb = rng.random_range(1..=3);
        let a = PureState::random(na, &mut rng).unwrap();
        let b = PureState::random(nb, &mut rng).unwrap();
        let p = a.tensor_product(&b).unwrap();
        assert_eq!(p.num_qubits(), na + nb);
        assert!((p.norm_sqr() - 1.0).abs() < 1e-10);
        for i in 0..a.dim() {
            for j in 0..b.dim() {
                let expected = a.amplitudes()[i] * b.amplitudes()[j];
                assert!((p.amplitudes()[i | j << na] - expected).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn measurement_sequence_is_seed_deterministic() {
    let run = |seed_value| {
        let mut rng = seed::rng(seed_value);
        let mut outcomes = Vec::new();
        for _ in 0..200 {
            let mut s = PureState::random(3, &mut rng).unwrap();
            for q in 0..3 {
                outcomes.push(s.measure_qubit(q, &mut rng).unwrap());
            }
        }
        outcomes
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5), run(6));
}

proptest! {
    #[test]
    fn make_state_normalizes(raw in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 8)) {
        let amps: Vec<Complex64> = raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let s = PureState::new(3, amps.clone()).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        for (out, inp) in s.amplitudes().iter().zip(&amps) {
            prop_assert!((out * norm - inp).norm() < 1e-9);
        }
    }

    #[test]
    fn inner_product_is_bounded_and_conjugate_symmetric(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let a = PureState::random(3, &mut seed::rng(seed_a)).unwrap();
        let b = PureState::random(3, &mut seed::rng(seed_b)).unwrap();
        let ab = a.inner_product(&b).unwrap();
        let ba = b.inner_product(&a).unwrap();
        prop_assert!(ab.norm() <= 1.0 + 1e-10);
        prop_assert!((ab - ba.conj()).norm() < 1e-14);
    }
}
