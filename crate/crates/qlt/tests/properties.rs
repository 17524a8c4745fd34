//! Cross-module properties: unitarity of emitted circuits, certificate
//! soundness of the combinators, ancilla bookkeeping and agreement
//! between the two series routes.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlt::blockenc::{
    diagonal_be_exact, elementwise_product_be, lcu_be, product_be, uniform_matrix_be,
    BlockEncoding,
};
use qlt::circuit::{basis_state, circuit_matrix, simulate, Circuit, Gate};
use qlt::numerics::{spectral_norm, SeriesKind};
use qlt::transform::{build_qlt, plan_series, QltProblem};

fn random_complex_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-3.1..3.1))
}

fn unitarity_deviation(c: &Circuit) -> f64 {
    let m = circuit_matrix(c).unwrap();
    let dim = m.nrows();
    let prod = m.adjoint() * &m;
    spectral_norm(&(prod - DMatrix::<Complex64>::identity(dim, dim))).unwrap()
}

#[test]
fn emitted_circuits_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    // uniform, elementwise, diagonal, a small transform build
    assert!(unitarity_deviation(&uniform_matrix_be(2).unwrap().circuit) < 1e-9);

    let d: Vec<Complex64> = (0..4).map(|_| random_complex_unit(&mut rng)).collect();
    assert!(unitarity_deviation(&diagonal_be_exact(&d).unwrap().circuit) < 1e-9);

    let p = QltProblem::from_real(&[0.3, -0.8], &[0.5, 1.0], 1e-2, SeriesKind::Taylor).unwrap();
    let be = build_qlt(&p).unwrap();
    assert!(be.circuit.total_qubits() <= 10);
    assert!(unitarity_deviation(&be.circuit) < 1e-9);
}

#[test]
fn encoded_blocks_are_subnormalized() {
    // a block of a unitary never has spectral norm above 1
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let d: Vec<Complex64> = (0..4).map(|_| random_complex_unit(&mut rng)).collect();
        let be = diagonal_be_exact(&d).unwrap();
        assert!(spectral_norm(&be.block().unwrap()).unwrap() <= 1.0 + 1e-9);
    }
    let p = QltProblem::from_real(&[0.9, -0.2], &[1.0, 0.4], 1e-2, SeriesKind::Chebyshev).unwrap();
    let be = build_qlt(&p).unwrap();
    assert!(spectral_norm(&be.block().unwrap()).unwrap() <= 1.0 + 1e-9);
}

/// Certificate soundness of the combinators on randomized diagonal
/// targets: measured error within certificate eps plus numerical slack.
#[test]
fn combinator_certificates_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for trial in 0..8 {
        let n = rng.random_range(1..=2usize);
        let len = 1usize << n;
        let d1: Vec<Complex64> = (0..len).map(|_| random_complex_unit(&mut rng)).collect();
        let d2: Vec<Complex64> = (0..len).map(|_| random_complex_unit(&mut rng)).collect();
        let b1 = diagonal_be_exact(&d1).unwrap();
        let b2 = diagonal_be_exact(&d2).unwrap();

        // product: diag(d1) * diag(d2)
        let prod = product_be(&b1, &b2).unwrap();
        let target = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                d1[i] * d2[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let err = prod.measured_error(&target).unwrap();
        assert!(err <= prod.eps + 1e-8, "product trial {trial}: {err}");

        // linear combination: l1 diag(d1) + l2 diag(d2)
        let l1 = rng.random_range(0.1..1.0);
        let l2 = rng.random_range(0.1..1.0);
        let comb = lcu_be(&[b1.clone(), b2.clone()], &[l1, l2]).unwrap();
        assert_eq!(comb.alpha, l1 * b1.alpha + l2 * b2.alpha);
        let target = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                d1[i] * l1 + d2[i] * l2
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let err = comb.measured_error(&target).unwrap();
        assert!(err <= comb.eps + 1e-8, "lcu trial {trial}: {err}");
    }
}

#[test]
fn elementwise_product_certificate() {
    let mut h2 = Circuit::flat(2);
    h2.push(Gate::H { target: 0 }).unwrap();
    h2.push(Gate::H { target: 1 }).unwrap();
    let mut other = Circuit::flat(2);
    other.push(Gate::Ry { target: 0, theta: 0.9 }).unwrap();
    other.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
    let be = elementwise_product_be(&h2, &other).unwrap();
    let mh = circuit_matrix(&h2).unwrap();
    let mo = circuit_matrix(&other).unwrap();
    let target = DMatrix::from_fn(4, 4, |i, j| mh[(i, j)] * mo[(i, j)]);
    assert!(be.measured_error(&target).unwrap() <= 1e-9);
}

/// The control ancilla, parallel copies and borrowed tree qubits come
/// back to |0> on every output branch when they start there; only the
/// block ancillas carry post-selection weight.
#[test]
fn workspace_ancillas_return_to_zero() {
    let p =
        QltProblem::from_real(&[0.4, -0.6, 0.2, 0.9], &[0.8, 0.1, -0.5, 1.0], 1e-2, SeriesKind::Taylor)
            .unwrap();
    let be = build_qlt(&p).unwrap();
    let layout = be.circuit.layout().clone();
    let mut mask = 0usize;
    for r in layout.registers() {
        if r.name == "ctrl" || r.name == "copy" {
            for q in r.qubits() {
                mask |= 1 << q;
            }
        }
    }
    assert!(mask != 0);
    let total = be.circuit.total_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut input = vec![Complex64::new(0.0, 0.0); 1 << total];
    let dim = 1 << be.n;
    let mut norm = 0.0;
    for amp in input.iter_mut().take(dim) {
        *amp = random_complex_unit(&mut rng);
        norm += amp.norm_sqr();
    }
    let norm = norm.sqrt();
    for amp in input.iter_mut().take(dim) {
        *amp /= norm;
    }
    let out = simulate(&be.circuit, &input).unwrap();
    let leaked: f64 =
        out.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum();
    assert!(leaked < 1e-18, "workspace registers leaked {leaked}");
}

#[test]
fn taylor_and_chebyshev_builds_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..4 {
        let x: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eps = 1e-2;
        let pt = QltProblem::from_real(&x, &y, eps, SeriesKind::Taylor).unwrap();
        let pc = QltProblem::from_real(&x, &y, eps, SeriesKind::Chebyshev).unwrap();
        let bt = build_qlt(&pt).unwrap();
        let bc = build_qlt(&pc).unwrap();
        let mt = bt.block().unwrap() * Complex64::new(bt.alpha, 0.0);
        let mc = bc.block().unwrap() * Complex64::new(bc.alpha, 0.0);
        let dist = spectral_norm(&(mt - mc)).unwrap();
        assert!(dist <= 2.0 * eps, "kind disagreement {dist}");
    }
}

/// 30 random instances across sizes, kinds and accuracies all verify.
#[test]
fn certificate_soundness_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(424_242);
    let mut count = 0;
    for trial in 0..15 {
        let n = 1 + trial % 2;
        let len = 1usize << n;
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        for (kind, eps) in [
            (SeriesKind::Taylor, if trial % 2 == 0 { 1e-2 } else { 1e-3 }),
            (SeriesKind::Chebyshev, if trial % 2 == 0 { 1e-3 } else { 1e-2 }),
        ] {
            let p = QltProblem::from_real(&x, &y, eps, kind).unwrap();
            let be = build_qlt(&p).unwrap();
            let v = qlt::transform::verify_qlt(&p, &be).unwrap();
            assert!(v.pass, "trial {trial} kind {kind:?} eps {eps}: {}", v.measured_error);
            count += 1;
        }
    }
    assert_eq!(count, 30);
}

/// Post-selection probability agrees with the encoded operator's action:
/// `P ~ || alpha^-1 T psi ||^2` up to the certificate error.
#[test]
fn success_probability_matches_target_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..5 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eps = 1e-3;
        let p = QltProblem::from_real(&x, &y, eps, SeriesKind::Taylor).unwrap();
        let be = build_qlt(&p).unwrap();
        let oracle = qlt::laplace::dlt_matrix(&p.x, &p.y).unwrap();
        let dim = 4;
        let mut psi: Vec<Complex64> =
            (0..dim).map(|_| random_complex_unit(&mut rng)).collect();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut psi {
            *a /= norm;
        }
        let measured = qlt::laplace::success_probability(&be, &psi).unwrap();
        let v = nalgebra::DVector::from_vec(psi.clone());
        let image = &oracle * v / Complex64::new(be.alpha, 0.0);
        let want: f64 = image.iter().map(|a| a.norm_sqr()).sum();
        let slack = 3.0 * eps / be.alpha;
        assert!(
            (measured - want).abs() <= slack,
            "P mismatch: {measured} vs {want} (slack {slack})"
        );
    }
}

/// Scaffold size grows like K n, not exponentially: the n = 3 / n = 2
/// ratio at equal truncation order stays below 1.9.
#[test]
fn scaffold_growth_is_polynomial() {
    // identical coefficient ranges force the same K at both sizes
    let p2 = QltProblem::from_real(&[0.0, 1.0, 0.5, -0.5], &[0.0, 1.0, -1.0, 0.5], 1e-3, SeriesKind::Taylor)
        .unwrap();
    let p3 = QltProblem::from_real(
        &[0.0, 1.0, 0.5, -0.5, 0.25, -0.25, 0.75, -0.75],
        &[0.0, 1.0, -1.0, 0.5, -0.5, 0.25, -0.25, 0.75],
        1e-3,
        SeriesKind::Taylor,
    )
    .unwrap();
    let plan2 = plan_series(&p2).unwrap();
    let plan3 = plan_series(&p3).unwrap();
    assert_eq!(plan2.truncation.k, plan3.truncation.k);
    let m2 = qlt::transform::scaffold_metrics(&plan2).unwrap();
    let m3 = qlt::transform::scaffold_metrics(&plan3).unwrap();
    let ratio = m3.size as f64 / m2.size as f64;
    assert!(ratio < 1.9, "size growth ratio {ratio}");
}

#[test]
fn normalization_dominates_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = QltProblem::from_real(&x, &y, 1e-2, SeriesKind::Taylor).unwrap();
        let plan = plan_series(&p).unwrap();
        let oracle = qlt::laplace::dlt_matrix(&p.x, &p.y).unwrap();
        assert!(plan.alpha >= spectral_norm(&oracle).unwrap() - 1e-12);
    }
}

/// Fourier derivative-bound constants used by the diagonal demo:
/// `||g^(M)||_inf <= sum_k |a_k| (2 pi k)^M` with `a_k = I_k(1)/e`, and the
/// upper bound `I_k(1) <= e^{1/4} 2^{-k} / k!` keeps that sum below
/// `C M! / R^M` for the frozen `(C, R)` over the whole order range the
/// artifact can pick (the ratio peaks near M = 1805 and decays beyond).
#[test]
fn fourier_demo_constants_are_honest_derivative_bounds() {
    let c_const: f64 = 1.600344165660731e122;
    let r_const: f64 = 1.01;
    let ln_c = c_const.ln();
    let ln_r = r_const.ln();
    let ln_fact: Vec<f64> = {
        let mut v = vec![0.0f64; 6001];
        for i in 1..=6000usize {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    };
    // log of sum_k 2 e^{1/4} e^{-1} 2^{-k} (2 pi k)^M / k!
    let ln_s_ub = |m: usize| -> f64 {
        let mf = m as f64;
        let terms: Vec<f64> = (1..6000usize)
            .map(|k| {
                std::f64::consts::LN_2 + 0.25 - 1.0 - (k as f64) * std::f64::consts::LN_2
                    - ln_fact[k]
                    + mf * (2.0 * std::f64::consts::PI * k as f64).ln()
            })
            .collect();
        let peak = terms.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let acc: f64 = terms.iter().map(|&t| (t - peak).exp()).sum();
        peak + acc.ln()
    };
    let mut checked = 0;
    let mut m = 2usize;
    while m <= 2400 {
        let lhs = ln_s_ub(m) + (m as f64) * ln_r - ln_fact[m];
        assert!(lhs <= ln_c, "derivative bound violated at M={m}: {lhs} > {ln_c}");
        checked += 1;
        m += if m < 60 { 1 } else { 20 };
    }
    assert!(checked > 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Loading nonnegative amplitudes and reading them back is the identity.
    #[test]
    fn prepare_state_roundtrip(raw in prop::collection::vec(0.0f64..1.0, 8)) {
        let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let mu: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        let c = qlt::circuit::prepare_state(&mu).unwrap();
        let out = simulate(&c, &basis_state(3, 0)).unwrap();
        for (k, &want) in mu.iter().enumerate() {
            prop_assert!((out[k] - Complex64::new(want, 0.0)).norm() < 1e-9);
        }
    }

    /// Taylor tails of the kernel stay within the stated bound.
    #[test]
    fn taylor_residual_within_bound(x in -1.0f64..1.0, y in -1.0f64..1.0, k in 0usize..10) {
        let mut term = 1.0f64;
        let mut acc = 1.0f64;
        for i in 1..=k {
            term *= x * y / i as f64;
            acc += term;
        }
        let resid = ((x * y).exp() - acc).abs();
        prop_assert!(resid <= qlt::numerics::taylor_tail_bound(1.0, k) + 1e-15);
    }

    /// The linear combination's normalization is the exact weighted sum.
    #[test]
    fn lcu_lambda_is_exact(l1 in 0.01f64..2.0, l2 in 0.01f64..2.0) {
        let terms = [BlockEncoding::identity(1), BlockEncoding::identity(1)];
        let be = lcu_be(&terms, &[l1, l2]).unwrap();
        prop_assert_eq!(be.alpha, l1 + l2);
    }
}
