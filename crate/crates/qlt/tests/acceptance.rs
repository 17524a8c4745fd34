//! Acceptance suite: one test per criterion, each printing a pass line
//! with its measured quantities (visible with `--nocapture`).
//!
//! Run with `cargo test -p qlt --test acceptance` (add `--release` for
//! speed; the heaviest criteria simulate 12- and 16-qubit circuits).

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlt::blockenc::{
    choose_fourier_order, diagonal_be_exact, fourier_coefficients, fourier_diagonal_be,
    fourier_truncation_bound, lcu_be, product_be, uniform_matrix_be, BlockEncoding,
    DiagonalMethod, DiagonalSpec, FourierSpec,
};
use qlt::circuit::{copy_circuit, Metrics};
use qlt::laplace::{
    continuous_laplace_quadrature, prepare_laplace_state, success_probability,
    success_probability_limit, truncation_horizon, ContinuousProblem, ExponentialType,
};
use qlt::numerics::{
    bessel_i, chebyshev_t, chebyshev_tail_bound, complex_double_tail_bound, spectral_norm,
    taylor_tail_bound, SeriesKind,
};
use qlt::transform::{build_qlt, plan_series, scaffold_metrics, verify_qlt, QltProblem};

fn seeded_real_instance(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let len = 1usize << n;
    let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
    (x, y)
}

/// Criterion 1: end-to-end Taylor builds on 10 seeded instances at
/// n in {1, 2}, eps = 1e-2, under 60 s total.
#[test]
fn criterion_01_taylor_end_to_end() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_101);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let n = 1 + trial % 2;
        let (x, y) = seeded_real_instance(&mut rng, n);
        let p = QltProblem::from_real(&x, &y, 1e-2, SeriesKind::Taylor).unwrap();
        let be = build_qlt(&p).unwrap();
        let alpha_want = (p.x_max() * p.y_max()).exp();
        assert!((be.alpha - alpha_want).abs() <= 1e-12 * alpha_want);
        let v = verify_qlt(&p, &be).unwrap();
        assert!(v.pass, "trial {trial}: measured {} > 1e-2", v.measured_error);
        worst = worst.max(v.measured_error);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "criterion 1 took {elapsed:?}");
    println!("criterion 1 (Taylor end-to-end): PASS worst_error={worst:.3e} elapsed={elapsed:?}");
}

/// Criterion 2: the same instances through the Chebyshev route, plus
/// cross-agreement of the two routes.
#[test]
fn criterion_02_chebyshev_end_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_101);
    let mut worst = 0.0f64;
    let mut worst_cross = 0.0f64;
    for trial in 0..10 {
        let n = 1 + trial % 2;
        let (x, y) = seeded_real_instance(&mut rng, n);
        let pc = QltProblem::from_real(&x, &y, 1e-2, SeriesKind::Chebyshev).unwrap();
        let bc = build_qlt(&pc).unwrap();
        let prod = pc.x_max() * pc.y_max();
        let alpha_want = prod.exp() * (2.0 * (prod / 2.0).exp() - 1.0);
        assert!((bc.alpha - alpha_want).abs() <= 1e-12 * alpha_want);
        let v = verify_qlt(&pc, &bc).unwrap();
        assert!(v.pass, "trial {trial}: measured {} > 1e-2", v.measured_error);
        worst = worst.max(v.measured_error);

        let pt = QltProblem::from_real(&x, &y, 1e-2, SeriesKind::Taylor).unwrap();
        let bt = build_qlt(&pt).unwrap();
        let mt = bt.block().unwrap() * Complex64::new(bt.alpha, 0.0);
        let mc = bc.block().unwrap() * Complex64::new(bc.alpha, 0.0);
        let cross = spectral_norm(&(mt - mc)).unwrap();
        assert!(cross <= 2e-2, "trial {trial}: cross disagreement {cross}");
        worst_cross = worst_cross.max(cross);
    }
    println!(
        "criterion 2 (Chebyshev end-to-end): PASS worst_error={worst:.3e} worst_cross={worst_cross:.3e}"
    );
}

/// Criterion 3: complex coefficients. Taylor on 5 instances at n = 1,
/// then the double-Chebyshev route with its term count and certificate.
#[test]
fn criterion_03_complex_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_103);
    let cpx = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-3.1..3.1))
    };
    let mut worst_taylor = 0.0f64;
    let mut worst_double = 0.0f64;
    for trial in 0..5 {
        let x: Vec<Complex64> = (0..2).map(|_| cpx(&mut rng)).collect();
        let y: Vec<Complex64> = (0..2).map(|_| cpx(&mut rng)).collect();

        let pt = QltProblem::new(x.clone(), y.clone(), 1e-2, SeriesKind::Taylor).unwrap();
        let bt = build_qlt(&pt).unwrap();
        let v = verify_qlt(&pt, &bt).unwrap();
        assert!(v.pass, "taylor trial {trial}: {}", v.measured_error);
        worst_taylor = worst_taylor.max(v.measured_error);

        let pd = QltProblem::new(x, y, 1e-2, SeriesKind::DoubleChebyshev).unwrap();
        let plan = plan_series(&pd).unwrap();
        let k = plan.truncation.k;
        assert_eq!(plan.terms.len(), (k + 1) * (k + 1), "term count");
        let prod = pd.x_max() * pd.y_max();
        let a1 = prod.exp() * (2.0 * (prod / 2.0).exp() - 1.0);
        let alpha_want = (2.0 * prod).exp() * (2.0 * (prod / 2.0).exp() - 1.0).powi(2);
        assert!((a1 * a1 - alpha_want).abs() <= 1e-9 * alpha_want);
        let bd = build_qlt(&pd).unwrap();
        assert!((bd.alpha - alpha_want).abs() <= 1e-9 * alpha_want);
        let v = verify_qlt(&pd, &bd).unwrap();
        assert!(v.pass, "double trial {trial}: {}", v.measured_error);
        worst_double = worst_double.max(v.measured_error);
    }
    println!(
        "criterion 3 (complex coefficients): PASS worst_taylor={worst_taylor:.3e} worst_double={worst_double:.3e}"
    );
}

/// Criterion 4: exact structural counts, zero tolerance.
#[test]
fn criterion_04_exact_subcircuit_counts() {
    for n in 1..=8usize {
        let u = uniform_matrix_be(n).unwrap();
        assert_eq!(u.circuit.metrics(), Metrics { size: 4 * n, depth: 3 }, "uniform n={n}");
    }
    for n_a in 1..=64usize {
        let c = copy_circuit(n_a).unwrap();
        let want_depth = (n_a as f64).log2().ceil() as usize;
        assert_eq!(c.metrics(), Metrics { size: n_a - 1, depth: want_depth }, "copy n_a={n_a}");
    }
    println!("criterion 4 (exact sub-circuit counts): PASS uniform(4n,3) copy(n_a-1,ceil_log2)");
}

/// Criterion 5: truncated-series residuals stay within the three stated
/// bounds; 200 samples per real kind, 100 complex samples.
#[test]
fn criterion_05_series_bound_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_105);
    let (x_max, y_max) = (1.0f64, 1.0f64);
    let product = x_max * y_max;

    let mut taylor_checked = 0usize;
    let mut cheb_checked = 0usize;
    for _ in 0..200 {
        let x: f64 = rng.random_range(-x_max..x_max);
        let y: f64 = rng.random_range(-y_max..y_max);
        let k = rng.random_range(0..=12usize);

        let mut term = 1.0f64;
        let mut acc = 1.0f64;
        for i in 1..=k {
            term *= x * y / i as f64;
            acc += term;
        }
        let resid = ((x * y).exp() - acc).abs();
        assert!(resid <= taylor_tail_bound(product, k) + 1e-15);
        taylor_checked += 1;

        if (k + 1) as f64 >= product {
            let xt = y_max * x;
            let yt = y / y_max;
            let mut acc = 0.0;
            for j in 0..=k {
                let w = if j == 0 { 1.0 } else { 2.0 };
                acc += w
                    * bessel_i(j, Complex64::new(xt, 0.0)).unwrap().re
                    * chebyshev_t(j, yt).unwrap();
            }
            let resid = ((x * y).exp() - acc).abs();
            assert!(resid <= chebyshev_tail_bound(product, k).unwrap() + 1e-12);
            cheb_checked += 1;
        }
    }
    assert_eq!(taylor_checked, 200);
    assert!(cheb_checked >= 190);

    // complex double series
    let mut double_checked = 0usize;
    for _ in 0..100 {
        let x = Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-3.1..3.1));
        let y = Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-3.1..3.1));
        let k = rng.random_range(0..=8usize);
        let re_max = y.re.abs();
        let im_max = y.im.abs();
        let i_unit = Complex64::new(0.0, 1.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for k1 in 0..=k {
            let w1 = if k1 == 0 { 1.0 } else { 2.0 };
            let yt = if re_max > 0.0 { y.re / re_max } else { 0.0 };
            let t1 = chebyshev_t(k1, yt).unwrap();
            let i1 = bessel_i(k1, x * re_max).unwrap();
            for k2 in 0..=k {
                let w2 = if k2 == 0 { 1.0 } else { 2.0 };
                let yt2 = if im_max > 0.0 { y.im / im_max } else { 0.0 };
                let t2 = chebyshev_t(k2, yt2).unwrap();
                let i2 = bessel_i(k2, i_unit * x * im_max).unwrap();
                acc += i1 * i2 * (w1 * w2 * t1 * t2);
            }
        }
        let resid = ((x * y).exp() - acc).norm();
        assert!(
            resid <= complex_double_tail_bound(product, k).unwrap() + 1e-12,
            "complex sample failed at K={k}: resid {resid}"
        );
        double_checked += 1;
    }
    assert_eq!(double_checked, 100);
    println!(
        "criterion 5 (series bound suite): PASS taylor=200 chebyshev={cheb_checked} complex=100"
    );
}

/// Criterion 6: certificate algebra of the combination lemmas on
/// randomized encodings (dim <= 8).
#[test]
fn criterion_06_certificate_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_106);
    for trial in 0..10 {
        let n = rng.random_range(1..=3usize);
        let len = 1usize << n;
        let mk_diag = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            (0..len)
                .map(|_| {
                    Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-3.1..3.1))
                })
                .collect()
        };
        let d1 = mk_diag(&mut rng);
        let d2 = mk_diag(&mut rng);
        let b1 = diagonal_be_exact(&d1).unwrap();
        let b2 = diagonal_be_exact(&d2).unwrap();

        let prod = product_be(&b1, &b2).unwrap();
        assert_eq!(prod.alpha, b1.alpha * b2.alpha);
        assert_eq!(prod.a, b1.a + b2.a);
        let target = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                d1[i] * d2[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let err = prod.measured_error(&target).unwrap();
        assert!(err <= prod.eps + 1e-8, "product trial {trial}: {err}");

        let lambdas: Vec<f64> = (0..2).map(|_| rng.random_range(0.1..1.5)).collect();
        let comb = lcu_be(&[b1.clone(), b2.clone()], &lambdas).unwrap();
        // lambda = sum lambda_k alpha_k, exactly
        assert_eq!(comb.alpha, lambdas[0] * b1.alpha + lambdas[1] * b2.alpha);
        let target = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                d1[i] * lambdas[0] + d2[i] * lambdas[1]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let err = comb.measured_error(&target).unwrap();
        assert!(err <= comb.eps + 1e-8, "lcu trial {trial}: {err}");
    }
    println!("criterion 6 (certificate algebra): PASS 10 randomized trials, dim <= 8");
}

/// Criterion 7: Fourier-series diagonal for g = exp(cos 2 pi x)/e at
/// n = 3, target 1e-6.
#[test]
fn criterion_07_fourier_diagonal() {
    let n = 3usize;
    let g = |x: f64| ((2.0 * std::f64::consts::PI * x).cos()).exp() / std::f64::consts::E;
    // derivative-bound constants, fitted and verified in the property
    // suite
    let c_const = 1.600344165660731e122;
    let r_const = 1.01;
    let target = 1e-6;
    let m = choose_fourier_order(c_const, r_const, target).unwrap();
    let eps_m = fourier_truncation_bound(c_const, r_const, m).unwrap();
    assert!(eps_m <= target);

    let samples_len = (8 * m).next_power_of_two();
    let samples: Vec<Complex64> = (0..samples_len)
        .map(|s| Complex64::new(g(s as f64 / samples_len as f64), 0.0))
        .collect();
    let coeffs = fourier_coefficients(&samples, m).unwrap();
    let eig: Vec<Complex64> =
        (0..1 << n).map(|j| Complex64::new(g(j as f64 / (1 << n) as f64), 0.0)).collect();
    let spec = DiagonalSpec {
        eigenvalues: eig.clone(),
        method: DiagonalMethod::FourierLcu(FourierSpec {
            coefficients: coeffs,
            smoothness_c: c_const,
            smoothness_r: r_const,
        }),
    };
    let be = fourier_diagonal_be(&spec, n).unwrap();
    let block = be.block().unwrap();
    let target_matrix = DMatrix::from_fn(1 << n, 1 << n, |i, j| {
        if i == j {
            eig[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let measured =
        spectral_norm(&(target_matrix - block * Complex64::new(be.alpha, 0.0))).unwrap();
    assert!(measured <= 1e-6, "measured {measured} > 1e-6");
    assert!(measured <= 2.0 * eps_m, "measured {measured} > 2 eps_M = {}", 2.0 * eps_m);
    println!(
        "criterion 7 (fourier diagonal): PASS M={m} measured={measured:.3e} 2eps_M={:.3e}",
        2.0 * eps_m
    );
}

/// Criterion 8: continuous Laplace demo, f = e^{-t}, real contour in
/// [1, 2], n = 3: truncation and Riemann errors within their bounds,
/// final state within the combined budget of the closed form, success
/// probability in (0, 1].
#[test]
fn criterion_08_continuous_laplace() {
    let n = 3usize;
    let len = 1usize << n;
    let eps = 1e-2;
    let growth = ExponentialType { k: 1.0, a: -1.0, t0: 0.0 };
    let contour: Vec<Complex64> =
        (0..len).map(|j| Complex64::new(1.0 + j as f64 / (len - 1) as f64, 0.0)).collect();
    let horizon = truncation_horizon(growth, 1.0, eps).unwrap();
    let p = ContinuousProblem::from_fn(|t| (-t).exp(), n, growth, contour.clone(), horizon, eps)
        .unwrap();
    let report = prepare_laplace_state(&p).unwrap();
    assert!(!report.degenerate);

    // (a) truncation: closed-form tail against the lemma bound
    for z in &contour {
        let tail = (-(1.0 + z.re) * horizon).exp() / (1.0 + z.re);
        assert!(tail <= report.truncation_bound * (1.0 + 1e-12), "truncation at sigma={}", z.re);
    }

    // (b) discretization: Riemann vs closed-form truncated integral
    let quad = continuous_laplace_quadrature(&p.f_samples, horizon, &contour);
    let mut worst_margin = 0.0f64;
    for (j, z) in contour.iter().enumerate() {
        let zp = z + Complex64::new(1.0, 0.0);
        let exact = (Complex64::new(1.0, 0.0) - (-zp * horizon).exp()) / zp;
        let err = (quad[j] - exact).norm();
        assert!(
            err <= report.discretization_bounds[j],
            "riemann error {err} > bound {} at j={j}",
            report.discretization_bounds[j]
        );
        worst_margin = worst_margin.max(err / report.discretization_bounds[j]);
    }

    // (c) normalized state against the closed-form 1/(1+sigma) vector
    let reference: Vec<Complex64> =
        contour.iter().map(|z| Complex64::new(1.0, 0.0) / (z + Complex64::new(1.0, 0.0))).collect();
    let ref_norm: f64 = reference.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let dist: f64 = report
        .normalized_state
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b / ref_norm).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!(
        dist <= report.combined_reference_budget,
        "state distance {dist} > combined budget {}",
        report.combined_reference_budget
    );

    // (d) success probability reported and in (0, 1]
    let prob = report.success_probability;
    assert!(prob > 0.0 && prob <= 1.0 + 1e-12, "P = {prob}");
    println!(
        "criterion 8 (continuous laplace): PASS M={horizon:.4} state_dist={dist:.3e} budget={:.3e} P={prob:.4e}",
        report.combined_reference_budget
    );
}

/// Criterion 9: construction-only scaling study, n in {2..10} at fixed
/// eps: scaffold size/(K n) and depth/(K ceil(log2 n)) each vary by less
/// than 3x, and every build invokes exactly 2(K+1) controlled diagonals.
#[test]
fn criterion_09_scaling_study() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_250_109);
    let eps = 1e-6;
    let mut size_ratios = Vec::new();
    let mut depth_ratios = Vec::new();
    for n in 2..=10usize {
        let (x, y) = seeded_real_instance(&mut rng, n);
        let p = QltProblem::from_real(&x, &y, eps, SeriesKind::Taylor).unwrap();
        let plan = plan_series(&p).unwrap();
        let k = plan.truncation.k;
        assert!(k >= 1);
        assert_eq!(2 * plan.terms.len(), 2 * (k + 1));
        let m = scaffold_metrics(&plan).unwrap();
        let log_n = (n as f64).log2().ceil().max(1.0);
        size_ratios.push(m.size as f64 / (k as f64 * n as f64));
        depth_ratios.push(m.depth as f64 / (k as f64 * log_n));
    }
    let spread = |v: &[f64]| {
        let max = v.iter().fold(0.0f64, |a, &b| a.max(b));
        let min = v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        max / min
    };
    let s = spread(&size_ratios);
    let d = spread(&depth_ratios);
    assert!(s < 3.0, "size/(K n) spread {s} >= 3: {size_ratios:?}");
    assert!(d < 3.0, "depth/(K log n) spread {d} >= 3: {depth_ratios:?}");
    println!("criterion 9 (scaling study): PASS size_spread={s:.2} depth_spread={d:.2}");
}

/// Criterion 10: success probability approaches the continuum limit for
/// coefficients sampling constant functions.
#[test]
fn criterion_10_success_probability_trend() {
    let limit = success_probability_limit(|_| 0.5, |_| 0.5, |_| 1.0);
    let mut deviations = Vec::new();
    for n in 1..=4usize {
        let len = 1usize << n;
        let x = vec![0.5f64; len];
        let y = vec![0.5f64; len];
        let p = QltProblem::from_real(&x, &y, 1e-3, SeriesKind::Taylor).unwrap();
        let be = build_qlt(&p).unwrap();
        let amp = 1.0 / (len as f64).sqrt();
        let h: Vec<Complex64> = vec![Complex64::new(amp, 0.0); len];
        let prob = success_probability(&be, &h).unwrap();
        let dev = (prob - limit).abs();
        assert!(dev <= 0.25 * limit, "n={n}: P={prob} vs limit {limit}");
        deviations.push(dev);
    }
    for w in deviations.windows(2) {
        assert!(
            w[1] <= w[0] + 1e-9,
            "deviation sequence not decreasing: {deviations:?}"
        );
    }
    println!(
        "criterion 10 (success probability trend): PASS limit={limit:.6} deviations={deviations:?}"
    );
}

// keep the unused-import lint honest when individual criteria get
// filtered out during development
#[allow(dead_code)]
fn _typecheck_helpers(be: &BlockEncoding) -> usize {
    be.n
}
