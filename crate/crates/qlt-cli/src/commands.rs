//! Command implementations.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlt::blockenc::{
    choose_fourier_order, fourier_coefficients, fourier_diagonal_be, fourier_truncation_bound,
    DiagonalMethod, DiagonalSpec, FourierSpec,
};
use qlt::circuit::to_qasm3;
use qlt::laplace::{
    apply_block, dlt_matrix, prepare_laplace_state, success_probability, truncation_horizon,
    ContinuousProblem, ExponentialType,
};
use qlt::numerics::SeriesKind;
use qlt::transform::{
    build_from_plan, plan_series, resource_report, scaffold_metrics, verify_qlt, QltProblem,
    SeriesPlan,
};

use crate::config::{coefficients, parse_kind, JobConfig, ScalingConfig};
use crate::report::*;
use crate::{CliError, ReportFormat};

fn read_job(path: &Path) -> Result<JobConfig, CliError> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config error: {e}")))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("report serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

struct Job {
    problem: QltProblem,
    plan: SeriesPlan,
    forced_k: Option<usize>,
}

fn prepare_job(cfg: &JobConfig, seed: u64) -> Result<Job, CliError> {
    let kind = parse_kind(&cfg.problem.kind)?;
    let (x, y) = coefficients(&cfg.problem, seed)?;
    let problem = QltProblem::new(x, y, cfg.problem.eps, kind)?;
    let mut plan = plan_series(&problem)?;
    if let Some(k) = cfg.problem.force_k {
        plan.terms.retain(|t| t.k <= k && t.k2.map_or(true, |k2| k2 <= k));
        plan.lambda = plan.terms.iter().map(|t| t.weight).sum();
    }
    Ok(Job { problem, plan, forced_k: cfg.problem.force_k })
}

fn problem_report(p: &QltProblem) -> ProblemReport {
    ProblemReport {
        qubits: p.qubits(),
        kind: p.kind.name().to_string(),
        eps: p.eps,
        x: complex_pairs(&p.x),
        y: complex_pairs(&p.y),
    }
}

fn plan_report(plan: &SeriesPlan, forced_k: Option<usize>) -> PlanReport {
    PlanReport {
        truncation_k: plan.truncation.k,
        truncation_bound: plan.truncation.bound,
        product: plan.truncation.product,
        term_count: plan.terms.len(),
        lambda: plan.lambda,
        alpha: plan.alpha,
        per_factor_eps: plan.per_factor_eps,
        clamped_eigenvalues: plan.clamped,
        forced_k,
    }
}

pub fn synthesize(config: &Path, out: &Path, seed: u64) -> Result<(), CliError> {
    let cfg = read_job(config)?;
    let job = prepare_job(&cfg, seed)?;
    let be = build_from_plan(&job.plan)?;
    let resources = resource_report(&be, &job.plan)?;
    fs::create_dir_all(out)?;

    let mut qasm_file = None;
    let mut qasm_gate_count = None;
    if cfg.output.qasm {
        let qasm = to_qasm3(&be.circuit);
        qasm_gate_count = Some(
            qasm.lines().filter(|l| !l.starts_with("//") && !l.starts_with("OPENQASM")
                && !l.starts_with("include") && !l.starts_with("qubit") && !l.is_empty()).count(),
        );
        fs::write(out.join("circuit.qasm"), qasm)?;
        qasm_file = Some("circuit.qasm".to_string());
    }

    let report = SynthesizeReport {
        command: "synthesize".to_string(),
        seed,
        problem: problem_report(&job.problem),
        plan: plan_report(&job.plan, job.forced_k),
        resources: ResourcesReport::from_lib(&resources, qasm_gate_count),
        qasm_file,
    };
    write_json(&out.join("report.json"), &report)
}

pub fn verify(config: &Path, out: &Path, seed: u64) -> Result<bool, CliError> {
    let cfg = read_job(config)?;
    let job = prepare_job(&cfg, seed)?;
    let be = build_from_plan(&job.plan)?;
    let resources = resource_report(&be, &job.plan)?;
    let verdict = verify_qlt(&job.problem, &be)?;

    let n = job.problem.qubits();
    let dim = 1usize << n;
    let state_name = cfg.verify.state.as_deref().unwrap_or("uniform");
    let psi: Vec<Complex64> = match state_name {
        "uniform" => {
            let amp = 1.0 / (dim as f64).sqrt();
            vec![Complex64::new(amp, 0.0); dim]
        }
        "basis0" => {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[0] = Complex64::new(1.0, 0.0);
            v
        }
        other => {
            return Err(CliError::Usage(format!(
                "verify.state: unknown state {other:?} (expected uniform or basis0)"
            )))
        }
    };
    let probability = success_probability(&be, &psi)?;

    fs::create_dir_all(out)?;
    let report = VerifyReport {
        command: "verify".to_string(),
        seed,
        problem: problem_report(&job.problem),
        plan: plan_report(&job.plan, job.forced_k),
        resources: ResourcesReport::from_lib(&resources, None),
        measured_error: verdict.measured_error,
        pass: verdict.pass,
        success_probability: probability,
        verify_state: state_name.to_string(),
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(verdict.pass)
}

pub fn scaling(config: &Path, out: &Path, seed: u64, format: ReportFormat) -> Result<(), CliError> {
    let text = fs::read_to_string(config)?;
    let cfg: ScalingConfig =
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config error: {e}")))?;
    let range = &cfg.scaling;
    fs::create_dir_all(out)?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for &eps in &range.eps {
        for n in range.n_min..=range.n_max {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 8);
            let len = 1usize << n;
            let x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = QltProblem::from_real(&x, &y, eps, SeriesKind::Taylor)?;
            let plan = plan_series(&p)?;
            let k = plan.truncation.k;
            let m = scaffold_metrics(&plan)?;
            let b = plan.selector_qubits();
            let qubits = p.qubits() + 2 * p.qubits() + 2 + b;
            let log_n = (n as f64).log2().ceil().max(1.0);
            rows.push(vec![
                n.to_string(),
                format!("{eps:e}"),
                k.to_string(),
                m.size.to_string(),
                m.depth.to_string(),
                qubits.to_string(),
                format!("{:.6}", m.size as f64 / (k.max(1) as f64 * n as f64)),
                format!("{:.6}", m.depth as f64 / (k.max(1) as f64 * log_n)),
                (2 * plan.terms.len()).to_string(),
            ]);
        }
    }

    let header = [
        "n",
        "eps",
        "k",
        "size",
        "depth",
        "qubits",
        "size_per_kn",
        "depth_per_klogn",
        "controlled_diagonal_invocations",
    ];
    match format {
        ReportFormat::Csv => {
            let mut csv = header.join(",");
            csv.push('\n');
            for row in &rows {
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            fs::write(out.join("table.csv"), csv)?;
        }
        ReportFormat::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut map = serde_json::Map::new();
                    for (key, value) in header.iter().zip(row) {
                        map.insert(key.to_string(), serde_json::Value::String(value.clone()));
                    }
                    serde_json::Value::Object(map)
                })
                .collect();
            write_json(&out.join("table.json"), &objects)?;
        }
    }
    Ok(())
}

pub fn demo(name: &str, out: &Path, seed: u64) -> Result<(), CliError> {
    match name {
        "ztransform" => demo_ztransform(out, seed),
        "continuous-laplace" => demo_continuous_laplace(out),
        "fourier-diagonal" => demo_fourier_diagonal(out),
        other => Err(CliError::Usage(format!(
            "unknown demo {other:?} (expected ztransform, continuous-laplace or fourier-diagonal)"
        ))),
    }
}

/// Z-transform on the unit circle. The classical path checks the exact
/// transform matrix against a direct discrete Fourier sum at n = 3; the
/// quantum path compiles and simulates the n = 2 instance and compares
/// the post-selected state with the transform of the input sequence.
fn demo_ztransform(out: &Path, seed: u64) -> Result<(), CliError> {
    fs::create_dir_all(out)?;

    // classical path, n = 3
    let nc = 3usize;
    let len_c = 1usize << nc;
    let zc: Vec<Complex64> = (0..len_c)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / len_c as f64))
        .collect();
    let pc = qlt::laplace::ztransform_problem(&zc, 1e-2)?;
    let mc = dlt_matrix(&pc.x, &pc.y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: Vec<Complex64> = (0..len_c)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut classical_dev = 0.0f64;
    for j in 0..len_c {
        let mut dft = Complex64::new(0.0, 0.0);
        for (i, &si) in s.iter().enumerate() {
            dft += si
                * Complex64::from_polar(
                    1.0,
                    -2.0 * std::f64::consts::PI * (i * j) as f64 / len_c as f64,
                );
        }
        let mut row = Complex64::new(0.0, 0.0);
        for (i, &si) in s.iter().enumerate() {
            row += mc[(j, i)] * si;
        }
        classical_dev = classical_dev.max((row * len_c as f64 - dft).norm());
    }

    // quantum path, n = 2
    let nq = 2usize;
    let len_q = 1usize << nq;
    let eps = 1e-2;
    let zq: Vec<Complex64> = (0..len_q)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / len_q as f64))
        .collect();
    let pq = qlt::laplace::ztransform_problem(&zq, eps)?;
    let plan = plan_series(&pq)?;
    let be = build_from_plan(&plan)?;
    let resources = resource_report(&be, &plan)?;

    let raw: Vec<Complex64> = (1..=len_q).map(|i| Complex64::new(i as f64, 0.0)).collect();
    let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let sq: Vec<Complex64> = raw.iter().map(|&a| a / norm).collect();
    let (projected, probability) = apply_block(&be, &sq)?;
    let proj_norm = probability.sqrt();

    let mq = dlt_matrix(&pq.x, &pq.y)?;
    let target_vec: Vec<Complex64> = (0..len_q)
        .map(|j| (0..len_q).map(|i| mq[(j, i)] * sq[i]).sum::<Complex64>())
        .collect();
    let target_norm: f64 = target_vec.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state_error: f64 = projected
        .iter()
        .zip(&target_vec)
        .map(|(a, b)| (a / proj_norm - b / target_norm).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let budget = 2.0 * eps / (be.alpha * proj_norm);

    let mut csv = String::from("j,z_re,z_im,ztransform_re,ztransform_im,state_re,state_im\n");
    for j in 0..len_q {
        let zt = target_vec[j] * len_q as f64 * norm; // un-normalized Z{s}(z_j)
        let st = projected[j] / proj_norm;
        csv.push_str(&format!(
            "{j},{},{},{},{},{},{}\n",
            zq[j].re, zq[j].im, zt.re, zt.im, st.re, st.im
        ));
    }
    fs::write(out.join("ztransform.csv"), csv)?;

    let report = ZtransformDemoReport {
        command: "demo ztransform".to_string(),
        classical_qubits: nc,
        classical_dft_deviation: classical_dev,
        quantum_qubits: nq,
        eps,
        truncation_k: plan.truncation.k,
        alpha: be.alpha,
        success_probability: probability,
        state_error,
        state_error_budget: budget,
        resources: ResourcesReport::from_lib(&resources, None),
    };
    write_json(&out.join("report.json"), &report)
}

/// Continuous Laplace transform of f = e^{-t} on the real contour
/// sigma in [1, 2] at n = 3, against the closed form 1/(1+sigma).
fn demo_continuous_laplace(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let n = 3usize;
    let len = 1usize << n;
    let eps = 1e-2;
    let growth = ExponentialType { k: 1.0, a: -1.0, t0: 0.0 };
    let contour: Vec<Complex64> =
        (0..len).map(|j| Complex64::new(1.0 + j as f64 / (len - 1) as f64, 0.0)).collect();
    let horizon = truncation_horizon(growth, 1.0, eps)?;
    let problem =
        ContinuousProblem::from_fn(|t| (-t).exp(), n, growth, contour.clone(), horizon, eps)?;
    let report = prepare_laplace_state(&problem)?;
    let resources = report
        .resources
        .as_ref()
        .expect("non-degenerate input always carries resources");

    let mut max_trunc_err = 0.0f64;
    let mut max_disc_err = 0.0f64;
    let quad = qlt::laplace::continuous_laplace_quadrature(&problem.f_samples, horizon, &contour);
    for (j, z) in contour.iter().enumerate() {
        let zp = z + Complex64::new(1.0, 0.0);
        max_trunc_err = max_trunc_err.max(((-zp * horizon).exp() / zp).norm());
        let exact = (Complex64::new(1.0, 0.0) - (-zp * horizon).exp()) / zp;
        max_disc_err = max_disc_err.max((quad[j] - exact).norm());
    }

    let reference: Vec<Complex64> =
        contour.iter().map(|z| Complex64::new(1.0, 0.0) / (z + Complex64::new(1.0, 0.0))).collect();
    let ref_norm: f64 = reference.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state_vs_closed_form: f64 = report
        .normalized_state
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b / ref_norm).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let mut csv =
        String::from("j,sigma,closed_form,quadrature_re,quadrature_im,state_re,state_im\n");
    for j in 0..len {
        csv.push_str(&format!(
            "{j},{},{},{},{},{},{}\n",
            contour[j].re,
            reference[j].re,
            quad[j].re,
            quad[j].im,
            report.normalized_state[j].re,
            report.normalized_state[j].im,
        ));
    }
    fs::write(out.join("laplace.csv"), csv)?;

    let max_disc_bound =
        report.discretization_bounds.iter().fold(0.0f64, |a, &b| a.max(b));
    let json = ContinuousLaplaceDemoReport {
        command: "demo continuous-laplace".to_string(),
        qubits: n,
        eps,
        horizon,
        truncation_bound: report.truncation_bound,
        max_truncation_error: max_trunc_err,
        max_discretization_bound: max_disc_bound,
        max_discretization_error: max_disc_err,
        state_vs_quadrature: report.state_vs_quadrature,
        qlt_budget: report.qlt_budget,
        state_vs_closed_form,
        combined_reference_budget: report.combined_reference_budget,
        success_probability: report.success_probability,
        success_exponent: report.success_exponent,
        grid_hypothesis_ok: report.grid_hypothesis_ok,
        resources: ResourcesReport::from_lib(resources, None),
    };
    write_json(&out.join("report.json"), &json)
}

/// Fourier-series diagonal for g = exp(cos 2 pi x)/e at n = 3 with
/// target accuracy 1e-6.
fn demo_fourier_diagonal(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let n = 3usize;
    let g = |x: f64| ((2.0 * std::f64::consts::PI * x).cos()).exp() / std::f64::consts::E;
    // derivative-bound constants for g, fitted from
    // ||g^(M)|| <= sum_k |I_k(1)/e| (2 pi k)^M and verified in the tests
    let c_const = 1.600344165660731e122;
    let r_const = 1.01;
    let target = 1e-6;
    let m = choose_fourier_order(c_const, r_const, target)?;
    let eps_m = fourier_truncation_bound(c_const, r_const, m)?;

    let samples_len = (8 * m).next_power_of_two();
    let samples: Vec<Complex64> = (0..samples_len)
        .map(|s| Complex64::new(g(s as f64 / samples_len as f64), 0.0))
        .collect();
    let coeffs = fourier_coefficients(&samples, m)?;
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
    let be = fourier_diagonal_be(&spec, n)?;
    let block = be.block()?;
    let measured = be.measured_error_diagonal(&eig)?;

    let mut csv = String::from("j,x,g,block_re,block_im\n");
    for (j, &e) in eig.iter().enumerate() {
        let v = block[(j, j)] * be.alpha;
        csv.push_str(&format!("{j},{},{},{},{}\n", j as f64 / 8.0, e.re, v.re, v.im));
    }
    fs::write(out.join("diagonal.csv"), csv)?;

    let metrics = be.circuit.metrics();
    let json = FourierDemoReport {
        command: "demo fourier-diagonal".to_string(),
        qubits: n,
        target_eps: target,
        order_m: m,
        eps_m,
        smoothness_c: c_const,
        smoothness_r: r_const,
        alpha: be.alpha,
        measured_error: measured,
        selector_qubits: be.a - 1,
        total_qubits: be.circuit.total_qubits(),
        size: metrics.size,
        depth: metrics.depth,
    };
    write_json(&out.join("report.json"), &json)
}
