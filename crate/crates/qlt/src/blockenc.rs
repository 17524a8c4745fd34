//! Block-encoding certificates and combinators.
//!
//! A `(alpha, a, eps)`-block-encoding of an `n`-qubit operator `A` is a
//! unitary `U` over `n + a` qubits with
//! `|| A - alpha (<0|^a (x) I) U (|0>^a (x) I) || <= eps`. The combinators
//! here compose certified encodings: products, linear combinations
//! (PREPARE/SELECT) and element-wise products, plus two synthesis routes
//! for non-unitary diagonal operators (exact multiplexed rotations, and a
//! Fourier-series route for diagonals sampled from a periodic analytic
//! function).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{
    emit_controlled_su2, emit_mcx_lenient, emit_parallel_controlled, extract_block,
    prepare_state, Circuit, Gate, RegisterLayout, RegisterRole,
};
use crate::numerics::spectral_norm;
use crate::{Error, Result};

/// A circuit together with its block-encoding certificate.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    /// Unitary over `n + a` qubits, system at the least significant end.
    pub circuit: Circuit,
    /// System qubits.
    pub n: usize,
    /// Ancilla qubits (everything above the system register).
    pub a: usize,
    /// Normalization of the encoded block.
    pub alpha: f64,
    /// Certified spectral-norm error bound against the target operator.
    pub eps: f64,
}

impl BlockEncoding {
    /// Trivial `(1, 0, 0)`-encoding of the identity: an empty circuit.
    pub fn identity(n: usize) -> Self {
        BlockEncoding {
            circuit: Circuit::new(RegisterLayout::new(vec![("system", RegisterRole::System, n)])),
            n,
            a: 0,
            alpha: 1.0,
            eps: 0.0,
        }
    }

    /// A unitary circuit over `n` qubits as a `(1, 0, 0)`-encoding of itself.
    pub fn from_unitary(circuit: Circuit) -> Self {
        let n = circuit.total_qubits();
        BlockEncoding { circuit, n, a: 0, alpha: 1.0, eps: 0.0 }
    }

    /// The encoded block `(<0|^a (x) I) U (|0>^a (x) I)` by dense simulation.
    pub fn block(&self) -> Result<DMatrix<Complex64>> {
        extract_block(&self.circuit, self.n, self.a)
    }

    /// Measured spectral error `|| target - alpha * block ||`.
    pub fn measured_error(&self, target: &DMatrix<Complex64>) -> Result<f64> {
        let block = self.block()?;
        spectral_norm(&(target - block * Complex64::new(self.alpha, 0.0)))
    }

    /// Measured spectral error against a diagonal target.
    pub fn measured_error_diagonal(&self, eigenvalues: &[Complex64]) -> Result<f64> {
        let len = eigenvalues.len();
        let target = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                eigenvalues[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        self.measured_error(&target)
    }
}

fn ceil_log2(x: usize) -> usize {
    debug_assert!(x >= 1);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// Product of block-encodings: if `u` encodes `A` as `(alpha, a, eps_a)`
/// and `v` encodes `B` as `(beta, b, eps_b)`, the composite encodes `A B`
/// as `(alpha beta, a + b, alpha eps_b + beta eps_a)`.
pub fn product_be(u: &BlockEncoding, v: &BlockEncoding) -> Result<BlockEncoding> {
    if u.n != v.n {
        return Err(Error::SystemSizeMismatch(u.n, v.n));
    }
    let n = u.n;
    let mut specs: Vec<(&str, RegisterRole, usize)> = vec![("system", RegisterRole::System, n)];
    let mut names: Vec<String> = Vec::new();
    for r in u.circuit.layout().registers().iter().filter(|r| r.start >= n) {
        names.push(format!("l.{}", r.name));
    }
    for r in v.circuit.layout().registers().iter().filter(|r| r.start >= n) {
        names.push(format!("r.{}", r.name));
    }
    let mut idx = 0;
    for r in u.circuit.layout().registers().iter().filter(|r| r.start >= n) {
        specs.push((names[idx].as_str(), r.role, r.size));
        idx += 1;
    }
    for r in v.circuit.layout().registers().iter().filter(|r| r.start >= n) {
        specs.push((names[idx].as_str(), r.role, r.size));
        idx += 1;
    }
    let layout = RegisterLayout::new(specs);
    let mut circuit = Circuit::new(layout);
    // B runs first: (I_b (x) U_A)(I_a (x) U_B)
    let v_map: Vec<usize> =
        (0..n).chain((0..v.a).map(|i| n + u.a + i)).collect();
    circuit.append_mapped(&v.circuit, &v_map)?;
    circuit.append(&u.circuit)?;
    Ok(BlockEncoding {
        circuit,
        n,
        a: u.a + v.a,
        alpha: u.alpha * v.alpha,
        eps: u.alpha * v.eps + v.alpha * u.eps,
    })
}

/// Options for the linear-combination builder.
#[derive(Debug, Clone, Copy)]
pub struct LcuOptions {
    /// Copies of the control ancilla made available to parallelize the
    /// controlled term circuits. `None` picks `n - 1`, the budget the
    /// transform assembly accounts for.
    pub parallel_copies: Option<usize>,
}

impl Default for LcuOptions {
    fn default() -> Self {
        LcuOptions { parallel_copies: None }
    }
}

/// Linear combination of block-encodings with nonnegative weights.
///
/// Builds `W = (P^dag (x) I) SELECT (P (x) I)` where PREPARE loads the
/// amplitudes `mu_k = sqrt(lambda_k alpha_k / lambda)`,
/// `lambda = sum_k lambda_k alpha_k`, and SELECT applies each term's
/// circuit under the control of the selector being `|k>`. Each
/// multi-control is reduced onto a single control ancilla with a pair of
/// multi-controlled NOTs, and the controlled term circuit is fanned over
/// the parallel-copy register. The result encodes
/// `sum_k lambda_k A_k` as `(lambda, a', sum_k lambda_k eps_k)`, where
/// `a'` counts every ancilla of the assembled circuit.
pub fn lcu_be(terms: &[BlockEncoding], lambdas: &[f64]) -> Result<BlockEncoding> {
    lcu_be_with(terms, lambdas, LcuOptions::default())
}

pub fn lcu_be_with(
    terms: &[BlockEncoding],
    lambdas: &[f64],
    opts: LcuOptions,
) -> Result<BlockEncoding> {
    if terms.is_empty() || lambdas.len() != terms.len() {
        return Err(Error::EmptyTerms);
    }
    let n = terms[0].n;
    for t in terms {
        if t.n != n {
            return Err(Error::SystemSizeMismatch(n, t.n));
        }
    }
    if lambdas.iter().any(|&l| l < 0.0 || !l.is_finite()) {
        return Err(Error::ZeroWeight);
    }
    let lambda: f64 = terms.iter().zip(lambdas).map(|(t, &l)| l * t.alpha).sum();
    if lambda <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    let eps_total: f64 = terms.iter().zip(lambdas).map(|(t, &l)| l * t.eps).sum();
    let a_common = terms.iter().map(|t| t.a).max().unwrap_or(0);

    // Degenerate single-term sum: the term itself, rescaled.
    if terms.len() == 1 {
        let t = &terms[0];
        let mut specs: Vec<(String, RegisterRole, usize)> =
            vec![("system".to_string(), RegisterRole::System, n)];
        for r in t.circuit.layout().registers().iter().filter(|r| r.start >= n) {
            specs.push((r.name.clone(), r.role, r.size));
        }
        let layout =
            RegisterLayout::new(specs.iter().map(|(s, r, z)| (s.as_str(), *r, *z)).collect());
        let mut circuit = Circuit::new(layout);
        circuit.append(&t.circuit)?;
        return Ok(BlockEncoding { circuit, n, a: t.a, alpha: lambda, eps: eps_total });
    }

    let count = terms.len();
    let b = ceil_log2(count);
    let copies_count = opts.parallel_copies.unwrap_or(n.saturating_sub(1));
    let layout = RegisterLayout::new(vec![
        ("system", RegisterRole::System, n),
        ("term", RegisterRole::BlockAncilla, a_common),
        ("ctrl", RegisterRole::ControlAncilla, 1),
        ("copy", RegisterRole::ParallelCopy, copies_count),
        ("selector", RegisterRole::Selector, b),
    ]);
    let q_ctrl = n + a_common;
    let copies: Vec<usize> = (q_ctrl + 1..q_ctrl + 1 + copies_count).collect();
    let sel_start = q_ctrl + 1 + copies_count;
    let selector: Vec<usize> = (sel_start..sel_start + b).collect();

    let mut mu = vec![0.0f64; 1 << b];
    for (k, (t, &l)) in terms.iter().zip(lambdas).enumerate() {
        mu[k] = (l * t.alpha / lambda).sqrt();
    }
    let prep = prepare_state(&mu)?;
    let prep_map: Vec<usize> = selector.clone();

    let mut circuit = Circuit::new(layout);
    circuit.append_mapped(&prep, &prep_map)?;
    let mut gates: Vec<Gate> = Vec::new();
    for (k, term) in terms.iter().enumerate() {
        let flips: Vec<usize> =
            (0..b).filter(|i| (k >> i) & 1 == 0).map(|i| selector[i]).collect();
        for &q in &flips {
            gates.push(Gate::X { target: q });
        }
        emit_mcx_lenient(&mut gates, &selector, q_ctrl, &copies);
        let map: Vec<usize> = (0..term.circuit.total_qubits()).collect();
        emit_parallel_controlled(
            &mut gates,
            &term.circuit,
            &map,
            q_ctrl,
            &copies,
        )?;
        emit_mcx_lenient(&mut gates, &selector, q_ctrl, &copies);
        for &q in &flips {
            gates.push(Gate::X { target: q });
        }
    }
    for g in gates {
        circuit.push(g)?;
    }
    circuit.append_mapped(&prep.adjoint(), &prep_map)?;

    Ok(BlockEncoding {
        circuit,
        n,
        a: a_common + 1 + copies_count + b,
        alpha: lambda,
        eps: eps_total,
    })
}

/// Element-wise (Hadamard) product of two unitary circuits over `n`
/// qubits: conjugating `U (x) V` by a CNOT fan yields a `(1, n, 0)`-
/// encoding of the matrix with entries `U_ij * V_ij`.
pub fn elementwise_product_be(u: &Circuit, v: &Circuit) -> Result<BlockEncoding> {
    let n = u.total_qubits();
    if v.total_qubits() != n {
        return Err(Error::SystemSizeMismatch(n, v.total_qubits()));
    }
    let layout = RegisterLayout::new(vec![
        ("system", RegisterRole::System, n),
        ("copy", RegisterRole::Elementwise, n),
    ]);
    let mut circuit = Circuit::new(layout);
    for i in 0..n {
        circuit.push(Gate::Cnot { control: i, target: n + i })?;
    }
    circuit.append(u)?;
    let v_map: Vec<usize> = (n..2 * n).collect();
    circuit.append_mapped(v, &v_map)?;
    for i in 0..n {
        circuit.push(Gate::Cnot { control: i, target: n + i })?;
    }
    Ok(BlockEncoding { circuit, n, a: n, alpha: 1.0, eps: 0.0 })
}

/// `(1, n, 0)`-encoding of the uniform matrix with entries `1/2^n`: the
/// element-wise product of two Hadamard towers. `4n` gates, depth 3.
pub fn uniform_matrix_be(n: usize) -> Result<BlockEncoding> {
    let mut h_tower = Circuit::flat(n);
    for i in 0..n {
        h_tower.push(Gate::H { target: i })?;
    }
    elementwise_product_be(&h_tower, &h_tower)
}

const EIGENVALUE_SLACK: f64 = 1e-12;

fn clamp_eigenvalue(d: Complex64) -> Result<Complex64> {
    let r = d.norm();
    if !r.is_finite() || r > 1.0 + EIGENVALUE_SLACK {
        return Err(Error::EigenvalueTooLarge(r));
    }
    if r > 1.0 {
        Ok(d / r)
    } else {
        Ok(d)
    }
}

/// Exact `(1, 1, 0)`-encoding of `diag(d)` for `|d_j| <= 1`.
///
/// One ancilla receives, for every basis index `j`, the multi-controlled
/// single-qubit gate `[[d_j, -s_j], [s_j, conj(d_j)]]` with
/// `s_j = sqrt(1 - |d_j|^2)`, the controls selecting `|j>` through X
/// conjugation. Size grows as `O(N n)`: exactness over asymptotics at
/// desk scale.
pub fn diagonal_be_exact(d: &[Complex64]) -> Result<BlockEncoding> {
    let len = d.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadCoefficientLength { x: len, y: len });
    }
    let n = len.trailing_zeros() as usize;
    let layout = RegisterLayout::new(vec![
        ("system", RegisterRole::System, n),
        ("diag", RegisterRole::BlockAncilla, 1),
    ]);
    let anc = n;
    let mut circuit = Circuit::new(layout);
    let mut gates: Vec<Gate> = Vec::new();
    let controls: Vec<usize> = (0..n).collect();
    for (j, &dj) in d.iter().enumerate() {
        let dj = clamp_eigenvalue(dj)?;
        let s = (1.0 - dj.norm_sqr()).max(0.0).sqrt();
        let g = [
            [dj, Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), dj.conj()],
        ];
        let flips: Vec<usize> = (0..n).filter(|i| (j >> i) & 1 == 0).collect();
        for &q in &flips {
            gates.push(Gate::X { target: q });
        }
        emit_controlled_su2(&mut gates, &controls, anc, &g, &[])?;
        for &q in &flips {
            gates.push(Gate::X { target: q });
        }
    }
    for g in gates {
        circuit.push(g)?;
    }
    Ok(BlockEncoding { circuit, n, a: 1, alpha: 1.0, eps: 0.0 })
}

/// How a non-unitary diagonal operator gets synthesized.
#[derive(Debug, Clone)]
pub enum DiagonalMethod {
    /// Sequential multiplexed rotations; exact, `a = 1`.
    ExactRotation,
    /// Linear combination of powers of the phase-gradient unitary, driven
    /// by a truncated Fourier series of the sampled function.
    FourierLcu(FourierSpec),
}

/// Data for the Fourier route: coefficients `a_{-M}..a_{M}` of the
/// sampled function and its derivative-bound constants
/// `||d^M g / dx^M||_inf <= C M! / R^M`.
#[derive(Debug, Clone)]
pub struct FourierSpec {
    pub coefficients: Vec<Complex64>,
    pub smoothness_c: f64,
    pub smoothness_r: f64,
}

impl FourierSpec {
    pub fn order(&self) -> usize {
        self.coefficients.len() / 2
    }
}

/// Eigenvalue vector of one diagonal factor plus its synthesis method.
#[derive(Debug, Clone)]
pub struct DiagonalSpec {
    pub eigenvalues: Vec<Complex64>,
    pub method: DiagonalMethod,
}

/// Fourier coefficients `a_k = int_0^1 g(x) e^{-2 pi i k x} dx` for
/// `k = -M..=M`, from equispaced samples of one period.
///
/// The rectangle rule is exact up to aliasing for periodic functions;
/// the 8x oversampling requirement keeps the aliased tail negligible for
/// the analytic inputs this route is meant for.
pub fn fourier_coefficients(g_samples: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
    let s = g_samples.len();
    if !s.is_power_of_two() || s < 8 * order.max(1) {
        return Err(Error::Undersampled { samples: s, order });
    }
    let mut coeffs = Vec::with_capacity(2 * order + 1);
    for k in -(order as i64)..=(order as i64) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, &g) in g_samples.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k as f64) * (idx as f64) / (s as f64);
            acc += g * Complex64::from_polar(1.0, phase);
        }
        coeffs.push(acc / s as f64);
    }
    Ok(coeffs)
}

/// Fourier truncation error bound
/// `eps_M = 2 C sqrt(2 pi M^3) e^{1/(12M)} / ((2 pi e R)^M (M - 1))`
/// for a periodic analytic function with derivative bounds `C M! / R^M`.
pub fn fourier_truncation_bound(c: f64, r: f64, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::FourierOrderTooSmall(m));
    }
    let mf = m as f64;
    // log-domain: C can be astronomically large for entire functions
    let ln = (2.0 * c).ln() + 0.5 * (2.0 * std::f64::consts::PI * mf.powi(3)).ln()
        + 1.0 / (12.0 * mf)
        - mf * (2.0 * std::f64::consts::PI * std::f64::consts::E * r).ln()
        - (mf - 1.0).ln();
    Ok(ln.exp())
}

/// Smallest `M >= 2` whose truncation bound reaches `target`.
pub fn choose_fourier_order(c: f64, r: f64, target: f64) -> Result<usize> {
    let mut best = f64::INFINITY;
    for m in 2..=20_000usize {
        let bound = fourier_truncation_bound(c, r, m)?;
        if bound <= target {
            return Ok(m);
        }
        best = best.min(bound);
    }
    Err(Error::FourierTargetUnreachable { bound: best, order: 20_000, target })
}

/// Block-encode `diag(g(j/N))` from a truncated Fourier series.
///
/// The series `sum_{k=-M}^{M} a_k e^{2 pi i k x}` evaluated on the grid is
/// a linear combination of powers of the phase-gradient unitary
/// `U_w = sum_j e^{2 pi i j / N} |j><j|`; each power costs `n` phase
/// gates, and the combination runs through the PREPARE/SELECT builder
/// with the coefficient phases folded into the term unitaries. The
/// certificate is `(sum_k |a_k|, 1 + n_sel, 2 eps_M)` with
/// `n_sel = ceil(log2(2M+1))` selector qubits plus the control ancilla.
pub fn fourier_diagonal_be(spec: &DiagonalSpec, n: usize) -> Result<BlockEncoding> {
    let fs = match &spec.method {
        DiagonalMethod::FourierLcu(fs) => fs,
        DiagonalMethod::ExactRotation => {
            return diagonal_be_exact(&spec.eigenvalues);
        }
    };
    if spec.eigenvalues.len() != 1 << n {
        return Err(Error::BadCoefficientLength { x: spec.eigenvalues.len(), y: 1 << n });
    }
    let m_order = fs.order();
    let eps_m = fourier_truncation_bound(fs.smoothness_c, fs.smoothness_r, m_order)?;
    let big_n = (1usize << n) as f64;
    let mut terms = Vec::with_capacity(fs.coefficients.len());
    let mut weights = Vec::with_capacity(fs.coefficients.len());
    for (idx, &a) in fs.coefficients.iter().enumerate() {
        let k = idx as i64 - m_order as i64;
        let weight = a.norm();
        let theta = if weight > 0.0 { a.arg() } else { 0.0 };
        let mut term = Circuit::flat(n);
        // e^{i theta} U_w^k factorizes into per-qubit phases; the global
        // phase rides on qubit 0 as a diagonal U2.
        let phi0 = 2.0 * std::f64::consts::PI * (k as f64) / big_n;
        let m0 = [
            [Complex64::from_polar(1.0, theta), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta + phi0)],
        ];
        term.push(Gate::U2 { target: 0, matrix: m0 })?;
        for q in 1..n {
            let phi = 2.0 * std::f64::consts::PI * (k as f64) * ((1usize << q) as f64) / big_n;
            term.push(Gate::Phase { target: q, theta: phi })?;
        }
        terms.push(BlockEncoding::from_unitary(term));
        weights.push(weight);
    }
    let mut be = lcu_be_with(&terms, &weights, LcuOptions { parallel_copies: Some(0) })?;
    be.eps = 2.0 * eps_m;
    Ok(be)
}
