//! Dense state-vector simulation and block extraction.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Circuit, Gate, Matrix2};
use crate::{Error, Result};

const MAX_QUBITS: usize = 24;

/// The computational basis state `|index>` over `total` qubits.
pub fn basis_state(total: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << total];
    v[index] = Complex64::new(1.0, 0.0);
    v
}

fn apply_single(state: &mut [Complex64], q: usize, m: &Matrix2) {
    let bit = 1usize << q;
    let step = bit << 1;
    let dim = state.len();
    let mut base = 0;
    while base < dim {
        for off in base..base + bit {
            let i = off;
            let j = off | bit;
            let a = state[i];
            let b = state[j];
            state[i] = m[0][0] * a + m[0][1] * b;
            state[j] = m[1][0] * a + m[1][1] * b;
        }
        base += step;
    }
}

fn apply_controlled_single(state: &mut [Complex64], control: usize, q: usize, m: &Matrix2) {
    let cbit = 1usize << control;
    let bit = 1usize << q;
    let step = bit << 1;
    let dim = state.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            if i & cbit == 0 {
                continue;
            }
            let j = i | bit;
            let a = state[i];
            let b = state[j];
            state[i] = m[0][0] * a + m[0][1] * b;
            state[j] = m[1][0] * a + m[1][1] * b;
        }
        base += step;
    }
}

fn apply_x(state: &mut [Complex64], q: usize) {
    let bit = 1usize << q;
    let step = bit << 1;
    let dim = state.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + bit {
            state.swap(i, i | bit);
        }
        base += step;
    }
}

fn apply_phase(state: &mut [Complex64], q: usize, theta: f64) {
    let bit = 1usize << q;
    let ph = Complex64::from_polar(1.0, theta);
    for (i, amp) in state.iter_mut().enumerate() {
        if i & bit != 0 {
            *amp *= ph;
        }
    }
}

fn apply_cnot(state: &mut [Complex64], control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for i in 0..state.len() {
        if i & cbit != 0 && i & tbit == 0 {
            state.swap(i, i | tbit);
        }
    }
}

fn apply_mcx(state: &mut [Complex64], controls: &[usize], target: usize) {
    let mut cmask = 0usize;
    for &c in controls {
        cmask |= 1 << c;
    }
    let tbit = 1usize << target;
    for i in 0..state.len() {
        if i & cmask == cmask && i & tbit == 0 {
            state.swap(i, i | tbit);
        }
    }
}

/// Apply the circuit's gates in order to `state`, in place.
pub fn simulate_in_place(c: &Circuit, state: &mut [Complex64]) -> Result<()> {
    let total = c.total_qubits();
    if total > MAX_QUBITS {
        return Err(Error::TooManyQubits(total));
    }
    if state.len() != 1usize << total {
        return Err(Error::DimensionMismatch { expected: 1 << total, got: state.len() });
    }
    let norm_sq: f64 = state.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-9 {
        log::warn!("simulating an unnormalized state (|amp|^2 sums to {norm_sq}); proceeding");
    }
    for gate in c.gates() {
        match gate {
            Gate::H { target } => apply_single(state, *target, &super::h_matrix()),
            Gate::X { target } => apply_x(state, *target),
            Gate::Phase { target, theta } => apply_phase(state, *target, *theta),
            Gate::Ry { target, theta } => apply_single(state, *target, &super::ry_matrix(*theta)),
            Gate::Rz { target, theta } => apply_single(state, *target, &super::rz_matrix(*theta)),
            Gate::U2 { target, matrix } => apply_single(state, *target, matrix),
            Gate::Cnot { control, target } => apply_cnot(state, *control, *target),
            Gate::ControlledU2 { control, target, matrix } => {
                apply_controlled_single(state, *control, *target, matrix)
            }
            Gate::MultiControlledX { controls, target } => apply_mcx(state, controls, *target),
        }
    }
    Ok(())
}

/// Apply the circuit to a copy of `input` and return the output state.
pub fn simulate(c: &Circuit, input: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut state = input.to_vec();
    simulate_in_place(c, &mut state)?;
    Ok(state)
}

/// The encoded block `(<0|^a (x) I_n) U (|0>^a (x) I_n)` of a circuit over
/// `n + a` qubits, ancillas most significant: column `j` is the leading
/// `2^n` amplitudes of `U |0>^a |j>`.
pub fn extract_block(c: &Circuit, system: usize, ancillas: usize) -> Result<DMatrix<Complex64>> {
    let total = c.total_qubits();
    if total != system + ancillas {
        return Err(Error::DimensionMismatch { expected: total, got: system + ancillas });
    }
    let n = 1usize << system;
    let mut block = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let out = simulate(c, &basis_state(total, j))?;
        for i in 0..n {
            block[(i, j)] = out[i];
        }
    }
    Ok(block)
}

/// Full unitary matrix of a circuit. Dense: only for small-qubit tests.
pub fn circuit_matrix(c: &Circuit) -> Result<DMatrix<Complex64>> {
    extract_block(c, c.total_qubits(), 0)
}
