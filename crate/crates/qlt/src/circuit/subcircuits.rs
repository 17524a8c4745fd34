//! Structural sub-circuits: copy fan-out, multi-controlled NOT reduction,
//! parallelized controls and amplitude preparation.

use num_complex::Complex64;

use super::{
    mat_mul, phase_matrix, ry_matrix, rz_matrix, Circuit, Gate, Matrix2, RegisterLayout,
    RegisterRole,
};
use crate::{Error, Result};

/// Number of primitive gates a `c`-controlled NOT is charged in metrics.
pub fn mcx_gate_cost(controls: usize) -> usize {
    if controls <= 2 {
        1
    } else {
        2 * controls - 3
    }
}

/// Fan a control qubit's basis value across targets with a doubling tree
/// of CNOTs: `n_a - 1` gates arranged in `ceil(log2(n_a))` layers, where
/// `n_a = 1 + targets.len()`.
pub(crate) fn emit_copy(gates: &mut Vec<Gate>, source: usize, targets: &[usize]) {
    let mut holders: Vec<usize> = vec![source];
    let mut next = targets.iter();
    loop {
        let mut emitted = Vec::new();
        for &h in &holders {
            match next.next() {
                Some(&t) => {
                    gates.push(Gate::Cnot { control: h, target: t });
                    emitted.push(t);
                }
                None => {
                    holders.extend(emitted);
                    return;
                }
            }
        }
        holders.extend(emitted);
    }
}

/// Copy circuit over `n_a` flat qubits: qubit 0 is the source, qubits
/// `1..n_a` the zeroed targets. On `(a|0> + b|1>) (x) |0..0>` it produces
/// `a|0..0> + b|1..1>`.
pub fn copy_circuit(n_a: usize) -> Result<Circuit> {
    if n_a == 0 {
        return Err(Error::EmptyCopy);
    }
    let mut c = Circuit::flat(n_a);
    let targets: Vec<usize> = (1..n_a).collect();
    let mut gates = Vec::new();
    emit_copy(&mut gates, 0, &targets);
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

/// Emit an exact `controls`-controlled NOT.
///
/// One and two controls are primitive (CNOT / Toffoli). Above that, a
/// balanced AND-tree of Toffolis folds the first `c - 1` controls into
/// zeroed borrowed ancillas, a final Toffoli hits the target and the tree
/// is uncomputed; this needs `c - 2` borrowed ancillas and restores them.
pub(crate) fn emit_mcx(
    gates: &mut Vec<Gate>,
    controls: &[usize],
    target: usize,
    borrowed: &[usize],
) -> Result<()> {
    match controls.len() {
        0 => gates.push(Gate::X { target }),
        1 => gates.push(Gate::Cnot { control: controls[0], target }),
        2 => gates.push(Gate::MultiControlledX { controls: controls.to_vec(), target }),
        c => {
            let needed = c - 2;
            if borrowed.len() < needed {
                return Err(Error::InsufficientAncillas {
                    controls: c,
                    needed,
                    got: borrowed.len(),
                });
            }
            let mut tree = Vec::new();
            let mut level: Vec<usize> = controls[..c - 1].to_vec();
            let mut anc = borrowed.iter();
            while level.len() > 1 {
                let mut up = Vec::new();
                for pair in level.chunks(2) {
                    if pair.len() == 2 {
                        let a = *anc.next().expect("ancilla budget checked above");
                        tree.push(Gate::MultiControlledX {
                            controls: vec![pair[0], pair[1]],
                            target: a,
                        });
                        up.push(a);
                    } else {
                        up.push(pair[0]);
                    }
                }
                level = up;
            }
            gates.extend(tree.iter().cloned());
            gates.push(Gate::MultiControlledX {
                controls: vec![controls[c - 1], level[0]],
                target,
            });
            gates.extend(tree.into_iter().rev());
        }
    }
    Ok(())
}

/// Like [`emit_mcx`], but when the borrowed ancillas cannot host the
/// AND-tree the gate is emitted as a bare `MultiControlledX` primitive
/// instead of failing. The simulator applies the primitive exactly and
/// the metrics still charge its decomposed cost.
pub(crate) fn emit_mcx_lenient(
    gates: &mut Vec<Gate>,
    controls: &[usize],
    target: usize,
    borrowed: &[usize],
) {
    if controls.len() > 2 && borrowed.len() < controls.len() - 2 {
        gates.push(Gate::MultiControlledX { controls: controls.to_vec(), target });
    } else {
        emit_mcx(gates, controls, target, borrowed).expect("budget checked");
    }
}

/// Standalone multi-controlled NOT circuit over `total` flat qubits.
pub fn decompose_mcx(
    controls: &[usize],
    target: usize,
    borrowed: &[usize],
    total: usize,
) -> Result<Circuit> {
    let mut c = Circuit::flat(total);
    let mut gates = Vec::new();
    emit_mcx(&mut gates, controls, target, borrowed)?;
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

/// ZYZ Euler angles `(b, g, d)` of a determinant-one 2x2 unitary:
/// `w = Rz(b) Ry(g) Rz(d)`.
pub fn zyz_angles(w: &Matrix2) -> (f64, f64, f64) {
    let gamma = 2.0 * w[1][0].norm().atan2(w[0][0].norm());
    let (sum, diff) = if w[0][0].norm() > 1e-300 {
        let sum = -2.0 * w[0][0].arg();
        let diff = if w[1][0].norm() > 1e-300 { 2.0 * w[1][0].arg() } else { 0.0 };
        (sum, diff)
    } else {
        (0.0, 2.0 * w[1][0].arg())
    };
    ((sum + diff) / 2.0, gamma, (sum - diff) / 2.0)
}

fn is_identity(m: &Matrix2, tol: f64) -> bool {
    (m[0][0] - Complex64::new(1.0, 0.0)).norm() <= tol
        && (m[1][1] - Complex64::new(1.0, 0.0)).norm() <= tol
        && m[0][1].norm() <= tol
        && m[1][0].norm() <= tol
}

/// Emit an exact multi-controlled single-qubit gate for `w` with unit
/// determinant. A single control is primitive; more controls use the
/// `A X B X C` conjugation with two multi-controlled NOTs.
pub(crate) fn emit_controlled_su2(
    gates: &mut Vec<Gate>,
    controls: &[usize],
    target: usize,
    w: &Matrix2,
    borrowed: &[usize],
) -> Result<()> {
    debug_assert!(
        (w[0][0] * w[1][1] - w[0][1] * w[1][0] - Complex64::new(1.0, 0.0)).norm() < 1e-9,
        "controlled_su2 requires a determinant-one matrix"
    );
    match controls.len() {
        0 => gates.push(Gate::U2 { target, matrix: *w }),
        1 => gates.push(Gate::ControlledU2 { control: controls[0], target, matrix: *w }),
        _ => {
            if is_identity(w, 1e-15) {
                return Ok(());
            }
            let (b, g, d) = zyz_angles(w);
            let a_mat = mat_mul(&rz_matrix(b), &ry_matrix(g / 2.0));
            let b_mat = mat_mul(&ry_matrix(-g / 2.0), &rz_matrix(-(d + b) / 2.0));
            let c_mat = rz_matrix((d - b) / 2.0);
            gates.push(Gate::U2 { target, matrix: c_mat });
            emit_mcx_lenient(gates, controls, target, borrowed);
            gates.push(Gate::U2 { target, matrix: b_mat });
            emit_mcx_lenient(gates, controls, target, borrowed);
            gates.push(Gate::U2 { target, matrix: a_mat });
        }
    }
    Ok(())
}

/// Multi-controlled single-qubit gate as a standalone circuit.
pub fn controlled_su2(
    controls: &[usize],
    target: usize,
    w: &Matrix2,
    borrowed: &[usize],
    total: usize,
) -> Result<Circuit> {
    let mut c = Circuit::flat(total);
    let mut gates = Vec::new();
    emit_controlled_su2(&mut gates, controls, target, w, borrowed)?;
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

/// One-controlled version of a single IR gate, expressed in the IR again.
///
/// A controlled `ControlledU2` splits off the determinant phase of its
/// matrix as a controlled phase between the two controls, then conjugates
/// the remaining special unitary with two Toffolis.
pub fn controlled_gate(gate: &Gate, control: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    match gate {
        Gate::H { target } => {
            out.push(Gate::ControlledU2 { control, target: *target, matrix: super::h_matrix() })
        }
        Gate::X { target } => out.push(Gate::Cnot { control, target: *target }),
        Gate::Phase { target, theta } => out.push(Gate::ControlledU2 {
            control,
            target: *target,
            matrix: phase_matrix(*theta),
        }),
        Gate::Ry { target, theta } => {
            out.push(Gate::ControlledU2 { control, target: *target, matrix: ry_matrix(*theta) })
        }
        Gate::Rz { target, theta } => {
            out.push(Gate::ControlledU2 { control, target: *target, matrix: rz_matrix(*theta) })
        }
        Gate::U2 { target, matrix } => {
            out.push(Gate::ControlledU2 { control, target: *target, matrix: *matrix })
        }
        Gate::Cnot { control: c0, target } => out.push(Gate::MultiControlledX {
            controls: vec![control, *c0],
            target: *target,
        }),
        Gate::ControlledU2 { control: c0, target, matrix } => {
            let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
            let phi = det.arg() / 2.0;
            let scale = Complex64::from_polar(1.0, -phi);
            let w = [
                [matrix[0][0] * scale, matrix[0][1] * scale],
                [matrix[1][0] * scale, matrix[1][1] * scale],
            ];
            if phi.abs() > 1e-15 {
                out.push(Gate::ControlledU2 {
                    control,
                    target: *c0,
                    matrix: phase_matrix(phi),
                });
            }
            emit_controlled_su2(&mut out, &[control, *c0], *target, &w, &[])
                .expect("two controls never need borrowed ancillas");
        }
        Gate::MultiControlledX { controls, target } => {
            let mut cs = controls.clone();
            cs.push(control);
            out.push(Gate::MultiControlledX { controls: cs, target: *target });
        }
    }
    out
}

/// Emit `C_control(u)` where `u`'s qubit `q` maps to `map[q]`.
///
/// With copy ancillas available, the control value is fanned across them
/// once, each scheduling layer of `u` is split into chunks of at most
/// `copies.len()` gates controlled by distinct copies, and the fan is
/// undone. With no copies the gates are controlled one by one straight
/// from the control qubit (the single-controller limit of the same
/// construction, with an empty fan).
pub(crate) fn emit_parallel_controlled(
    gates: &mut Vec<Gate>,
    u: &Circuit,
    map: &[usize],
    control: usize,
    copies: &[usize],
) -> Result<()> {
    let layers = u.layers();
    let all = u.gates();
    if copies.is_empty() {
        for layer in &layers {
            for &gi in layer {
                gates.extend(controlled_gate(&all[gi].remap(map), control));
            }
        }
        return Ok(());
    }
    emit_copy(gates, control, copies);
    for layer in &layers {
        for chunk in layer.chunks(copies.len()) {
            for (slot, &gi) in chunk.iter().enumerate() {
                gates.extend(controlled_gate(&all[gi].remap(map), copies[slot]));
            }
        }
    }
    let mut fan = Vec::new();
    emit_copy(&mut fan, control, copies);
    gates.extend(fan.into_iter().rev());
    Ok(())
}

/// Standalone controlled-`u`: `u` keeps its qubit indices `0..n`, the
/// control and copies live above them in a flat layout.
pub fn parallel_controlled(u: &Circuit, control: usize, copies: &[usize]) -> Result<Circuit> {
    let n = u.total_qubits();
    if control < n || copies.iter().any(|&a| a < n || a == control) {
        return Err(Error::QubitOutOfRange { index: control, total: n });
    }
    let total = 1 + copies.iter().copied().max().unwrap_or(0).max(control);
    let mut c = Circuit::flat(total);
    let map: Vec<usize> = (0..n).collect();
    let mut gates = Vec::new();
    emit_parallel_controlled(&mut gates, u, &map, control, copies)?;
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

/// Prepare `sum_k mu_k |k>` from `|0..0>` for nonnegative real amplitudes.
///
/// Classic bisection: one multiplexed Ry per qubit, most significant
/// first, each multiplexor expanded recursively into Ry/CNOT pairs.
/// All-zero angle branches are pruned, so loading `(1,0,...,0)` costs
/// nothing.
pub fn prepare_state(mu: &[f64]) -> Result<Circuit> {
    let len = mu.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadAmplitudeCount {
            got: len,
            expected: len.next_power_of_two().max(1),
            qubits: len.next_power_of_two().trailing_zeros() as usize,
        });
    }
    let b = len.trailing_zeros() as usize;
    let norm_sq: f64 = mu.iter().map(|m| m * m).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(norm_sq));
    }
    if mu.iter().any(|&m| m < 0.0 || !m.is_finite()) {
        return Err(Error::Unnormalized(f64::NAN));
    }
    let mut c = Circuit::new(RegisterLayout::new(vec![("prep", RegisterRole::Work, b)]));
    if b == 0 {
        return Ok(c);
    }
    let mut gates = Vec::new();
    for s in 0..b {
        let target = b - 1 - s;
        // controls ordered least to most significant angle-index bit
        let controls: Vec<usize> = (b - s..b).collect();
        let mut angles = vec![0.0f64; 1 << s];
        for (j, angle) in angles.iter_mut().enumerate() {
            let prefix = j << (b - s);
            let half = 1usize << (b - 1 - s);
            let mut lo = 0.0f64;
            let mut hi = 0.0f64;
            for idx in 0..half {
                lo += mu[prefix + idx] * mu[prefix + idx];
                hi += mu[prefix + half + idx] * mu[prefix + half + idx];
            }
            *angle = 2.0 * hi.sqrt().atan2(lo.sqrt());
        }
        emit_mux_ry(&mut gates, target, &controls, &angles);
    }
    for g in gates {
        c.push(g)?;
    }
    Ok(c)
}

fn emit_mux_ry(gates: &mut Vec<Gate>, target: usize, controls: &[usize], angles: &[f64]) {
    if angles.iter().all(|a| a.abs() < 1e-14) {
        return;
    }
    match controls.split_last() {
        None => gates.push(Gate::Ry { target, theta: angles[0] }),
        Some((&msc, rest)) => {
            let half = angles.len() / 2;
            let sum: Vec<f64> =
                (0..half).map(|j| (angles[j] + angles[half + j]) / 2.0).collect();
            let diff: Vec<f64> =
                (0..half).map(|j| (angles[j] - angles[half + j]) / 2.0).collect();
            emit_mux_ry(gates, target, rest, &sum);
            if diff.iter().any(|a| a.abs() >= 1e-14) {
                gates.push(Gate::Cnot { control: msc, target });
                emit_mux_ry(gates, target, rest, &diff);
                gates.push(Gate::Cnot { control: msc, target });
            }
        }
    }
}
