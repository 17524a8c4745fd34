//! Gate-level circuit IR: register layouts, gates, metrics and composition.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - basis states are little-endian: qubit `q` is bit `q` of the state
//!   index, so qubit 0 is least significant;
//! - ancilla registers sit at the most significant indices, which makes
//!   the all-ancillas-zero block of any unitary the leading `2^n x 2^n`
//!   sub-block of its matrix.

mod qasm;
mod simulate;
mod subcircuits;

pub use qasm::to_qasm3;
pub use simulate::{basis_state, circuit_matrix, extract_block, simulate, simulate_in_place};
pub use subcircuits::{
    controlled_gate, controlled_su2, copy_circuit, decompose_mcx, mcx_gate_cost,
    parallel_controlled, prepare_state, zyz_angles,
};
pub(crate) use subcircuits::{emit_controlled_su2, emit_mcx_lenient, emit_parallel_controlled};

use num_complex::Complex64;

use crate::{Error, Result};

/// A 2x2 complex matrix in row-major order.
pub type Matrix2 = [[Complex64; 2]; 2];

pub const ID2: Matrix2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

pub fn h_matrix() -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ]
}

pub fn phase_matrix(theta: f64) -> Matrix2 {
    [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta)],
    ]
}

pub fn ry_matrix(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn rz_matrix(theta: f64) -> Matrix2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn mat_adjoint(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn is_unitary(m: &Matrix2) -> bool {
    let p = mat_mul(&mat_adjoint(m), m);
    let mut dev = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[i][j] - Complex64::new(want, 0.0)).norm());
        }
    }
    dev <= 1e-12
}

/// Primitive gate set. Single- and two-qubit gates plus a multi-controlled
/// NOT that the simulator applies exactly and the metrics count through its
/// Toffoli-tree decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H { target: usize },
    X { target: usize },
    Phase { target: usize, theta: f64 },
    Ry { target: usize, theta: f64 },
    Rz { target: usize, theta: f64 },
    U2 { target: usize, matrix: Matrix2 },
    Cnot { control: usize, target: usize },
    ControlledU2 { control: usize, target: usize, matrix: Matrix2 },
    MultiControlledX { controls: Vec<usize>, target: usize },
}

impl Gate {
    /// Every qubit the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { target }
            | Gate::X { target }
            | Gate::Phase { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::U2 { target, .. } => vec![*target],
            Gate::Cnot { control, target } | Gate::ControlledU2 { control, target, .. } => {
                vec![*control, *target]
            }
            Gate::MultiControlledX { controls, target } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
        }
    }

    fn validate(&self, total: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= total {
                return Err(Error::QubitOutOfRange { index: q, total });
            }
        }
        match self {
            Gate::Cnot { control, target } | Gate::ControlledU2 { control, target, .. } => {
                if control == target {
                    return Err(Error::ControlIsTarget(*target));
                }
            }
            Gate::MultiControlledX { controls, target } => {
                let mut seen = controls.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != controls.len() || controls.contains(target) {
                    return Err(Error::ControlIsTarget(*target));
                }
            }
            _ => {}
        }
        match self {
            Gate::U2 { matrix, .. } | Gate::ControlledU2 { matrix, .. } => {
                if !is_unitary(matrix) {
                    return Err(Error::NonUnitaryGate);
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of primitive gates the metrics charge for this gate: 1 for
    /// everything up to the Toffoli, `2c - 3` Toffolis for a NOT with
    /// `c > 2` controls (its balanced AND-tree decomposition).
    pub fn counted_size(&self) -> usize {
        match self {
            Gate::MultiControlledX { controls, .. } if controls.len() > 2 => {
                2 * controls.len() - 3
            }
            _ => 1,
        }
    }

    /// Inverse gate.
    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Phase { target, theta } => Gate::Phase { target: *target, theta: -theta },
            Gate::Ry { target, theta } => Gate::Ry { target: *target, theta: -theta },
            Gate::Rz { target, theta } => Gate::Rz { target: *target, theta: -theta },
            Gate::U2 { target, matrix } => {
                Gate::U2 { target: *target, matrix: mat_adjoint(matrix) }
            }
            Gate::ControlledU2 { control, target, matrix } => Gate::ControlledU2 {
                control: *control,
                target: *target,
                matrix: mat_adjoint(matrix),
            },
            g => g.clone(),
        }
    }

    /// The same gate acting through a qubit relabeling.
    pub fn remap(&self, map: &[usize]) -> Gate {
        let m = |q: usize| map[q];
        match self {
            Gate::H { target } => Gate::H { target: m(*target) },
            Gate::X { target } => Gate::X { target: m(*target) },
            Gate::Phase { target, theta } => Gate::Phase { target: m(*target), theta: *theta },
            Gate::Ry { target, theta } => Gate::Ry { target: m(*target), theta: *theta },
            Gate::Rz { target, theta } => Gate::Rz { target: m(*target), theta: *theta },
            Gate::U2 { target, matrix } => Gate::U2 { target: m(*target), matrix: *matrix },
            Gate::Cnot { control, target } => {
                Gate::Cnot { control: m(*control), target: m(*target) }
            }
            Gate::ControlledU2 { control, target, matrix } => Gate::ControlledU2 {
                control: m(*control),
                target: m(*target),
                matrix: *matrix,
            },
            Gate::MultiControlledX { controls, target } => Gate::MultiControlledX {
                controls: controls.iter().map(|&c| m(c)).collect(),
                target: m(*target),
            },
        }
    }
}

/// Role a register plays in a block-encoding layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterRole {
    /// The data register the encoded operator acts on.
    System,
    /// CNOT-fan ancillas of the element-wise product construction.
    Elementwise,
    /// Per-factor block-encoding ancillas of the diagonal operators.
    BlockAncilla,
    /// Single ancilla that receives the reduced multi-control.
    ControlAncilla,
    /// Copies of the control ancilla used to parallelize controls.
    ParallelCopy,
    /// Index register of the linear combination of unitaries.
    Selector,
    /// Anything else.
    Work,
}

impl RegisterRole {
    pub fn name(&self) -> &'static str {
        match self {
            RegisterRole::System => "system",
            RegisterRole::Elementwise => "elementwise",
            RegisterRole::BlockAncilla => "block-ancilla",
            RegisterRole::ControlAncilla => "control-ancilla",
            RegisterRole::ParallelCopy => "parallel-copy",
            RegisterRole::Selector => "selector",
            RegisterRole::Work => "work",
        }
    }
}

/// One named, contiguous qubit range.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    pub name: String,
    pub role: RegisterRole,
    pub start: usize,
    pub size: usize,
}

impl Register {
    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.size
    }
}

/// Disjoint registers covering `0..total`, allocated in declaration order
/// from the least significant qubit up.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    pub fn new(specs: Vec<(&str, RegisterRole, usize)>) -> Self {
        let mut registers = Vec::with_capacity(specs.len());
        let mut start = 0;
        for (name, role, size) in specs {
            if size == 0 {
                continue;
            }
            registers.push(Register { name: name.to_string(), role, start, size });
            start += size;
        }
        RegisterLayout { registers, total: start }
    }

    /// A single anonymous register of `n` qubits.
    pub fn flat(n: usize) -> Self {
        RegisterLayout::new(vec![("q", RegisterRole::Work, n)])
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn find(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }
}

/// Size and depth of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    /// Primitive gate count, multi-controlled NOTs charged decomposed.
    pub size: usize,
    /// Number of layers under greedy earliest-slot scheduling, where two
    /// gates conflict iff they share any qubit.
    pub depth: usize,
}

/// An ordered gate sequence over a declared register layout.
#[derive(Debug, Clone)]
pub struct Circuit {
    gates: Vec<Gate>,
    layout: RegisterLayout,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Circuit { gates: Vec::new(), layout }
    }

    pub fn flat(n: usize) -> Self {
        Circuit::new(RegisterLayout::flat(n))
    }

    pub fn total_qubits(&self) -> usize {
        self.layout.total()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.layout.total())?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append `other`, relabeling its qubit `q` to `map[q]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<()> {
        if map.len() < other.total_qubits() {
            return Err(Error::DimensionMismatch {
                expected: other.total_qubits(),
                got: map.len(),
            });
        }
        for g in &other.gates {
            self.push(g.remap(map))?;
        }
        Ok(())
    }

    /// Append `other` on the same qubit indices.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        let map: Vec<usize> = (0..other.total_qubits()).collect();
        self.append_mapped(other, &map)
    }

    /// The inverse circuit: adjoint gates in reverse order.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            layout: self.layout.clone(),
        }
    }

    /// Greedy earliest-slot layering. Returns, per layer, the indices of
    /// the gates scheduled there, preserving emission order inside a layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut next_free = vec![0usize; self.layout.total()];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (idx, gate) in self.gates.iter().enumerate() {
            let qs = gate.qubits();
            let slot = qs.iter().map(|&q| next_free[q]).max().unwrap_or(0);
            if slot == layers.len() {
                layers.push(Vec::new());
            }
            layers[slot].push(idx);
            for q in qs {
                next_free[q] = slot + 1;
            }
        }
        layers
    }

    pub fn metrics(&self) -> Metrics {
        let size = self.gates.iter().map(Gate::counted_size).sum();
        let depth = self.layers().len();
        Metrics { size, depth }
    }
}
