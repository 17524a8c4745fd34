//! JSON report types. Field order is declaration order and every
//! collection is a `Vec`, so serialization is byte-stable for equal
//! inputs; see docs/report.schema.json for the published schema.

use num_complex::Complex64;
use qlt::transform::ResourceReport;
use serde::Serialize;

pub fn complex_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Debug, Serialize)]
pub struct ProblemReport {
    pub qubits: usize,
    pub kind: String,
    pub eps: f64,
    pub x: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct PlanReport {
    pub truncation_k: usize,
    pub truncation_bound: f64,
    pub product: f64,
    pub term_count: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub per_factor_eps: f64,
    pub clamped_eigenvalues: usize,
    pub forced_k: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ResourcesReport {
    pub size: usize,
    pub depth: usize,
    pub scaffold_size: usize,
    pub scaffold_depth: usize,
    pub total_qubits: usize,
    pub system_qubits: usize,
    pub ancilla_qubits: usize,
    pub registers: Vec<RegisterReport>,
    pub controlled_diagonal_invocations: usize,
    pub qasm_gate_count: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RegisterReport {
    pub name: String,
    pub role: String,
    pub size: usize,
}

impl ResourcesReport {
    pub fn from_lib(r: &ResourceReport, qasm_gate_count: Option<usize>) -> Self {
        ResourcesReport {
            size: r.size,
            depth: r.depth,
            scaffold_size: r.scaffold_size,
            scaffold_depth: r.scaffold_depth,
            total_qubits: r.total_qubits,
            system_qubits: r.system_qubits,
            ancilla_qubits: r.ancilla_qubits,
            registers: r
                .registers
                .iter()
                .map(|(name, role, size)| RegisterReport {
                    name: name.clone(),
                    role: role.clone(),
                    size: *size,
                })
                .collect(),
            controlled_diagonal_invocations: r.controlled_diagonal_invocations,
            qasm_gate_count,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SynthesizeReport {
    pub command: String,
    pub seed: u64,
    pub problem: ProblemReport,
    pub plan: PlanReport,
    pub resources: ResourcesReport,
    pub qasm_file: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub seed: u64,
    pub problem: ProblemReport,
    pub plan: PlanReport,
    pub resources: ResourcesReport,
    pub measured_error: f64,
    pub pass: bool,
    pub success_probability: f64,
    pub verify_state: String,
}

#[derive(Debug, Serialize)]
pub struct ZtransformDemoReport {
    pub command: String,
    pub classical_qubits: usize,
    pub classical_dft_deviation: f64,
    pub quantum_qubits: usize,
    pub eps: f64,
    pub truncation_k: usize,
    pub alpha: f64,
    pub success_probability: f64,
    pub state_error: f64,
    pub state_error_budget: f64,
    pub resources: ResourcesReport,
}

#[derive(Debug, Serialize)]
pub struct ContinuousLaplaceDemoReport {
    pub command: String,
    pub qubits: usize,
    pub eps: f64,
    pub horizon: f64,
    pub truncation_bound: f64,
    pub max_truncation_error: f64,
    pub max_discretization_bound: f64,
    pub max_discretization_error: f64,
    pub state_vs_quadrature: f64,
    pub qlt_budget: f64,
    pub state_vs_closed_form: f64,
    pub combined_reference_budget: f64,
    pub success_probability: f64,
    pub success_exponent: f64,
    pub grid_hypothesis_ok: bool,
    pub resources: ResourcesReport,
}

#[derive(Debug, Serialize)]
pub struct FourierDemoReport {
    pub command: String,
    pub qubits: usize,
    pub target_eps: f64,
    pub order_m: usize,
    pub eps_m: f64,
    pub smoothness_c: f64,
    pub smoothness_r: f64,
    pub alpha: f64,
    pub measured_error: f64,
    pub selector_qubits: usize,
    pub total_qubits: usize,
    pub size: usize,
    pub depth: usize,
}
