//! OpenQASM 3 export.
//!
//! Gate names: `h`, `x`, `p`, `ry`, `rz`, `cx`, `ccx`; arbitrary 2x2
//! unitaries become `u(theta, phi, lambda)` plus a `gphase` for their
//! global phase. Multi-controlled NOTs with more than two controls are
//! exported decomposed through a Toffoli AND-tree over a dedicated
//! ancilla register appended to the file. Gate order and float formatting
//! are deterministic, so equal circuits export byte-identically.

use std::fmt::Write;

use num_complex::Complex64;

use super::subcircuits::emit_mcx;
use super::{Circuit, Gate, Matrix2};

/// `u(theta, phi, lambda)` parameters plus global phase for a 2x2 unitary:
/// `m = e^{i gamma} U(theta, phi, lambda)`.
fn u_params(m: &Matrix2) -> (f64, f64, f64, f64) {
    let n00 = m[0][0].norm();
    let n10 = m[1][0].norm();
    let theta = 2.0 * n10.atan2(n00);
    if n00 > 1e-300 {
        let gamma = m[0][0].arg();
        let phi = if n10 > 1e-300 { m[1][0].arg() - gamma } else { 0.0 };
        let lambda = if n10 > 1e-300 {
            (-m[0][1]).arg() - gamma
        } else {
            m[1][1].arg() - gamma - phi
        };
        (theta, phi, lambda, gamma)
    } else {
        // theta = pi column
        let phi = m[1][0].arg();
        let lambda = (-m[0][1]).arg();
        (theta, phi, lambda, 0.0)
    }
}

fn fmt_f(x: f64) -> String {
    // canonical zero avoids "-0" flip-flopping in output
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.17e}")
}

/// Render a circuit as an OpenQASM 3 program.
pub fn to_qasm3(c: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OPENQASM 3.0;");
    let _ = writeln!(out, "include \"stdgates.inc\";");
    let total = c.total_qubits();
    let _ = writeln!(out, "qubit[{total}] q;");

    // ancillas for exporting multi-controlled NOTs decomposed
    let extra = c
        .gates()
        .iter()
        .filter_map(|g| match g {
            Gate::MultiControlledX { controls, .. } if controls.len() > 2 => {
                Some(controls.len() - 2)
            }
            _ => None,
        })
        .max()
        .unwrap_or(0);
    if extra > 0 {
        let _ = writeln!(out, "qubit[{extra}] mcx_anc;");
    }

    for r in c.layout().registers() {
        let _ = writeln!(
            out,
            "// register {}: q[{}..{}] ({})",
            r.name,
            r.start,
            r.start + r.size - 1,
            r.role.name()
        );
    }

    for gate in c.gates() {
        write_gate(&mut out, gate, total);
    }
    out
}

fn write_u(out: &mut String, target_name: &str, m: &Matrix2) {
    let (theta, phi, lambda, gamma) = u_params(m);
    if gamma.abs() > 1e-15 {
        let _ = writeln!(out, "gphase({});", fmt_f(gamma));
    }
    let _ = writeln!(
        out,
        "u({}, {}, {}) {};",
        fmt_f(theta),
        fmt_f(phi),
        fmt_f(lambda),
        target_name
    );
}

fn write_gate(out: &mut String, gate: &Gate, total: usize) {
    match gate {
        Gate::H { target } => {
            let _ = writeln!(out, "h q[{target}];");
        }
        Gate::X { target } => {
            let _ = writeln!(out, "x q[{target}];");
        }
        Gate::Phase { target, theta } => {
            let _ = writeln!(out, "p({}) q[{target}];", fmt_f(*theta));
        }
        Gate::Ry { target, theta } => {
            let _ = writeln!(out, "ry({}) q[{target}];", fmt_f(*theta));
        }
        Gate::Rz { target, theta } => {
            let _ = writeln!(out, "rz({}) q[{target}];", fmt_f(*theta));
        }
        Gate::U2 { target, matrix } => {
            write_u(out, &format!("q[{target}]"), matrix);
        }
        Gate::Cnot { control, target } => {
            let _ = writeln!(out, "cx q[{control}], q[{target}];");
        }
        Gate::ControlledU2 { control, target, matrix } => {
            let (theta, phi, lambda, gamma) = u_params(matrix);
            if gamma.abs() > 1e-15 {
                let _ = writeln!(out, "p({}) q[{control}];", fmt_f(gamma));
            }
            let _ = writeln!(
                out,
                "ctrl @ u({}, {}, {}) q[{control}], q[{target}];",
                fmt_f(theta),
                fmt_f(phi),
                fmt_f(lambda)
            );
        }
        Gate::MultiControlledX { controls, target } => match controls.len() {
            1 => {
                let _ = writeln!(out, "cx q[{}], q[{target}];", controls[0]);
            }
            2 => {
                let _ = writeln!(out, "ccx q[{}], q[{}], q[{target}];", controls[0], controls[1]);
            }
            c => {
                // AND-tree over the appended ancilla register; the tree
                // only emits Toffolis, so recursion stops here.
                let borrowed: Vec<usize> = (total..total + c - 2).collect();
                let mut gates = Vec::new();
                emit_mcx(&mut gates, controls, *target, &borrowed)
                    .expect("export ancillas sized to the largest gate");
                for g in gates {
                    match g {
                        Gate::MultiControlledX { controls: cs, target: t } => {
                            let _ = writeln!(
                                out,
                                "ccx {}, {}, {};",
                                qname(cs[0], total),
                                qname(cs[1], total),
                                qname(t, total)
                            );
                        }
                        other => write_gate(out, &other, total),
                    }
                }
            }
        },
    }
}

fn qname(idx: usize, total: usize) -> String {
    if idx < total {
        format!("q[{idx}]")
    } else {
        format!("mcx_anc[{}]", idx - total)
    }
}

#[allow(dead_code)]
fn reconstruct_u(theta: f64, phi: f64, lambda: f64, gamma: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let g = Complex64::from_polar(1.0, gamma);
    [
        [g * c, -g * Complex64::from_polar(s, lambda)],
        [g * Complex64::from_polar(s, phi), g * Complex64::from_polar(c, phi + lambda)],
    ]
}
