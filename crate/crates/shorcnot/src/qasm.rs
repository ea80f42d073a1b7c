//! OpenQASM 2.0 export and import for {X, CNOT, Toffoli} circuits.
//!
//! Register layout and block annotations travel in structured comments so
//! that an exported circuit reads back identically:
//!
//! ```text
//! // register x 0 4 input 0
//! // block add 12 40 -
//! ```

use std::fmt::Write as _;

use shorcnot_core::{Block, Circuit, Gate, Register, RegisterLayout, Role};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing qreg declaration")]
    MissingQreg,
    #[error(transparent)]
    Circuit(#[from] shorcnot_core::Error),
}

pub fn to_qasm(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for r in c.layout().entries() {
        let _ = writeln!(
            out,
            "// register {} {} {} {} {}",
            r.name,
            r.start,
            r.len,
            r.role.as_str(),
            r.initial
        );
    }
    for b in c.blocks() {
        let width = b.binding_width.map_or("-".to_string(), |w| w.to_string());
        let _ = writeln!(
            out,
            "// block {} {} {} {}",
            b.label, b.gates.start, b.gates.end, width
        );
    }
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits());
    for g in c.gates() {
        let _ = match *g {
            Gate::X(t) => writeln!(out, "x q[{t}];"),
            Gate::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::Ccx {
                controls: [a, b],
                target,
            } => writeln!(out, "ccx q[{a}],q[{b}],q[{target}];"),
        };
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, s: Option<&str>, what: &str) -> Result<T, ParseError> {
    s.and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("bad {what}")))
}

fn qubit(line: usize, s: &str) -> Result<usize, ParseError> {
    s.trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .and_then(|i| i.parse().ok())
        .ok_or_else(|| syntax(line, format!("bad operand `{s}`")))
}

/// Parses the subset written by [`to_qasm`]. Without register comments the
/// whole qubit array becomes one ancilla register `q`.
pub fn from_qasm(text: &str) -> Result<Circuit, ParseError> {
    let mut registers = Vec::new();
    let mut blocks = Vec::new();
    let mut gates = Vec::new();
    let mut num_qubits = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if let Some(c) = s.strip_prefix("//") {
            let mut f = c.split_whitespace();
            match f.next() {
                Some("register") => {
                    let name: String = field(line, f.next(), "register name")?;
                    let start = field(line, f.next(), "register start")?;
                    let len = field(line, f.next(), "register length")?;
                    let role = f
                        .next()
                        .and_then(Role::parse)
                        .ok_or_else(|| syntax(line, "bad register role"))?;
                    let initial = field(line, f.next(), "register initial value")?;
                    registers.push(Register {
                        name,
                        start,
                        len,
                        role,
                        initial,
                    });
                }
                Some("block") => {
                    let label: String = field(line, f.next(), "block label")?;
                    let start: usize = field(line, f.next(), "block start")?;
                    let end: usize = field(line, f.next(), "block end")?;
                    let binding_width = match f.next() {
                        Some("-") => None,
                        w => Some(field(line, w, "binding width")?),
                    };
                    blocks.push(Block {
                        label,
                        gates: start..end,
                        binding_width,
                    });
                }
                _ => {}
            }
            continue;
        }
        if s.is_empty() || s.starts_with("OPENQASM") || s.starts_with("include") {
            continue;
        }
        let body = s
            .strip_suffix(';')
            .ok_or_else(|| syntax(line, "missing `;`"))?;
        let (op, args) = body
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(line, "missing operands"))?;
        if op == "qreg" {
            let size = args
                .trim()
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| syntax(line, "bad qreg"))?;
            num_qubits = Some(size);
            continue;
        }
        let qs = args
            .split(',')
            .map(|a| qubit(line, a))
            .collect::<Result<Vec<_>, _>>()?;
        let gate = match (op, qs.as_slice()) {
            ("x", &[t]) => Gate::X(t),
            ("cx", &[control, target]) => Gate::Cx { control, target },
            ("ccx", &[a, b, target]) => Gate::Ccx {
                controls: [a, b],
                target,
            },
            _ => return Err(syntax(line, format!("unsupported statement `{body}`"))),
        };
        gates.push(gate);
    }
    let num_qubits = num_qubits.ok_or(ParseError::MissingQreg)?;
    if registers.is_empty() {
        registers.push(Register {
            name: "q".into(),
            start: 0,
            len: num_qubits,
            role: Role::Ancilla,
            initial: 0,
        });
    }
    let layout = RegisterLayout::new(registers, num_qubits)?;
    Ok(Circuit::new(num_qubits, gates, layout)?.with_blocks(blocks)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shorcnot_core::arith::build_modular_adder;

    #[test]
    fn round_trip_keeps_everything() {
        let c = build_modular_adder(3, 5, true).unwrap();
        let back = from_qasm(&to_qasm(&c)).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.normalized_cnot_count(), c.normalized_cnot_count());
    }

    #[test]
    fn plain_qasm_without_comments() {
        let c =
            from_qasm("OPENQASM 2.0;\nqreg q[3];\nx q[0];\ncx q[0],q[1];\nccx q[0],q[1],q[2];\n")
                .unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.cnot_count(), 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(from_qasm("x q[0];"), Err(ParseError::MissingQreg)));
        assert!(from_qasm("qreg q[2];\nh q[0];").is_err());
        assert!(from_qasm("qreg q[2];\ncx q[0],q[5];").is_err());
        assert!(from_qasm("qreg q[2];\nx q[0]").is_err());
    }
}
