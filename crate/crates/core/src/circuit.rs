//! Flat reversible circuits over {X, CNOT, Toffoli}.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// CNOTs charged for one Toffoli (standard Clifford+T network).
pub const TOFFOLI_CNOTS: u64 = 6;

/// A reversible primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Cx { control: usize, target: usize },
    Ccx { controls: [usize; 2], target: usize },
}

impl Gate {
    pub fn target(&self) -> usize {
        match *self {
            Gate::X(t) | Gate::Cx { target: t, .. } | Gate::Ccx { target: t, .. } => t,
        }
    }

    pub fn controls(&self) -> &[usize] {
        match self {
            Gate::X(_) => &[],
            Gate::Cx { control, .. } => core::slice::from_ref(control),
            Gate::Ccx { controls, .. } => controls,
        }
    }

    pub fn cnot_cost(&self) -> u64 {
        match self {
            Gate::X(_) => 0,
            Gate::Cx { .. } => 1,
            Gate::Ccx { .. } => TOFFOLI_CNOTS,
        }
    }

    fn max_qubit(&self) -> usize {
        self.controls()
            .iter()
            .copied()
            .fold(self.target(), usize::max)
    }

    fn check(&self, num_qubits: usize) -> Result<()> {
        let t = self.target();
        for (i, &q) in self.controls().iter().enumerate() {
            if q == t || self.controls()[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        let max = self.max_qubit();
        if max >= num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: max,
                num_qubits,
            });
        }
        Ok(())
    }

    fn remapped(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::X(t) => Gate::X(map[t]),
            Gate::Cx { control, target } => Gate::Cx {
                control: map[control],
                target: map[target],
            },
            Gate::Ccx { controls, target } => Gate::Ccx {
                controls: [map[controls[0]], map[controls[1]]],
                target: map[target],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Input,
    Output,
    Ancilla,
    Flag,
    Control,
    /// Helper qubits a block leaves dirty on purpose (forward Montgomery).
    Junk,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Input => "input",
            Role::Output => "output",
            Role::Ancilla => "ancilla",
            Role::Flag => "flag",
            Role::Control => "control",
            Role::Junk => "junk",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "input" => Role::Input,
            "output" => Role::Output,
            "ancilla" => Role::Ancilla,
            "flag" => Role::Flag,
            "control" => Role::Control,
            "junk" => Role::Junk,
            _ => return None,
        })
    }

    /// Ancillas and flags must come back to their initial value.
    pub fn must_restore(&self) -> bool {
        matches!(self, Role::Ancilla | Role::Flag)
    }
}

/// A named contiguous qubit span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
    pub role: Role,
    /// Value the register holds before the circuit runs.
    pub initial: u64,
}

impl Register {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.range()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    entries: Vec<Register>,
}

impl RegisterLayout {
    /// Builds a layout, checking that spans are disjoint and cover
    /// `[0, num_qubits)`.
    pub fn new(mut entries: Vec<Register>, num_qubits: usize) -> Result<Self> {
        entries.retain(|r| r.len > 0);
        let mut spans: Vec<(usize, usize, &str)> = entries
            .iter()
            .map(|r| (r.start, r.len, r.name.as_str()))
            .collect();
        spans.sort();
        let mut next = 0;
        for (start, len, name) in spans {
            if start != next {
                return Err(Error::Layout(format!(
                    "register `{name}` starts at {start}, expected {next}"
                )));
            }
            next = start + len;
        }
        if next != num_qubits {
            return Err(Error::Layout(format!(
                "registers cover {next} qubits, circuit has {num_qubits}"
            )));
        }
        for (i, r) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.name == r.name) {
                return Err(Error::Layout(format!("duplicate register `{}`", r.name)));
            }
            if r.len < 64 && r.initial >> r.len != 0 {
                return Err(Error::Layout(format!(
                    "initial value of `{}` does not fit",
                    r.name
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Register] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.entries
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }
}

/// A labelled gate range, used to attribute counts to sub-blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub label: String,
    pub gates: Range<usize>,
    /// Set for CNOT fan-outs that bind a classical constant under a control.
    /// The value is the constant's bit width.
    pub binding_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    layout: RegisterLayout,
    blocks: Vec<Block>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>, layout: RegisterLayout) -> Result<Self> {
        for g in &gates {
            g.check(num_qubits)?;
        }
        Ok(Self {
            num_qubits,
            gates,
            layout,
            blocks: Vec::new(),
        })
    }

    /// An empty circuit with a single ancilla register spanning every qubit.
    pub fn empty(num_qubits: usize) -> Self {
        let layout = RegisterLayout::new(
            alloc::vec![Register {
                name: "q".into(),
                start: 0,
                len: num_qubits,
                role: Role::Ancilla,
                initial: 0,
            }],
            num_qubits,
        )
        .expect("single register covers the circuit");
        Self {
            num_qubits,
            gates: Vec::new(),
            layout,
            blocks: Vec::new(),
        }
    }

    /// Attaches block annotations. Each block must lie within the gate
    /// list, and binding blocks may contain only CNOTs.
    pub fn with_blocks(mut self, blocks: Vec<Block>) -> Result<Self> {
        for b in &blocks {
            if b.gates.start > b.gates.end || b.gates.end > self.gates.len() {
                return Err(Error::Layout(format!("block `{}` out of range", b.label)));
            }
            let fanout = self.gates[b.gates.clone()]
                .iter()
                .all(|g| matches!(g, Gate::Cx { .. }));
            if b.binding_width.is_some() && !fanout {
                return Err(Error::Layout(format!(
                    "block `{}` is not a CNOT fan-out",
                    b.label
                )));
            }
        }
        self.blocks = blocks;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// CNOTs plus six per Toffoli; X is free.
    pub fn cnot_count(&self) -> u64 {
        cnot_count(&self.gates)
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::X(_) => counts.x += 1,
                Gate::Cx { .. } => counts.cx += 1,
                Gate::Ccx { .. } => counts.ccx += 1,
            }
        }
        counts
    }

    /// CNOTs spent on controlled constant binding.
    pub fn binding_cnots(&self) -> u64 {
        self.blocks
            .iter()
            .filter(|b| b.binding_width.is_some())
            .map(|b| cnot_count(&self.gates[b.gates.clone()]))
            .sum()
    }

    /// CNOT count with every controlled constant binding charged at the
    /// average rate of half a CNOT per constant bit, so that the figure no
    /// longer depends on the constant's Hamming weight.
    pub fn normalized_cnot_count(&self) -> u64 {
        let widths: usize = self.blocks.iter().filter_map(|b| b.binding_width).sum();
        // Bindings come in bind/unbind pairs of equal width, so this is exact
        // for built circuits.
        self.cnot_count() - self.binding_cnots() + (widths / 2) as u64
    }

    /// Reverses the gate order. Every primitive is self-inverse.
    pub fn invert(&self) -> Circuit {
        let len = self.gates.len();
        let blocks = self
            .blocks
            .iter()
            .rev()
            .map(|b| Block {
                label: b.label.clone(),
                gates: len - b.gates.end..len - b.gates.start,
                binding_width: b.binding_width,
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().copied().collect(),
            layout: self.layout.clone(),
            blocks,
        }
    }

    /// Appends `other` after `self`, sending qubit `i` of `other` to
    /// `remap[i]` (identity when `None`). The qubit space grows when the
    /// remapped indices exceed it; new qubits form an `ext` ancilla register.
    pub fn concat(&self, other: &Circuit, remap: Option<&[usize]>) -> Result<Circuit> {
        let identity: Vec<usize>;
        let map = match remap {
            Some(m) => {
                if m.len() != other.num_qubits {
                    return Err(Error::RemapLength {
                        got: m.len(),
                        expected: other.num_qubits,
                    });
                }
                let mut seen = m.to_vec();
                seen.sort_unstable();
                if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
                    return Err(Error::RemapCollision(w[0]));
                }
                m
            }
            None => {
                identity = (0..other.num_qubits).collect();
                &identity
            }
        };
        let needed = map.iter().map(|&q| q + 1).max().unwrap_or(0);
        let num_qubits = self.num_qubits.max(needed);
        let mut layout = self.layout.clone();
        if num_qubits > self.num_qubits {
            let mut entries = layout.entries.clone();
            entries.push(Register {
                name: "ext".into(),
                start: self.num_qubits,
                len: num_qubits - self.num_qubits,
                role: Role::Ancilla,
                initial: 0,
            });
            layout = RegisterLayout::new(entries, num_qubits)?;
        }
        let offset = self.gates.len();
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().map(|g| g.remapped(map)));
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().map(|b| Block {
            label: b.label.clone(),
            gates: b.gates.start + offset..b.gates.end + offset,
            binding_width: b.binding_width,
        }));
        Ok(Circuit {
            num_qubits,
            gates,
            layout,
            blocks,
        })
    }

    /// Replaces every Toffoli by the standard 6-CNOT Clifford+T network.
    pub fn decompose_toffoli(&self) -> LoweredCircuit {
        let mut ops = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match *g {
                Gate::X(t) => ops.push(LoweredOp::X(t)),
                Gate::Cx { control, target } => ops.push(LoweredOp::Cx { control, target }),
                Gate::Ccx {
                    controls: [a, b],
                    target: t,
                } => {
                    use LoweredOp::*;
                    ops.extend_from_slice(&[
                        H(t),
                        Cx {
                            control: b,
                            target: t,
                        },
                        Tdg(t),
                        Cx {
                            control: a,
                            target: t,
                        },
                        T(t),
                        Cx {
                            control: b,
                            target: t,
                        },
                        Tdg(t),
                        Cx {
                            control: a,
                            target: t,
                        },
                        T(b),
                        T(t),
                        H(t),
                        Cx {
                            control: a,
                            target: b,
                        },
                        T(a),
                        Tdg(b),
                        Cx {
                            control: a,
                            target: b,
                        },
                    ]);
                }
            }
        }
        LoweredCircuit {
            num_qubits: self.num_qubits,
            ops,
        }
    }
}

pub fn cnot_count(gates: &[Gate]) -> u64 {
    gates.iter().map(Gate::cnot_cost).sum()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub x: u64,
    pub cx: u64,
    pub ccx: u64,
}

/// Gates of a Toffoli-free Clifford+T circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoweredOp {
    X(usize),
    Cx { control: usize, target: usize },
    H(usize),
    T(usize),
    Tdg(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredCircuit {
    pub num_qubits: usize,
    pub ops: Vec<LoweredOp>,
}

impl LoweredCircuit {
    pub fn cnot_count(&self) -> u64 {
        self.ops
            .iter()
            .filter(|op| matches!(op, LoweredOp::Cx { .. }))
            .count() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bare(n: usize, gates: Vec<Gate>) -> Circuit {
        let mut c = Circuit::empty(n);
        for g in &gates {
            g.check(n).unwrap();
        }
        c.gates = gates;
        c
    }

    #[test]
    fn cnot_accounting() {
        assert_eq!(
            bare(
                2,
                vec![Gate::Cx {
                    control: 0,
                    target: 1
                }]
            )
            .cnot_count(),
            1
        );
        let tof = Gate::Ccx {
            controls: [0, 1],
            target: 2,
        };
        assert_eq!(bare(3, vec![tof]).cnot_count(), 6);
        assert_eq!(Circuit::empty(3).cnot_count(), 0);
        assert_eq!(bare(1, vec![Gate::X(0)]).cnot_count(), 0);
    }

    #[test]
    fn invert_single_x() {
        let c = bare(1, vec![Gate::X(0)]);
        assert_eq!(c.invert().gates(), &[Gate::X(0)]);
    }

    #[test]
    fn toffoli_lowers_to_six_cnots() {
        let c = bare(
            3,
            vec![Gate::Ccx {
                controls: [0, 1],
                target: 2,
            }],
        );
        let low = c.decompose_toffoli();
        assert_eq!(low.cnot_count(), 6);
        assert_eq!(low.ops.len(), 15);
    }

    #[test]
    fn lowering_without_toffoli_is_identity() {
        let c = bare(
            2,
            vec![
                Gate::X(0),
                Gate::Cx {
                    control: 0,
                    target: 1,
                },
            ],
        );
        let low = c.decompose_toffoli();
        assert_eq!(
            low.ops,
            vec![
                LoweredOp::X(0),
                LoweredOp::Cx {
                    control: 0,
                    target: 1
                }
            ]
        );
    }

    #[test]
    fn bad_gates_rejected() {
        let layout = Circuit::empty(2).layout().clone();
        assert_eq!(
            Circuit::new(
                2,
                vec![Gate::Cx {
                    control: 1,
                    target: 1
                }],
                layout.clone()
            ),
            Err(Error::RepeatedQubit(1))
        );
        assert!(matches!(
            Circuit::new(2, vec![Gate::X(2)], layout),
            Err(Error::QubitOutOfRange { qubit: 2, .. })
        ));
    }

    #[test]
    fn concat_identity_and_remap() {
        let c = bare(
            2,
            vec![Gate::Cx {
                control: 0,
                target: 1,
            }],
        );
        let e = Circuit::empty(2);
        assert_eq!(e.concat(&c, None).unwrap().gates(), c.gates());
        let both = c.concat(&c, Some(&[1, 0])).unwrap();
        assert_eq!(
            both.gates()[1],
            Gate::Cx {
                control: 1,
                target: 0
            }
        );
        assert_eq!(both.cnot_count(), 2);
        assert_eq!(c.concat(&c, Some(&[0, 0])), Err(Error::RemapCollision(0)));
        let grown = c.concat(&c, Some(&[3, 2])).unwrap();
        assert_eq!(grown.num_qubits(), 4);
        assert_eq!(grown.layout().get("ext").unwrap().range(), 2..4);
    }

    #[test]
    fn layout_must_cover() {
        let r = |name: &str, start, len| Register {
            name: name.into(),
            start,
            len,
            role: Role::Input,
            initial: 0,
        };
        assert!(RegisterLayout::new(vec![r("a", 0, 2), r("b", 2, 2)], 4).is_ok());
        assert!(RegisterLayout::new(vec![r("a", 0, 2), r("b", 1, 2)], 3).is_err());
        assert!(RegisterLayout::new(vec![r("a", 0, 2)], 3).is_err());
    }
}
