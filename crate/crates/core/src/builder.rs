//! Gate emission helpers shared by all circuit builders.
//!
//! The ripple-carry blocks follow the MAJ/UMA construction: `maj(c, b, a)`
//! leaves the carry in `a`, `b ^= a` and `c ^= a`; `uma` undoes that and
//! writes the sum bit into `b`.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::circuit::{Block, Circuit, Gate, Register, RegisterLayout, Role};
use crate::Result;

#[derive(Debug, Default)]
pub(crate) struct Builder {
    num_qubits: usize,
    gates: Vec<Gate>,
    registers: Vec<Register>,
    blocks: Vec<Block>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, name: impl Into<String>, len: usize, role: Role) -> Vec<usize> {
        self.alloc_init(name, len, role, 0)
    }

    pub fn alloc_init(
        &mut self,
        name: impl Into<String>,
        len: usize,
        role: Role,
        initial: u64,
    ) -> Vec<usize> {
        let start = self.num_qubits;
        self.num_qubits += len;
        self.registers.push(Register {
            name: name.into(),
            start,
            len,
            role,
            initial,
        });
        (start..start + len).collect()
    }

    pub fn alloc_one(&mut self, name: impl Into<String>, role: Role) -> usize {
        self.alloc(name, 1, role)[0]
    }

    pub fn finish(self) -> Result<Circuit> {
        let layout = RegisterLayout::new(self.registers, self.num_qubits)?;
        Circuit::new(self.num_qubits, self.gates, layout)?.with_blocks(self.blocks)
    }

    pub fn x(&mut self, t: usize) {
        self.gates.push(Gate::X(t));
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        self.gates.push(Gate::Cx { control, target });
    }

    pub fn ccx(&mut self, a: usize, b: usize, target: usize) {
        self.gates.push(Gate::Ccx {
            controls: [a, b],
            target,
        });
    }

    /// CNOT, or Toffoli when an extra control is present.
    pub fn cx_if(&mut self, ctrl: Option<usize>, control: usize, target: usize) {
        match ctrl {
            Some(k) => self.ccx(k, control, target),
            None => self.cx(control, target),
        }
    }

    pub fn mark(&self) -> usize {
        self.gates.len()
    }

    pub fn block<R>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        self.tagged_block(label, None, f)
    }

    fn tagged_block<R>(
        &mut self,
        label: &str,
        binding_width: Option<usize>,
        f: impl FnOnce(&mut Self) -> R,
    ) -> R {
        let start = self.mark();
        let r = f(self);
        self.blocks.push(Block {
            label: label.into(),
            gates: start..self.mark(),
            binding_width,
        });
        r
    }

    /// Reverses every gate emitted since `mark`, turning the emitted
    /// sequence into its inverse.
    pub fn reverse_since(&mut self, mark: usize) {
        let end = self.gates.len();
        self.gates[mark..].reverse();
        let flip = |r: &Range<usize>| mark + (end - r.end)..mark + (end - r.start);
        let split = self
            .blocks
            .iter()
            .position(|b| b.gates.start >= mark)
            .unwrap_or(self.blocks.len());
        let mut tail: Vec<Block> = self.blocks.drain(split..).collect();
        tail.reverse();
        for b in &mut tail {
            b.gates = flip(&b.gates);
        }
        self.blocks.extend(tail);
    }

    /// Emits the inverse of the gates in `range` (already emitted).
    pub fn replay_inverse(&mut self, range: Range<usize>) {
        let offset = self.gates.len();
        let mut copied: Vec<Block> = self
            .blocks
            .iter()
            .filter(|b| b.gates.start >= range.start && b.gates.end <= range.end)
            .cloned()
            .collect();
        for i in range.clone().rev() {
            let g = self.gates[i];
            self.gates.push(g);
        }
        copied.reverse();
        for b in &mut copied {
            b.gates = offset + (range.end - b.gates.end)..offset + (range.end - b.gates.start);
        }
        self.blocks.extend(copied);
    }
}

fn carry_slot(c0: usize, a: &[usize], i: usize) -> usize {
    if i == 0 {
        c0
    } else {
        a[i - 1]
    }
}

fn maj(b: &mut Builder, ctrl: Option<usize>, c: usize, bq: usize, a: usize) {
    b.cx_if(ctrl, a, bq);
    b.cx(a, c);
    b.ccx(c, bq, a);
}

fn uma(b: &mut Builder, ctrl: Option<usize>, c: usize, bq: usize, a: usize) {
    b.ccx(c, bq, a);
    b.cx(a, c);
    b.cx_if(ctrl, c, bq);
}

/// `y += x` (when `ctrl` is set or absent), with the carry out XORed into
/// `carry`. Costs `16n+1` CNOTs uncontrolled and `26n+6` controlled.
pub(crate) fn add(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    c0: usize,
    carry: Option<usize>,
    ctrl: Option<usize>,
) {
    let n = x.len();
    debug_assert_eq!(n, y.len());
    for i in 0..n {
        maj(b, ctrl, carry_slot(c0, x, i), y[i], x[i]);
    }
    if let Some(z) = carry {
        b.cx_if(ctrl, x[n - 1], z);
    }
    for i in (0..n).rev() {
        uma(b, ctrl, carry_slot(c0, x, i), y[i], x[i]);
    }
}

/// `(y, top, spill) += x` where `y` has the width of `x`, `top` is the next
/// bit of the accumulator and `spill` the bit above it (must start at 0).
/// Costs `16n+7` CNOTs.
pub(crate) fn add_into_wider(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    c0: usize,
    top: usize,
    spill: usize,
) {
    let n = x.len();
    for i in 0..n {
        maj(b, None, carry_slot(c0, x, i), y[i], x[i]);
    }
    b.ccx(x[n - 1], top, spill);
    b.cx(x[n - 1], top);
    for i in (0..n).rev() {
        uma(b, None, carry_slot(c0, x, i), y[i], x[i]);
    }
}

fn bit(k: u64, i: usize) -> bool {
    i < 64 && k >> i & 1 == 1
}

fn bind(b: &mut Builder, k: u64, reg: &[usize]) {
    for (i, &q) in reg.iter().enumerate() {
        if bit(k, i) {
            b.x(q);
        }
    }
}

/// `y += k` for a classical constant, via a binding register that holds `k`
/// during the ripple. Copies out of the binding register become X gates or
/// vanish, so the cost is `13n+1` CNOTs regardless of `k`.
pub(crate) fn const_add(
    b: &mut Builder,
    k: u64,
    y: &[usize],
    binding: &[usize],
    c0: usize,
    carry: Option<usize>,
) {
    let n = y.len();
    let a = &binding[..n];
    bind(b, k, a);
    for i in 0..n {
        let c = carry_slot(c0, a, i);
        if bit(k, i) {
            b.x(y[i]);
            b.x(c);
        }
        b.ccx(c, y[i], a[i]);
    }
    if let Some(z) = carry {
        b.cx(a[n - 1], z);
    }
    for i in (0..n).rev() {
        let c = carry_slot(c0, a, i);
        b.ccx(c, y[i], a[i]);
        if bit(k, i) {
            b.x(c);
        }
        b.cx(c, y[i]);
    }
    bind(b, k, a);
}

/// Controlled `y += k`: the constant is bound with CNOTs from `ctrl`, then a
/// plain ripple adder runs. Costs `16n+1 + 2·popcount(k)` CNOTs.
pub(crate) fn ctrl_const_add(
    b: &mut Builder,
    ctrl: usize,
    k: u64,
    y: &[usize],
    binding: &[usize],
    c0: usize,
    carry: Option<usize>,
) {
    let n = y.len();
    let a = &binding[..n];
    let bind_ctrl = |b: &mut Builder| {
        for (i, &q) in a.iter().enumerate() {
            if bit(k, i) {
                b.cx(ctrl, q);
            }
        }
    };
    b.tagged_block("bind", Some(n), bind_ctrl);
    add(b, a, y, c0, carry, None);
    b.tagged_block("unbind", Some(n), bind_ctrl);
}

/// Controlled `y -= k` (modulo `2^(n+1)` when `carry` is given).
pub(crate) fn ctrl_const_sub(
    b: &mut Builder,
    ctrl: usize,
    k: u64,
    y: &[usize],
    binding: &[usize],
    c0: usize,
    carry: Option<usize>,
) {
    let m = b.mark();
    ctrl_const_add(b, ctrl, k, y, binding, c0, carry);
    b.reverse_since(m);
}

/// `flag ^= [x < y]`, operands restored. Computes the carry of
/// `x + !y + 1` (which is `[x >= y]`) with a MAJ cascade, copies it, undoes
/// the cascade, then flips the flag. `16n+1` CNOTs, `16n+7` controlled.
pub(crate) fn less_than(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    c0: usize,
    flag: usize,
    ctrl: Option<usize>,
) {
    let n = x.len();
    b.x(c0);
    y.iter().for_each(|&q| b.x(q));
    for i in 0..n {
        maj(b, None, carry_slot(c0, y, i), x[i], y[i]);
    }
    b.cx_if(ctrl, y[n - 1], flag);
    for i in (0..n).rev() {
        let c = carry_slot(c0, y, i);
        b.ccx(c, x[i], y[i]);
        b.cx(y[i], c);
        b.cx(y[i], x[i]);
    }
    y.iter().for_each(|&q| b.x(q));
    b.x(c0);
    match ctrl {
        Some(k) => b.cx(k, flag),
        None => b.x(flag),
    }
}

/// `flag ^= [x < k]` for a classical constant: the carry of `!x + k`.
/// `12n+1` CNOTs.
pub(crate) fn const_less_than(
    b: &mut Builder,
    x: &[usize],
    k: u64,
    binding: &[usize],
    c0: usize,
    flag: usize,
) {
    let n = x.len();
    let a = &binding[..n];
    x.iter().for_each(|&q| b.x(q));
    bind(b, k, a);
    for i in 0..n {
        let c = carry_slot(c0, a, i);
        if bit(k, i) {
            b.x(x[i]);
            b.x(c);
        }
        b.ccx(c, x[i], a[i]);
    }
    b.cx(a[n - 1], flag);
    for i in (0..n).rev() {
        let c = carry_slot(c0, a, i);
        b.ccx(c, x[i], a[i]);
        if bit(k, i) {
            b.x(c);
            b.x(x[i]);
        }
    }
    bind(b, k, a);
    x.iter().for_each(|&q| b.x(q));
}

/// Doubles the value held in `q` (top qubit must be 0). Two CNOTs per moved
/// bit instead of a three-CNOT swap.
pub(crate) fn shift_left(b: &mut Builder, q: &[usize]) {
    for i in (1..q.len()).rev() {
        b.cx(q[i - 1], q[i]);
        b.cx(q[i], q[i - 1]);
    }
}

/// Halves the value held in `q` (bottom qubit must be 0).
pub(crate) fn shift_right(b: &mut Builder, q: &[usize]) {
    for i in 0..q.len().saturating_sub(1) {
        b.cx(q[i + 1], q[i]);
        b.cx(q[i], q[i + 1]);
    }
}

/// `dst ^= ctrl·src` (`dst ^= src` without a control).
pub(crate) fn ctrl_copy(b: &mut Builder, ctrl: Option<usize>, src: &[usize], dst: &[usize]) {
    for (&s, &d) in src.iter().zip(dst) {
        b.cx_if(ctrl, s, d);
    }
}
