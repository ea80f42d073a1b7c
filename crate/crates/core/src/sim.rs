//! Basis-state simulation of reversible circuits.
//!
//! Every circuit the builders produce is a classical reversible network, so
//! a computational basis state maps to a single basis state and one bit per
//! qubit is enough. Lowered Clifford+T circuits are handled separately by a
//! small sparse amplitude simulator.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::circuit::{Circuit, Gate, LoweredCircuit, LoweredOp, Register, Role};
use crate::{Error, Result};

/// One bit per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    words: Vec<u64>,
    len: usize,
}

impl BasisState {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Low `len` bits of `value`, little-endian.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len.min(64) {
            s.set(i, value >> i & 1 == 1);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        self.words[q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, bit: bool) {
        let mask = 1u64 << (q % 64);
        if bit {
            self.words[q / 64] |= mask;
        } else {
            self.words[q / 64] &= !mask;
        }
    }

    #[inline]
    fn flip(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    /// Reads a register as a little-endian integer. Qubits past the 64th
    /// are ignored; use [`BasisState::holds`] for wide registers.
    pub fn read(&self, reg: &Register) -> u64 {
        reg.qubits()
            .take(64)
            .enumerate()
            .fold(0, |acc, (i, q)| acc | (self.get(q) as u64) << i)
    }

    /// True if the register holds exactly `value` (any width).
    pub fn holds(&self, reg: &Register, value: u64) -> bool {
        reg.qubits()
            .enumerate()
            .all(|(i, q)| self.get(q) == (i < 64 && value >> i & 1 == 1))
    }

    pub fn write(&mut self, reg: &Register, value: u64) {
        for (i, q) in reg.qubits().enumerate() {
            self.set(q, i < 64 && value >> i & 1 == 1);
        }
    }

    #[inline]
    pub fn apply(&mut self, g: &Gate) {
        match *g {
            Gate::X(t) => self.flip(t),
            Gate::Cx { control, target } => {
                if self.get(control) {
                    self.flip(target)
                }
            }
            Gate::Ccx {
                controls: [a, b],
                target,
            } => {
                if self.get(a) && self.get(b) {
                    self.flip(target)
                }
            }
        }
    }

    fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|q| if self.get(q) { '1' } else { '0' })
            .collect()
    }
}

/// Applies the circuit's gates in order.
pub fn run_basis(c: &Circuit, s: &BasisState) -> Result<BasisState> {
    run_prefix(c, s, c.len())
}

/// Applies the first `end` gates only.
pub fn run_prefix(c: &Circuit, s: &BasisState, end: usize) -> Result<BasisState> {
    if s.len() != c.num_qubits() {
        return Err(Error::StateLength {
            got: s.len(),
            expected: c.num_qubits(),
        });
    }
    let mut out = s.clone();
    for g in &c.gates()[..end] {
        out.apply(g);
    }
    Ok(out)
}

/// The state every register is in before the circuit runs.
pub fn initial_state(c: &Circuit) -> BasisState {
    let mut s = BasisState::zeros(c.num_qubits());
    for r in c.layout().entries() {
        if r.initial != 0 {
            s.write(r, r.initial);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Amp {
    re: f64,
    im: f64,
}

impl Amp {
    fn mul(self, o: Amp) -> Amp {
        Amp {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn scale(self, k: f64) -> Amp {
        Amp {
            re: self.re * k,
            im: self.im * k,
        }
    }

    fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Runs a lowered Clifford+T circuit on a basis state with exact amplitude
/// tracking and returns the output basis state. Fails if the output is not
/// a single basis state with phase 1.
pub fn run_lowered(c: &LoweredCircuit, s: &BasisState) -> Result<BasisState> {
    if s.len() != c.num_qubits {
        return Err(Error::StateLength {
            got: s.len(),
            expected: c.num_qubits,
        });
    }
    const EPS: f64 = 1e-9;
    let t_phase = Amp {
        re: FRAC_1_SQRT_2,
        im: FRAC_1_SQRT_2,
    };
    let tdg_phase = Amp {
        re: FRAC_1_SQRT_2,
        im: -FRAC_1_SQRT_2,
    };
    let mut state: BTreeMap<BasisState, Amp> = BTreeMap::new();
    state.insert(s.clone(), Amp { re: 1.0, im: 0.0 });
    for op in &c.ops {
        let mut next: BTreeMap<BasisState, Amp> = BTreeMap::new();
        let mut add = |k: BasisState, a: Amp| {
            let e = next.entry(k).or_insert(Amp { re: 0.0, im: 0.0 });
            e.re += a.re;
            e.im += a.im;
        };
        for (mut b, a) in state {
            match *op {
                LoweredOp::X(t) => {
                    b.flip(t);
                    add(b, a);
                }
                LoweredOp::Cx { control, target } => {
                    if b.get(control) {
                        b.flip(target);
                    }
                    add(b, a);
                }
                LoweredOp::T(q) => add(b.clone(), if b.get(q) { a.mul(t_phase) } else { a }),
                LoweredOp::Tdg(q) => add(b.clone(), if b.get(q) { a.mul(tdg_phase) } else { a }),
                LoweredOp::H(q) => {
                    let a = a.scale(FRAC_1_SQRT_2);
                    let one = b.get(q);
                    let mut flipped = b.clone();
                    flipped.flip(q);
                    if one {
                        add(flipped, a);
                        add(b, a.scale(-1.0));
                    } else {
                        add(flipped, a);
                        add(b, a);
                    }
                }
            }
        }
        next.retain(|_, a| a.norm_sqr() > EPS * EPS);
        state = next;
    }
    let mut it = state.into_iter();
    match (it.next(), it.next()) {
        (Some((b, a)), None) if (a.re - 1.0).abs() < EPS && a.im.abs() < EPS => Ok(b),
        (Some((b, _)), _) => Err(Error::NotPermutation(b.to_bitstring())),
        (None, _) => Err(Error::NotPermutation(String::new())),
    }
}

/// An input or output register assignment.
pub type Assignment = Vec<(String, u64)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Assignment,
    pub register: String,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub points: u64,
    pub failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Runs every domain point, compares the oracle's registers against the
/// simulated output and checks that every ancilla and flag register is back
/// at its initial value. Registers not named by a domain point start at
/// their declared initial value. Stops at the first failure.
pub fn exhaustive_verify<D, F>(c: &Circuit, domain: D, mut oracle: F) -> Result<VerifyReport>
where
    D: IntoIterator<Item = Assignment>,
    F: FnMut(&Assignment) -> Assignment,
{
    let base = initial_state(c);
    let restore: Vec<&Register> = c
        .layout()
        .entries()
        .iter()
        .filter(|r| r.role.must_restore())
        .collect();
    let mut points = 0;
    for inputs in domain {
        let mut s = base.clone();
        for (name, v) in &inputs {
            s.write(c.layout().get(name)?, *v);
        }
        let out = run_basis(c, &s)?;
        points += 1;
        let fail = |register: &str, expected: u64, actual: u64| Counterexample {
            inputs: inputs.clone(),
            register: register.into(),
            expected,
            actual,
        };
        for (name, expected) in oracle(&inputs) {
            let actual = out.read(c.layout().get(&name)?);
            if actual != expected {
                return Ok(VerifyReport {
                    points,
                    failure: Some(fail(&name, expected, actual)),
                });
            }
        }
        for r in &restore {
            if inputs.iter().any(|(n, _)| n == &r.name) {
                continue;
            }
            if !out.holds(r, r.initial) {
                let actual = out.read(r);
                return Ok(VerifyReport {
                    points,
                    failure: Some(fail(&r.name, r.initial, actual)),
                });
            }
        }
    }
    Ok(VerifyReport {
        points,
        failure: None,
    })
}

/// Cartesian product of per-register value ranges, last register fastest.
pub fn product_domain(regs: &[(&str, core::ops::Range<u64>)]) -> impl Iterator<Item = Assignment> {
    let regs: Vec<(String, core::ops::Range<u64>)> = regs
        .iter()
        .map(|(n, r)| (String::from(*n), r.clone()))
        .collect();
    let total: u64 = regs
        .iter()
        .map(|(_, r)| r.end.saturating_sub(r.start))
        .product();
    (0..total).map(move |mut idx| {
        let mut out = vec![(String::new(), 0); regs.len()];
        for (slot, (name, r)) in out.iter_mut().zip(regs.iter()).rev() {
            let span = r.end - r.start;
            *slot = (name.clone(), r.start + idx % span);
            idx /= span;
        }
        out
    })
}

/// True if the circuit permutes all `2^num_qubits` basis states. Only
/// feasible for small circuits.
pub fn is_bijection(c: &Circuit) -> Result<bool> {
    let n = c.num_qubits();
    if n > 24 {
        return Err(Error::Precondition("bijection check limited to 24 qubits"));
    }
    let mut seen = vec![false; 1 << n];
    for v in 0..1u64 << n {
        let out = run_basis(c, &BasisState::from_u64(n, v))?;
        let idx = (0..n).fold(0usize, |acc, q| acc | (out.get(q) as usize) << q);
        if core::mem::replace(&mut seen[idx], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Renders registers of a state for diagnostics.
pub fn describe(c: &Circuit, s: &BasisState) -> String {
    let mut out = String::new();
    for r in c.layout().entries() {
        if r.role != Role::Junk {
            out.push_str(&format!("{}={} ", r.name, s.read(r)));
        }
    }
    out
}
