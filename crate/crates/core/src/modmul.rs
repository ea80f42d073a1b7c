//! Modular multiplication of two quantum factors.

use alloc::vec::Vec;
use core::ops::Range;

use crate::arith::{check_modulus, check_width, emit_mod_add, emit_mod_double, ModScratch};
use crate::builder::{self, Builder};
use crate::circuit::{Circuit, Role};
use crate::Result;

/// `dst := src` when `ctrl` is set (`dst` must start at 0).
pub fn build_ctrl_copy(n: usize, controlled: bool) -> Result<Circuit> {
    check_width(n)?;
    let mut b = Builder::new();
    let ctrl = controlled.then(|| b.alloc_one("ctrl", Role::Control));
    let src = b.alloc("src", n, Role::Input);
    let dst = b.alloc("dst", n, Role::Output);
    builder::ctrl_copy(&mut b, ctrl, &src, &dst);
    b.finish()
}

/// Horner-order product: the top bit of `x` copies `y` into `acc`, then
/// every lower bit doubles `acc` and conditionally adds `y`, all mod `N`.
/// `102n² − 54n − 42` CNOTs at average binding.
pub(crate) fn emit_fast_modmul(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    acc: &[usize],
    modulus: u64,
    s: &ModScratch,
) {
    let n = x.len();
    b.block("ctrl_copy", |b| {
        builder::ctrl_copy(b, Some(x[n - 1]), y, acc)
    });
    for i in (0..n - 1).rev() {
        b.block("mod_double", |b| emit_mod_double(b, acc, modulus, s));
        b.block("ctrl_mod_add", |b| {
            emit_mod_add(b, y, acc, modulus, s, Some(x[i]))
        });
    }
}

/// `|x⟩|y⟩|0⟩ → |x⟩|y⟩|x·y mod N⟩` for `x, y < N`.
pub fn build_fast_modmul(n: usize, modulus: u64) -> Result<Circuit> {
    check_modulus(n, modulus)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Input);
    let acc = b.alloc("result", n, Role::Output);
    let s = ModScratch::alloc(&mut b, n);
    emit_fast_modmul(&mut b, &x, &y, &acc, modulus, &s);
    b.finish()
}

/// Qubits used by one forward Montgomery pass.
#[derive(Debug, Clone)]
pub(crate) struct MontRegs {
    /// Holds `x_i·y` during a round; clean between rounds.
    pub scratch: Vec<usize>,
    pub c0: usize,
    /// `n+1` qubits.
    pub bind: Vec<usize>,
    pub flag: usize,
    pub parity0: usize,
    /// `2n` qubits: round parities, then the result, then the top bit.
    pub pool: Vec<usize>,
}

impl MontRegs {
    /// Shared clean helpers (`scratch`, `carry_in`, `bind`) are allocated
    /// only when not supplied.
    pub fn alloc(
        b: &mut Builder,
        n: usize,
        shared: Option<(&[usize], usize, &[usize])>,
        prefix: &str,
        dirty: Role,
        result: Role,
    ) -> Self {
        let (scratch, c0, bind) = match shared {
            Some((s, c, bd)) => (s.to_vec(), c, bd.to_vec()),
            None => (
                b.alloc("scratch", n, Role::Ancilla),
                b.alloc_one("carry_in", Role::Ancilla),
                b.alloc("bind", n + 1, Role::Ancilla),
            ),
        };
        let flag = b.alloc_one(alloc::format!("{prefix}flag"), dirty);
        let parity0 = b.alloc_one(alloc::format!("{prefix}parity0"), dirty);
        let mut pool = b.alloc(alloc::format!("{prefix}parities"), n - 1, dirty);
        pool.extend(b.alloc(alloc::format!("{prefix}result"), n, result));
        pool.push(b.alloc_one(alloc::format!("{prefix}top"), Role::Ancilla));
        Self {
            scratch,
            c0,
            bind,
            flag,
            parity0,
            pool,
        }
    }

    pub fn result(&self) -> &[usize] {
        let n = self.scratch.len();
        &self.pool[n - 1..2 * n - 1]
    }
}

/// Forward Montgomery pass: `result = x·y·2^-n mod N`, leaving one parity
/// qubit per round and the final reduction flag dirty.
///
/// The accumulator slides up through `pool`. Round 0 starts from an empty
/// accumulator, so it copies `x_0·y` in, records the parity, adds `N` when
/// odd and shifts right. Later rounds hold an accumulator below `2N`, so
/// the sum `t + x_i·y` may need `n+2` bits: it is added with a spill into
/// the next pool qubit, its low bit is kept in place as the round parity,
/// and the remaining bits (already the halved sum) get `(N+1)/2` added when
/// the parity is set. A final conditional subtraction brings the result
/// below `N`. `45n² + 17n + 8` CNOTs at average binding.
pub(crate) fn emit_montgomery_forward(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    modulus: u64,
    r: &MontRegs,
) {
    let n = x.len();
    let p = &r.pool;
    let half = modulus.div_ceil(2);
    b.block("round", |b| {
        builder::ctrl_copy(b, Some(x[0]), y, &p[..n]);
        b.cx(p[0], r.parity0);
        builder::ctrl_const_add(b, r.parity0, modulus, &p[..n], &r.bind, r.c0, Some(p[n]));
        builder::shift_right(b, &p[..=n]);
    });
    for i in 1..n {
        b.block("round", |b| {
            let acc = &p[i - 1..i + n];
            builder::ctrl_copy(b, Some(x[i]), y, &r.scratch);
            builder::add_into_wider(b, &r.scratch, &acc[..n], r.c0, acc[n], p[i + n]);
            builder::ctrl_copy(b, Some(x[i]), y, &r.scratch);
            builder::ctrl_const_add(b, acc[0], half, &p[i..i + n], &r.bind, r.c0, Some(p[i + n]));
        });
    }
    b.block("reduce", |b| {
        let acc = &p[n - 1..2 * n];
        builder::const_less_than(b, acc, modulus, &r.bind, r.c0, r.flag);
        b.x(r.flag);
        builder::ctrl_const_sub(b, r.flag, modulus, &acc[..n], &r.bind, r.c0, Some(acc[n]));
    });
}

/// Forward pass only: `|x⟩|y⟩|0⟩ → |x⟩|y⟩|x·y·2^-n mod N⟩|junk⟩`.
pub fn build_montgomery_forward(n: usize, modulus: u64) -> Result<Circuit> {
    check_modulus(n, modulus)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Input);
    let r = MontRegs::alloc(&mut b, n, None, "", Role::Junk, Role::Output);
    emit_montgomery_forward(&mut b, &x, &y, modulus, &r);
    b.finish()
}

/// Forward pass, copy of the result, then the forward pass run backwards:
/// `|x⟩|y⟩|0⟩ → |x⟩|y⟩|x·y·2^-n mod N⟩` with every helper clean.
/// `90n² + 35n + 16` CNOTs at average binding.
pub fn build_montgomery_full(n: usize, modulus: u64) -> Result<Circuit> {
    check_modulus(n, modulus)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Input);
    let out = b.alloc("result", n, Role::Output);
    let r = MontRegs::alloc(&mut b, n, None, "work_", Role::Ancilla, Role::Ancilla);
    let forward = emit_range(&mut b, |b| emit_montgomery_forward(b, &x, &y, modulus, &r));
    b.block("copy", |b| builder::ctrl_copy(b, None, r.result(), &out));
    b.replay_inverse(forward);
    b.finish()
}

pub(crate) fn emit_range(b: &mut Builder, f: impl FnOnce(&mut Builder)) -> Range<usize> {
    let start = b.mark();
    f(b);
    start..b.mark()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{mod_inverse, mul_mod};
    use crate::sim::{exhaustive_verify, product_domain};
    use alloc::vec;

    #[test]
    fn counts_match_closed_forms() {
        for n in 2..=10usize {
            let n64 = n as u64;
            let modulus = (1 << n) - 1;
            assert_eq!(
                build_fast_modmul(n, modulus)
                    .unwrap()
                    .normalized_cnot_count(),
                102 * n64 * n64 - 54 * n64 - 42
            );
            assert_eq!(
                build_montgomery_forward(n, modulus)
                    .unwrap()
                    .normalized_cnot_count(),
                45 * n64 * n64 + 17 * n64 + 8
            );
            assert_eq!(
                build_montgomery_full(n, modulus)
                    .unwrap()
                    .normalized_cnot_count(),
                90 * n64 * n64 + 35 * n64 + 16
            );
        }
        assert_eq!(build_ctrl_copy(5, true).unwrap().cnot_count(), 30);
        assert_eq!(build_ctrl_copy(5, false).unwrap().cnot_count(), 5);
    }

    #[test]
    fn fast_modmul_example() {
        let c = build_fast_modmul(4, 13).unwrap();
        let r = exhaustive_verify(&c, [vec![("x".into(), 3), ("y".into(), 5)]], |_| {
            vec![("result".into(), 2)]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn montgomery_forward_example_and_zero() {
        let c = build_montgomery_forward(4, 13).unwrap();
        let r = exhaustive_verify(&c, [vec![("x".into(), 3), ("y".into(), 5)]], |_| {
            vec![("result".into(), 5)]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
        let r = exhaustive_verify(&c, product_domain(&[("x", 0..1), ("y", 0..13)]), |_| {
            vec![("result".into(), 0)]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn montgomery_full_exhaustive_13() {
        let c = build_montgomery_full(4, 13).unwrap();
        let rinv = mod_inverse(16, 13).unwrap();
        let r = exhaustive_verify(&c, product_domain(&[("x", 0..13), ("y", 0..13)]), |a| {
            let p = mul_mod(a[0].1 * a[1].1, rinv, 13);
            vec![("result".into(), p)]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn ctrl_copy_follows_control() {
        let c = build_ctrl_copy(3, true).unwrap();
        let dom = product_domain(&[("ctrl", 0..2), ("src", 0..8)]);
        let r = exhaustive_verify(&c, dom, |a| vec![("dst".into(), a[0].1 * a[1].1)]).unwrap();
        assert!(r.passed());
    }
}
