//! Adders, comparators, shifts, modular addition and modular doubling.
//!
//! Every builder returns a [`Circuit`] with a named layout:
//!
//! | register   | meaning                                            |
//! |------------|----------------------------------------------------|
//! | `ctrl`     | control qubit of controlled variants               |
//! | `x`, `y`   | operands; sums land in `y`                         |
//! | `carry`    | carry-out of plain adders (the bit of weight 2^n)  |
//! | `lt`       | comparison result                                  |
//! | `carry_in` | ripple carry-in ancilla                            |
//! | `bind`     | ancilla that holds a classical constant            |
//! | `top`      | bit of weight 2^n inside modular circuits          |
//! | `flag`     | reduction flag of modular circuits                 |

use alloc::vec::Vec;

use crate::builder::{self, Builder};
use crate::circuit::{Circuit, Role};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Left,
    Right,
}

pub(crate) fn check_width(n: usize) -> Result<()> {
    match n {
        0 => Err(Error::ZeroWidth),
        1..=62 => Ok(()),
        _ => Err(Error::Precondition(
            "register width above 62 bits is not supported",
        )),
    }
}

pub(crate) fn check_constant(n: usize, constant: u64) -> Result<()> {
    check_width(n)?;
    if constant >> n != 0 {
        return Err(Error::ConstantTooWide { constant, n });
    }
    Ok(())
}

pub(crate) fn check_modulus(n: usize, modulus: u64) -> Result<()> {
    check_width(n)?;
    let bad = |reason| Err(Error::BadModulus { modulus, n, reason });
    if modulus >> n != 0 {
        return bad("modulus must be below 2^n");
    }
    if modulus < 3 {
        return bad("modulus must be at least 3");
    }
    if modulus.is_multiple_of(2) {
        return bad("modulus must be odd");
    }
    Ok(())
}

fn control(b: &mut Builder, controlled: bool) -> Option<usize> {
    controlled.then(|| b.alloc_one("ctrl", Role::Control))
}

/// Ripple-carry adder `|x⟩|y⟩|0⟩ → |x⟩|x+y⟩`, sum spread over `y` and the
/// `carry` qubit. `16n+1` CNOTs, `26n+6` when controlled.
pub fn build_adder(n: usize, controlled: bool) -> Result<Circuit> {
    check_width(n)?;
    let mut b = Builder::new();
    let ctrl = control(&mut b, controlled);
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Output);
    let carry = b.alloc_one("carry", Role::Output);
    let c0 = b.alloc_one("carry_in", Role::Ancilla);
    builder::add(&mut b, &x, &y, c0, Some(carry), ctrl);
    b.finish()
}

/// `|y⟩|0⟩ → |y + k⟩` over `y` and `carry`.
pub fn build_const_adder(n: usize, constant: u64, controlled: bool) -> Result<Circuit> {
    check_constant(n, constant)?;
    let mut b = Builder::new();
    let ctrl = control(&mut b, controlled);
    let y = b.alloc("y", n, Role::Output);
    let carry = b.alloc_one("carry", Role::Output);
    let bind = b.alloc("bind", n, Role::Ancilla);
    let c0 = b.alloc_one("carry_in", Role::Ancilla);
    match ctrl {
        Some(k) => builder::ctrl_const_add(&mut b, k, constant, &y, &bind, c0, Some(carry)),
        None => builder::const_add(&mut b, constant, &y, &bind, c0, Some(carry)),
    }
    b.finish()
}

/// `lt ^= [x < y]` with `x` and `y` restored.
pub fn build_comparator(n: usize, controlled: bool) -> Result<Circuit> {
    check_width(n)?;
    let mut b = Builder::new();
    let ctrl = control(&mut b, controlled);
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Input);
    let c0 = b.alloc_one("carry_in", Role::Ancilla);
    let lt = b.alloc_one("lt", Role::Output);
    builder::less_than(&mut b, &x, &y, c0, lt, ctrl);
    b.finish()
}

/// `lt ^= [x < k]` for a classical constant `k`.
pub fn build_const_comparator(n: usize, constant: u64) -> Result<Circuit> {
    check_constant(n, constant)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n, Role::Input);
    let bind = b.alloc("bind", n, Role::Ancilla);
    let c0 = b.alloc_one("carry_in", Role::Ancilla);
    let lt = b.alloc_one("lt", Role::Output);
    builder::const_less_than(&mut b, &x, constant, &bind, c0, lt);
    b.finish()
}

/// Ancillas shared by the modular blocks.
#[derive(Debug, Clone)]
pub(crate) struct ModScratch {
    /// Bit of weight `2^n` of the working register.
    pub top: usize,
    pub c0: usize,
    /// `n+1` qubits.
    pub bind: Vec<usize>,
    pub flag: usize,
}

impl ModScratch {
    pub fn alloc(b: &mut Builder, n: usize) -> Self {
        let top = b.alloc_one("top", Role::Ancilla);
        let c0 = b.alloc_one("carry_in", Role::Ancilla);
        let bind = b.alloc("bind", n + 1, Role::Ancilla);
        let flag = b.alloc_one("flag", Role::Flag);
        Self {
            top,
            c0,
            bind,
            flag,
        }
    }
}

fn with_top(y: &[usize], top: usize) -> Vec<usize> {
    let mut v = y.to_vec();
    v.push(top);
    v
}

/// `y := (x + y) mod N` for `x, y < N`, optionally controlled.
///
/// Add with carry into `top`; flag the sum as `>= N` by comparing the
/// `n+1`-bit sum against `N`; subtract `N` under the flag; clear the flag
/// by comparing the result against `x` (it dropped below `x` exactly when
/// the subtraction happened). Only the first addition and the last
/// comparison take the control: with the control off, the sum stays below
/// `N` and the middle blocks cancel. `61n+16` CNOTs (`71n+27` controlled),
/// counting controlled constant binding at its average.
pub(crate) fn emit_mod_add(
    b: &mut Builder,
    x: &[usize],
    y: &[usize],
    modulus: u64,
    s: &ModScratch,
    ctrl: Option<usize>,
) {
    let wide = with_top(y, s.top);
    b.block("add", |b| builder::add(b, x, y, s.c0, Some(s.top), ctrl));
    b.block("compare_n", |b| {
        builder::const_less_than(b, &wide, modulus, &s.bind, s.c0, s.flag);
        b.x(s.flag);
    });
    b.block("sub_n", |b| {
        builder::ctrl_const_sub(b, s.flag, modulus, y, &s.bind, s.c0, Some(s.top))
    });
    b.block("clear_flag", |b| {
        builder::less_than(b, y, x, s.c0, s.flag, ctrl)
    });
}

/// `x := 2x mod N` for `x < N`, `N` odd.
///
/// Shift into `top`, flag `2x >= N` by comparison, subtract `N` under the
/// flag, then clear the flag from the result's low bit (odd exactly when
/// `N` was subtracted). `31n+15` CNOTs at average binding.
pub(crate) fn emit_mod_double(b: &mut Builder, x: &[usize], modulus: u64, s: &ModScratch) {
    let wide = with_top(x, s.top);
    b.block("shift", |b| builder::shift_left(b, &wide));
    b.block("compare_n", |b| {
        builder::const_less_than(b, &wide, modulus, &s.bind, s.c0, s.flag);
        b.x(s.flag);
    });
    b.block("sub_n", |b| {
        builder::ctrl_const_sub(b, s.flag, modulus, x, &s.bind, s.c0, Some(s.top))
    });
    b.block("clear_flag", |b| b.cx(x[0], s.flag));
}

/// `|x⟩|y⟩ → |x⟩|(x+y) mod N⟩` for `x, y < N`.
pub fn build_modular_adder(n: usize, modulus: u64, controlled: bool) -> Result<Circuit> {
    check_modulus(n, modulus)?;
    let mut b = Builder::new();
    let ctrl = control(&mut b, controlled);
    let x = b.alloc("x", n, Role::Input);
    let y = b.alloc("y", n, Role::Output);
    let s = ModScratch::alloc(&mut b, n);
    emit_mod_add(&mut b, &x, &y, modulus, &s, ctrl);
    b.finish()
}

/// Shift of the `n+1`-qubit register `x`. The vacated end must hold 0:
/// the top qubit for a left shift, the bottom qubit for a right shift.
/// Inputs violating that are out of contract. `2n` CNOTs.
pub fn build_shift(n: usize, direction: ShiftDirection) -> Result<Circuit> {
    check_width(n)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n + 1, Role::Output);
    match direction {
        ShiftDirection::Left => builder::shift_left(&mut b, &x),
        ShiftDirection::Right => builder::shift_right(&mut b, &x),
    }
    b.finish()
}

/// `|x⟩ → |2x mod N⟩` for `x < N`, `N` odd.
pub fn build_modular_doubler(n: usize, modulus: u64) -> Result<Circuit> {
    check_modulus(n, modulus)?;
    let mut b = Builder::new();
    let x = b.alloc("x", n, Role::Output);
    let s = ModScratch::alloc(&mut b, n);
    emit_mod_double(&mut b, &x, modulus, &s);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{exhaustive_verify, product_domain, Assignment};
    use alloc::vec;

    fn val(a: &Assignment, name: &str) -> u64 {
        a.iter().find(|(n, _)| n == name).unwrap().1
    }

    #[test]
    fn exact_counts() {
        for n in 1..=16usize {
            let n64 = n as u64;
            assert_eq!(build_adder(n, false).unwrap().cnot_count(), 16 * n64 + 1);
            assert_eq!(build_adder(n, true).unwrap().cnot_count(), 26 * n64 + 6);
            assert_eq!(
                build_comparator(n, false).unwrap().cnot_count(),
                16 * n64 + 1
            );
            assert_eq!(
                build_comparator(n, true).unwrap().cnot_count(),
                16 * n64 + 7
            );
            assert_eq!(
                build_const_adder(n, (1 << n) - 1, false)
                    .unwrap()
                    .cnot_count(),
                13 * n64 + 1
            );
            assert_eq!(
                build_const_comparator(n, 1).unwrap().cnot_count(),
                12 * n64 + 1
            );
            for dir in [ShiftDirection::Left, ShiftDirection::Right] {
                assert_eq!(build_shift(n, dir).unwrap().cnot_count(), 2 * n64);
            }
        }
    }

    #[test]
    fn ctrl_const_adder_count_tracks_hamming_weight() {
        let c = build_const_adder(8, 0b1011_0001, true).unwrap();
        assert_eq!(c.cnot_count(), 16 * 8 + 1 + 2 * 4);
        assert_eq!(c.binding_cnots(), 8);
        assert_eq!(c.normalized_cnot_count(), 17 * 8 + 1);
    }

    #[test]
    fn modular_counts_at_average_binding() {
        let c = build_modular_adder(4, 13, false).unwrap();
        assert_eq!(c.normalized_cnot_count(), 260);
        let c = build_modular_adder(4, 13, true).unwrap();
        assert_eq!(c.normalized_cnot_count(), 311);
        let c = build_modular_doubler(4, 13).unwrap();
        assert_eq!(c.normalized_cnot_count(), 139);
    }

    #[test]
    fn adder_adds() {
        let c = build_adder(4, false).unwrap();
        let r = exhaustive_verify(&c, [vec![("x".into(), 3), ("y".into(), 5)]], |_| {
            vec![("y".into(), 8), ("carry".into(), 0), ("x".into(), 3)]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn controlled_adder_respects_control() {
        let c = build_adder(3, true).unwrap();
        let dom = product_domain(&[("ctrl", 0..2), ("x", 0..8), ("y", 0..8)]);
        let r = exhaustive_verify(&c, dom, |a| {
            let (k, x, y) = (val(a, "ctrl"), val(a, "x"), val(a, "y"));
            let s = if k == 1 { x + y } else { y };
            vec![
                ("y".into(), s & 7),
                ("carry".into(), s >> 3),
                ("x".into(), x),
            ]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn const_adder_example() {
        let c = build_const_adder(4, 6, false).unwrap();
        let r = exhaustive_verify(&c, [vec![("y".into(), 7)]], |_| {
            vec![("y".into(), 13), ("carry".into(), 0)]
        })
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn const_comparator_zero_is_never_greater() {
        let c = build_const_comparator(3, 0).unwrap();
        let r = exhaustive_verify(&c, product_domain(&[("x", 0..8)]), |_| {
            vec![("lt".into(), 0)]
        })
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn shifts_move_bits() {
        let c = build_shift(4, ShiftDirection::Left).unwrap();
        let r = exhaustive_verify(&c, [vec![("x".into(), 3)]], |_| vec![("x".into(), 6)]).unwrap();
        assert!(r.passed());
        let c = build_shift(4, ShiftDirection::Right).unwrap();
        let dom = (0..32u64).step_by(2).map(|v| vec![("x".into(), v)]);
        let r = exhaustive_verify(&c, dom, |a| vec![("x".into(), val(a, "x") / 2)]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn modular_doubler_fixes_zero() {
        let c = build_modular_doubler(4, 13).unwrap();
        let r = exhaustive_verify(&c, [vec![("x".into(), 0)]], |_| vec![("x".into(), 0)]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(build_adder(0, false), Err(Error::ZeroWidth));
        assert_eq!(
            build_const_adder(4, 16, false),
            Err(Error::ConstantTooWide { constant: 16, n: 4 })
        );
        assert!(matches!(
            build_modular_adder(4, 16, false),
            Err(Error::BadModulus { .. })
        ));
        assert!(matches!(
            build_modular_doubler(4, 12),
            Err(Error::BadModulus { .. })
        ));
    }
}
