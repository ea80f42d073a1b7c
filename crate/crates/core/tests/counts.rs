//! Measured CNOT counts of the built circuits against the closed forms.

use shorcnot_core::arith::*;
use shorcnot_core::cost::{optimal_window, primitive_cnot_count, CostFormulaId as Id};
use shorcnot_core::modexp::{build_windowed_modexp, ModExpParams};
use shorcnot_core::modmul::*;

fn model(id: Id, n: usize) -> u64 {
    primitive_cnot_count(id, n as u64) as u64
}

#[test]
fn exact_primitives() {
    for n in 2..=16 {
        assert_eq!(
            build_adder(n, false).unwrap().cnot_count(),
            model(Id::Adder, n)
        );
        assert_eq!(
            build_adder(n, true).unwrap().cnot_count(),
            model(Id::CtrlAdder, n)
        );
        assert_eq!(
            build_comparator(n, false).unwrap().cnot_count(),
            model(Id::Compare, n)
        );
        assert_eq!(
            build_comparator(n, true).unwrap().cnot_count(),
            model(Id::CtrlCompare, n)
        );
        for dir in [ShiftDirection::Left, ShiftDirection::Right] {
            assert_eq!(
                build_shift(n, dir).unwrap().cnot_count(),
                model(Id::Shift, n)
            );
        }
    }
}

#[test]
fn constant_dependent_primitives() {
    for n in 2..=16usize {
        let max = (1u64 << n) - 1;
        for k in [0, 1, max / 3, max] {
            assert_eq!(
                build_const_adder(n, k, false).unwrap().cnot_count(),
                model(Id::ConstAdder, n)
            );
            assert_eq!(
                build_const_comparator(n, k).unwrap().cnot_count(),
                model(Id::ConstCompare, n)
            );
            let c = build_const_adder(n, k, true).unwrap();
            assert_eq!(c.normalized_cnot_count(), model(Id::CtrlConstAdder, n));
            assert_eq!(
                c.cnot_count(),
                16 * n as u64 + 1 + 2 * k.count_ones() as u64
            );
        }
        for modulus in [max, max - 2, (1 << (n - 1)) + 1] {
            if modulus < 3 {
                continue;
            }
            // Raw counts differ from the model only through the popcount of
            // the bound constants.
            let n64 = n as i64;
            let bound = 2 * modulus.count_ones() as i64 - n64;
            let half = 2 * modulus.div_ceil(2).count_ones() as i64 - n64;
            let forward = 2 * bound + (n64 - 1) * half;
            let cases = [
                (
                    build_modular_adder(n, modulus, false).unwrap(),
                    Id::ModAdd,
                    bound,
                ),
                (
                    build_modular_adder(n, modulus, true).unwrap(),
                    Id::CtrlModAdd,
                    bound,
                ),
                (
                    build_modular_doubler(n, modulus).unwrap(),
                    Id::ModDouble,
                    bound,
                ),
                (
                    build_fast_modmul(n, modulus).unwrap(),
                    Id::FastModmul,
                    2 * (n64 - 1) * bound,
                ),
                (
                    build_montgomery_forward(n, modulus).unwrap(),
                    Id::MontForward,
                    forward,
                ),
                (
                    build_montgomery_full(n, modulus).unwrap(),
                    Id::MontFull,
                    2 * forward,
                ),
            ];
            for (c, id, offset) in cases {
                assert_eq!(
                    c.normalized_cnot_count(),
                    model(id, n),
                    "{id} n={n} N={modulus}"
                );
                assert_eq!(
                    c.cnot_count() as i64 - model(id, n) as i64,
                    offset,
                    "{id} n={n} N={modulus}"
                );
            }
        }
    }
}

#[test]
fn controlled_copy() {
    for n in 1..=16 {
        assert_eq!(build_ctrl_copy(n, true).unwrap().cnot_count(), 6 * n as u64);
        assert_eq!(build_ctrl_copy(n, false).unwrap().cnot_count(), n as u64);
    }
}

#[test]
fn modexp_near_closed_form() {
    for (n, modulus) in [(4usize, 13u64), (6, 61), (8, 251)] {
        let plan = optimal_window(n as u64).unwrap();
        let p = ModExpParams::new(n, modulus, 2, plan.m as usize).unwrap();
        let c = build_windowed_modexp(&p).unwrap();
        let delta = c.normalized_cnot_count() as f64 / plan.cnot_total as f64 - 1.0;
        assert!(delta.abs() < 0.05, "n={n}: {delta}");
    }
}
