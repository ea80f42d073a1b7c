//! Windowed modular exponentiation `|x⟩|1⟩ → |x⟩|a^x mod N⟩`.
//!
//! The exponent is cut into windows of `m` bits. Each window looks up
//! `a^(j·2^(km))` from a classical table addressed by its bits and
//! multiplies it into a fresh accumulator. Intermediate accumulators are
//! kept until the last product is formed, then erased by running the
//! earlier windows backwards. All windows but the last multiply with a
//! forward Montgomery pass against a table stored in Montgomery form, so
//! the accumulator stays in plain form; the last window uses the fast
//! modular multiplier against a plain table.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{check_modulus, check_width, ModScratch};
use crate::builder::Builder;
use crate::circuit::{Circuit, Role};
use crate::modmul::{emit_fast_modmul, emit_montgomery_forward, emit_range, MontRegs};
use crate::numtheory::{gcd, mul_mod, pow_mod};
use crate::{Error, Result};

/// Classical table for one exponent window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowTable {
    pub window_index: usize,
    /// Number of exponent bits addressing this table.
    pub address_bits: usize,
    /// `2^address_bits` residues below `N`.
    pub entries: Vec<u64>,
    pub montgomery_form: bool,
}

/// Validated parameters of one exponentiation circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModExpParams {
    pub n: usize,
    pub modulus: u64,
    pub base: u64,
    pub window: usize,
}

impl ModExpParams {
    pub fn new(n: usize, modulus: u64, base: u64, window: usize) -> Result<Self> {
        check_width(2 * n)?;
        check_modulus(n, modulus)?;
        if base == 0 || base >= modulus || gcd(base, modulus) != 1 {
            return Err(Error::NotCoprime { base, modulus });
        }
        if window == 0 || window > 2 * n {
            return Err(Error::WindowOutOfRange {
                m: window,
                max: 2 * n,
            });
        }
        Ok(Self {
            n,
            modulus,
            base,
            window,
        })
    }

    pub fn exponent_width(&self) -> usize {
        2 * self.n
    }

    pub fn window_count(&self) -> usize {
        self.exponent_width().div_ceil(self.window)
    }

    /// Address width of window `k` (the last one may be short).
    pub fn window_bits(&self, k: usize) -> usize {
        let w = self.window_count();
        if k + 1 < w {
            self.window
        } else {
            self.exponent_width() - self.window * (w - 1)
        }
    }
}

/// Tables for every window of a `2n`-bit exponent. Entry `j` of table `k`
/// is `a^(j·2^(km)) mod N`, times `2^n mod N` in Montgomery form.
pub fn precompute_window_tables(
    base: u64,
    modulus: u64,
    n: usize,
    m: usize,
    montgomery_form: bool,
) -> Result<Vec<WindowTable>> {
    let p = ModExpParams::new(n, modulus, base, m)?;
    Ok((0..p.window_count())
        .map(|k| table_for(&p, k, montgomery_form))
        .collect())
}

fn table_for(p: &ModExpParams, k: usize, montgomery_form: bool) -> WindowTable {
    let bits = p.window_bits(k);
    // a^(2^(km)) by repeated squaring.
    let mut step = p.base % p.modulus;
    for _ in 0..k * p.window {
        step = mul_mod(step, step, p.modulus);
    }
    let scale = if montgomery_form {
        pow_mod(2, p.n as u64, p.modulus)
    } else {
        1 % p.modulus
    };
    let mut entries = Vec::with_capacity(1 << bits);
    let mut v = scale;
    for _ in 0..1u64 << bits {
        entries.push(v);
        v = mul_mod(v, step, p.modulus);
    }
    WindowTable {
        window_index: k,
        address_bits: bits,
        entries,
        montgomery_form,
    }
}

/// Algebraic normal form of the table: coefficient `S` is the XOR of all
/// entries whose address is a subset of `S`, so that
/// `T[x] = XOR over S ⊆ x of coef[S]`.
fn anf(entries: &[u64]) -> Vec<u64> {
    let mut c = entries.to_vec();
    let m = c.len().trailing_zeros();
    for i in 0..m {
        let bit = 1 << i;
        for s in 0..c.len() {
            if s & bit != 0 {
                c[s] ^= c[s ^ bit];
            }
        }
    }
    c
}

/// Qubit carrying the product of the address bits in each subset, for
/// subsets with at least one bit.
struct Monomials {
    addr: Vec<usize>,
    anc: Vec<usize>,
}

impl Monomials {
    fn alloc(b: &mut Builder, addr: &[usize], name: &str) -> Self {
        let m = addr.len();
        let count = (1usize << m) - m - 1;
        Self {
            addr: addr.to_vec(),
            anc: b.alloc(name, count, Role::Ancilla),
        }
    }

    fn subsets(&self) -> impl DoubleEndedIterator<Item = usize> {
        (1..1usize << self.addr.len()).filter(|s| s.count_ones() >= 2)
    }

    fn qubit(&self, s: usize) -> usize {
        if s.count_ones() == 1 {
            return self.addr[s.trailing_zeros() as usize];
        }
        // Rank of `s` among the multi-bit subsets.
        let singles = (usize::BITS - (s - 1).leading_zeros()) as usize;
        self.anc[s - 1 - singles]
    }

    fn toggle(&self, b: &mut Builder, s: usize) {
        let low = s & s.wrapping_neg();
        b.ccx(
            self.addr[low.trailing_zeros() as usize],
            self.qubit(s ^ low),
            self.qubit(s),
        );
    }

    fn compute(&self, b: &mut Builder) {
        b.block("monomials", |b| {
            self.subsets().for_each(|s| self.toggle(b, s))
        });
    }

    fn uncompute(&self, b: &mut Builder) {
        b.block("monomials", |b| {
            self.subsets().rev().for_each(|s| self.toggle(b, s))
        });
    }

    /// `data ^= T[address]` given the table's normal form.
    fn write(&self, b: &mut Builder, coef: &[u64], data: &[usize]) {
        for (i, &d) in data.iter().enumerate() {
            if coef[0] >> i & 1 == 1 {
                b.x(d);
            }
        }
        for (s, &c) in coef.iter().enumerate().skip(1) {
            let q = self.qubit(s);
            for (i, &d) in data.iter().enumerate() {
                if c >> i & 1 == 1 {
                    b.cx(q, d);
                }
            }
        }
    }
}

fn check_table(table: &WindowTable, m: usize, n: usize) -> Result<()> {
    check_width(m)?;
    check_width(n)?;
    if table.entries.len() != 1 << m {
        return Err(Error::TableLength {
            got: table.entries.len(),
            expected: 1 << m,
        });
    }
    match table.entries.iter().find(|&&e| e >> n != 0) {
        Some(&constant) => Err(Error::ConstantTooWide { constant, n }),
        None => Ok(()),
    }
}

/// `|x⟩|0⟩ → |x⟩|T[x]⟩` over an `m`-bit address; the monomial ancillas are
/// computed with one Toffoli each and uncomputed afterwards.
pub fn build_table_lookup(m: usize, table: &WindowTable, n: usize) -> Result<Circuit> {
    check_table(table, m, n)?;
    let mut b = Builder::new();
    let addr = b.alloc("address", m, Role::Input);
    let data = b.alloc("data", n, Role::Output);
    let mono = Monomials::alloc(&mut b, &addr, "monomials");
    let coef = anf(&table.entries);
    mono.compute(&mut b);
    b.block("write", |b| mono.write(b, &coef, &data));
    mono.uncompute(&mut b);
    b.finish()
}

/// Exponentiation circuit with registers `exponent` (`2n`, input) and
/// `target` (`n`, starts at 1, ends at `a^x mod N`); every other register
/// is a clean ancilla.
pub fn build_windowed_modexp(p: &ModExpParams) -> Result<Circuit> {
    let p = ModExpParams::new(p.n, p.modulus, p.base, p.window)?;
    let n = p.n;
    let w = p.window_count();
    let mut b = Builder::new();
    let exponent = b.alloc("exponent", 2 * n, Role::Input);
    let target = b.alloc_init("target", n, Role::Output, 1);
    let data = b.alloc("data", n, Role::Ancilla);
    let s = ModScratch::alloc(&mut b, n);
    let scratch = b.alloc("scratch", n, Role::Ancilla);

    let mut monos = Vec::with_capacity(w);
    let mut offset = 0;
    for k in 0..w {
        let bits = p.window_bits(k);
        monos.push(Monomials::alloc(
            &mut b,
            &exponent[offset..offset + bits],
            &format!("w{k}_monomials"),
        ));
        offset += bits;
    }
    let mont: Vec<MontRegs> = (0..w - 1)
        .map(|k| {
            let shared = Some((&scratch[..], s.c0, &s.bind[..]));
            MontRegs::alloc(
                &mut b,
                n,
                shared,
                &format!("w{k}_"),
                Role::Ancilla,
                Role::Ancilla,
            )
        })
        .collect();
    let result = b.alloc("product", n, Role::Ancilla);

    let mut acc: &[usize] = &target;
    let mut forward = Vec::with_capacity(w - 1);
    for (k, r) in mont.iter().enumerate() {
        let coef = anf(&table_for(&p, k, true).entries);
        monos[k].compute(&mut b);
        let range = emit_range(&mut b, |b| {
            b.block("lookup", |b| monos[k].write(b, &coef, &data));
            b.block("montgomery_forward", |b| {
                emit_montgomery_forward(b, &data, acc, p.modulus, r)
            });
            b.block("unlookup", |b| monos[k].write(b, &coef, &data));
        });
        forward.push(range);
        acc = r.result();
    }

    let last = &monos[w - 1];
    let coef = anf(&table_for(&p, w - 1, false).entries);
    last.compute(&mut b);
    b.block("lookup", |b| last.write(b, &coef, &data));
    b.block("fast_modmul", |b| {
        emit_fast_modmul(b, &data, acc, &result, p.modulus, &s)
    });
    b.block("unlookup", |b| last.write(b, &coef, &data));
    last.uncompute(&mut b);

    for k in (0..w - 1).rev() {
        b.replay_inverse(forward[k].clone());
        monos[k].uncompute(&mut b);
    }

    // target holds 1 again: clear it, then move the product in.
    b.block("move", |b| {
        b.x(target[0]);
        for (&t, &r) in target.iter().zip(&result) {
            b.cx(r, t);
            b.cx(t, r);
        }
    });
    b.finish()
}

/// Expected `target` value for exponent `x`.
pub fn modexp_oracle(p: &ModExpParams, x: u64) -> Vec<(alloc::string::String, u64)> {
    vec![("target".into(), pow_mod(p.base, x, p.modulus))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{exhaustive_verify, product_domain};

    #[test]
    fn table_examples() {
        let t = precompute_window_tables(7, 13, 4, 2, false).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[0].entries, [1, 7, 10, 5]);
        let t = precompute_window_tables(7, 13, 4, 2, true).unwrap();
        assert_eq!(t[0].entries, [3, 8, 4, 2]);
        let t = precompute_window_tables(2, 13, 4, 3, false).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[2].entries.len(), 4);
        assert_eq!(t[2].entries[1], pow_mod(2, 64, 13));
        assert!(precompute_window_tables(3, 15, 4, 2, false).is_err());
    }

    #[test]
    fn anf_round_trips() {
        let e = [1, 7, 10, 5, 3, 12, 0, 9];
        let c = anf(&e);
        for (x, &v) in e.iter().enumerate() {
            let got = (0..8).filter(|s| s & !x == 0).fold(0, |a, s| a ^ c[s]);
            assert_eq!(got, v);
        }
    }

    #[test]
    fn lookup_exhaustive() {
        let table = &precompute_window_tables(7, 13, 4, 3, false).unwrap()[0];
        let c = build_table_lookup(3, table, 4).unwrap();
        let r = exhaustive_verify(&c, product_domain(&[("address", 0..8)]), |a| {
            vec![("data".into(), table.entries[a[0].1 as usize])]
        })
        .unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(c.cnot_count() <= (4 + 13) * 8);
        let one = WindowTable {
            window_index: 0,
            address_bits: 1,
            entries: vec![0, 1],
            montgomery_form: false,
        };
        assert!(build_table_lookup(2, &one, 4).is_err());
    }

    #[test]
    fn modexp_small_exhaustive() {
        for m in [1, 2, 3, 4, 8] {
            let p = ModExpParams::new(4, 13, 2, m).unwrap();
            let c = build_windowed_modexp(&p).unwrap();
            let r = exhaustive_verify(&c, product_domain(&[("exponent", 0..256)]), |a| {
                modexp_oracle(&p, a[0].1)
            })
            .unwrap();
            assert!(r.passed(), "m={m}: {r:?}");
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModExpParams::new(4, 15, 6, 2).is_err());
        assert!(ModExpParams::new(4, 15, 7, 9).is_err());
        assert!(ModExpParams::new(4, 15, 7, 0).is_err());
        assert!(ModExpParams::new(4, 14, 3, 2).is_err());
    }
}
