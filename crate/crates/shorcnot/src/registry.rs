//! Named circuit families with their input domains and reference oracles.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shorcnot_core::arith::{self, ShiftDirection};
use shorcnot_core::cost::CostFormulaId;
use shorcnot_core::modexp::{self, ModExpParams};
use shorcnot_core::modmul;
use shorcnot_core::numtheory::{mod_inverse, mul_mod, pow_mod};
use shorcnot_core::sim::{self, Assignment, VerifyReport};
use shorcnot_core::{Circuit, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitKind {
    Adder,
    CtrlAdder,
    ConstAdder,
    CtrlConstAdder,
    Compare,
    CtrlCompare,
    ConstCompare,
    ModAdd,
    CtrlModAdd,
    ShiftLeft,
    ShiftRight,
    ModDouble,
    CtrlCopy,
    FastModmul,
    MontForward,
    MontFull,
    Lookup,
    Modexp,
}

impl CircuitKind {
    pub const ALL: [CircuitKind; 18] = [
        Self::Adder,
        Self::CtrlAdder,
        Self::ConstAdder,
        Self::CtrlConstAdder,
        Self::Compare,
        Self::CtrlCompare,
        Self::ConstCompare,
        Self::ModAdd,
        Self::CtrlModAdd,
        Self::ShiftLeft,
        Self::ShiftRight,
        Self::ModDouble,
        Self::CtrlCopy,
        Self::FastModmul,
        Self::MontForward,
        Self::MontFull,
        Self::Lookup,
        Self::Modexp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Adder => "adder",
            Self::CtrlAdder => "ctrl-adder",
            Self::ConstAdder => "const-adder",
            Self::CtrlConstAdder => "ctrl-const-adder",
            Self::Compare => "compare",
            Self::CtrlCompare => "ctrl-compare",
            Self::ConstCompare => "const-compare",
            Self::ModAdd => "mod-add",
            Self::CtrlModAdd => "ctrl-mod-add",
            Self::ShiftLeft => "shift-left",
            Self::ShiftRight => "shift-right",
            Self::ModDouble => "mod-double",
            Self::CtrlCopy => "ctrl-copy",
            Self::FastModmul => "fast-modmul",
            Self::MontForward => "montgomery-forward",
            Self::MontFull => "montgomery-full",
            Self::Lookup => "lookup",
            Self::Modexp => "modexp",
        }
    }

    /// The closed form this family is measured against, if any.
    pub fn formula(self) -> Option<CostFormulaId> {
        use CostFormulaId as F;
        Some(match self {
            Self::Adder => F::Adder,
            Self::CtrlAdder => F::CtrlAdder,
            Self::ConstAdder => F::ConstAdder,
            Self::CtrlConstAdder => F::CtrlConstAdder,
            Self::Compare => F::Compare,
            Self::CtrlCompare => F::CtrlCompare,
            Self::ConstCompare => F::ConstCompare,
            Self::ModAdd => F::ModAdd,
            Self::CtrlModAdd => F::CtrlModAdd,
            Self::ShiftLeft | Self::ShiftRight => F::Shift,
            Self::ModDouble => F::ModDouble,
            Self::FastModmul => F::FastModmul,
            Self::MontForward => F::MontForward,
            Self::MontFull => F::MontFull,
            Self::CtrlCopy | Self::Lookup | Self::Modexp => return None,
        })
    }

    /// Representative family for a cost-model primitive.
    pub fn for_formula(id: CostFormulaId) -> Option<CircuitKind> {
        Self::ALL.into_iter().find(|k| k.formula() == Some(id))
    }

    fn needs_modulus(self) -> bool {
        matches!(
            self,
            Self::ModAdd
                | Self::CtrlModAdd
                | Self::ModDouble
                | Self::FastModmul
                | Self::MontForward
                | Self::MontFull
                | Self::Lookup
                | Self::Modexp
        )
    }
}

impl fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CircuitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown circuit `{s}`"))
    }
}

/// Everything needed to build one circuit instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitSpec {
    pub kind: CircuitKind,
    pub n: usize,
    pub modulus: Option<u64>,
    pub constant: Option<u64>,
    pub base: Option<u64>,
    pub window: Option<usize>,
}

impl CircuitSpec {
    pub fn new(kind: CircuitKind, n: usize) -> Self {
        Self {
            kind,
            n,
            modulus: None,
            constant: None,
            base: None,
            window: None,
        }
    }

    pub fn modulus(mut self, modulus: u64) -> Self {
        self.modulus = Some(modulus);
        self
    }

    fn get_modulus(&self) -> Result<u64, Error> {
        self.modulus
            .ok_or(Error::Precondition("this circuit needs --modulus"))
    }

    fn constant_or_default(&self) -> u64 {
        self.constant.unwrap_or(1)
    }

    fn base_or_default(&self) -> u64 {
        self.base.unwrap_or(2)
    }

    fn window_or_default(&self) -> usize {
        self.window.unwrap_or(2.min(2 * self.n))
    }

    fn modexp_params(&self) -> Result<ModExpParams, Error> {
        ModExpParams::new(
            self.n,
            self.get_modulus()?,
            self.base_or_default(),
            self.window_or_default(),
        )
    }

    fn lookup_table(&self) -> Result<modexp::WindowTable, Error> {
        let p = self.modexp_params()?;
        let tables = modexp::precompute_window_tables(p.base, p.modulus, p.n, p.window, false)?;
        Ok(tables.into_iter().next().expect("at least one window"))
    }

    pub fn build(&self) -> Result<Circuit, Error> {
        use CircuitKind as K;
        let n = self.n;
        if self.kind.needs_modulus() {
            self.get_modulus()?;
        }
        let modulus = self.modulus.unwrap_or(0);
        match self.kind {
            K::Adder => arith::build_adder(n, false),
            K::CtrlAdder => arith::build_adder(n, true),
            K::ConstAdder => arith::build_const_adder(n, self.constant_or_default(), false),
            K::CtrlConstAdder => arith::build_const_adder(n, self.constant_or_default(), true),
            K::Compare => arith::build_comparator(n, false),
            K::CtrlCompare => arith::build_comparator(n, true),
            K::ConstCompare => arith::build_const_comparator(n, self.constant_or_default()),
            K::ModAdd => arith::build_modular_adder(n, modulus, false),
            K::CtrlModAdd => arith::build_modular_adder(n, modulus, true),
            K::ShiftLeft => arith::build_shift(n, ShiftDirection::Left),
            K::ShiftRight => arith::build_shift(n, ShiftDirection::Right),
            K::ModDouble => arith::build_modular_doubler(n, modulus),
            K::CtrlCopy => modmul::build_ctrl_copy(n, true),
            K::FastModmul => modmul::build_fast_modmul(n, modulus),
            K::MontForward => modmul::build_montgomery_forward(n, modulus),
            K::MontFull => modmul::build_montgomery_full(n, modulus),
            K::Lookup => {
                let table = self.lookup_table()?;
                modexp::build_table_lookup(table.address_bits, &table, n)
            }
            K::Modexp => modexp::build_windowed_modexp(&self.modexp_params()?),
        }
    }

    /// Input registers and the value range each one is swept over.
    pub fn domain(&self) -> Result<Vec<(&'static str, Range<u64>)>, Error> {
        use CircuitKind as K;
        let full = 0..1u64 << self.n;
        let residues = || self.get_modulus().map(|m| 0..m);
        let ctrl = ("ctrl", 0..2);
        Ok(match self.kind {
            K::Adder | K::Compare => vec![("x", full.clone()), ("y", full)],
            K::CtrlAdder | K::CtrlCompare => vec![ctrl, ("x", full.clone()), ("y", full)],
            K::ConstAdder => vec![("y", full)],
            K::CtrlConstAdder => vec![ctrl, ("y", full)],
            K::ConstCompare => vec![("x", full)],
            K::ShiftLeft | K::ShiftRight => vec![("x", full)],
            K::ModAdd | K::FastModmul | K::MontForward | K::MontFull => {
                vec![("x", residues()?), ("y", residues()?)]
            }
            K::CtrlModAdd => vec![ctrl, ("x", residues()?), ("y", residues()?)],
            K::ModDouble => vec![("x", residues()?)],
            K::CtrlCopy => vec![ctrl, ("src", full)],
            K::Lookup => vec![("address", 0..1 << self.lookup_table()?.address_bits)],
            K::Modexp => vec![("exponent", 0..1 << (2 * self.n))],
        })
    }

    pub fn domain_size(&self) -> Result<u128, Error> {
        Ok(self
            .domain()?
            .iter()
            .map(|(_, r)| (r.end - r.start) as u128)
            .product())
    }

    /// Maps a domain point to the register values written before the run.
    fn prepare(&self, mut a: Assignment) -> Assignment {
        if self.kind == CircuitKind::ShiftRight {
            a[0].1 <<= 1;
        }
        a
    }

    /// Expected output registers for prepared inputs.
    pub fn oracle(&self, a: &Assignment) -> Result<Assignment, Error> {
        use CircuitKind as K;
        let n = self.n;
        let v = |name: &str| a.iter().find(|(r, _)| r == name).map_or(0, |(_, v)| *v);
        let on = v("ctrl") == 1 || !a.iter().any(|(r, _)| r == "ctrl");
        let mask = (1u64 << n) - 1;
        let sum = |add: u64| {
            let s = v("y") + if on { add } else { 0 };
            vec![("y".to_string(), s & mask), ("carry".to_string(), s >> n)]
        };
        let modulus = self.modulus.unwrap_or(1);
        Ok(match self.kind {
            K::Adder | K::CtrlAdder => sum(v("x")),
            K::ConstAdder | K::CtrlConstAdder => sum(self.constant_or_default()),
            K::Compare | K::CtrlCompare => vec![("lt".into(), (on && v("x") < v("y")) as u64)],
            K::ConstCompare => vec![("lt".into(), (v("x") < self.constant_or_default()) as u64)],
            K::ModAdd | K::CtrlModAdd => {
                let x = if on { v("x") } else { 0 };
                vec![("y".into(), (x + v("y")) % modulus)]
            }
            K::ShiftLeft => vec![("x".into(), v("x") << 1)],
            K::ShiftRight => vec![("x".into(), v("x") >> 1)],
            K::ModDouble => vec![("x".into(), 2 * v("x") % modulus)],
            K::CtrlCopy => vec![("dst".into(), if on { v("src") } else { 0 })],
            K::FastModmul => vec![("result".into(), mul_mod(v("x"), v("y"), modulus))],
            K::MontForward | K::MontFull => {
                let rinv = mod_inverse(pow_mod(2, n as u64, modulus), modulus)
                    .ok_or(Error::Precondition("modulus must be odd"))?;
                let p = mul_mod(mul_mod(v("x"), v("y"), modulus), rinv, modulus);
                vec![("result".into(), p)]
            }
            K::Lookup => {
                let t = self.lookup_table()?;
                vec![("data".into(), t.entries[v("address") as usize])]
            }
            K::Modexp => vec![(
                "target".into(),
                pow_mod(self.base_or_default(), v("exponent"), modulus),
            )],
        })
    }

    /// Runs the circuit over its whole domain, or over `sample` random
    /// points when given.
    pub fn verify(
        &self,
        circuit: &Circuit,
        sample: Option<usize>,
        seed: u64,
    ) -> Result<VerifyReport, Error> {
        let domain = self.domain()?;
        let mut oracle_err = None;
        let mut oracle = |a: &Assignment| {
            self.oracle(a).unwrap_or_else(|e| {
                oracle_err.get_or_insert(e);
                Vec::new()
            })
        };
        let report = match sample {
            None => {
                let points = sim::product_domain(&domain).map(|a| self.prepare(a));
                sim::exhaustive_verify(circuit, points, &mut oracle)?
            }
            Some(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let points: Vec<Assignment> = (0..k)
                    .map(|_| {
                        let a = domain
                            .iter()
                            .map(|(name, r)| {
                                let span = r.end - r.start;
                                (name.to_string(), r.start + rng.next_u64() % span)
                            })
                            .collect();
                        self.prepare(a)
                    })
                    .collect();
                sim::exhaustive_verify(circuit, points, &mut oracle)?
            }
        };
        match oracle_err {
            Some(e) => Err(e),
            None => Ok(report),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in CircuitKind::ALL {
            assert_eq!(k.as_str().parse::<CircuitKind>(), Ok(k));
        }
        assert!("nope".parse::<CircuitKind>().is_err());
        for id in CostFormulaId::ALL {
            if id != CostFormulaId::Qft2n {
                assert!(CircuitKind::for_formula(id).is_some(), "{id}");
            }
        }
    }

    #[test]
    fn every_family_verifies_at_n3() {
        for k in CircuitKind::ALL {
            let spec = CircuitSpec::new(k, 3).modulus(7);
            let c = spec.build().unwrap();
            let r = spec.verify(&c, None, 0).unwrap();
            assert!(r.passed(), "{k}: {:?}", r.failure);
            let r = spec.verify(&c, Some(10), 1).unwrap();
            assert_eq!(r.points, 10);
            assert!(r.passed());
        }
    }

    #[test]
    fn missing_modulus_is_rejected() {
        assert!(CircuitSpec::new(CircuitKind::ModAdd, 3).build().is_err());
    }
}
