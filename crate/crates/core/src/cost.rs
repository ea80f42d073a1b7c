//! Closed-form CNOT counts, window optimization, the asymptotic fit and
//! runtime estimates. Integer formulas use `u128` with checked arithmetic;
//! only the fit and the `n³/log₂n` totals use floating point.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CostFormulaId {
    Adder,
    ConstAdder,
    CtrlAdder,
    CtrlConstAdder,
    Compare,
    ConstCompare,
    CtrlCompare,
    ModAdd,
    CtrlModAdd,
    Shift,
    ModDouble,
    FastModmul,
    MontForward,
    MontFull,
    Qft2n,
}

impl CostFormulaId {
    pub const ALL: [CostFormulaId; 15] = [
        Self::Adder,
        Self::ConstAdder,
        Self::CtrlAdder,
        Self::CtrlConstAdder,
        Self::Compare,
        Self::ConstCompare,
        Self::CtrlCompare,
        Self::ModAdd,
        Self::CtrlModAdd,
        Self::Shift,
        Self::ModDouble,
        Self::FastModmul,
        Self::MontForward,
        Self::MontFull,
        Self::Qft2n,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Adder => "adder",
            Self::ConstAdder => "const-adder",
            Self::CtrlAdder => "ctrl-adder",
            Self::CtrlConstAdder => "ctrl-const-adder",
            Self::Compare => "compare",
            Self::ConstCompare => "const-compare",
            Self::CtrlCompare => "ctrl-compare",
            Self::ModAdd => "mod-add",
            Self::CtrlModAdd => "ctrl-mod-add",
            Self::Shift => "shift",
            Self::ModDouble => "mod-double",
            Self::FastModmul => "fast-modmul",
            Self::MontForward => "mont-forward",
            Self::MontFull => "mont-full",
            Self::Qft2n => "qft-2n",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s)
    }

    /// `(a, b, c)` with count `a·n² + b·n + c`.
    fn coefficients(self) -> (i128, i128, i128) {
        match self {
            Self::Adder | Self::Compare => (0, 16, 1),
            Self::ConstAdder => (0, 13, 1),
            Self::CtrlAdder => (0, 26, 6),
            Self::CtrlConstAdder => (0, 17, 1),
            Self::ConstCompare => (0, 12, 1),
            Self::CtrlCompare => (0, 16, 7),
            Self::ModAdd => (0, 61, 16),
            Self::CtrlModAdd => (0, 71, 27),
            Self::Shift => (0, 2, 0),
            Self::ModDouble => (0, 31, 15),
            Self::FastModmul => (102, -54, -42),
            Self::MontForward => (45, 17, 8),
            Self::MontFull => (90, 35, 16),
            Self::Qft2n => (4, 1, 0),
        }
    }
}

impl fmt::Display for CostFormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Model count of one primitive at width `n`. The fast multiplier's
/// formula is negative at `n = 1` and clamps to 0.
pub fn primitive_cnot_count(id: CostFormulaId, n: u64) -> u128 {
    let (a, b, c) = id.coefficients();
    let n = n as i128;
    (a * n * n + b * n + c).max(0) as u128
}

fn pow2(e: u64) -> Option<u128> {
    1u128.checked_shl(u32::try_from(e).ok()?)
}

/// Windowed exponentiation total for window size `m`:
/// `(W−1)·[(n+13)·2^m + 90n² + 34n − 10] + (n+13)·2^(2n − m(W−1)) + 102n² − 54n − 42`
/// with `W = ⌈2n/m⌉`.
pub fn modexp_cnot_count(n: u64, m: u64) -> Result<u128> {
    if n == 0 || m == 0 || m > 2 * n {
        return Err(Error::WindowOutOfRange {
            m: m as usize,
            max: 2 * n as usize,
        });
    }
    let overflow = Error::Overflow {
        n: n as usize,
        m: m as usize,
    };
    let w = (2 * n).div_ceil(m);
    let last = 2 * n - m * (w - 1);
    let n2 = n as u128 * n as u128;
    let eval = || -> Option<u128> {
        let per_window = (n as u128 + 13)
            .checked_mul(pow2(m)?)?
            .checked_add(90 * n2 + 34 * n as u128)?
            - 10;
        let windows = (w as u128 - 1).checked_mul(per_window)?;
        let tail = (n as u128 + 13).checked_mul(pow2(last)?)?;
        let fast = primitive_cnot_count(CostFormulaId::FastModmul, n);
        windows.checked_add(tail)?.checked_add(fast)
    };
    eval().ok_or(overflow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowPlan {
    pub m: u64,
    pub window_count: u64,
    pub cnot_total: u128,
}

/// Window size minimizing [`modexp_cnot_count`], smallest `m` on ties.
pub fn optimal_window(n: u64) -> Result<WindowPlan> {
    if n == 0 {
        return Err(Error::ZeroWidth);
    }
    let mut best: Option<WindowPlan> = None;
    for m in 1..=2 * n {
        let Ok(total) = modexp_cnot_count(n, m) else {
            // 2^m only grows from here.
            break;
        };
        if best.is_none_or(|b| total < b.cnot_total) {
            best = Some(WindowPlan {
                m,
                window_count: (2 * n).div_ceil(m),
                cnot_total: total,
            });
        }
    }
    best.ok_or(Error::Overflow {
        n: n as usize,
        m: 1,
    })
}

fn cubic_over_log(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2"));
    }
    let n = n as f64;
    Ok(n * n * n / libm::log2(n))
}

/// Leading coefficient of the fitted whole-run count.
pub const FIT_COEFFICIENT: f64 = 217.0;
/// Leading coefficient of the lower bound.
pub const LOWER_BOUND_COEFFICIENT: f64 = 9.0;
/// CNOT time used by default in runtime estimates, in seconds.
pub const DEFAULT_T_CNOT: f64 = 2.85e-4;

/// `217·n³/log₂n + 4n² + n`, rounded.
pub fn total_shor_count(n: u64) -> Result<u128> {
    let qft = primitive_cnot_count(CostFormulaId::Qft2n, n) as f64;
    Ok(libm::round(FIT_COEFFICIENT * cubic_over_log(n)? + qft) as u128)
}

/// `9·n³/log₂n`, rounded.
pub fn lower_bound_count(n: u64) -> Result<u128> {
    Ok(libm::round(LOWER_BOUND_COEFFICIENT * cubic_over_log(n)?) as u128)
}

/// Floor for one `n`-bit addition: a Toffoli and three CNOTs per bit.
pub fn per_addition_lower_bound(n: u64) -> u128 {
    n as u128 * (crate::circuit::TOFFOLI_CNOTS as u128 + 3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub n: u64,
    /// `n³/log₂n`.
    pub x: f64,
    /// Optimal-window model total.
    pub y: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub coefficient: f64,
    pub points: Vec<FitPoint>,
}

/// Least-squares slope of `y = c·x` through the origin.
pub fn fit_through_origin(points: &[(f64, f64)]) -> f64 {
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(sxy, sxx), &(x, y)| (sxy + x * y, sxx + x * x));
    sxy / sxx
}

/// Fits the optimal-window exponentiation count against `n³/log₂n`.
pub fn fit_leading_coefficient(n_values: &[u64]) -> Result<Fit> {
    if n_values.len() < 4 {
        return Err(Error::Precondition("the fit needs at least 4 points"));
    }
    if n_values.iter().any(|&n| n < 16) {
        return Err(Error::Precondition("fit points must have n >= 16"));
    }
    let mut raw = Vec::with_capacity(n_values.len());
    for &n in n_values {
        raw.push((n, cubic_over_log(n)?, optimal_window(n)?.cnot_total as f64));
    }
    let xy: Vec<(f64, f64)> = raw.iter().map(|&(_, x, y)| (x, y)).collect();
    let coefficient = fit_through_origin(&xy);
    let points = raw
        .into_iter()
        .map(|(n, x, y)| FitPoint {
            n,
            x,
            y,
            residual: y - coefficient * x,
        })
        .collect();
    Ok(Fit {
        coefficient,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeEstimate {
    pub cnot_total: u128,
    pub t_cnot: f64,
    pub coding_factor: f64,
    pub wall_time: f64,
}

impl RuntimeEstimate {
    pub fn days(&self) -> f64 {
        self.wall_time / 86_400.0
    }

    pub fn years(&self) -> f64 {
        self.wall_time / (365.25 * 86_400.0)
    }
}

/// Wall time of one run: `total_shor_count(n) · t_cnot · coding_factor`.
pub fn runtime_estimate(n: u64, t_cnot: f64, coding_factor: f64) -> Result<RuntimeEstimate> {
    if !(t_cnot > 0.0 && t_cnot.is_finite()) {
        return Err(Error::Precondition("t_cnot must be positive"));
    }
    if !(coding_factor >= 1.0 && coding_factor.is_finite()) {
        return Err(Error::Precondition("coding_factor must be at least 1"));
    }
    let cnot_total = total_shor_count(n)?;
    Ok(RuntimeEstimate {
        cnot_total,
        t_cnot,
        coding_factor,
        wall_time: cnot_total as f64 * t_cnot * coding_factor,
    })
}
