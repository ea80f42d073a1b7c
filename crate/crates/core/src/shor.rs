//! Small-scale emulation of order finding and factoring.
//!
//! `a^x mod N` is evaluated for every exponent by simulating the
//! exponentiation circuit; the Fourier transform of the exponent register
//! is done as an exact classical DFT, and measurement outcomes are drawn
//! from the resulting distribution.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::cost::optimal_window;
use crate::modexp::{build_windowed_modexp, ModExpParams};
use crate::numtheory::{bit_length, gcd, pow_mod};
use crate::sim::{initial_state, run_basis};
use crate::{Error, Result};

/// Largest modulus width the emulation accepts.
pub const MAX_BITS: usize = 5;

/// How `a^x mod N` is obtained for the emulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    /// Simulate the exponentiation circuit; `None` picks the cost-optimal
    /// window.
    Circuit { window: Option<usize> },
    /// Direct modular exponentiation.
    Classical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFindingRun {
    pub modulus: u64,
    pub base: u64,
    pub n: usize,
    /// Probability of each `2n`-bit outcome.
    pub distribution: Vec<f64>,
    pub samples: Vec<u64>,
    pub recovered_order: Option<u64>,
    pub evaluation: Evaluation,
}

impl OrderFindingRun {
    /// Outcomes with probability above `eps`.
    pub fn support(&self, eps: f64) -> Vec<u64> {
        (0..self.distribution.len() as u64)
            .filter(|&y| self.distribution[y as usize] > eps)
            .collect()
    }
}

fn check_modulus(modulus: u64) -> Result<usize> {
    let n = bit_length(modulus);
    if modulus < 3 || modulus.is_multiple_of(2) || n > MAX_BITS {
        return Err(Error::BadModulus {
            modulus,
            n,
            reason: "emulation needs an odd modulus of at most 5 bits",
        });
    }
    Ok(n)
}

/// `a^x mod N` for every `x < 2^(2n)`, read off the simulated circuit.
pub fn modexp_values_via_circuit(
    modulus: u64,
    base: u64,
    window: Option<usize>,
) -> Result<Vec<u64>> {
    let n = check_modulus(modulus)?;
    let m = match window {
        Some(m) => m,
        None => optimal_window(n as u64)?.m as usize,
    };
    let c = build_windowed_modexp(&ModExpParams::new(n, modulus, base, m)?)?;
    let exponent = c.layout().get("exponent")?.clone();
    let target = c.layout().get("target")?.clone();
    let start = initial_state(&c);
    (0..1u64 << (2 * n))
        .map(|x| {
            let mut s = start.clone();
            s.write(&exponent, x);
            Ok(run_basis(&c, &s)?.read(&target))
        })
        .collect()
}

pub fn modexp_values_classical(modulus: u64, base: u64) -> Result<Vec<u64>> {
    let n = check_modulus(modulus)?;
    Ok((0..1u64 << (2 * n))
        .map(|x| pow_mod(base, x, modulus))
        .collect())
}

/// Outcome distribution of the exponent register after the Fourier
/// transform, given the function values `f(x)` over all `x < Q`.
/// Measuring `f` first splits the state by value; each branch contributes
/// `|Σ_{f(x)=v} e^{2πi·xy/Q}|² / Q²`.
pub fn outcome_distribution(values: &[u64]) -> Vec<f64> {
    let q = values.len();
    let (cos, sin): (Vec<f64>, Vec<f64>) = (0..q)
        .map(|k| {
            let t = 2.0 * core::f64::consts::PI * k as f64 / q as f64;
            (libm::cos(t), libm::sin(t))
        })
        .unzip();
    let mut distinct: Vec<u64> = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut dist = vec![0.0; q];
    let scale = 1.0 / (q as f64 * q as f64);
    for v in distinct {
        let xs: Vec<usize> = (0..q).filter(|&x| values[x] == v).collect();
        for (y, p) in dist.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in &xs {
                let k = x * y % q;
                re += cos[k];
                im += sin[k];
            }
            *p += (re * re + im * im) * scale;
        }
    }
    dist
}

/// Draws `shots` outcomes from `dist` by inverse-CDF sampling.
pub fn sample_outcomes<R: RngCore + ?Sized>(dist: &[f64], shots: usize, rng: &mut R) -> Vec<u64> {
    let total: f64 = dist.iter().sum();
    (0..shots)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * total;
            let mut acc = 0.0;
            for (y, &p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    return y as u64;
                }
            }
            // Rounding left `u` past the last bucket; take the last
            // outcome with nonzero weight.
            dist.iter().rposition(|&p| p > 0.0).unwrap_or(0) as u64
        })
        .collect()
}

/// Walks the continued-fraction convergents of `y / denominator` and
/// returns the first denominator `q < N` with `a^q ≡ 1 (mod N)`.
pub fn recover_order_from_sample(y: u64, denominator: u64, modulus: u64, base: u64) -> Option<u64> {
    if y == 0 || denominator == 0 {
        return None;
    }
    let (mut num, mut den) = (y, denominator);
    // q_{k-2}, q_{k-1}
    let (mut q0, mut q1) = (1u64, 0u64);
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num % den);
        let q = a.checked_mul(q1)?.checked_add(q0)?;
        (q0, q1) = (q1, q);
        if q >= modulus {
            break;
        }
        if q > 0 && pow_mod(base, q, modulus) == 1 {
            return Some(q);
        }
    }
    None
}

/// Divides out prime factors of `r` while `a^r ≡ 1` still holds.
fn reduce_to_order(mut r: u64, base: u64, modulus: u64) -> u64 {
    let mut p = 2;
    while p * p <= r {
        while r.is_multiple_of(p) && pow_mod(base, r / p, modulus) == 1 {
            r /= p;
        }
        p += 1;
    }
    if r > 1 && pow_mod(base, 1, modulus) == 1 {
        r = 1;
    }
    r
}

/// Samples the order-finding measurement `shots` times and tries each
/// sample in turn until one yields the order.
pub fn emulate_order_finding<R: RngCore + ?Sized>(
    modulus: u64,
    base: u64,
    shots: usize,
    evaluation: Evaluation,
    rng: &mut R,
) -> Result<OrderFindingRun> {
    let n = check_modulus(modulus)?;
    if gcd(base, modulus) != 1 {
        return Err(Error::NotCoprime { base, modulus });
    }
    let values = match evaluation {
        Evaluation::Circuit { window } => modexp_values_via_circuit(modulus, base, window)?,
        Evaluation::Classical => modexp_values_classical(modulus, base)?,
    };
    let distribution = outcome_distribution(&values);
    let samples = sample_outcomes(&distribution, shots, rng);
    let q = 1u64 << (2 * n);
    let recovered_order = samples
        .iter()
        .find_map(|&y| recover_order_from_sample(y, q, modulus, base))
        .map(|r| reduce_to_order(r, base, modulus));
    Ok(OrderFindingRun {
        modulus,
        base,
        n,
        distribution,
        samples,
        recovered_order,
        evaluation,
    })
}

/// Factors from an even order `r`: `gcd(a^(r/2) ∓ 1, N)`, when both are
/// nontrivial.
pub fn factor_via_order(modulus: u64, base: u64, r: u64) -> Result<Option<(u64, u64)>> {
    if r == 0 || pow_mod(base, r, modulus) != 1 {
        return Err(Error::Precondition("a^r must be 1 mod N"));
    }
    if r % 2 == 1 {
        return Ok(None);
    }
    let h = pow_mod(base, r / 2, modulus);
    if h == modulus - 1 {
        return Ok(None);
    }
    let f1 = gcd(h + modulus - 1, modulus);
    let f2 = gcd(h + 1, modulus);
    let nontrivial = |f: u64| f > 1 && f < modulus;
    Ok((nontrivial(f1) && nontrivial(f2)).then_some((f1, f2)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub base: u64,
    /// Set when the base already shares a factor with `N`.
    pub common_factor: Option<u64>,
    pub run: Option<OrderFindingRun>,
    pub factors: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorOutcome {
    pub modulus: u64,
    pub factors: Option<(u64, u64)>,
    pub attempts: Vec<Attempt>,
}

/// Settings for [`factor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorOptions {
    pub max_attempts: usize,
    /// Measurement samples per order-finding run.
    pub shots: usize,
    pub evaluation: Evaluation,
    /// Accept a base that shares a factor with `N` as an immediate answer.
    /// When off, such bases are redrawn so every attempt runs order
    /// finding.
    pub gcd_shortcut: bool,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            max_attempts: 50,
            shots: 1,
            evaluation: Evaluation::Circuit { window: None },
            gcd_shortcut: true,
        }
    }
}

/// Repeats order finding with random bases until a factor pair appears or
/// the attempts run out.
pub fn factor<R: RngCore + ?Sized>(
    modulus: u64,
    opts: &FactorOptions,
    rng: &mut R,
) -> Result<FactorOutcome> {
    check_modulus(modulus)?;
    let mut attempts = Vec::new();
    let coprime_exists = (2..modulus).any(|a| gcd(a, modulus) == 1);
    for _ in 0..opts.max_attempts {
        let mut base = 2 + rng.next_u64() % (modulus - 2);
        let mut g = gcd(base, modulus);
        while g > 1 && !opts.gcd_shortcut && coprime_exists {
            base = 2 + rng.next_u64() % (modulus - 2);
            g = gcd(base, modulus);
        }
        let mut attempt = Attempt {
            base,
            common_factor: None,
            run: None,
            factors: None,
        };
        if g > 1 {
            attempt.common_factor = Some(g);
            if opts.gcd_shortcut {
                attempt.factors = Some((g, modulus / g));
            }
        } else {
            let run = emulate_order_finding(modulus, base, opts.shots, opts.evaluation, rng)?;
            if let Some(r) = run.recovered_order {
                attempt.factors = factor_via_order(modulus, base, r)?;
            }
            attempt.run = Some(run);
        }
        let done = attempt.factors;
        attempts.push(attempt);
        if let Some((p, q)) = done {
            return Ok(FactorOutcome {
                modulus,
                factors: Some((p.min(q), p.max(q))),
                attempts,
            });
        }
    }
    Ok(FactorOutcome {
        modulus,
        factors: None,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recover_examples() {
        assert_eq!(recover_order_from_sample(192, 256, 15, 7), Some(4));
        assert_eq!(recover_order_from_sample(0, 256, 15, 7), None);
        assert_eq!(recover_order_from_sample(128, 256, 15, 14), Some(2));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor_via_order(15, 7, 4).unwrap(), Some((3, 5)));
        assert_eq!(factor_via_order(21, 2, 6).unwrap(), Some((7, 3)));
        assert_eq!(factor_via_order(15, 14, 2).unwrap(), None);
        assert!(factor_via_order(15, 7, 3).is_err());
    }

    #[test]
    fn distribution_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = emulate_order_finding(15, 7, 0, Evaluation::Classical, &mut rng).unwrap();
        assert!(run.samples.is_empty());
        assert_eq!(run.support(1e-9), [0, 64, 128, 192]);
        let total: f64 = run.distribution.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let run = emulate_order_finding(15, 14, 0, Evaluation::Classical, &mut rng).unwrap();
        assert_eq!(run.support(1e-9), [0, 128]);
    }

    #[test]
    fn circuit_matches_classical() {
        assert_eq!(
            modexp_values_via_circuit(15, 7, None).unwrap(),
            modexp_values_classical(15, 7).unwrap()
        );
    }

    #[test]
    fn reduce_order() {
        assert_eq!(reduce_to_order(8, 7, 15), 4);
        assert_eq!(reduce_to_order(12, 2, 21), 6);
    }
}
