//! Small-integer number theory used by table precomputation and the
//! order-finding post-processing.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// `a^-1 mod m` when it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Number of bits needed to write `v` (`ceil(log2(v+1))`).
pub fn bit_length(v: u64) -> usize {
    (64 - v.leading_zeros()) as usize
}

/// Multiplicative order of `a` modulo `m`, by direct search.
pub fn order(a: u64, m: u64) -> Option<u64> {
    if gcd(a, m) != 1 || m < 2 {
        return None;
    }
    let mut v = a % m;
    for r in 1..=m {
        if v == 1 {
            return Some(r);
        }
        v = mul_mod(v, a, m);
    }
    None
}
