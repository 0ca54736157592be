//! Word-sized modular arithmetic, prime selection and Chinese remaindering.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Every prime handed out by [`primes_below_ceiling`] is smaller than this.
///
/// Residues stay below 2^62, so the product of two fits comfortably in a
/// `u128`, and sums of up to 2^66 residues fit the same accumulator.
pub const PRIME_CEILING: u64 = 1 << 62;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime. Panics on zero.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "zero has no inverse");
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes below [`PRIME_CEILING`], largest first.
pub fn primes_below_ceiling() -> impl Iterator<Item = u64> {
    let mut candidate = PRIME_CEILING - 1;
    std::iter::from_fn(move || {
        while candidate > 2 {
            let c = candidate;
            candidate -= 2;
            if is_prime(c) {
                return Some(c);
            }
        }
        None
    })
}

/// Reduces an arbitrary integer into `[0, p)`.
pub fn reduce(value: &BigInt, p: u64) -> u64 {
    let r = value.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("residue below a u64 modulus")
}

/// Unique value in `[0, prod(primes))` matching every residue.
///
/// Residues are taken modulo their prime first, so callers may pass
/// unreduced values.
pub fn crt_combine(residues: &[u64], primes: &[u64]) -> Result<BigUint> {
    if residues.len() != primes.len() {
        return Err(Error::invalid(format!(
            "{} residues for {} primes",
            residues.len(),
            primes.len()
        )));
    }
    for (i, &p) in primes.iter().enumerate() {
        if p < 2 {
            return Err(Error::invalid(format!("modulus {p} is not a prime")));
        }
        if primes[..i].contains(&p) {
            return Err(Error::invalid(format!("duplicate prime {p}")));
        }
    }
    // Garner-style incremental lift: x = x + m * ((r - x) / m mod p).
    let mut x = BigUint::zero();
    let mut modulus = BigUint::one();
    for (&r, &p) in residues.iter().zip(primes) {
        let r = r % p;
        let x_mod = (&x % p).try_into().unwrap_or(0u64);
        let m_mod: u64 = (&modulus % p).try_into().unwrap_or(0u64);
        let delta = sub_mod(r, x_mod, p);
        let t = mul_mod(delta, inv_mod(m_mod, p), p);
        x += &modulus * t;
        modulus *= p;
    }
    Ok(x)
}

/// Recovers `num/den` from `value mod modulus` when both fit below
/// `sqrt(modulus / 2)`; returns `None` otherwise.
pub fn rational_reconstruct(value: &BigInt, modulus: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (modulus.clone(), value.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if !num.gcd(&den).is_one() {
        return None;
    }
    Some((num, den))
}

/// `n choose r` as an exact integer.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
