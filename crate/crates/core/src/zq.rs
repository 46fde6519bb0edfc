//! Arithmetic in the prime field F_q.
//!
//! Residues are stored as `u64` in `[0, q)`. All moduli are below 2^63 so a
//! product of two residues always fits in a `u128` intermediate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// A prime modulus `3 <= q < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q >= 1 << 63 || !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Modulus(q))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    /// Reduces a signed integer into `[0, q)`.
    #[inline]
    pub fn reduce_i64(self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.0 as i128) as u64
    }

    #[inline]
    pub fn reduce_i128(self, x: i128) -> u64 {
        x.rem_euclid(self.0 as i128) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn pow(self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.0)
    }

    /// Centered representative of a residue, in `(-q/2, q/2]`.
    #[inline]
    pub fn center(self, a: u64) -> i64 {
        let q = self.0;
        if a > q / 2 {
            a as i64 - q as i64
        } else {
            a as i64
        }
    }

    pub fn elem(self, x: u64) -> ZqElement {
        ZqElement {
            value: x % self.0,
            modulus: self,
        }
    }

    pub fn elem_i64(self, x: i64) -> ZqElement {
        ZqElement {
            value: self.reduce_i64(x),
            modulus: self,
        }
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZqElement {
    value: u64,
    modulus: Modulus,
}

impl ZqElement {
    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn centered(self) -> i64 {
        self.modulus.center(self.value)
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> ZqElement {
        self.modulus.elem(self.modulus.pow(self.value, exp))
    }
}

impl fmt::Display for ZqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for ZqElement {
    type Output = ZqElement;
    fn add(self, rhs: ZqElement) -> ZqElement {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.modulus.elem(self.modulus.add(self.value, rhs.value))
    }
}

impl Sub for ZqElement {
    type Output = ZqElement;
    fn sub(self, rhs: ZqElement) -> ZqElement {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.modulus.elem(self.modulus.sub(self.value, rhs.value))
    }
}

impl Mul for ZqElement {
    type Output = ZqElement;
    fn mul(self, rhs: ZqElement) -> ZqElement {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.modulus.elem(self.modulus.mul(self.value, rhs.value))
    }
}

impl Neg for ZqElement {
    type Output = ZqElement;
    fn neg(self) -> ZqElement {
        self.modulus.elem(self.modulus.neg(self.value))
    }
}

/// Unique representative of `x mod q` in `(-q/2, q/2]`.
pub fn reduce_centered(x: i128, q: Modulus) -> i64 {
    q.center(q.reduce_i128(x))
}

pub fn inv_mod(x: ZqElement) -> Result<ZqElement> {
    if x.value == 0 {
        return Err(Error::ZeroInverse);
    }
    let q = x.modulus.value() as i128;
    let (mut r0, mut r1) = (q, x.value as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    Ok(x.modulus.elem(t0.rem_euclid(q) as u64))
}

/// Draws a uniform residue by rejection against the next power of two above `q`.
pub fn uniform_sample(q: Modulus, rng: &mut SeededRng) -> ZqElement {
    q.elem(uniform_below(q.value(), rng))
}

/// Uniform integer in `[0, bound)`, bias-free.
pub(crate) fn uniform_below(bound: u64, rng: &mut SeededRng) -> u64 {
    debug_assert!(bound > 0);
    let mask = bound.next_power_of_two().wrapping_sub(1);
    loop {
        let v = rng.next_u64() & mask;
        if v < bound {
            return v;
        }
    }
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p >= start` with `p ≡ residue (mod step)`.
pub fn next_prime_congruent(start: u64, residue: u64, step: u64) -> Option<u64> {
    let step = step.max(1);
    let residue = residue % step;
    let mut p = start - start % step + residue;
    if p < start {
        p = p.checked_add(step)?;
    }
    while p < (1 << 63) {
        if is_prime(p) {
            return Some(p);
        }
        p = p.checked_add(step)?;
    }
    None
}

/// Prime factors of `n` (distinct, ascending) by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}
