use crate::error::{Error, Result};
use crate::polyring::{fq_poly, IntPolynomial};
use crate::zq::{prime_factors, Modulus, ZqElement};

/// All roots of `f` in F_q, ascending, by exhaustive scan.
pub fn roots_mod_q(f: &IntPolynomial, q: Modulus) -> Vec<ZqElement> {
    let fq = f.to_zq(q);
    (0..q.value())
        .filter(|&a| fq.iter().rev().fold(0u64, |acc, &c| q.add(q.mul(acc, a), c)) == 0)
        .map(|a| q.elem(a))
        .collect()
}

/// Least `r >= 1` with `α^r = 1`.
pub fn mult_order(alpha: ZqElement) -> Result<u64> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let q = alpha.modulus();
    let mut r = q.value() - 1;
    for p in prime_factors(r) {
        while r % p == 0 && q.pow(alpha.value(), r / p) == 1 {
            r /= p;
        }
    }
    Ok(r)
}

/// `f` has `deg f` distinct roots mod q.
pub fn is_totally_split(f: &IntPolynomial, q: Modulus) -> bool {
    let Some(n) = f.degree() else { return false };
    let fq = f.to_zq(q);
    if fq_poly::trim(fq.clone()).len() != n + 1 {
        return false;
    }
    let g = fq_poly::gcd(&fq, &fq_poly::derivative(&fq, q), q);
    if g.len() != 1 {
        return false;
    }
    roots_mod_q(f, q).len() == n
}

/// Irreducibility of `f mod p` (Rabin's test).
pub fn is_irreducible_mod(f: &IntPolynomial, p: Modulus) -> bool {
    f.is_monic() && fq_poly::is_irreducible(&f.to_zq(p), p)
}

/// Searches the odd primes below `limit` for one modulo which the monic `f`
/// stays irreducible. Such a prime certifies irreducibility over ℚ; `None`
/// means no certificate was found, not that `f` factors.
pub fn irreducibility_witness(f: &IntPolynomial, limit: u64) -> Option<u64> {
    (3..limit)
        .filter(|&p| crate::zq::is_prime(p))
        .find(|&p| is_irreducible_mod(f, Modulus::new(p).unwrap()))
}
