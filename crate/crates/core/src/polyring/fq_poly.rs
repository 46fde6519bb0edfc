//! Dense polynomials over F_q as plain residue vectors (lowest degree first).
//!
//! Only what the splitting and irreducibility predicates need: division,
//! gcd, modular powers of `x`.

use crate::zq::{inv_mod, Modulus};

pub(crate) fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub(crate) fn rem(a: &[u64], b: &[u64], q: Modulus) -> Vec<u64> {
    divrem(a, b, q).1
}

pub(crate) fn divrem(a: &[u64], b: &[u64], q: Modulus) -> (Vec<u64>, Vec<u64>) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(q.elem(b[db])).expect("nonzero leading coefficient").value();
    let mut quot = vec![0u64; r.len() - db];
    for k in (db..r.len()).rev() {
        let c = q.mul(r[k], lead_inv);
        if c == 0 {
            continue;
        }
        quot[k - db] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[k - db + j] = q.sub(r[k - db + j], q.mul(c, bj));
        }
    }
    r.truncate(db);
    (trim(quot), trim(r))
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u64], b: &[u64], q: Modulus) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, q);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let inv = inv_mod(q.elem(lead)).unwrap().value();
        for c in x.iter_mut() {
            *c = q.mul(*c, inv);
        }
    }
    x
}

pub(crate) fn derivative(a: &[u64], q: Modulus) -> Vec<u64> {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| q.mul(c, q.reduce(i as u64)))
            .collect(),
    )
}

fn mulmod(a: &[u64], b: &[u64], f: &[u64], q: Modulus) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = q.add(out[i + j], q.mul(x, y));
        }
    }
    rem(&out, f, q)
}

fn powmod(base: &[u64], mut e: u64, f: &[u64], q: Modulus) -> Vec<u64> {
    let mut acc = rem(&[1], f, q);
    let mut b = rem(base, f, q);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(&acc, &b, f, q);
        }
        b = mulmod(&b, &b, f, q);
        e >>= 1;
    }
    acc
}

fn sub_x(a: &[u64], q: Modulus) -> Vec<u64> {
    let mut v = a.to_vec();
    if v.len() < 2 {
        v.resize(2, 0);
    }
    v[1] = q.sub(v[1], 1);
    trim(v)
}

/// Rabin's test: `f` (monic, degree n) is irreducible over F_q iff
/// `x^{q^n} ≡ x (mod f)` and `gcd(x^{q^{n/d}} - x, f) = 1` for each prime `d | n`.
pub(crate) fn is_irreducible(f: &[u64], q: Modulus) -> bool {
    let f = trim(f.to_vec());
    let n = match f.len().checked_sub(1) {
        Some(0) | None => return false,
        Some(n) => n,
    };
    let x = vec![0u64, 1];
    // frob[k] = x^{q^k} mod f
    let mut frob = vec![rem(&x, &f, q)];
    for k in 1..=n {
        let next = powmod(&frob[k - 1], q.value(), &f, q);
        frob.push(next);
    }
    if trim(sub_x(&frob[n], q)) != Vec::<u64>::new() {
        return false;
    }
    for d in crate::zq::prime_factors(n as u64) {
        let g = gcd(&sub_x(&frob[n / d as usize], q), &f, q);
        if g.len() != 1 {
            return false;
        }
    }
    true
}
