//! The GLYPH signature: uniform small polynomials, a sparse ±1 challenge
//! hashed from the commitment, and rejection down to `β = b − k`.
//!
//! Commitments are encoded as `ω`: every coefficient of `w` in `[0, q)` as a
//! little-endian field of `⌈log₂ q / 8⌉` bytes, lowest degree first.
//!
//! The challenge `H(ω ‖ m)` is read from SHAKE256 over the input. The first 8
//! bytes of output give 64 sign bits. After that, 16-bit little-endian words
//! masked to `n − 1` propose positions, and repeated positions are skipped
//! until `k` are chosen. The `j`-th chosen position gets `−1` when sign bit `j`
//! is set, and `+1` otherwise.
//!
//! Secret keys `s, e` are drawn from `{−secret_bound..secret_bound}`. Each
//! coefficient of `s·c` is a signed sum of `k` entries of `s`, so accepting
//! signatures with norm `b − k` needs `secret_bound = 1`. That is the preset.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::format::TextFile;
use crate::lwe::expect_kind;
use crate::polyring::{IntPolynomial, RingElement, RingParams};
use crate::rng::SeededRng;
use crate::zq::Modulus;

pub const HEADER: &str = "latticelab-glyph-v1";
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct GlyphParams {
    pub n: usize,
    pub q: Modulus,
    pub b: u64,
    pub k: usize,
    pub beta: u64,
    pub secret_bound: u64,
    pub ring: Arc<RingParams>,
}

impl PartialEq for GlyphParams {
    fn eq(&self, o: &Self) -> bool {
        (self.n, self.q, self.b, self.k, self.secret_bound) == (o.n, o.q, o.b, o.k, o.secret_bound)
    }
}

impl GlyphParams {
    pub fn new(n: usize, q: u64, b: u64, k: usize, secret_bound: u64) -> Result<Self> {
        let q = Modulus::new(q)?;
        if q.value() % 4 != 1 {
            return Err(Error::InvalidParams(format!("q = {q} must be 1 mod 4")));
        }
        if !n.is_power_of_two() || n < 2 || n > 1 << 16 {
            return Err(Error::InvalidParams(format!("n = {n} must be a power of two up to 2^16")));
        }
        if k == 0 || k > 64 || k > n {
            return Err(Error::InvalidParams(format!("challenge weight k = {k} out of range")));
        }
        if b <= k as u64 || 2 * b >= q.value() {
            return Err(Error::InvalidParams("need k < b < q/2".into()));
        }
        if secret_bound > b {
            return Err(Error::InvalidParams("secret bound exceeds b".into()));
        }
        Ok(GlyphParams {
            n,
            q,
            b,
            k,
            beta: b - k as u64,
            secret_bound,
            ring: RingParams::new(IntPolynomial::negacyclic(n), q)?,
        })
    }

    /// `n = 1024, q = 59393, b = 16383, k = 16` with ternary secrets.
    pub fn recommended() -> Self {
        Self::new(1024, 59393, 16383, 16, 1).expect("preset is valid")
    }

    fn coeff_bytes(&self) -> usize {
        (64 - (self.q.value() - 1).leading_zeros() as usize).div_ceil(8)
    }

    fn uniform_small(&self, bound: u64, rng: &mut SeededRng) -> RingElement {
        let v: Vec<i64> = (0..self.n).map(|_| rng.uniform_symmetric(bound)).collect();
        RingElement::from_i64(&self.ring, &v)
    }

    fn push_fields(&self, f: &mut TextFile) {
        f.push("n", self.n)
            .push("q", self.q)
            .push("b", self.b)
            .push("k", self.k)
            .push("secret_bound", self.secret_bound);
    }

    fn read_fields(f: &TextFile) -> Result<Self> {
        Self::new(
            f.field("n")?,
            f.field("q")?,
            f.field("b")?,
            f.field("k")?,
            f.field("secret_bound")?,
        )
    }
}

/// Canonical byte encoding `ω` of a ring element.
pub fn encode_omega(w: &RingElement, p: &GlyphParams) -> Vec<u8> {
    let width = p.coeff_bytes();
    w.residues()
        .iter()
        .flat_map(|c| c.to_le_bytes().into_iter().take(width))
        .collect()
}

/// Sparse challenge with exactly `k` coefficients in `{−1, +1}`.
pub fn hash_to_sparse(data: &[u8], p: &GlyphParams) -> RingElement {
    let mut h = Shake256::default();
    h.update(data);
    let mut xof = h.finalize_xof();
    let mut sign_bytes = [0u8; 8];
    xof.read(&mut sign_bytes);
    let signs = u64::from_le_bytes(sign_bytes);
    let mask = p.n as u64 - 1;
    let mut coeffs = vec![0u64; p.n];
    let mut chosen = 0;
    while chosen < p.k {
        let mut w = [0u8; 2];
        xof.read(&mut w);
        let pos = (u16::from_le_bytes(w) as u64 & mask) as usize;
        if coeffs[pos] != 0 {
            continue;
        }
        coeffs[pos] = if signs >> chosen & 1 == 1 { p.q.value() - 1 } else { 1 };
        chosen += 1;
    }
    RingElement::from_u64(&p.ring, &coeffs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlyphSecretKey {
    pub s: RingElement,
    pub e: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlyphPublicKey {
    pub a: RingElement,
    pub t: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlyphSignature {
    pub c: RingElement,
    pub z1: RingElement,
    pub z2: RingElement,
}

pub fn keygen(p: &GlyphParams, rng: &mut SeededRng) -> Result<(GlyphSecretKey, GlyphPublicKey)> {
    let s = p.uniform_small(p.secret_bound, rng);
    let e = p.uniform_small(p.secret_bound, rng);
    let a = RingElement::uniform(&p.ring, rng);
    let t = a.mul(&s)?.add(&e)?;
    Ok((GlyphSecretKey { s, e }, GlyphPublicKey { a, t }))
}

fn challenge(w: &RingElement, m: &[u8], p: &GlyphParams) -> RingElement {
    let mut data = encode_omega(w, p);
    data.extend_from_slice(m);
    hash_to_sparse(&data, p)
}

/// Signature, iteration count and the accepted masks `(y1, y2)`.
pub type SignTrace = (GlyphSignature, usize, RingElement, RingElement);

pub fn sign(
    sk: &GlyphSecretKey,
    pk: &GlyphPublicKey,
    m: &[u8],
    p: &GlyphParams,
    rng: &mut SeededRng,
) -> Result<(GlyphSignature, usize)> {
    let (sig, iters, _, _) = sign_traced(sk, pk, m, p, rng)?;
    Ok((sig, iters))
}

pub fn sign_traced(
    sk: &GlyphSecretKey,
    pk: &GlyphPublicKey,
    m: &[u8],
    p: &GlyphParams,
    rng: &mut SeededRng,
) -> Result<SignTrace> {
    for iteration in 1..=MAX_ITERATIONS {
        let y1 = p.uniform_small(p.b, rng);
        let y2 = p.uniform_small(p.b, rng);
        let w = pk.a.mul(&y1)?.add(&y2)?;
        let c = challenge(&w, m, p);
        let z1 = sk.s.mul(&c)?.add(&y1)?;
        if z1.inf_norm() > p.beta {
            continue;
        }
        let z2 = sk.e.mul(&c)?.add(&y2)?;
        if z2.inf_norm() > p.beta {
            continue;
        }
        return Ok((GlyphSignature { c, z1, z2 }, iteration, y1, y2));
    }
    Err(Error::RejectionOverflow(MAX_ITERATIONS))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    NormBound,
    ChallengeMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Accept,
    Reject(RejectReason),
}

impl fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyOutcome::Accept => f.write_str("accept"),
            VerifyOutcome::Reject(RejectReason::NormBound) => f.write_str("reject: norm bound exceeded"),
            VerifyOutcome::Reject(RejectReason::ChallengeMismatch) => f.write_str("reject: challenge mismatch"),
        }
    }
}

pub fn verify(pk: &GlyphPublicKey, m: &[u8], sig: &GlyphSignature, p: &GlyphParams) -> Result<VerifyOutcome> {
    if sig.z1.inf_norm() > p.beta || sig.z2.inf_norm() > p.beta {
        return Ok(VerifyOutcome::Reject(RejectReason::NormBound));
    }
    let w = pk.a.mul(&sig.z1)?.add(&sig.z2)?.sub(&pk.t.mul(&sig.c)?)?;
    Ok(if challenge(&w, m, p) == sig.c {
        VerifyOutcome::Accept
    } else {
        VerifyOutcome::Reject(RejectReason::ChallengeMismatch)
    })
}

fn read_small(f: &TextFile, key: &str, p: &GlyphParams) -> Result<RingElement> {
    let v: Vec<i64> = f.csv(key)?;
    if v.len() != p.n {
        return Err(Error::LengthMismatch {
            expected: p.n,
            got: v.len(),
        });
    }
    Ok(RingElement::from_i64(&p.ring, &v))
}

impl GlyphPublicKey {
    pub fn to_text(&self, p: &GlyphParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "public");
        p.push_fields(&mut f);
        f.push_csv("a", &self.a.centered()).push_csv("t", &self.t.centered());
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(GlyphParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "public")?;
        let p = GlyphParams::read_fields(&f)?;
        let pk = GlyphPublicKey {
            a: read_small(&f, "a", &p)?,
            t: read_small(&f, "t", &p)?,
        };
        Ok((p, pk))
    }
}

impl GlyphSecretKey {
    /// The secret file also carries the public key, which signing needs.
    pub fn to_text(&self, pk: &GlyphPublicKey, p: &GlyphParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "secret");
        p.push_fields(&mut f);
        f.push_csv("s", &self.s.centered())
            .push_csv("e", &self.e.centered())
            .push_csv("a", &pk.a.centered())
            .push_csv("t", &pk.t.centered());
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(GlyphParams, Self, GlyphPublicKey)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "secret")?;
        let p = GlyphParams::read_fields(&f)?;
        let sk = GlyphSecretKey {
            s: read_small(&f, "s", &p)?,
            e: read_small(&f, "e", &p)?,
        };
        let pk = GlyphPublicKey {
            a: read_small(&f, "a", &p)?,
            t: read_small(&f, "t", &p)?,
        };
        Ok((p, sk, pk))
    }
}

impl GlyphSignature {
    /// `c` is written as `index:sign` pairs, `z1` and `z2` as centered CSVs.
    pub fn to_text(&self, p: &GlyphParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "signature");
        p.push_fields(&mut f);
        let c: Vec<String> = self
            .c
            .centered()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| format!("{i}:{}", if v > 0 { "+1" } else { "-1" }))
            .collect();
        f.push("c", c.join(","))
            .push_csv("z1", &self.z1.centered())
            .push_csv("z2", &self.z2.centered());
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(GlyphParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "signature")?;
        let p = GlyphParams::read_fields(&f)?;
        let mut c = vec![0i64; p.n];
        for pair in f.get("c")?.split(',').filter(|s| !s.trim().is_empty()) {
            let bad = || Error::Parse(format!("bad challenge entry `{pair}`"));
            let (i, s) = pair.trim().split_once(':').ok_or_else(bad)?;
            let i: usize = i.parse().map_err(|_| bad())?;
            let s: i64 = s.parse().map_err(|_| bad())?;
            if i >= p.n || s.abs() != 1 || c[i] != 0 {
                return Err(bad());
            }
            c[i] = s;
        }
        let sig = GlyphSignature {
            c: RingElement::from_i64(&p.ring, &c),
            z1: read_small(&f, "z1", &p)?,
            z2: read_small(&f, "z2", &p)?,
        };
        Ok((p, sig))
    }
}
