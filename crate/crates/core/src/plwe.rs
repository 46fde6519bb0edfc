//! PLWE sample oracles and the LPR public-key cryptosystem over `R_q`.
//!
//! A message block is `n` bits read as `z = Σ bits[i]·xⁱ`. Keys are
//! `(a, b = a·s + e)` with `s` and `e` both drawn from the error sampler.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::format::TextFile;
use crate::gaussian::ErrorDistribution;
use crate::lwe::{checked_residues, expect_kind, in_zero_window};
use crate::polyring::{is_totally_split, IntPolynomial, RingElement, RingParams};
use crate::rng::SeededRng;
use crate::zq::{next_prime_congruent, Modulus};

pub const HEADER: &str = "latticelab-plwe-v1";
pub const DEFAULT_SIGMA: f64 = 3.2;

#[derive(Clone, Debug)]
pub struct PlweParams {
    pub ring: Arc<RingParams>,
    pub sigma: f64,
    pub check_split: bool,
    errors: ErrorDistribution,
}

impl PlweParams {
    /// Fails when `check_split` is set and `f` does not split totally mod `q`.
    pub fn new(f: IntPolynomial, q: u64, sigma: f64, check_split: bool) -> Result<Self> {
        let q = Modulus::new(q)?;
        if check_split && !is_totally_split(&f, q) {
            return Err(Error::PreconditionFailed(format!("{f} does not split totally mod {q}")));
        }
        Ok(PlweParams {
            ring: RingParams::new(f, q)?,
            sigma,
            check_split,
            errors: ErrorDistribution::gaussian(sigma)?,
        })
    }

    /// `f = xⁿ + 1` with the smallest prime `q ≡ 1 (mod 2n)` above `floor`.
    pub fn negacyclic(n: usize, floor: u64, sigma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::NTooSmall(n));
        }
        let q = default_modulus(n, floor)?;
        Self::new(IntPolynomial::negacyclic(n), q, sigma, false)
    }

    /// Replaces the error source (the `Zero` variant disables noise).
    pub fn with_errors(mut self, errors: ErrorDistribution) -> Self {
        self.errors = errors;
        self
    }

    pub fn errors(&self) -> &ErrorDistribution {
        &self.errors
    }

    pub fn n(&self) -> usize {
        self.ring.degree()
    }

    pub fn q(&self) -> Modulus {
        self.ring.modulus()
    }

    /// Public key size in F_q residues, `2n`.
    pub fn public_key_residues(&self) -> usize {
        2 * self.n()
    }

    pub fn sample_error(&self, rng: &mut SeededRng) -> RingElement {
        RingElement::from_i64(&self.ring, &self.errors.sample_vec(self.n(), rng))
    }

    fn push_fields(&self, f: &mut TextFile) {
        f.push("n", self.n())
            .push("q", self.q())
            .push("f", self.ring.poly().to_csv())
            .push("sigma", self.sigma);
    }

    fn read_fields(f: &TextFile) -> Result<Self> {
        let poly: IntPolynomial = f.get("f")?.parse()?;
        let p = Self::new(poly, f.field("q")?, f.field("sigma")?, false)?;
        let n: usize = f.field("n")?;
        if n != p.n() {
            return Err(Error::Parse(format!("n={n} disagrees with deg f = {}", p.n())));
        }
        Ok(p)
    }
}

/// Smallest prime `q > floor` with `q ≡ 1 (mod 2n)`.
pub fn default_modulus(n: usize, floor: u64) -> Result<u64> {
    next_prime_congruent(floor + 1, 1, 2 * n as u64)
        .filter(|&q| q < 1 << 62)
        .ok_or_else(|| Error::InvalidParams("no suitable prime modulus".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlweSample {
    pub a: RingElement,
    pub b: RingElement,
}

/// `(a, a·s + e)` with `a` uniform.
pub fn oracle_sample(p: &PlweParams, s: &RingElement, rng: &mut SeededRng) -> Result<PlweSample> {
    Ok(oracle_sample_witnessed(p, s, rng)?.0)
}

/// As [`oracle_sample`], also returning the error `e`.
pub fn oracle_sample_witnessed(
    p: &PlweParams,
    s: &RingElement,
    rng: &mut SeededRng,
) -> Result<(PlweSample, RingElement)> {
    let a = RingElement::uniform(&p.ring, rng);
    let e = p.sample_error(rng);
    let b = a.mul(s)?.add(&e)?;
    Ok((PlweSample { a, b }, e))
}

pub fn uniform_sample_pair(p: &PlweParams, rng: &mut SeededRng) -> PlweSample {
    PlweSample {
        a: RingElement::uniform(&p.ring, rng),
        b: RingElement::uniform(&p.ring, rng),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlwePublicKey {
    pub a: RingElement,
    pub b: RingElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlweKeyPair {
    pub s: RingElement,
    pub a: RingElement,
    pub b: RingElement,
}

impl PlweKeyPair {
    pub fn public(&self) -> PlwePublicKey {
        PlwePublicKey {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }
}

pub fn keygen(p: &PlweParams, rng: &mut SeededRng) -> Result<PlweKeyPair> {
    Ok(keygen_witnessed(p, rng)?.0)
}

/// Key generation returning the error `e` with `b = a·s + e`.
pub fn keygen_witnessed(p: &PlweParams, rng: &mut SeededRng) -> Result<(PlweKeyPair, RingElement)> {
    let s = p.sample_error(rng);
    let (PlweSample { a, b }, e) = oracle_sample_witnessed(p, &s, rng)?;
    Ok((PlweKeyPair { s, a, b }, e))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlweCiphertext {
    pub u: RingElement,
    pub v: RingElement,
}

/// The encryption randomness `(r, e₁, e₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptionTrace {
    pub r: RingElement,
    pub e1: RingElement,
    pub e2: RingElement,
}

pub fn encrypt(pk: &PlwePublicKey, bits: &[bool], p: &PlweParams, rng: &mut SeededRng) -> Result<PlweCiphertext> {
    Ok(encrypt_traced(pk, bits, p, rng)?.0)
}

pub fn encrypt_traced(
    pk: &PlwePublicKey,
    bits: &[bool],
    p: &PlweParams,
    rng: &mut SeededRng,
) -> Result<(PlweCiphertext, EncryptionTrace)> {
    let trace = EncryptionTrace {
        r: p.sample_error(rng),
        e1: p.sample_error(rng),
        e2: p.sample_error(rng),
    };
    Ok((encrypt_with(pk, bits, p, &trace)?, trace))
}

/// `u = a·r + e₁`, `v = b·r + e₂ + ⌊q/2⌋·z` for given randomness.
pub fn encrypt_with(
    pk: &PlwePublicKey,
    bits: &[bool],
    p: &PlweParams,
    t: &EncryptionTrace,
) -> Result<PlweCiphertext> {
    let z = message_poly(p, bits)?;
    let u = pk.a.mul(&t.r)?.add(&t.e1)?;
    let v = pk.b.mul(&t.r)?.add(&t.e2)?.add(&z.scale(p.q().value() / 2))?;
    Ok(PlweCiphertext { u, v })
}

/// `Σ bits[i]·xⁱ`; exactly `n` bits are required.
pub fn message_poly(p: &PlweParams, bits: &[bool]) -> Result<RingElement> {
    if bits.len() != p.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            got: bits.len(),
        });
    }
    let coeffs: Vec<u64> = bits.iter().map(|&b| b as u64).collect();
    Ok(RingElement::from_u64(&p.ring, &coeffs))
}

/// Rounds each coefficient of `v − u·s` to `0` or `⌊q/2⌋`; ties go to 0.
pub fn decrypt(s: &RingElement, ct: &PlweCiphertext) -> Result<Vec<bool>> {
    let d = ct.v.sub(&ct.u.mul(s)?)?;
    let q = d.modulus().value();
    Ok(d.centered().into_iter().map(|c| !in_zero_window(c, q)).collect())
}

impl PlwePublicKey {
    pub fn to_text(&self, p: &PlweParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "public");
        p.push_fields(&mut f);
        f.push_csv("a", self.a.residues()).push_csv("b", self.b.residues());
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(PlweParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "public")?;
        let p = PlweParams::read_fields(&f)?;
        let a = read_element(&f, "a", &p)?;
        let b = read_element(&f, "b", &p)?;
        Ok((p, PlwePublicKey { a, b }))
    }
}

impl PlweKeyPair {
    /// The secret key file carries `s` together with the public pair.
    pub fn to_text(&self, p: &PlweParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "secret");
        p.push_fields(&mut f);
        f.push_csv("s", self.s.residues())
            .push_csv("a", self.a.residues())
            .push_csv("b", self.b.residues());
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(PlweParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "secret")?;
        let p = PlweParams::read_fields(&f)?;
        let s = read_element(&f, "s", &p)?;
        let a = read_element(&f, "a", &p)?;
        let b = read_element(&f, "b", &p)?;
        Ok((p, PlweKeyPair { s, a, b }))
    }
}

impl PlweParams {
    /// A bare parameter file, as consumed by the attack tooling.
    pub fn to_text(&self) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "params");
        self.push_fields(&mut f);
        f.to_string()
    }

    /// Accepts a parameter file or any key or sample file, whose header fields suffice.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_fields(&TextFile::parse(text, HEADER)?)
    }
}

/// Ciphertext files may hold several blocks, each a `u=` line followed by a `v=` line.
pub fn ciphertexts_to_text(cts: &[PlweCiphertext], p: &PlweParams) -> String {
    let pairs: Vec<_> = cts.iter().map(|ct| (&ct.u, &ct.v)).collect();
    pairs_to_text("ciphertext", ("u", "v"), &pairs, p)
}

pub fn ciphertexts_from_text(text: &str) -> Result<(PlweParams, Vec<PlweCiphertext>)> {
    let (p, pairs) = pairs_from_text(text, "ciphertext", ("u", "v"))?;
    Ok((p, pairs.into_iter().map(|(u, v)| PlweCiphertext { u, v }).collect()))
}

/// Sample files hold `(a, b)` pairs as alternating `a=` and `b=` lines.
pub fn samples_to_text(samples: &[PlweSample], p: &PlweParams) -> String {
    let pairs: Vec<_> = samples.iter().map(|s| (&s.a, &s.b)).collect();
    pairs_to_text("samples", ("a", "b"), &pairs, p)
}

pub fn samples_from_text(text: &str) -> Result<(PlweParams, Vec<PlweSample>)> {
    let (p, pairs) = pairs_from_text(text, "samples", ("a", "b"))?;
    Ok((p, pairs.into_iter().map(|(a, b)| PlweSample { a, b }).collect()))
}

fn pairs_to_text(kind: &str, keys: (&str, &str), pairs: &[(&RingElement, &RingElement)], p: &PlweParams) -> String {
    let mut f = TextFile::new(HEADER);
    f.push("kind", kind);
    p.push_fields(&mut f);
    f.push("blocks", pairs.len());
    for (x, y) in pairs {
        f.push_csv(keys.0, x.residues()).push_csv(keys.1, y.residues());
    }
    f.to_string()
}

type Pairs = Vec<(RingElement, RingElement)>;

fn pairs_from_text(text: &str, kind: &str, keys: (&str, &str)) -> Result<(PlweParams, Pairs)> {
    let f = TextFile::parse(text, HEADER)?;
    expect_kind(&f, kind)?;
    let p = PlweParams::read_fields(&f)?;
    let xs = f.csv_all::<u64>(keys.0)?;
    let ys = f.csv_all::<u64>(keys.1)?;
    let blocks: usize = f.field("blocks")?;
    if xs.len() != blocks || ys.len() != blocks {
        return Err(Error::Parse(format!("expected {blocks} {kind} blocks")));
    }
    let to_elem = |v: Vec<u64>| -> Result<RingElement> {
        Ok(RingElement::from_u64(&p.ring, &checked_residues(v, p.n(), p.q())?))
    };
    let pairs = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Ok((to_elem(x)?, to_elem(y)?)))
        .collect::<Result<_>>()?;
    Ok((p, pairs))
}

fn read_element(f: &TextFile, key: &str, p: &PlweParams) -> Result<RingElement> {
    let v = checked_residues(f.csv(key)?, p.n(), p.q())?;
    Ok(RingElement::from_u64(&p.ring, &v))
}
