//! Regev's public-key bit cipher over F_q^n.
//!
//! Parameters are the standard correctness choice: `q` is the first prime at or
//! above `n²`, `α = 1/(√n·log²n)`, `m = ⌈1.1·n·log q⌉` and errors are discrete
//! Gaussian with `σ = αq/2π`. Logarithms are base 2.

use crate::error::{Error, Result};
use crate::format::TextFile;
use crate::gaussian::ErrorDistribution;
use crate::rng::SeededRng;
use crate::zq::{is_prime, uniform_below, Modulus};

pub const HEADER: &str = "latticelab-lwe-v1";

#[derive(Clone, Debug, PartialEq)]
pub struct LweParams {
    pub n: usize,
    pub q: Modulus,
    pub alpha: f64,
    pub m: usize,
    pub sigma: f64,
}

impl LweParams {
    /// Explicit parameters; `σ` is derived from `α` and `q`.
    pub fn new(n: usize, q: u64, alpha: f64, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || !(alpha > 0.0) {
            return Err(Error::InvalidParams("n, m and alpha must be positive".into()));
        }
        let q = Modulus::new(q)?;
        Ok(LweParams {
            n,
            q,
            alpha,
            m,
            sigma: alpha * q.value() as f64 / std::f64::consts::TAU,
        })
    }

    pub fn error_distribution(&self) -> Result<ErrorDistribution> {
        ErrorDistribution::gaussian(self.sigma)
    }

    /// Public key size in F_q residues, `m(n+1)`.
    pub fn public_key_residues(&self) -> usize {
        self.m * (self.n + 1)
    }

    pub fn secret_key_residues(&self) -> usize {
        self.n
    }

    fn push_fields(&self, f: &mut TextFile) {
        f.push("n", self.n)
            .push("q", self.q)
            .push("alpha", self.alpha)
            .push("m", self.m);
    }

    fn read_fields(f: &TextFile) -> Result<Self> {
        Self::new(f.field("n")?, f.field("q")?, f.field("alpha")?, f.field("m")?)
    }
}

pub fn derive_params(n: usize) -> Result<LweParams> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::NTooSmall(n));
    }
    let n2 = (n * n) as u64;
    let q = (n2..).find(|&c| is_prime(c)).expect("a prime exists below 2n²");
    let log_n = (n as f64).log2();
    let alpha = 1.0 / ((n as f64).sqrt() * log_n * log_n);
    let m = (1.1 * n as f64 * (q as f64).log2()).ceil() as usize;
    LweParams::new(n, q, alpha, m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LweSecretKey {
    pub params: LweParams,
    pub s: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LwePublicKey {
    pub params: LweParams,
    pub a: Vec<Vec<u64>>,
    pub b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LweCiphertext {
    pub u: Vec<u64>,
    pub v: u64,
}

fn dot(q: Modulus, a: &[u64], s: &[u64]) -> u64 {
    let acc: u128 = a.iter().zip(s).map(|(&x, &y)| x as u128 * y as u128).sum();
    (acc % q.value() as u128) as u64
}

pub fn keygen(p: &LweParams, rng: &mut SeededRng) -> Result<(LweSecretKey, LwePublicKey)> {
    keygen_with(p, &p.error_distribution()?, rng)
}

/// Key generation with an explicit error source (`Zero` gives `b_i = ⟨a_i,s⟩`).
pub fn keygen_with(
    p: &LweParams,
    errors: &ErrorDistribution,
    rng: &mut SeededRng,
) -> Result<(LweSecretKey, LwePublicKey)> {
    let q = p.q;
    let s: Vec<u64> = (0..p.n).map(|_| uniform_below(q.value(), rng)).collect();
    let a: Vec<Vec<u64>> = (0..p.m)
        .map(|_| (0..p.n).map(|_| uniform_below(q.value(), rng)).collect())
        .collect();
    let e = errors.sample_vec(p.m, rng);
    let b = a
        .iter()
        .zip(&e)
        .map(|(ai, &ei)| q.add(dot(q, ai, &s), q.reduce_i64(ei)))
        .collect();
    Ok((
        LweSecretKey {
            params: p.clone(),
            s,
        },
        LwePublicKey {
            params: p.clone(),
            a,
            b,
        },
    ))
}

pub fn encrypt_bit(pk: &LwePublicKey, z: bool, rng: &mut SeededRng) -> LweCiphertext {
    let subset: Vec<bool> = (0..pk.params.m).map(|_| rng.next_bool()).collect();
    encrypt_bit_with_subset(pk, z, &subset)
}

/// Encryption with the subset `S` given as an indicator over `0..m`.
pub fn encrypt_bit_with_subset(pk: &LwePublicKey, z: bool, subset: &[bool]) -> LweCiphertext {
    let q = pk.params.q;
    let mut u = vec![0u64; pk.params.n];
    let mut v = if z { q.value() / 2 } else { 0 };
    for (i, _) in subset.iter().enumerate().filter(|(_, &inc)| inc) {
        for (uj, &aij) in u.iter_mut().zip(&pk.a[i]) {
            *uj = q.add(*uj, aij);
        }
        v = q.add(v, pk.b[i]);
    }
    LweCiphertext { u, v }
}

/// Rounds `v − ⟨u,s⟩` to the nearer of `0` and `⌊q/2⌋`; ties go to 0.
pub fn decrypt_bit(sk: &LweSecretKey, ct: &LweCiphertext) -> Result<bool> {
    let p = &sk.params;
    if ct.u.len() != p.n {
        return Err(Error::LengthMismatch {
            expected: p.n,
            got: ct.u.len(),
        });
    }
    let d = p.q.center(p.q.sub(ct.v % p.q.value(), dot(p.q, &ct.u, &sk.s)));
    Ok(!in_zero_window(d, p.q.value()))
}

/// `d ∈ (−q/4, q/4]`.
pub(crate) fn in_zero_window(d: i64, q: u64) -> bool {
    let d4 = 4 * d as i128;
    let q = q as i128;
    d4 > -q && d4 <= q
}

impl LweSecretKey {
    pub fn to_text(&self) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "secret");
        self.params.push_fields(&mut f);
        f.push_csv("s", &self.s);
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "secret")?;
        let params = LweParams::read_fields(&f)?;
        let s = checked_residues(f.csv("s")?, params.n, params.q)?;
        Ok(LweSecretKey { params, s })
    }
}

impl LwePublicKey {
    pub fn to_text(&self) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "public");
        self.params.push_fields(&mut f);
        for row in &self.a {
            f.push_csv("a", row);
        }
        f.push_csv("b", &self.b);
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "public")?;
        let params = LweParams::read_fields(&f)?;
        let rows = f.csv_all("a")?;
        if rows.len() != params.m {
            return Err(Error::LengthMismatch {
                expected: params.m,
                got: rows.len(),
            });
        }
        let a = rows
            .into_iter()
            .map(|r| checked_residues(r, params.n, params.q))
            .collect::<Result<_>>()?;
        let b = checked_residues(f.csv("b")?, params.m, params.q)?;
        Ok(LwePublicKey { params, a, b })
    }
}

/// One bit per block: a `u=` line followed by a `v=` line.
pub fn ciphertexts_to_text(cts: &[LweCiphertext], p: &LweParams) -> String {
    let mut f = TextFile::new(HEADER);
    f.push("kind", "ciphertext");
    p.push_fields(&mut f);
    f.push("blocks", cts.len());
    for ct in cts {
        f.push_csv("u", &ct.u).push("v", ct.v);
    }
    f.to_string()
}

pub fn ciphertexts_from_text(text: &str) -> Result<(LweParams, Vec<LweCiphertext>)> {
    let f = TextFile::parse(text, HEADER)?;
    expect_kind(&f, "ciphertext")?;
    let params = LweParams::read_fields(&f)?;
    let us = f.csv_all("u")?;
    let vs = f.csv_all::<u64>("v")?;
    let blocks: usize = f.field("blocks")?;
    if us.len() != blocks || vs.len() != blocks {
        return Err(Error::Parse(format!("expected {blocks} ciphertext blocks")));
    }
    let cts = us
        .into_iter()
        .zip(vs)
        .map(|(u, v)| {
            let u = checked_residues(u, params.n, params.q)?;
            let v = match v[..] {
                [v] if v < params.q.value() => v,
                _ => return Err(Error::Parse("v must be a single residue".into())),
            };
            Ok(LweCiphertext { u, v })
        })
        .collect::<Result<_>>()?;
    Ok((params, cts))
}

pub(crate) fn expect_kind(f: &TextFile, kind: &str) -> Result<()> {
    let found = f.get("kind")?;
    if found != kind {
        return Err(Error::Parse(format!("expected a {kind} file, found {found}")));
    }
    Ok(())
}

pub(crate) fn checked_residues(v: Vec<u64>, len: usize, q: Modulus) -> Result<Vec<u64>> {
    if v.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: v.len(),
        });
    }
    if let Some(x) = v.iter().find(|&&x| x >= q.value()) {
        return Err(Error::Parse(format!("residue {x} out of range mod {q}")));
    }
    Ok(v)
}
