//! Symmetric leveled BGV over `ℤ[x]/(Φ_m)` with plaintexts in `R_t`, `t = p^r`.
//!
//! A fresh ciphertext has level 0 and lives modulo `q_L`, the top of the
//! chain. Every homomorphic operation raises the level by one and switches
//! one step down the chain, so a level-`i` ciphertext lives modulo `q_{L−i}`.
//! Operations on level-`L` ciphertexts are refused.
//!
//! A ciphertext `(p_0, …, p_d)` decrypts through `Σ p_j·s^j = α + t·ε (mod q_i)`.
//! Each ciphertext carries a worst-case bound on `‖α + t·ε‖∞`. Decryption
//! fails loudly once that bound reaches `q_i/2`.
//!
//! All chain primes are `≡ 1 (mod t)`, which makes modulus switching preserve
//! the plaintext. Relinearization is not implemented, so products grow the
//! number of parts.

mod circuit;

pub use circuit::{eval_circuit, eval_circuit_plain, Circuit, Gate, GateOp};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::format::TextFile;
use crate::gaussian::{DiscreteGaussian, GaussianParams};
use crate::lwe::expect_kind;
use crate::polyring::{cyclotomic_poly, euler_phi, IntPolynomial, RingElement, RingParams};
use crate::rng::SeededRng;
use crate::zq::{inv_mod, is_prime, next_prime_congruent, Modulus};

pub const HEADER: &str = "latticelab-bgv-v1";
pub const DEFAULT_BASE_BITS: u32 = 7;
pub const DEFAULT_SIGMA: f64 = 3.2;
pub const DEFAULT_KEY_SIGMA: f64 = 0.4;
const CHAIN_LIMIT: u64 = 1 << 62;
const MAX_PHI: u64 = 1024;

#[derive(Clone, Debug)]
pub struct BgvParams {
    pub m: u64,
    pub p: u64,
    pub r: u32,
    /// `t = p^r`.
    pub t: u64,
    /// `q_0 < q_1 < … < q_L`.
    pub chain: Vec<u64>,
    pub sigma: f64,
    pub key_sigma: f64,
    f: IntPolynomial,
    rings: Vec<Arc<RingParams>>,
    expansion: f64,
}

impl PartialEq for BgvParams {
    fn eq(&self, o: &Self) -> bool {
        (self.m, self.p, self.r, &self.chain) == (o.m, o.p, o.r, &o.chain)
            && self.sigma == o.sigma
            && self.key_sigma == o.key_sigma
    }
}

impl BgvParams {
    /// Builds the chain from `q_0 ≥ 2^7`.
    pub fn setup(m: u64, p: u64, r: u32, levels: usize, growth: f64) -> Result<Self> {
        Self::setup_with_base(m, p, r, levels, growth, DEFAULT_BASE_BITS)
    }

    /// `q_0` is the smallest prime `≡ 1 (mod t)` at or above `2^base_bits`, and
    /// `q_{i+1}` the smallest such prime at or above `max(q_i², 2q_i)·growth`.
    pub fn setup_with_base(m: u64, p: u64, r: u32, levels: usize, growth: f64, base_bits: u32) -> Result<Self> {
        if levels < 1 {
            return Err(Error::InvalidParams("need at least one level".into()));
        }
        if !(growth >= 1.0) {
            return Err(Error::InvalidParams("growth must be >= 1".into()));
        }
        let t = plaintext_modulus(p, r)?;
        let mut chain = vec![next_chain_prime(1u64 << base_bits.min(61), t)?];
        for _ in 0..levels {
            let q = *chain.last().unwrap() as f64;
            let target = (q * q).max(2.0 * q) * growth;
            if target >= CHAIN_LIMIT as f64 {
                return Err(Error::ChainOverflow);
            }
            chain.push(next_chain_prime(target.ceil() as u64, t)?);
        }
        Self::from_chain(m, p, r, chain, DEFAULT_SIGMA, DEFAULT_KEY_SIGMA)
    }

    /// Validates an explicit chain `q_0 < … < q_L`.
    pub fn from_chain(m: u64, p: u64, r: u32, chain: Vec<u64>, sigma: f64, key_sigma: f64) -> Result<Self> {
        let t = plaintext_modulus(p, r)?;
        let phi = euler_phi(m);
        if m < 2 || phi > MAX_PHI {
            return Err(Error::InvalidParams(format!("cyclotomic index {m} out of range")));
        }
        if chain.len() < 2 {
            return Err(Error::InvalidParams("chain needs at least q_0 and q_1".into()));
        }
        for &q in &chain {
            if q >= CHAIN_LIMIT {
                return Err(Error::ChainOverflow);
            }
            if !is_prime(q) || q % t != 1 {
                return Err(Error::InvalidParams(format!("chain modulus {q} must be a prime ≡ 1 mod {t}")));
            }
        }
        for w in chain.windows(2) {
            let (lo, hi) = (w[0] as u128, w[1] as u128);
            if lo * lo > hi || 2 * lo > hi {
                return Err(Error::InvalidParams(format!(
                    "chain violates q_i <= min(sqrt(q_(i+1)), q_(i+1)/2) at {lo}, {hi}"
                )));
            }
        }
        GaussianParams::new(sigma)?;
        GaussianParams::new(key_sigma)?;
        let f = cyclotomic_poly(m);
        let rings = chain
            .iter()
            .map(|&q| RingParams::new(f.clone(), Modulus::new(q)?))
            .collect::<Result<Vec<_>>>()?;
        let expansion = expansion_factor(&f);
        Ok(BgvParams {
            m,
            p,
            r,
            t,
            chain,
            sigma,
            key_sigma,
            f,
            rings,
            expansion,
        })
    }

    /// `L`, the number of operations a fresh ciphertext can absorb.
    pub fn max_level(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn n(&self) -> usize {
        self.f.degree().unwrap()
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    /// Worst-case `‖a·b mod Φ_m‖∞ / (‖a‖∞‖b‖∞)`.
    pub fn expansion(&self) -> f64 {
        self.expansion
    }

    /// Modulus of a level-`level` ciphertext.
    pub fn modulus_at(&self, level: usize) -> Result<u64> {
        self.check_level(level)?;
        Ok(self.chain[self.max_level() - level])
    }

    fn ring_at(&self, level: usize) -> &Arc<RingParams> {
        &self.rings[self.max_level() - level]
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.max_level() {
            return Err(Error::LevelExceeded {
                level,
                max: self.max_level(),
            });
        }
        Ok(())
    }

    pub fn plaintext(&self, coeffs: &[u64]) -> Result<Plaintext> {
        if coeffs.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: coeffs.len(),
            });
        }
        Ok(Plaintext {
            coeffs: coeffs.iter().map(|c| c % self.t).collect(),
        })
    }

    pub fn random_plaintext(&self, rng: &mut SeededRng) -> Plaintext {
        Plaintext {
            coeffs: (0..self.n()).map(|_| crate::zq::uniform_below(self.t, rng)).collect(),
        }
    }

    pub fn plain_add(&self, a: &Plaintext, b: &Plaintext) -> Plaintext {
        Plaintext {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) % self.t).collect(),
        }
    }

    /// Product in `ℤ_t[x]/(Φ_m)`.
    pub fn plain_mul(&self, a: &Plaintext, b: &Plaintext) -> Plaintext {
        let to_poly = |p: &Plaintext| IntPolynomial::new(p.coeffs.iter().map(|&c| c as i64).collect());
        let (_, rem) = to_poly(a).mul(&to_poly(b)).divrem_monic(&self.f);
        let mut coeffs: Vec<u64> = rem.coeffs().iter().map(|c| c.rem_euclid(self.t as i64) as u64).collect();
        coeffs.resize(self.n(), 0);
        Plaintext { coeffs }
    }

    fn push_fields(&self, f: &mut TextFile) {
        f.push("m", self.m)
            .push("p", self.p)
            .push("r", self.r)
            .push_csv("chain", &self.chain)
            .push("sigma", self.sigma)
            .push("key_sigma", self.key_sigma);
    }

    fn read_fields(f: &TextFile) -> Result<Self> {
        Self::from_chain(
            f.field("m")?,
            f.field("p")?,
            f.field("r")?,
            f.csv("chain")?,
            f.field("sigma")?,
            f.field("key_sigma")?,
        )
    }
}

fn plaintext_modulus(p: u64, r: u32) -> Result<u64> {
    if !is_prime(p) || r == 0 {
        return Err(Error::InvalidParams(format!("plaintext modulus {p}^{r} must be a prime power")));
    }
    p.checked_pow(r)
        .filter(|&t| t < 1 << 20)
        .ok_or_else(|| Error::InvalidParams("plaintext modulus too large".into()))
}

fn next_chain_prime(start: u64, t: u64) -> Result<u64> {
    next_prime_congruent(start.max(3), 1, t)
        .filter(|&q| q < CHAIN_LIMIT)
        .ok_or(Error::ChainOverflow)
}

/// `max_i Σ_k |(x^k mod f)_i|·#{(a,b): a+b = k}` over products of two
/// reduced polynomials, i.e. the worst-case growth of `‖a·b mod f‖∞`.
fn expansion_factor(f: &IntPolynomial) -> f64 {
    let n = f.degree().unwrap();
    let mut reductions: Vec<Vec<f64>> = Vec::with_capacity(2 * n - 1);
    let mut xk = vec![0i64; n];
    xk[0] = 1;
    for _ in 0..2 * n - 1 {
        reductions.push(xk.iter().map(|&c| c as f64).collect());
        let (_, next) = IntPolynomial::new([vec![0], xk.clone()].concat()).divrem_monic(f);
        xk = next.coeffs().to_vec();
        xk.resize(n, 0);
    }
    (0..n)
        .map(|i| {
            reductions
                .iter()
                .enumerate()
                .map(|(k, red)| red[i].abs() * (k + 1).min(2 * n - 1 - k) as f64)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plaintext {
    pub coeffs: Vec<u64>,
}

/// Ternary secret `s ∈ {−1, 0, 1}^φ(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BgvSecretKey {
    pub s: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BgvCiphertext {
    pub parts: Vec<RingElement>,
    pub level: usize,
    pub modulus_index: usize,
    /// Upper bound on `‖Σ p_j s^j mod q‖∞` (centered).
    pub noise_bound: f64,
}

impl BgvCiphertext {
    pub fn degree(&self) -> usize {
        self.parts.len() - 1
    }
}

/// Narrow Gaussian clamped to `{−1, 0, 1}`.
pub fn keygen(params: &BgvParams, rng: &mut SeededRng) -> Result<BgvSecretKey> {
    let g = DiscreteGaussian::new(GaussianParams::new(params.key_sigma)?)?;
    Ok(BgvSecretKey {
        s: g.sample_vec(params.n(), rng).into_iter().map(|x| x.clamp(-1, 1)).collect(),
    })
}

pub fn encrypt(pt: &Plaintext, sk: &BgvSecretKey, params: &BgvParams, rng: &mut SeededRng) -> Result<BgvCiphertext> {
    let ring = params.ring_at(0);
    let p1 = RingElement::uniform(ring, rng);
    let g = DiscreteGaussian::new(GaussianParams::new(params.sigma)?)?;
    let e = g.sample_vec(params.n(), rng);
    encrypt_with(pt, sk, params, &p1, &e)
}

/// `p_0 = α + t·e − p_1·s` for given `p_1` and error `e`.
pub fn encrypt_with(
    pt: &Plaintext,
    sk: &BgvSecretKey,
    params: &BgvParams,
    p1: &RingElement,
    e: &[i64],
) -> Result<BgvCiphertext> {
    let n = params.n();
    if pt.coeffs.len() != n || e.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: pt.coeffs.len().min(e.len()),
        });
    }
    let ring = params.ring_at(0);
    if p1.params() != ring {
        return Err(Error::ParamMismatch);
    }
    let t = params.t as i64;
    let noise: Vec<i64> = pt.coeffs.iter().zip(e).map(|(&a, &ei)| a as i64 + t * ei).collect();
    let s = RingElement::from_i64(ring, &sk.s);
    let p0 = RingElement::from_i64(ring, &noise).sub(&p1.mul(&s)?)?;
    Ok(BgvCiphertext {
        parts: vec![p0, p1.clone()],
        level: 0,
        modulus_index: params.max_level(),
        noise_bound: noise.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64,
    })
}

/// `Σ_j p_j·s^j` with centered coefficients.
pub fn decryption_residue(ct: &BgvCiphertext, sk: &BgvSecretKey, params: &BgvParams) -> Result<Vec<i64>> {
    params.check_level(ct.level)?;
    let ring = params.ring_at(ct.level);
    let s = RingElement::from_i64(ring, &sk.s);
    let mut acc = RingElement::zero(ring);
    let mut power = RingElement::one(ring);
    for part in &ct.parts {
        if part.params() != ring {
            return Err(Error::ParamMismatch);
        }
        acc = acc.add(&part.mul(&power)?)?;
        power = power.mul(&s)?;
    }
    Ok(acc.centered())
}

pub fn decrypt(ct: &BgvCiphertext, sk: &BgvSecretKey, params: &BgvParams) -> Result<Plaintext> {
    let q = params.modulus_at(ct.level)? as f64;
    if ct.noise_bound >= q / 2.0 {
        return Err(Error::DecryptFail);
    }
    let v = decryption_residue(ct, sk, params)?;
    let t = params.t as i64;
    Ok(Plaintext {
        coeffs: v.iter().map(|c| c.rem_euclid(t) as u64).collect(),
    })
}

/// `ε = (Σ p_j s^j − α)/t` for a known plaintext `α`.
pub fn measure_epsilon(ct: &BgvCiphertext, sk: &BgvSecretKey, pt: &Plaintext, params: &BgvParams) -> Result<Vec<i64>> {
    let v = decryption_residue(ct, sk, params)?;
    let t = params.t as i64;
    v.iter()
        .zip(&pt.coeffs)
        .map(|(&x, &a)| {
            let d = x - a as i64;
            if d % t != 0 {
                return Err(Error::DecryptFail);
            }
            Ok(d / t)
        })
        .collect()
}

/// Adds `t·noise` to `p_0` and widens the noise bound accordingly.
pub fn add_noise(ct: &BgvCiphertext, noise: &[i64], params: &BgvParams) -> Result<BgvCiphertext> {
    let ring = ct.parts[0].params().clone();
    let t = params.t as i64;
    let scaled: Vec<i64> = noise.iter().map(|&x| x * t).collect();
    let mut out = ct.clone();
    out.parts[0] = out.parts[0].add(&RingElement::from_i64(&ring, &scaled))?;
    out.noise_bound += scaled.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64;
    Ok(out)
}

fn check_pair(c1: &BgvCiphertext, c2: &BgvCiphertext, params: &BgvParams) -> Result<()> {
    if c1.level != c2.level || c1.modulus_index != c2.modulus_index {
        return Err(Error::ParamMismatch);
    }
    if c1.level >= params.max_level() {
        return Err(Error::LevelExceeded {
            level: c1.level,
            max: params.max_level(),
        });
    }
    Ok(())
}

/// Part-wise sum, then one switch down the chain.
pub fn he_add(c1: &BgvCiphertext, c2: &BgvCiphertext, params: &BgvParams) -> Result<BgvCiphertext> {
    check_pair(c1, c2, params)?;
    let len = c1.parts.len().max(c2.parts.len());
    let ring = params.ring_at(c1.level);
    let zero = RingElement::zero(ring);
    let parts = (0..len)
        .map(|j| c1.parts.get(j).unwrap_or(&zero).add(c2.parts.get(j).unwrap_or(&zero)))
        .collect::<Result<Vec<_>>>()?;
    mod_switch(
        &BgvCiphertext {
            parts,
            level: c1.level,
            modulus_index: c1.modulus_index,
            noise_bound: c1.noise_bound + c2.noise_bound,
        },
        params,
    )
}

/// Part convolution `(Σ_{j+k=l} c1_j·c2_k)_l`, then one switch down the chain.
pub fn he_mul(c1: &BgvCiphertext, c2: &BgvCiphertext, params: &BgvParams) -> Result<BgvCiphertext> {
    check_pair(c1, c2, params)?;
    let ring = params.ring_at(c1.level);
    let mut parts = vec![RingElement::zero(ring); c1.parts.len() + c2.parts.len() - 1];
    for (j, a) in c1.parts.iter().enumerate() {
        for (k, b) in c2.parts.iter().enumerate() {
            parts[j + k] = parts[j + k].add(&a.mul(b)?)?;
        }
    }
    mod_switch(
        &BgvCiphertext {
            parts,
            level: c1.level,
            modulus_index: c1.modulus_index,
            noise_bound: params.expansion * c1.noise_bound * c2.noise_bound,
        },
        params,
    )
}

/// Scales from `q` to the next modulus `q'` down the chain.
///
/// Each coefficient `c` becomes `(q'·c + δ)/q` with `δ = t·[−q'·c·t⁻¹]_q`, an
/// integer congruent to `c` mod `t` within `t/2` of `(q'/q)·c`.
pub fn mod_switch(ct: &BgvCiphertext, params: &BgvParams) -> Result<BgvCiphertext> {
    params.check_level(ct.level)?;
    if ct.level == params.max_level() {
        return Err(Error::LevelExceeded {
            level: ct.level + 1,
            max: params.max_level(),
        });
    }
    let (from, to) = (params.ring_at(ct.level), params.ring_at(ct.level + 1));
    let (q, q2) = (from.modulus(), to.modulus());
    let t = params.t;
    let t_inv = inv_mod(q.elem(t))?.value();
    let parts = ct
        .parts
        .iter()
        .map(|part| {
            let coeffs: Vec<u64> = part
                .centered()
                .into_iter()
                .map(|c| {
                    let scaled = q2.value() as i128 * c as i128;
                    let w = q.mul(q.reduce_i128(-scaled), t_inv);
                    let delta = t as i128 * q.center(w) as i128;
                    let num = scaled + delta;
                    debug_assert_eq!(num % q.value() as i128, 0);
                    q2.reduce_i128(num / q.value() as i128)
                })
                .collect();
            RingElement::from_u64(to, &coeffs)
        })
        .collect();
    let ratio = q2.value() as f64 / q.value() as f64;
    let rounding: f64 = (0..ct.parts.len()).map(|j| params.expansion.powi(j as i32)).sum::<f64>() * t as f64 / 2.0;
    Ok(BgvCiphertext {
        parts,
        level: ct.level + 1,
        modulus_index: ct.modulus_index - 1,
        noise_bound: ratio * ct.noise_bound + rounding,
    })
}

impl BgvSecretKey {
    pub fn to_text(&self, params: &BgvParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "secret");
        params.push_fields(&mut f);
        f.push_csv("s", &self.s);
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(BgvParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "secret")?;
        let params = BgvParams::read_fields(&f)?;
        let s: Vec<i64> = f.csv("s")?;
        if s.len() != params.n() || s.iter().any(|x| x.abs() > 1) {
            return Err(Error::Parse("secret must be ternary of length φ(m)".into()));
        }
        Ok((params, BgvSecretKey { s }))
    }
}

impl BgvCiphertext {
    pub fn to_text(&self, params: &BgvParams) -> String {
        let mut f = TextFile::new(HEADER);
        f.push("kind", "ciphertext");
        params.push_fields(&mut f);
        f.push("level", self.level)
            .push("mod_index", self.modulus_index)
            .push("noise_bound", self.noise_bound);
        for p in &self.parts {
            f.push_csv("parts", p.residues());
        }
        f.to_string()
    }

    pub fn from_text(text: &str) -> Result<(BgvParams, Self)> {
        let f = TextFile::parse(text, HEADER)?;
        expect_kind(&f, "ciphertext")?;
        let params = BgvParams::read_fields(&f)?;
        let level: usize = f.field("level")?;
        let modulus_index: usize = f.field("mod_index")?;
        params.check_level(level)?;
        if modulus_index != params.max_level() - level {
            return Err(Error::Parse("mod_index disagrees with level".into()));
        }
        let ring = params.ring_at(level);
        let parts = f
            .csv_all::<u64>("parts")?
            .into_iter()
            .map(|v| {
                crate::lwe::checked_residues(v, params.n(), ring.modulus())
                    .map(|v| RingElement::from_u64(ring, &v))
            })
            .collect::<Result<Vec<_>>>()?;
        if parts.len() < 2 {
            return Err(Error::Parse("a ciphertext has at least two parts".into()));
        }
        let ct = BgvCiphertext {
            parts,
            level,
            modulus_index,
            noise_bound: f.field("noise_bound")?,
        };
        Ok((params, ct))
    }
}

pub fn plaintext_to_text(pt: &Plaintext) -> String {
    crate::format::to_csv(&pt.coeffs)
}
