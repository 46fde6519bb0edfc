//! Evaluation attacks on decision PLWE and a parameter-weakness scanner.
//!
//! If `f(α) ≡ 0 (mod q)` then `π_α : R_q → F_q, p ↦ p(α)` is a ring map and a
//! sample `(a, b = a·s + e)` satisfies `b(α) = a(α)·s(α) + e(α)`. When `α` has
//! small order, `e(α)` is confined to a small region of F_q and the candidate
//! values of `s(α)` can be checked exhaustively.
//!
//! Candidate secrets are carried across the batch: a value of `s(α)` must be
//! consistent with every sample seen so far. A sample is labelled random as
//! soon as no candidate is left.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::format::TextFile;
use crate::gaussian::{DiscreteGaussian, GaussianParams};
use crate::plwe::{PlweParams, PlweSample};
use crate::polyring::{is_totally_split, mult_order, roots_mod_q, IntPolynomial, RingElement};
use crate::rng::SeededRng;
use crate::zq::{is_prime, Modulus, ZqElement};

pub const DEFAULT_T: f64 = 3.0;
pub const DEFAULT_R_MAX: u64 = 8;
/// Largest smallness region that will be materialized.
pub const MAX_REGION: u64 = 1_000_000;
/// The candidate loop runs over all of F_q.
pub const MAX_SCAN_MODULUS: u64 = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Valid,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub label: Label,
    pub surviving_secrets: usize,
}

/// `Λ = { Σ_{i<r} c_i αⁱ : |c_i| ≤ B_i }`.
///
/// Block `i` collects the coefficients `e_{jr+i}`; with `k_i` such terms its
/// sum has parameter `√k_i·σ`, and `B_i = ⌊t·√k_i·σ⌋`.
#[derive(Clone, Debug)]
pub struct SmallnessRegion {
    pub alpha: ZqElement,
    pub r: u64,
    pub block_bounds: Vec<u64>,
    members: HashSet<u64>,
}

impl SmallnessRegion {
    pub fn new(p: &PlweParams, alpha: ZqElement, t: f64, r_max: u64) -> Result<Self> {
        check_root(p, alpha)?;
        let r = mult_order(alpha)?;
        if r > r_max {
            return Err(Error::OrderTooLarge { order: r, max: r_max });
        }
        let q = alpha.modulus();
        let n = p.n() as u64;
        let r_eff = r.min(n);
        let block_bounds: Vec<u64> = (0..r_eff)
            .map(|i| {
                let terms = (n - i).div_ceil(r);
                (t * (terms as f64).sqrt() * p.sigma).floor() as u64
            })
            .collect();
        let predicted = block_bounds
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(2 * b + 1))
            .unwrap_or(u64::MAX)
            .min(q.value());
        if predicted > MAX_REGION {
            return Err(Error::OrderTooLarge { order: r, max: r_max });
        }
        let mut members: HashSet<u64> = HashSet::from([0]);
        let mut power = 1u64;
        for &b in &block_bounds {
            let mut next = HashSet::with_capacity(members.len() * (2 * b as usize + 1));
            for &x in &members {
                for c in -(b as i64)..=b as i64 {
                    next.insert(q.add(x, q.mul(q.reduce_i64(c), power)));
                }
                if next.len() as u64 == q.value() {
                    break;
                }
            }
            members = next;
            power = q.mul(power, alpha.value());
        }
        Ok(SmallnessRegion {
            alpha,
            r,
            block_bounds,
            members,
        })
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_root(p: &PlweParams, alpha: ZqElement) -> Result<()> {
    let q = p.q();
    if alpha.modulus() != q {
        return Err(Error::ParamMismatch);
    }
    let fq = p.ring.poly().to_zq(q);
    let v = fq.iter().rev().fold(0u64, |acc, &c| q.add(q.mul(acc, alpha.value()), c));
    if v != 0 {
        return Err(Error::PreconditionFailed(format!(
            "{alpha} is not a root of {} mod {q}",
            p.ring.poly()
        )));
    }
    if q.value() > MAX_SCAN_MODULUS {
        return Err(Error::InvalidParams(format!("q = {q} is too large for an exhaustive scan")));
    }
    Ok(())
}

/// Candidate values of `s(α)` consistent with one sample.
pub fn sample_survivors(sample: &PlweSample, alpha: ZqElement, accept: impl Fn(u64) -> bool) -> Vec<u64> {
    let q = alpha.modulus();
    let (a, b) = (sample.a.evaluate(alpha).value(), sample.b.evaluate(alpha).value());
    (0..q.value())
        .filter(|&s| accept(q.sub(b, q.mul(s, a))))
        .collect()
}

fn decide(samples: &[PlweSample], alpha: ZqElement, accept: impl Fn(u64) -> bool) -> Vec<Verdict> {
    let q = alpha.modulus();
    let mut candidates: Vec<u64> = (0..q.value()).collect();
    samples
        .iter()
        .map(|smp| {
            let (a, b) = (smp.a.evaluate(alpha).value(), smp.b.evaluate(alpha).value());
            candidates.retain(|&s| accept(q.sub(b, q.mul(s, a))));
            Verdict {
                label: if candidates.is_empty() { Label::Random } else { Label::Valid },
                surviving_secrets: candidates.len(),
            }
        })
        .collect()
}

/// Attack through the root `α = 1`: `e(1)` must satisfy `|e(1)| ≤ t·√n·σ`.
pub fn decide_alg1(samples: &[PlweSample], p: &PlweParams, t: f64) -> Result<Vec<Verdict>> {
    let one = p.q().elem(1);
    check_root(p, one)?;
    let bound = t * (p.n() as f64).sqrt() * p.sigma;
    let q = p.q();
    Ok(decide(samples, one, |e| (q.center(e).unsigned_abs() as f64) <= bound))
}

/// Attack through a root `α` of small order, testing `e(α) ∈ Λ`.
pub fn decide_alg2(samples: &[PlweSample], p: &PlweParams, alpha: ZqElement, t: f64) -> Result<Vec<Verdict>> {
    decide_alg2_with_limit(samples, p, alpha, t, DEFAULT_R_MAX)
}

pub fn decide_alg2_with_limit(
    samples: &[PlweSample],
    p: &PlweParams,
    alpha: ZqElement,
    t: f64,
    r_max: u64,
) -> Result<Vec<Verdict>> {
    let region = SmallnessRegion::new(p, alpha, t, r_max)?;
    Ok(decide(samples, alpha, |e| region.contains(e)))
}

/// Fraction of F_q hit by `e(α)` over `trials` error polynomials whose
/// coefficients all lie within `t·σ` (the non-negligible part of the sampler).
pub fn smearing_estimate(p: &PlweParams, alpha: ZqElement, trials: usize, t: f64, rng: &mut SeededRng) -> Result<f64> {
    check_root(p, alpha)?;
    if trials == 0 {
        return Ok(0.0);
    }
    let g = DiscreteGaussian::new(GaussianParams::new(p.sigma)?)?;
    let cut = t * p.sigma;
    let mut hit = HashSet::new();
    let mut kept = 0;
    let max_attempts = trials.saturating_mul(1000);
    for attempt in 0.. {
        if kept == trials {
            break;
        }
        if attempt == max_attempts {
            return Err(Error::RejectionOverflow(max_attempts));
        }
        let e = g.sample_vec(p.n(), rng);
        if e.iter().any(|&c| c.abs() as f64 > cut) {
            continue;
        }
        kept += 1;
        hit.insert(RingElement::from_i64(&p.ring, &e).evaluate(alpha).value());
    }
    Ok(hit.len() as f64 / p.q().value() as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeaknessReport {
    pub n: usize,
    pub q: u64,
    pub totally_split: bool,
    pub root_one: bool,
    pub roots: Vec<(ZqElement, u64)>,
    pub small_order_roots: Vec<(ZqElement, u64)>,
    pub family_xn_xpx_r: bool,
    pub notes: String,
}

const NOTES: &str = "Galois, monogenic and orthogonal-embedding conditions: not decided. \
Monogenicity cannot be tested at cryptographic degree. \
No size threshold for q is asserted.";

/// Evaluates the decidable weakness conditions for `f` modulo `q`.
pub fn weakness_scan(f: &IntPolynomial, q: Modulus, r_max: u64) -> Result<WeaknessReport> {
    let n = match f.degree() {
        Some(n) if n >= 2 && f.is_monic() => n,
        _ => return Err(Error::InvalidParams("weakness_scan needs monic f of degree >= 2".into())),
    };
    if q.value() > MAX_SCAN_MODULUS {
        return Err(Error::InvalidParams(format!("q = {q} is too large for a root scan")));
    }
    let roots: Vec<(ZqElement, u64)> = roots_mod_q(f, q)
        .into_iter()
        .filter(|a| !a.is_zero())
        .map(|a| (a, mult_order(a).expect("nonzero")))
        .collect();
    let small_order_roots = roots.iter().copied().filter(|&(_, r)| r <= r_max).collect();
    Ok(WeaknessReport {
        n,
        q: q.value(),
        totally_split: is_totally_split(f, q),
        root_one: roots.iter().any(|(a, _)| a.value() == 1),
        roots,
        small_order_roots,
        family_xn_xpx_r: in_family_xn_xpx_r(f),
        notes: NOTES.to_string(),
    })
}

/// `f = xⁿ + x·p(x) − r` with `deg p < n/2`, `r` prime and `25·‖p‖₁² ≤ r`.
/// No upper bound on `r` is imposed.
pub fn in_family_xn_xpx_r(f: &IntPolynomial) -> bool {
    let Some(n) = f.degree() else { return false };
    if n < 1 || !f.is_monic() {
        return false;
    }
    let c = f.coeffs();
    let r = -c[0];
    if r <= 0 || !is_prime(r as u64) {
        return false;
    }
    // x·p(x) occupies degrees 1..=deg p + 1, and deg p < n/2.
    let max_xp_degree = n.div_ceil(2);
    if c[1..n].iter().enumerate().any(|(i, &v)| v != 0 && i + 1 > max_xp_degree) {
        return false;
    }
    let p_l1: i128 = c[1..n].iter().map(|&v| (v as i128).abs()).sum();
    25 * p_l1 * p_l1 <= r as i128
}

impl WeaknessReport {
    pub fn to_text(&self) -> String {
        let mut f = TextFile::new("latticelab-scan-v1");
        f.push("n", self.n)
            .push("q", self.q)
            .push("totally_split", self.totally_split)
            .push("root_one", self.root_one)
            .push("roots", pairs(&self.roots))
            .push("small_order_roots", pairs(&self.small_order_roots))
            .push("family_xn_xpx_r", self.family_xn_xpx_r)
            .push("notes", &self.notes);
        f.to_string()
    }
}

fn pairs(v: &[(ZqElement, u64)]) -> String {
    v.iter()
        .map(|(a, r)| format!("{a}:{r}"))
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for WeaknessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        writeln!(s, "{:<28} {}", "degree n", self.n)?;
        writeln!(s, "{:<28} {}", "modulus q", self.q)?;
        writeln!(s, "{:<28} {}", "splits totally mod q", yn(self.totally_split))?;
        writeln!(s, "{:<28} {}", "f(1) = 0 mod q", yn(self.root_one))?;
        writeln!(s, "{:<28} {}", "nonzero roots", self.roots.len())?;
        writeln!(s, "{:<28} {}", "roots of small order", self.small_order_roots.len())?;
        for (a, r) in &self.small_order_roots {
            writeln!(s, "{:<28} alpha={a} order={r}", "")?;
        }
        writeln!(s, "{:<28} {}", "in family x^n + x p(x) - r", yn(self.family_xn_xpx_r))?;
        writeln!(s, "{:<28} {}", "Galois", "not decided")?;
        writeln!(s, "{:<28} {}", "monogenic", "not decided")?;
        writeln!(s, "{:<28} {}", "orthogonal embedding", "not decided")?;
        f.write_str(&s)
    }
}
