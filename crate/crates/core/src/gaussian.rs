//! The discrete Gaussian `D_{σ,c}` on ℤ and its folding onto F_q.
//!
//! `sigma` is the Gaussian *parameter*: the mass at `k` is proportional to
//! `exp(-(k-c)^2 / (2σ^2))`. The variance of the resulting distribution is
//! close to, but not exactly, `σ^2`, so moment checks are always made against
//! [`DiscreteGaussian::variance`] rather than `σ^2`.
//!
//! Sampling is by inverse-CDF lookup over a table truncated at `c ± tσ`.

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::zq::{Modulus, ZqElement};

pub const DEFAULT_TAIL_CUT: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    pub sigma: f64,
    pub center: f64,
    pub tail_cut: f64,
}

impl GaussianParams {
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_center(sigma, 0.0, DEFAULT_TAIL_CUT)
    }

    pub fn with_center(sigma: f64, center: f64, tail_cut: f64) -> Result<Self> {
        let p = GaussianParams {
            sigma,
            center,
            tail_cut,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.tail_cut >= 6.0) {
            return Err(Error::InvalidParams(format!("tail cut must be >= 6, got {}", self.tail_cut)));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidParams("center must be finite".into()));
        }
        Ok(())
    }

    /// Integer support `[⌈c - tσ⌉, ⌊c + tσ⌋]`.
    pub fn support(&self) -> (i64, i64) {
        let w = self.tail_cut * self.sigma;
        ((self.center - w).ceil() as i64, (self.center + w).floor() as i64)
    }
}

pub fn rho(x: f64, p: &GaussianParams) -> f64 {
    let d = x - p.center;
    (-(d * d) / (2.0 * p.sigma * p.sigma)).exp()
}

/// Precomputed truncated table for one parameter set.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    params: GaussianParams,
    lo: i64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl DiscreteGaussian {
    pub fn new(params: GaussianParams) -> Result<Self> {
        params.validate()?;
        let (lo, hi) = params.support();
        let weights: Vec<f64> = (lo..=hi).map(|k| rho(k as f64, &params)).collect();
        // Sum smallest terms first.
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]));
        let total: f64 = order.iter().map(|&i| weights[i]).sum();
        let pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(DiscreteGaussian {
            params,
            lo,
            pmf,
            cdf,
        })
    }

    pub fn params(&self) -> &GaussianParams {
        &self.params
    }

    pub fn support(&self) -> (i64, i64) {
        (self.lo, self.lo + self.pmf.len() as i64 - 1)
    }

    pub fn pmf(&self, k: i64) -> f64 {
        let idx = k - self.lo;
        if idx < 0 || idx >= self.pmf.len() as i64 {
            0.0
        } else {
            self.pmf[idx as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (self.lo + i as i64) as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d = (self.lo + i as i64) as f64 - mu;
                d * d * p
            })
            .sum()
    }

    pub fn sample(&self, rng: &mut SeededRng) -> i64 {
        let u = rng.next_f64();
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.lo + idx as i64
    }

    pub fn sample_vec(&self, n: usize, rng: &mut SeededRng) -> Vec<i64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// A draw folded into F_q. Requires a zero center.
    pub fn sample_zq(&self, q: Modulus, rng: &mut SeededRng) -> ZqElement {
        q.elem_i64(self.sample(rng))
    }
}

pub fn pmf_int(k: i64, p: &GaussianParams) -> Result<f64> {
    Ok(DiscreteGaussian::new(*p)?.pmf(k))
}

pub fn sample_int(p: &GaussianParams, rng: &mut SeededRng) -> Result<i64> {
    Ok(DiscreteGaussian::new(*p)?.sample(rng))
}

/// The error variable χ on F_q: a discrete Gaussian draw reduced mod q.
pub fn fold_to_zq(p: &GaussianParams, q: Modulus, rng: &mut SeededRng) -> Result<ZqElement> {
    if p.center != 0.0 {
        return Err(Error::InvalidParams("folding requires a zero center".into()));
    }
    Ok(DiscreteGaussian::new(*p)?.sample_zq(q, rng))
}

/// Diagonal ("elliptic") n-dimensional Gaussian with entries bounded by `α·n^{1/4}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticGaussianParams {
    pub diag: Vec<f64>,
    pub bound: f64,
}

impl EllipticGaussianParams {
    /// Sets `bound = alpha * n^{1/4}` with `n = diag.len()`.
    pub fn with_alpha(diag: Vec<f64>, alpha: f64) -> Self {
        let bound = alpha * (diag.len() as f64).powf(0.25);
        EllipticGaussianParams { diag, bound }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &d) in self.diag.iter().enumerate() {
            if d > self.bound {
                return Err(Error::InvalidParams(format!(
                    "diag[{i}] = {d} exceeds bound {}",
                    self.bound
                )));
            }
        }
        Ok(())
    }
}

/// Table-backed sampler for an elliptic Gaussian; equal diagonal entries share a table.
#[derive(Clone, Debug)]
pub struct EllipticSampler {
    tables: Vec<DiscreteGaussian>,
    index: Vec<usize>,
}

impl EllipticSampler {
    pub fn new(p: &EllipticGaussianParams) -> Result<Self> {
        p.validate()?;
        let mut tables: Vec<DiscreteGaussian> = Vec::new();
        let mut index = Vec::with_capacity(p.diag.len());
        for &d in &p.diag {
            match tables.iter().position(|t| t.params().sigma == d) {
                Some(i) => index.push(i),
                None => {
                    tables.push(DiscreteGaussian::new(GaussianParams::new(d)?)?);
                    index.push(tables.len() - 1);
                }
            }
        }
        Ok(EllipticSampler { tables, index })
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn sample_vec(&self, rng: &mut SeededRng) -> Vec<i64> {
        self.index.iter().map(|&i| self.tables[i].sample(rng)).collect()
    }

    pub fn coordinate(&self, i: usize) -> &DiscreteGaussian {
        &self.tables[self.index[i]]
    }
}

pub fn sample_error_vector(
    p: &EllipticGaussianParams,
    q: Modulus,
    rng: &mut SeededRng,
) -> Result<Vec<ZqElement>> {
    let sampler = EllipticSampler::new(p)?;
    Ok(sampler.sample_vec(rng).into_iter().map(|e| q.elem_i64(e)).collect())
}

/// Error source shared by the LWE-family schemes.
///
/// `Zero` is the noiseless degenerate mode used to check the algebra of a
/// scheme independently of its noise.
#[derive(Clone, Debug)]
pub enum ErrorDistribution {
    Gaussian(DiscreteGaussian),
    Elliptic(EllipticSampler),
    Zero,
}

impl ErrorDistribution {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        Ok(ErrorDistribution::Gaussian(DiscreteGaussian::new(GaussianParams::new(sigma)?)?))
    }

    pub fn sample_vec(&self, n: usize, rng: &mut SeededRng) -> Vec<i64> {
        match self {
            ErrorDistribution::Gaussian(g) => g.sample_vec(n, rng),
            ErrorDistribution::Elliptic(e) => {
                assert_eq!(e.dim(), n, "elliptic sampler dimension mismatch");
                e.sample_vec(rng)
            }
            ErrorDistribution::Zero => vec![0; n],
        }
    }

    /// Largest magnitude the distribution can produce.
    pub fn max_abs(&self) -> i64 {
        match self {
            ErrorDistribution::Gaussian(g) => {
                let (lo, hi) = g.support();
                lo.abs().max(hi.abs())
            }
            ErrorDistribution::Elliptic(e) => (0..e.dim())
                .map(|i| {
                    let (lo, hi) = e.coordinate(i).support();
                    lo.abs().max(hi.abs())
                })
                .max()
                .unwrap_or(0),
            ErrorDistribution::Zero => 0,
        }
    }

    /// Nominal parameter σ (0 for the noiseless mode; largest entry if elliptic).
    pub fn sigma(&self) -> f64 {
        match self {
            ErrorDistribution::Gaussian(g) => g.params().sigma,
            ErrorDistribution::Elliptic(e) => (0..e.dim())
                .map(|i| e.coordinate(i).params().sigma)
                .fold(0.0, f64::max),
            ErrorDistribution::Zero => 0.0,
        }
    }
}
