use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyring::IntPolynomial;
use crate::rng::SeededRng;
use crate::zq::{uniform_sample, Modulus, ZqElement};

/// The quotient ring `R_q = F_q[x]/(f)` for a monic `f` of degree `n >= 1`.
#[derive(Debug, PartialEq, Eq)]
pub struct RingParams {
    f: IntPolynomial,
    q: Modulus,
    /// `f mod q`, all `n + 1` coefficients.
    f_q: Vec<u64>,
    negacyclic: bool,
}

impl RingParams {
    pub fn new(f: IntPolynomial, q: Modulus) -> Result<Arc<Self>> {
        match f.degree() {
            Some(n) if n >= 1 && f.is_monic() => {}
            _ => {
                return Err(Error::InvalidParams(format!(
                    "ring polynomial must be monic of degree >= 1, got {f}"
                )))
            }
        }
        let f_q = f.to_zq(q);
        let negacyclic = f.is_negacyclic();
        Ok(Arc::new(RingParams { f, q, f_q, negacyclic }))
    }

    pub fn degree(&self) -> usize {
        self.f_q.len() - 1
    }

    pub fn modulus(&self) -> Modulus {
        self.q
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn is_negacyclic(&self) -> bool {
        self.negacyclic
    }
}

/// An element of `R_q`: exactly `n` residues, lowest degree first.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElement {
    coeffs: Vec<u64>,
    params: Arc<RingParams>,
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingElement")
            .field("q", &self.params.q.value())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

fn same_ring(a: &Arc<RingParams>, b: &Arc<RingParams>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl RingElement {
    pub fn zero(params: &Arc<RingParams>) -> Self {
        RingElement {
            coeffs: vec![0; params.degree()],
            params: params.clone(),
        }
    }

    pub fn one(params: &Arc<RingParams>) -> Self {
        let mut e = Self::zero(params);
        e.coeffs[0] = 1;
        e
    }

    /// `x^k` reduced into the ring.
    pub fn monomial(params: &Arc<RingParams>, k: usize) -> Self {
        let mut v = vec![0i64; k + 1];
        v[k] = 1;
        Self::from_i64(params, &v)
    }

    /// Builds an element from integer coefficients; longer inputs are reduced mod `f`.
    pub fn from_i64(params: &Arc<RingParams>, coeffs: &[i64]) -> Self {
        let q = params.q;
        let residues: Vec<u64> = coeffs.iter().map(|&c| q.reduce_i64(c)).collect();
        Self::from_residues(params, residues)
    }

    pub fn from_u64(params: &Arc<RingParams>, coeffs: &[u64]) -> Self {
        let q = params.q;
        Self::from_residues(params, coeffs.iter().map(|&c| q.reduce(c)).collect())
    }

    fn from_residues(params: &Arc<RingParams>, mut residues: Vec<u64>) -> Self {
        let n = params.degree();
        if residues.len() > n {
            residues = reduce_mod_f(residues, params);
        }
        residues.resize(n, 0);
        RingElement {
            coeffs: residues,
            params: params.clone(),
        }
    }

    pub fn from_elements(params: &Arc<RingParams>, coeffs: &[ZqElement]) -> Result<Self> {
        if coeffs.len() != params.degree() {
            return Err(Error::LengthMismatch {
                expected: params.degree(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| c.modulus() != params.q) {
            return Err(Error::ParamMismatch);
        }
        Ok(Self::from_u64(params, &coeffs.iter().map(|c| c.value()).collect::<Vec<_>>()))
    }

    /// Coefficient-wise uniform element.
    pub fn uniform(params: &Arc<RingParams>, rng: &mut SeededRng) -> Self {
        let coeffs = (0..params.degree())
            .map(|_| uniform_sample(params.q, rng).value())
            .collect();
        RingElement {
            coeffs,
            params: params.clone(),
        }
    }

    pub fn params(&self) -> &Arc<RingParams> {
        &self.params
    }

    pub fn modulus(&self) -> Modulus {
        self.params.q
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> ZqElement {
        self.params.q.elem(self.coeffs[i])
    }

    pub fn set_coeff(&mut self, i: usize, v: ZqElement) {
        assert_eq!(v.modulus(), self.params.q);
        self.coeffs[i] = v.value();
    }

    pub fn centered(&self) -> Vec<i64> {
        let q = self.params.q;
        self.coeffs.iter().map(|&c| q.center(c)).collect()
    }

    /// Infinity norm of the centered representative.
    pub fn inf_norm(&self) -> u64 {
        let q = self.params.q;
        self.coeffs
            .iter()
            .map(|&c| q.center(c).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Number of non-zero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_ring(&self.params, &other.params) {
            Ok(())
        } else {
            Err(Error::ParamMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = self.params.q;
        Ok(self.zip(other, |a, b| q.add(a, b)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let q = self.params.q;
        Ok(self.zip(other, |a, b| q.sub(a, b)))
    }

    pub fn neg(&self) -> Self {
        let q = self.params.q;
        RingElement {
            coeffs: self.coeffs.iter().map(|&c| q.neg(c)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn scale(&self, k: u64) -> Self {
        let q = self.params.q;
        let k = q.reduce(k);
        RingElement {
            coeffs: self.coeffs.iter().map(|&c| q.mul(c, k)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        ring_mul(self, other)
    }

    /// Horner evaluation at `alpha`: the projection `p(x) ↦ p(α)`.
    pub fn evaluate(&self, alpha: ZqElement) -> ZqElement {
        evaluate(self, alpha)
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        RingElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            params: self.params.clone(),
        }
    }
}

/// Reduces a residue vector of any length modulo monic `f`.
fn reduce_mod_f(mut r: Vec<u64>, params: &RingParams) -> Vec<u64> {
    let n = params.degree();
    let q = params.q;
    if params.negacyclic {
        // x^n ≡ -1: fold each block of n with alternating sign.
        let mut out = vec![0u64; n];
        for (k, &c) in r.iter().enumerate() {
            let slot = k % n;
            if (k / n) % 2 == 0 {
                out[slot] = q.add(out[slot], c);
            } else {
                out[slot] = q.sub(out[slot], c);
            }
        }
        return out;
    }
    for k in (n..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        // c·x^k = c·x^{k-n}·x^n ≡ -c·x^{k-n}·(f - x^n)
        for j in 0..n {
            let fj = params.f_q[j];
            if fj != 0 {
                r[k - n + j] = q.sub(r[k - n + j], q.mul(c, fj));
            }
        }
        r[k] = 0;
    }
    r.truncate(n);
    r
}

/// Schoolbook product reduced mod `(f, q)`.
///
/// For `f = x^n + 1` the wrap-around is folded directly (multiplying by `x`
/// shifts the coefficients and negates the one that wraps). Operands with few
/// non-zero coefficients take a sparse loop; the result is identical.
pub fn ring_mul(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    a.check(b)?;
    let params = &a.params;
    let n = params.degree();
    let q = params.q;
    let (dense, sparse) = if a.weight() <= b.weight() { (b, a) } else { (a, b) };

    let raw: Vec<u64> = if sparse.weight() * 16 <= n {
        let mut out = vec![0u64; 2 * n - 1];
        for (j, &s) in sparse.coeffs.iter().enumerate() {
            if s == 0 {
                continue;
            }
            for (i, &d) in dense.coeffs.iter().enumerate() {
                out[i + j] = q.add(out[i + j], q.mul(s, d));
            }
        }
        out
    } else if (q.value() as u128 - 1).pow(2) * (n as u128) < 1 << 64 {
        // Whole convolution fits in u64 without intermediate reduction.
        let mut acc = vec![0u64; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (slot, &y) in acc[i..i + n].iter_mut().zip(&b.coeffs) {
                *slot += x * y;
            }
        }
        acc.into_iter().map(|v| v % q.value()).collect()
    } else {
        let mut acc = vec![0u128; 2 * n - 1];
        let small = q.value() < 1 << 32;
        let qq = q.value() as u128;
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u128;
            let row = &mut acc[i..i + n];
            if small {
                // Products < 2^64 and at most n of them: no overflow.
                for (slot, &y) in row.iter_mut().zip(&b.coeffs) {
                    *slot += x * y as u128;
                }
            } else {
                for (slot, &y) in row.iter_mut().zip(&b.coeffs) {
                    *slot += x * y as u128 % qq;
                }
            }
        }
        acc.into_iter().map(|v| (v % qq) as u64).collect()
    };

    Ok(RingElement {
        coeffs: reduce_mod_f(raw, params),
        params: params.clone(),
    })
}

pub fn evaluate(p: &RingElement, alpha: ZqElement) -> ZqElement {
    let q = p.params.q;
    assert_eq!(alpha.modulus(), q, "evaluation point from a different field");
    let a = alpha.value();
    let v = p.coeffs.iter().rev().fold(0u64, |acc, &c| q.add(q.mul(acc, a), c));
    q.elem(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(f: Vec<i64>, q: u64) -> Arc<RingParams> {
        RingParams::new(IntPolynomial::new(f), Modulus::new(q).unwrap()).unwrap()
    }

    /// Independent reference: full integer product, then long division by f.
    fn naive_mul(a: &[i64], b: &[i64], f: &IntPolynomial, q: i64) -> Vec<i64> {
        let prod = IntPolynomial::new(a.to_vec()).mul(&IntPolynomial::new(b.to_vec()));
        let (_, rem) = prod.divrem_monic(f);
        let n = f.degree().unwrap();
        (0..n).map(|i| rem.coeff(i).rem_euclid(q)).collect()
    }

    #[test]
    fn x_squared_is_minus_one() {
        let r = ring(vec![1, 0, 1], 17);
        let x = RingElement::monomial(&r, 1);
        assert_eq!(x.mul(&x).unwrap().residues(), &[16, 0]);
        let one = RingElement::one(&r);
        let a = RingElement::from_i64(&r, &[5, 9]);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn shift_and_negate() {
        let r = ring(vec![1, 0, 0, 0, 1], 97);
        let c = RingElement::from_i64(&r, &[3, 5, 7, 11]);
        let x = RingElement::monomial(&r, 1);
        assert_eq!(x.mul(&c).unwrap().centered(), vec![-11, 3, 5, 7]);
    }

    #[test]
    fn param_mismatch() {
        let a = RingElement::one(&ring(vec![1, 0, 1], 17));
        let b = RingElement::one(&ring(vec![1, 0, 1], 13));
        assert_eq!(a.mul(&b), Err(Error::ParamMismatch));
        assert_eq!(a.add(&b), Err(Error::ParamMismatch));
    }

    #[test]
    fn long_inputs_are_reduced() {
        let r = ring(vec![1, 0, 0, 0, 1], 17);
        let x5 = RingElement::monomial(&r, 5);
        assert_eq!(x5.centered(), vec![0, -1, 0, 0]);
        let g = ring(vec![1, -1, 1], 17); // Φ_6: x^3 ≡ -1
        assert_eq!(RingElement::monomial(&g, 3).centered(), vec![-1, 0]);
    }

    #[test]
    fn evaluate_examples() {
        let r = ring(vec![1, 0, 0, 1], 5);
        let p = RingElement::from_i64(&r, &[1, 0, 1]);
        assert_eq!(p.evaluate(r.modulus().elem(2)).value(), 0);
        let c = RingElement::from_i64(&r, &[3]);
        assert_eq!(c.evaluate(r.modulus().elem(4)).value(), 3);
    }

    #[test]
    fn evaluate_is_additive() {
        let r = ring(vec![3, 1, 0, 0, 0, 0, 0, 0, 1], 257);
        let mut rng = SeededRng::from_u64(3);
        for _ in 0..100 {
            let a = RingElement::uniform(&r, &mut rng);
            let b = RingElement::uniform(&r, &mut rng);
            let alpha = uniform_sample(r.modulus(), &mut rng);
            let lhs = a.add(&b).unwrap().evaluate(alpha);
            // brute re-evaluation with i128 powers
            let brute = |p: &RingElement| {
                p.residues()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c as u128 * alpha.pow(i as u64).value() as u128)
                    .sum::<u128>()
                    % 257
            };
            assert_eq!(lhs.value() as u128, (brute(&a) + brute(&b)) % 257);
        }
    }

    #[test]
    fn large_modulus_product() {
        let q = (1u64 << 61) - 1;
        let r = ring(vec![1, 0, 0, 0, 1], q);
        let a = RingElement::from_i64(&r, &[-1, -2, 3, 4]);
        let b = RingElement::from_u64(&r, &[q - 5, 7, q / 2, 9]);
        let got = a.mul(&b).unwrap();
        // compare against the schoolbook over i128 with explicit wrap
        let av: Vec<i128> = a.centered().iter().map(|&v| v as i128).collect();
        let bv: Vec<i128> = b.residues().iter().map(|&v| v as i128).collect();
        let mut want = [0i128; 4];
        for i in 0..4 {
            for j in 0..4 {
                let t = av[i] * bv[j] % q as i128;
                if i + j < 4 {
                    want[i + j] += t;
                } else {
                    want[i + j - 4] -= t;
                }
            }
        }
        let want: Vec<u64> = want.iter().map(|v| v.rem_euclid(q as i128) as u64).collect();
        assert_eq!(got.residues(), &want[..]);
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let r = ring(
            std::iter::once(1).chain(std::iter::repeat(0).take(63)).chain([1]).collect(),
            7681,
        );
        let mut rng = SeededRng::from_u64(1);
        let a = RingElement::uniform(&r, &mut rng);
        let mut sparse = vec![0i64; 64];
        sparse[3] = 1;
        sparse[40] = -1;
        let s = RingElement::from_i64(&r, &sparse);
        let want = naive_mul(&a.centered(), &sparse, r.poly(), 7681);
        assert_eq!(a.mul(&s).unwrap().residues().to_vec(), want.iter().map(|&v| v as u64).collect::<Vec<_>>());
    }

    #[test]
    fn mid_size_modulus_product() {
        // q = 2^31 - 1 takes the u128 accumulation without per-product reduction.
        let q = 2_147_483_647u64;
        let r = ring(IntPolynomial::negacyclic(16).coeffs().to_vec(), q);
        let mut rng = SeededRng::from_u64(11);
        for _ in 0..20 {
            let a = RingElement::uniform(&r, &mut rng);
            let b = RingElement::uniform(&r, &mut rng);
            let mut want = vec![0i128; 16];
            for i in 0..16 {
                for j in 0..16 {
                    let p = a.residues()[i] as i128 * b.residues()[j] as i128;
                    if i + j < 16 {
                        want[i + j] += p;
                    } else {
                        want[i + j - 16] -= p;
                    }
                }
            }
            let want: Vec<u64> = want.iter().map(|v| v.rem_euclid(q as i128) as u64).collect();
            assert_eq!(a.mul(&b).unwrap().residues(), &want[..]);
        }
    }

    fn poly_strategy() -> impl Strategy<Value = (Vec<i64>, u64)> {
        (1usize..=16, prop::sample::select(vec![17u64, 257, 7681, 59393]))
            .prop_flat_map(|(n, q)| {
                (prop::collection::vec(-3i64..=3, n), Just(q))
            })
            .prop_map(|(mut low, q)| {
                low.push(1);
                (low, q)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ring_laws((f, q) in poly_strategy(), seed in any::<u64>()) {
            let r = ring(f, q);
            let mut rng = SeededRng::from_u64(seed);
            let a = RingElement::uniform(&r, &mut rng);
            let b = RingElement::uniform(&r, &mut rng);
            let c = RingElement::uniform(&r, &mut rng);
            let ab = a.mul(&b).unwrap();
            prop_assert_eq!(&ab, &b.mul(&a).unwrap());
            prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                ab.add(&a.mul(&c).unwrap()).unwrap()
            );
            let want = naive_mul(&a.centered(), &b.centered(), r.poly(), q as i64);
            prop_assert_eq!(ab.residues().to_vec(), want.iter().map(|&v| v as u64).collect::<Vec<_>>());
        }
    }
}
