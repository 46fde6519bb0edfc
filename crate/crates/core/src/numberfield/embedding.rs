use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::polyring::{fq_poly, IntPolynomial};
use crate::zq::Modulus;

pub const MAX_EMBEDDING_DEGREE: usize = 64;
const MAX_ITERATIONS: usize = 10_000;

/// Numbers of real embeddings and of conjugate pairs of complex embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureCount {
    pub s1: usize,
    pub s2: usize,
}

/// The complex roots of `f`, ordered real roots first (ascending), then
/// complex roots in conjugate pairs (positive imaginary part first).
#[derive(Clone, Debug)]
pub struct EmbeddingData {
    f: IntPolynomial,
    roots: Vec<Complex64>,
    precision: f64,
    signature: SignatureCount,
}

impl EmbeddingData {
    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    pub fn signature(&self) -> SignatureCount {
        self.signature
    }
}

// Large primes used to certify gcd(f, f') = 1; a unit gcd modulo any prime
// that keeps the degree is a unit gcd over ℚ.
const CERT_PRIMES: [u64; 4] = [
    2_305_843_009_213_693_951,
    4_611_686_018_427_387_847,
    1_152_921_504_606_846_883,
    576_460_752_303_423_433,
];

pub(crate) fn is_squarefree(f: &IntPolynomial) -> bool {
    let Some(n) = f.degree() else { return false };
    CERT_PRIMES.iter().any(|&p| {
        let q = Modulus::new(p).expect("certificate primes are prime");
        let fq = f.to_zq(q);
        if fq_poly::trim(fq.clone()).len() != n + 1 {
            return false;
        }
        fq_poly::gcd(&fq, &fq_poly::derivative(&fq, q), q).len() == 1
    })
}

/// Durand–Kerner simultaneous iteration from perturbed roots of unity.
pub fn complex_roots(f: &IntPolynomial, precision: f64) -> Result<EmbeddingData> {
    let n = match f.degree() {
        Some(n) if n >= 1 && n <= MAX_EMBEDDING_DEGREE => n,
        _ => {
            return Err(Error::InvalidParams(format!(
                "degree must be in 1..={MAX_EMBEDDING_DEGREE}"
            )))
        }
    };
    if !is_squarefree(f) {
        return Err(Error::NonSquarefree);
    }
    let lead = f.leading() as f64;
    let monic: Vec<f64> = f.coeffs().iter().map(|&c| c as f64 / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);

    // Fujiwara-style radius for the starting circle.
    let radius = (1..=n)
        .map(|k| monic[n - k].abs().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(0.5)
        * 1.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            let step = eval(z[k]) / denom;
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if max_step < precision {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_ITERATIONS));
    }

    let (mut real, mut upper): (Vec<f64>, Vec<Complex64>) = (Vec::new(), Vec::new());
    for r in &z {
        if r.im.abs() < precision.max(1e-9) * r.norm().max(1.0) {
            real.push(r.re);
        } else if r.im > 0.0 {
            upper.push(*r);
        }
    }
    real.sort_by(f64::total_cmp);
    upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    if real.len() + 2 * upper.len() != n {
        return Err(Error::NoConvergence(MAX_ITERATIONS));
    }
    let mut roots: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for u in &upper {
        roots.push(*u);
        roots.push(u.conj());
    }

    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= precision {
                return Err(Error::NonSquarefree);
            }
        }
    }
    Ok(EmbeddingData {
        f: f.clone(),
        signature: SignatureCount {
            s1: real.len(),
            s2: upper.len(),
        },
        roots,
        precision,
    })
}

/// σ(x) = (x(θ_1), …, x(θ_n)) for `x = Σ c_j θ^j`.
pub fn canonical_embed(coeffs: &[Rational64], e: &EmbeddingData) -> Result<Vec<Complex64>> {
    let floats: Vec<f64> = coeffs
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect();
    canonical_embed_f64(&floats, e)
}

pub fn canonical_embed_int(coeffs: &[i64], e: &EmbeddingData) -> Result<Vec<Complex64>> {
    canonical_embed_f64(&coeffs.iter().map(|&c| c as f64).collect::<Vec<_>>(), e)
}

fn canonical_embed_f64(coeffs: &[f64], e: &EmbeddingData) -> Result<Vec<Complex64>> {
    if coeffs.len() != e.degree() {
        return Err(Error::LengthMismatch {
            expected: e.degree(),
            got: coeffs.len(),
        });
    }
    Ok(e.roots
        .iter()
        .map(|&r| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * r + c))
        .collect())
}

/// Real basis of the lattice σ(ℤ[θ]) ⊂ ℝ^{s1} × ℂ^{s2} ≅ ℝ^n.
///
/// Row `j` is the image of `θ^j`; complex coordinates contribute
/// `(Re, Im)` of the root with positive imaginary part.
pub fn ring_lattice_basis(e: &EmbeddingData) -> Vec<Vec<f64>> {
    let n = e.degree();
    let SignatureCount { s1, s2 } = e.signature;
    (0..n)
        .map(|j| {
            let mut row = Vec::with_capacity(n);
            for r in &e.roots[..s1] {
                row.push(r.powu(j as u32).re);
            }
            for k in 0..s2 {
                let z = e.roots[s1 + 2 * k].powu(j as u32);
                row.push(z.re);
                row.push(z.im);
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[i64]) -> IntPolynomial {
        IntPolynomial::new(v.to_vec())
    }

    #[test]
    fn gaussian_integers() {
        let e = complex_roots(&poly(&[1, 0, 1]), 1e-12).unwrap();
        assert_eq!(e.signature(), SignatureCount { s1: 0, s2: 1 });
        assert!((e.roots()[0] - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        assert!((e.roots()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn real_quadratic() {
        let e = complex_roots(&poly(&[-2, 0, 1]), 1e-12).unwrap();
        assert_eq!(e.signature(), SignatureCount { s1: 2, s2: 0 });
        assert!((e.roots()[0].re + std::f64::consts::SQRT_2).abs() < 1e-10);
        assert!((e.roots()[1].re - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn cube_root_of_two() {
        let f = poly(&[-2, 0, 0, 1]);
        let e = complex_roots(&f, 1e-12).unwrap();
        assert_eq!(e.signature(), SignatureCount { s1: 1, s2: 1 });
        for r in e.roots() {
            assert!(f.eval_complex(*r).norm() < 1e-9);
        }
    }

    #[test]
    fn non_squarefree_rejected() {
        assert_eq!(
            complex_roots(&poly(&[1, 2, 1]), 1e-12).unwrap_err(),
            Error::NonSquarefree
        );
    }

    #[test]
    fn degree_64_cyclotomic_converges() {
        let f = crate::polyring::cyclotomic_poly(128);
        let e = complex_roots(&f, 1e-12).unwrap();
        assert_eq!(e.signature(), SignatureCount { s1: 0, s2: 32 });
        for r in e.roots() {
            assert!((r.norm() - 1.0).abs() < 1e-9);
            assert!(f.eval_complex(*r).norm() < 1e-9);
        }
    }

    #[test]
    fn signature_counts_add_up() {
        for f in [
            poly(&[-1, -1, 0, 1]),
            poly(&[255, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
            crate::polyring::cyclotomic_poly(15),
            poly(&[-5, 0, 0, 0, 0, 1]),
        ] {
            let e = complex_roots(&f, 1e-12).unwrap();
            let SignatureCount { s1, s2 } = e.signature();
            assert_eq!(s1 + 2 * s2, f.degree().unwrap());
        }
    }

    #[test]
    fn embedding_constants_and_generator() {
        let e = complex_roots(&IntPolynomial::negacyclic(4), 1e-12).unwrap();
        let one = canonical_embed_int(&[1, 0, 0, 0], &e).unwrap();
        assert!(one.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        let theta = canonical_embed_int(&[0, 1, 0, 0], &e).unwrap();
        for (a, b) in theta.iter().zip(e.roots()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(
            canonical_embed_int(&[1, 2], &e),
            Err(Error::LengthMismatch { expected: 4, got: 2 })
        ));
        let half = canonical_embed(&[Rational64::new(1, 2), 0.into(), 0.into(), 0.into()], &e).unwrap();
        assert!((half[0].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn multiplication_is_componentwise() {
        use crate::rng::SeededRng;
        let f = crate::polyring::cyclotomic_poly(9);
        let e = complex_roots(&f, 1e-13).unwrap();
        let mut rng = SeededRng::from_u64(4);
        for _ in 0..100 {
            let a: Vec<i64> = (0..6).map(|_| rng.uniform_symmetric(5)).collect();
            let b: Vec<i64> = (0..6).map(|_| rng.uniform_symmetric(5)).collect();
            let (_, ab) = IntPolynomial::new(a.clone())
                .mul(&IntPolynomial::new(b.clone()))
                .divrem_monic(&f);
            let mut ab = ab.coeffs().to_vec();
            ab.resize(6, 0);
            let lhs = canonical_embed_int(&ab, &e).unwrap();
            let sa = canonical_embed_int(&a, &e).unwrap();
            let sb = canonical_embed_int(&b, &e).unwrap();
            for i in 0..6 {
                assert!((lhs[i] - sa[i] * sb[i]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn shift_is_not_a_coordinate_permutation_in_embedding_space() {
        // In Z[x]/(x^n+1), x·c rotates and negates coefficients, while the
        // canonical embedding scales each coordinate by a root.
        let n = 8;
        let e = complex_roots(&IntPolynomial::negacyclic(n), 1e-13).unwrap();
        let c: Vec<i64> = vec![3, -1, 4, 1, -5, 9, 2, -6];
        let mut xc = vec![0i64; n];
        for i in 0..n {
            if i + 1 < n {
                xc[i + 1] = c[i];
            } else {
                xc[0] = -c[i];
            }
        }
        let lhs = canonical_embed_int(&xc, &e).unwrap();
        let rhs = canonical_embed_int(&c, &e).unwrap();
        for i in 0..n {
            assert!((lhs[i] - rhs[i] * e.roots()[i]).norm() < 1e-9);
        }
    }
}
