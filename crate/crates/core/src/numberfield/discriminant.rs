use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numberfield::EmbeddingData;
use crate::polyring::IntPolynomial;

pub const MAX_DISCRIMINANT_DEGREE: usize = 32;

/// Discriminant of the order `ℤ[x]/(f)`.
///
/// This is `Δ(ℤ[θ])`, which equals `Δ_K` only when `ℤ[θ]` is the full ring of
/// integers (cyclotomic fields, for instance).
pub fn discriminant(f: &IntPolynomial) -> Result<BigInt> {
    let n = match f.degree() {
        Some(n) if n >= 1 && n <= MAX_DISCRIMINANT_DEGREE => n,
        _ => {
            return Err(Error::InvalidParams(format!(
                "degree must be in 1..={MAX_DISCRIMINANT_DEGREE}"
            )))
        }
    };
    if !f.is_monic() {
        return Err(Error::PreconditionFailed("discriminant needs a monic polynomial".into()));
    }
    if n == 1 {
        return Ok(BigInt::one());
    }
    let res = resultant(f.coeffs(), f.derivative().coeffs());
    if res.is_zero() {
        return Err(Error::NonSquarefree);
    }
    // (n(n-1)/2) odd flips the sign.
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -res } else { res })
}

/// `Res(a, b)` as the determinant of the Sylvester matrix (coefficients
/// lowest-first, both of positive degree).
pub(crate) fn resultant(a: &[i64], b: &[i64]) -> BigInt {
    let (n, m) = (a.len() - 1, b.len() - 1);
    let size = n + m;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..m {
        for (k, &c) in a.iter().rev().enumerate() {
            rows[i][i + k] = BigInt::from(c);
        }
    }
    for i in 0..n {
        for (k, &c) in b.iter().rev().enumerate() {
            rows[m + i][i + k] = BigInt::from(c);
        }
    }
    bareiss_det(rows)
}

/// Fraction-free Gaussian elimination; every division is exact.
pub(crate) fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `det(σ_i(θ^j))²` in floating point.
pub fn discriminant_numeric(e: &EmbeddingData) -> f64 {
    let n = e.degree();
    let mut m: Vec<Vec<Complex64>> = e
        .roots()
        .iter()
        .map(|r| (0..n).map(|j| r.powu(j as u32)).collect())
        .collect();
    let det = complex_det(&mut m);
    (det * det).re
}

fn complex_det(m: &mut [Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm()))
            .unwrap();
        if m[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let factor = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= factor * v;
            }
        }
    }
    det
}

/// Relative distance between the exact and the floating-point discriminant.
pub fn discriminant_agreement(exact: &BigInt, numeric: f64) -> f64 {
    let x: f64 = exact.to_string().parse().unwrap_or(f64::NAN);
    ((x - numeric) / x.abs().max(1.0)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::numberfield::{complex_roots, ring_lattice_basis};
    use crate::polyring::cyclotomic_poly;

    fn poly(v: &[i64]) -> IntPolynomial {
        IntPolynomial::new(v.to_vec())
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(discriminant(&poly(&[1, 0, 1])).unwrap(), BigInt::from(-4));
        assert_eq!(discriminant(&poly(&[1, 1, 1])).unwrap(), BigInt::from(-3));
        for d in [-7i64, -3, 2, 3, 5, 11] {
            assert_eq!(discriminant(&poly(&[-d, 0, 1])).unwrap(), BigInt::from(4 * d));
        }
    }

    #[test]
    fn quadratic_formula_oracle() {
        // x^2 + bx + c has discriminant b^2 - 4c
        for b in -5i64..=5 {
            for c in -5i64..=5 {
                let f = poly(&[c, b, 1]);
                match discriminant(&f) {
                    Ok(d) => assert_eq!(d, BigInt::from(b * b - 4 * c)),
                    Err(e) => {
                        assert_eq!(e, Error::NonSquarefree);
                        assert_eq!(b * b, 4 * c);
                    }
                }
            }
        }
    }

    #[test]
    fn cubic_formula_oracle() {
        // x^3 + px + q: -4p^3 - 27q^2
        for p in -4i64..=4 {
            for q in -4i64..=4 {
                let expected = -4 * p.pow(3) - 27 * q * q;
                if expected != 0 {
                    assert_eq!(discriminant(&poly(&[q, p, 0, 1])).unwrap(), BigInt::from(expected));
                }
            }
        }
    }

    #[test]
    fn prime_cyclotomics() {
        for p in [3u64, 5, 7] {
            let d = discriminant(&cyclotomic_poly(p)).unwrap();
            assert_eq!(d.abs(), BigInt::from(p).pow(p as u32 - 2));
        }
    }

    #[test]
    fn power_of_two_cyclotomic() {
        // disc(x^n + 1) = (-1)^{n(n-1)/2} n^n
        for n in [2usize, 4, 8, 16, 32] {
            let d = discriminant(&IntPolynomial::negacyclic(n)).unwrap();
            let mag = BigInt::from(n).pow(n as u32);
            assert_eq!(d, if n * (n - 1) / 2 % 2 == 1 { -mag } else { mag });
        }
    }

    #[test]
    fn errors() {
        assert_eq!(discriminant(&poly(&[1, 2, 1])), Err(Error::NonSquarefree));
        assert!(discriminant(&poly(&[1, 0, 2])).is_err());
        assert!(discriminant(&IntPolynomial::negacyclic(64)).is_err());
    }

    #[test]
    fn numeric_agreement_on_small_degrees() {
        let corpus = [
            poly(&[1, 0, 1]),
            poly(&[-2, 0, 0, 1]),
            poly(&[-1, -1, 0, 1]),
            poly(&[1, 1, 1, 1, 1]),
            poly(&[-5, 0, 0, 0, 0, 1]),
            poly(&[3, -1, 0, 2, 0, 0, 1]),
            cyclotomic_poly(7),
            cyclotomic_poly(15),
            cyclotomic_poly(16),
            poly(&[7, 1, 0, 0, 0, 0, 0, 0, 1]),
        ];
        for f in corpus {
            let exact = discriminant(&f).unwrap();
            let e = complex_roots(&f, 1e-13).unwrap();
            let rel = discriminant_agreement(&exact, discriminant_numeric(&e));
            assert!(rel < 1e-6, "{f}: relative error {rel}");
            // sign of the discriminant is (-1)^{s2}
            assert_eq!(exact.is_positive(), e.signature().s2 % 2 == 0);
        }
    }

    #[test]
    fn lattice_covolume() {
        // det of the real ring lattice basis is 2^{-s2} sqrt|Δ|
        for f in [cyclotomic_poly(5), poly(&[-2, 0, 0, 1]), poly(&[-3, 0, 1])] {
            let e = complex_roots(&f, 1e-13).unwrap();
            let basis = ring_lattice_basis(&e);
            let mut m: Vec<Vec<Complex64>> = basis
                .iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect();
            let vol = complex_det(&mut m).norm();
            let disc: f64 = discriminant(&f).unwrap().to_string().parse().unwrap();
            let expected = disc.abs().sqrt() / 2f64.powi(e.signature().s2 as i32);
            assert!((vol - expected).abs() < 1e-9 * expected, "{vol} vs {expected}");
        }
    }
}
