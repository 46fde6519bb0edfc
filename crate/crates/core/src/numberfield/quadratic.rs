use std::fmt;

use crate::error::{Error, Result};
use crate::polyring::IntPolynomial;

const TRIAL_DIVISION_LIMIT: i64 = 1_000_000;

/// Integral basis `{1, ω}` of the ring of integers of `ℚ(√d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticBasis {
    /// `ω = √d`, for `d ≢ 1 (mod 4)`.
    RootD(i64),
    /// `ω = (1 + √d)/2`, for `d ≡ 1 (mod 4)`.
    HalfIntegral(i64),
}

impl QuadraticBasis {
    pub fn d(&self) -> i64 {
        match *self {
            QuadraticBasis::RootD(d) | QuadraticBasis::HalfIntegral(d) => d,
        }
    }

    /// Minimal polynomial of `ω`.
    pub fn min_poly(&self) -> IntPolynomial {
        match *self {
            QuadraticBasis::RootD(d) => IntPolynomial::new(vec![-d, 0, 1]),
            QuadraticBasis::HalfIntegral(d) => IntPolynomial::new(vec![(1 - d) / 4, -1, 1]),
        }
    }

    /// Discriminant of the field: `4d` or `d`.
    pub fn field_discriminant(&self) -> i64 {
        match *self {
            QuadraticBasis::RootD(d) => 4 * d,
            QuadraticBasis::HalfIntegral(d) => d,
        }
    }
}

impl fmt::Display for QuadraticBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadraticBasis::RootD(d) => write!(f, "{{1, sqrt({d})}}"),
            QuadraticBasis::HalfIntegral(d) => write!(f, "{{1, (1+sqrt({d}))/2}}"),
        }
    }
}

pub fn quadratic_ring_basis(d: i64) -> Result<QuadraticBasis> {
    if d == 0 || d == 1 {
        return Err(Error::InvalidParams("d must differ from 0 and 1".into()));
    }
    if !is_squarefree_int(d) {
        return Err(Error::NotSquarefree(d));
    }
    Ok(if d.rem_euclid(4) == 1 {
        QuadraticBasis::HalfIntegral(d)
    } else {
        QuadraticBasis::RootD(d)
    })
}

fn is_squarefree_int(d: i64) -> bool {
    let mut m = d.unsigned_abs();
    let mut p = 2u64;
    while p <= TRIAL_DIVISION_LIMIT as u64 && p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}
