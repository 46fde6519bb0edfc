//! A laboratory toolkit for lattice cryptography over polynomial rings.
//!
//! Contents, bottom-up:
//!
//! * [`zq`], [`rng`]: prime-field arithmetic and reproducible seeded streams.
//! * [`gaussian`]: the discrete Gaussian on ℤ, folded onto F_q.
//! * [`polyring`]: `ℤ[x]/(f)` and `F_q[x]/(f)`, cyclotomics, roots and orders mod q.
//! * [`numberfield`]: canonical embedding, discriminants, quadratic integer rings.
//! * [`lwe`]: Regev's bit cipher with its derived parameters.
//! * [`plwe`]: PLWE sample oracles and the LPR public-key cryptosystem.
//! * [`attacks`]: evaluation attacks on PLWE and a parameter-weakness scanner.
//! * [`glyph`]: the GLYPH rejection-sampling signature.
//! * [`bgv`]: a symmetric leveled BGV scheme over a decreasing modulus chain.
//! * [`format`]: the line-oriented text files every scheme reads and writes.

pub mod attacks;
pub mod bgv;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod glyph;
pub mod lwe;
pub mod numberfield;
pub mod plwe;
pub mod polyring;
pub mod rng;
pub mod zq;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub use zq::{Modulus, ZqElement};
