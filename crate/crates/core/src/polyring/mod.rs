//! Polynomials over ℤ, the rings `R = ℤ[x]/(f)` and `R_q = F_q[x]/(f)`,
//! cyclotomic polynomials, evaluation maps and splitting modulo q.

pub(crate) mod fq_poly;
mod int_poly;
mod ring;
mod roots;

pub use int_poly::{cyclotomic_poly, euler_phi, IntPolynomial};
pub use ring::{evaluate, ring_mul, RingElement, RingParams};
pub use roots::{irreducibility_witness, is_irreducible_mod, is_totally_split, mult_order, roots_mod_q};
