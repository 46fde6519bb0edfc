//! Number fields `K = ℚ[x]/(f)` at desk-scale degree: the canonical
//! embedding, discriminants of monogenic orders and quadratic integer rings.

mod discriminant;
mod embedding;
mod quadratic;

pub use discriminant::{discriminant, discriminant_agreement, discriminant_numeric, MAX_DISCRIMINANT_DEGREE};
pub use embedding::{
    canonical_embed, canonical_embed_int, complex_roots, ring_lattice_basis, EmbeddingData,
    SignatureCount, MAX_EMBEDDING_DEGREE,
};
pub use quadratic::{quadratic_ring_basis, QuadraticBasis};
