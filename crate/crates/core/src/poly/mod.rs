//! Univariate polynomials over `Q` and `F_p`: arithmetic, iteration,
//! resultants and factorization.

mod factor;
mod fp;
mod iterate;
mod ratpoly;
mod resultant;

pub use factor::{
    factor_over_q, factor_over_q_with, is_irreducible_over_q, is_irreducible_over_q_with, FactorList, FactorOptions,
    Irreducibility,
};
pub use fp::{degree_pattern, factor_mod_p, is_irreducible_mod_p, FpPoly, DEFAULT_SPLIT_SEED};
pub use iterate::{compose_with_iterate, iterate_map, iterate_map_capped, DEFAULT_DEGREE_CAP};
pub use ratpoly::RatPoly;
pub use resultant::{discriminant, resultant};
