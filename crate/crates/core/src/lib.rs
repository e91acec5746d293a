//! Arithmetic of the critical orbit of `f(z) = z^d + c` over the rationals.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactnum`]: big rationals, p-adic valuations, perfect powers, integer
//!   factorization and the cyclotomic ring `Z[zeta_p]`.
//! - [`poly`]: dense polynomials over `Q` and `F_p`, iteration, resultants and
//!   factorization over `Q`.
//! - [`dynamics`]: exact critical orbits, rigid divisibility and orbits modulo primes.
//! - [`stability`]: irreducibility and eventual-stability certificates.
//! - [`localfields`]: Newton polygons and ramification bookkeeping.
//! - [`galoisprocess`]: the fixed-point process on iterated wreath products.
//! - [`density`]: sieving experiments for the density of primes dividing an orbit.

pub mod density;
pub mod dynamics;
pub mod error;
pub mod exactnum;
pub mod galoisprocess;
pub mod localfields;
pub mod poly;
pub mod stability;

pub use dynamics::MapSpec;
pub use error::{Error, Result};
pub use exactnum::Rational;
pub use poly::RatPoly;
