//! Iterates of `z^d + c` as explicit polynomials.

use crate::dynamics::MapSpec;
use crate::error::{cap_err, Result};

use super::RatPoly;

pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// `f^n` for `f = z^d + c`; `f^0 = z`.
pub fn iterate_map(m: &MapSpec, n: u32) -> Result<RatPoly> {
    iterate_map_capped(m, n, DEFAULT_DEGREE_CAP)
}

pub fn iterate_map_capped(m: &MapSpec, n: u32, degree_cap: usize) -> Result<RatPoly> {
    let deg = (m.d as u128).checked_pow(n);
    match deg {
        Some(x) if x <= degree_cap as u128 => {}
        _ => return cap_err(format!("degree {}^{} exceeds the cap {degree_cap}", m.d, n)),
    }
    let c = RatPoly::constant(m.c.clone());
    let mut acc = RatPoly::z();
    for _ in 0..n {
        acc = &acc.pow(m.d) + &c;
    }
    Ok(acc)
}

/// `g(f^n(z))`.
pub fn compose_with_iterate(g: &RatPoly, m: &MapSpec, n: u32) -> Result<RatPoly> {
    Ok(g.compose(&iterate_map(m, n)?))
}
