//! Newton polygons and ramification bookkeeping for the tower of preimages
//! of `z^d + c` at a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{arg_err, Error, Result};
use crate::exactnum::{val_p, Rational};
use crate::poly::RatPoly;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(serialize_with = "crate::exactnum::serde_exact::rational")]
    pub slope: Rational,
    /// Horizontal length.
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub p: u64,
    /// `(i, v_p(a_i))` for the nonzero coefficients.
    pub points: Vec<(usize, i64)>,
    pub vertices: Vec<(usize, i64)>,
    /// Left to right, slopes strictly increasing.
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> Vec<Rational> {
        self.segments.iter().map(|s| s.slope.clone()).collect()
    }
}

/// Lower convex hull of the coefficient valuations of `f` at `p`.
pub fn newton_polygon(f: &RatPoly, p: u64) -> Result<NewtonPolygon> {
    if f.is_zero() {
        return arg_err("the zero polynomial has no Newton polygon");
    }
    let mut points = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if !c.is_zero() {
            let v = val_p(c, p)?.finite().expect("nonzero coefficient");
            points.push((i, v));
        }
    }
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless a -> b -> pt turns counterclockwise
            let cross = (b.0 as i128 - a.0 as i128) * (pt.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (pt.0 as i128 - a.0 as i128);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            slope: Rational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(w[1].0 - w[0].0)),
            length: w[1].0 - w[0].0,
        })
        .collect();
    Ok(NewtonPolygon { p, points, vertices: hull, segments })
}

/// Ramification index of `K(a^(1/d))` over a local field where `v(a) = r`
/// and `d` is prime to the residue characteristic: `d / gcd(d, r)`.
pub fn kummer_ram_degree(d: u64, r: u64) -> Result<u64> {
    if d < 2 {
        return arg_err("d must be at least 2");
    }
    Ok(d / d.gcd(&r))
}

/// Ramification index of a compositum of two tame extensions.
pub fn tame_compositum_ram(e1: u64, e2: u64) -> Result<u64> {
    if e1 == 0 || e2 == 0 {
        return arg_err("ramification indices are positive");
    }
    Ok(e1.lcm(&e2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamTower {
    pub d: u64,
    pub r: u64,
    pub d0: u64,
    /// `e_0, ..., e_N`.
    pub e: Vec<u64>,
    /// `k_0, ..., k_N` with `r / (d0 d^n) = k_n / e_n`.
    pub k: Vec<u64>,
    /// Per-step ramification `e_n / e_(n-1)`, for `n = 1..=N`.
    pub steps: Vec<u64>,
    /// Last index at which `k` drops (0 if it never does); `e_n = d e_(n-1)` beyond it.
    pub n0: usize,
}

/// Ramification indices along a chain of preimages `beta_n` with
/// `v(beta_n) = r / (d0 d^n)`: the step from `beta_(n-1)` to `beta_n` adjoins
/// a `d`-th root of an element of normalized valuation `k_(n-1)`.
pub fn ram_tower(d: u64, r: u64, levels: usize, d0: u64) -> Result<RamTower> {
    if d < 2 {
        return arg_err("d must be at least 2");
    }
    if r == 0 || d0 == 0 {
        return arg_err("r and d0 must be positive");
    }
    let g = r.gcd(&d0);
    let mut e = vec![d0 / g];
    let mut k = vec![r / g];
    let mut steps = Vec::new();
    let mut n0 = 0;
    for n in 1..=levels {
        let m = k[n - 1];
        let step = kummer_ram_degree(d, m)?;
        let en = e[n - 1]
            .checked_mul(step)
            .ok_or_else(|| Error::Capability(format!("ramification index overflows at level {n}")))?;
        let kn = m / d.gcd(&m);
        // r / d_n = k_n / e_n must hold exactly
        let dn = (d0 as u128) * (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if (r as u128) * (en as u128) != (kn as u128).saturating_mul(dn) && dn != u128::MAX {
            return Err(Error::Internal(format!("valuation bookkeeping broke at level {n}")));
        }
        if kn < m {
            n0 = n;
        }
        steps.push(step);
        e.push(en);
        k.push(kn);
    }
    Ok(RamTower { d, r, d0, e, k, steps, n0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn poly(s: &str) -> RatPoly {
        s.parse().unwrap()
    }

    #[test]
    fn newton_examples() {
        let np = newton_polygon(&poly("z^4 + 6*z^2 + 12"), 3).unwrap();
        assert_eq!(np.points, vec![(0, 1), (2, 1), (4, 0)]);
        assert_eq!(np.slopes(), vec![rat(-1, 4)]);
        let np = newton_polygon(&poly("z^2 - 16/9"), 2).unwrap();
        assert_eq!(np.slopes(), vec![int(-2)]);
        let np = newton_polygon(&poly("z^2 + 4*z + 4"), 2).unwrap();
        assert_eq!(np.vertices, vec![(0, 2), (2, 0)]);
        assert_eq!(np.slopes(), vec![int(-1)]);
    }

    #[test]
    fn multi_segment_and_negative_valuations() {
        // (z - 2)(z - 1/3) at p = 2: roots of valuation 1 and 0
        let f = &poly("z - 2") * &poly("z - 1/3");
        let np = newton_polygon(&f, 2).unwrap();
        assert_eq!(np.slopes(), vec![int(-1), int(0)]);
        // at p = 3: valuations 0 and -1
        let np = newton_polygon(&f, 3).unwrap();
        assert_eq!(np.slopes(), vec![int(0), int(1)]);
        let lengths: usize = np.segments.iter().map(|s| s.length).sum();
        assert_eq!(lengths, 2);
    }

    #[test]
    fn kummer_and_compositum() {
        assert_eq!(kummer_ram_degree(6, 4).unwrap(), 3);
        assert_eq!(kummer_ram_degree(7, 0).unwrap(), 1);
        assert_eq!(kummer_ram_degree(5, 5).unwrap(), 1);
        for d in 2..10 {
            for r in 0..40 {
                assert_eq!(kummer_ram_degree(d, r).unwrap(), kummer_ram_degree(d, r % d).unwrap());
            }
        }
        assert_eq!(tame_compositum_ram(3, 3).unwrap(), 3);
        assert_eq!(tame_compositum_ram(2, 3).unwrap(), 6);
        assert_eq!(tame_compositum_ram(1, 9).unwrap(), 9);
    }

    #[test]
    fn tower_examples() {
        let t = ram_tower(2, 1, 4, 1).unwrap();
        assert_eq!(t.e, vec![1, 2, 4, 8, 16]);
        assert_eq!(t.n0, 0);
        let t = ram_tower(2, 2, 4, 1).unwrap();
        assert_eq!(t.e, vec![1, 1, 2, 4, 8]);
        assert_eq!(t.n0, 1);
        let t = ram_tower(3, 3, 3, 1).unwrap();
        assert_eq!(t.e, vec![1, 1, 3, 9]);
    }

    #[test]
    fn tower_invariants() {
        for d in 2..7u64 {
            for r in 1..=64u64 {
                let t = ram_tower(d, r, 20.min(60 / d as usize), 1).unwrap();
                for n in 1..t.e.len() {
                    assert_eq!(t.k[n - 1] % t.k[n], 0);
                    assert_eq!((t.e[n - 1] * d) % t.e[n], 0);
                    if n > t.n0 {
                        assert_eq!(t.e[n], d * t.e[n - 1], "d={d} r={r} n={n}");
                    }
                    // the denominator of r / d^n divides e_n
                    let den = Rational::new(BigInt::from(r), BigInt::from(d).pow(n as u32)).denom().clone();
                    assert!((BigInt::from(t.e[n]) % den).is_zero());
                }
            }
        }
    }
}
