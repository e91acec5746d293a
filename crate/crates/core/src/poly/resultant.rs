//! Resultants and discriminants over `Q`.

use num_traits::{One, Zero};

use super::RatPoly;
use crate::error::{arg_err, Result};
use crate::exactnum::Rational;

fn rpow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// `Res(f, g) = lc(f)^deg g * prod g(alpha)` over the roots of `f`;
/// zero if either input is zero.
pub fn resultant(f: &RatPoly, g: &RatPoly) -> Rational {
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut acc = Rational::one();
    loop {
        let (Some(m), Some(n)) = (a.degree(), b.degree()) else {
            return Rational::zero();
        };
        if n == 0 {
            return acc * rpow(&b.lc(), m);
        }
        if m == 0 {
            return acc * rpow(&a.lc(), n);
        }
        let r = a.div_rem(&b).1;
        let Some(dr) = r.degree() else {
            return Rational::zero();
        };
        // Res(a, b) = (-1)^(mn) lc(b)^(m - deg r) Res(b, r)
        acc *= rpow(&b.lc(), m - dr);
        if (m * n) % 2 == 1 {
            acc = -acc;
        }
        a = b;
        b = r;
    }
}

/// `(-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &RatPoly) -> Result<Rational> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return arg_err("discriminant needs a polynomial of degree at least 1"),
    };
    let r = resultant(f, &f.derivative()) / f.lc();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}
