//! Dense polynomials over `Q` in the variable `z`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{arg_err, Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};

/// Coefficients lowest degree first; the leading coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        RatPoly { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().recip())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(BigInt::from(i))).collect(),
        )
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &RatPoly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(-z)`.
    pub fn reflect(&self) -> Self {
        RatPoly {
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let inv = divisor.lc().recip();
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] * &inv;
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &q * dc;
                rem[k + j] -= t;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient when `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Writes `self = content * prim` where `prim` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn primitive_part(&self) -> (Rational, Vec<BigInt>) {
        if self.is_zero() {
            return (Rational::zero(), Vec::new());
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().expect("nonzero").is_negative() {
            g = -g;
        }
        let prim = ints.iter().map(|c| c / &g).collect();
        (Rational::new(g, den), prim)
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Coefficients as exact strings, for JSON.
    pub fn to_strings(&self) -> Vec<String> {
        if self.is_zero() {
            return vec!["0".into()];
        }
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        items.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>().map(Self::new)
    }

    /// Accepts either the text form or a JSON array of coefficient strings.
    pub fn parse_any(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let items: Vec<serde_json::Value> =
                serde_json::from_str(t).map_err(|e| Error::Argument(format!("bad coefficient array: {e}")))?;
            let strs = items
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => Ok(s.clone()),
                    serde_json::Value::Number(n) => Ok(n.to_string()),
                    other => arg_err(format!("bad coefficient {other}")),
                })
                .collect::<Result<Vec<_>>>()?;
            Self::from_strings(&strs)
        } else {
            t.parse()
        }
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $m(self, rhs: RatPoly) -> RatPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl fmt::Display for RatPoly {
    /// Text form `c0 + c1*z + c2*z^2`, zero terms omitted, negative
    /// coefficients written with ` - `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = format_rational(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 if c.abs().is_one() => write!(f, "z")?,
                1 => write!(f, "{mag}*z")?,
                _ if c.abs().is_one() => write!(f, "z^{i}")?,
                _ => write!(f, "{mag}*z^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for RatPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return arg_err("empty polynomial");
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            // a sign starts a new term unless it follows '^', '*', or '/'
            let is_sign = (ch == '+' || ch == '-') && !matches!(prev, Some('^' | '*' | '/'));
            if is_sign {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                    neg = false;
                }
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        if cur.is_empty() {
            return arg_err(format!("cannot parse polynomial {s:?}"));
        }
        terms.push((neg, cur));

        let mut coeffs: Vec<Rational> = Vec::new();
        for (neg, body) in terms {
            let (c, k) = parse_term(&body).ok_or_else(|| Error::Argument(format!("bad term {body:?} in {s:?}")))?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            if neg {
                coeffs[k] -= c;
            } else {
                coeffs[k] += c;
            }
        }
        Ok(RatPoly::new(coeffs))
    }
}

fn parse_term(body: &str) -> Option<(Rational, usize)> {
    let (coef, power) = match body.find('z') {
        None => return parse_rational(body).ok().map(|c| (c, 0)),
        Some(pos) => {
            let coef = body[..pos].trim_end_matches('*');
            let rest = &body[pos + 1..];
            let k = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse::<usize>().ok()? };
            (coef, k)
        }
    };
    let c = if coef.is_empty() { Rational::one() } else { parse_rational(coef).ok()? };
    Some((c, power))
}

impl Serialize for RatPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatPoly {
    /// Accepts an array of coefficient strings or the text form.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        RatPoly::parse_any(&text).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn display_and_parse_round_trip() {
        let p = RatPoly::new(vec![rat(4, 9), int(0), rat(2, 3), int(0), int(1)]);
        assert_eq!(p.to_string(), "4/9 + 2/3*z^2 + z^4");
        assert_eq!(p.to_string().parse::<RatPoly>().unwrap(), p);
        let q = RatPoly::new(vec![int(-1), int(-3), int(0), rat(-1, 2)]);
        assert_eq!(q.to_string(), "-1 - 3*z - 1/2*z^3");
        assert_eq!(q.to_string().parse::<RatPoly>().unwrap(), q);
        assert_eq!("z^2 - 16/9".parse::<RatPoly>().unwrap(), RatPoly::new(vec![rat(-16, 9), int(0), int(1)]));
        assert_eq!("2*z + 3*z + -1".parse::<RatPoly>().unwrap(), RatPoly::from_ints(&[-1, 5]));
        assert_eq!("0".parse::<RatPoly>().unwrap(), RatPoly::zero());
        assert!("z^".parse::<RatPoly>().is_err());
        assert!("1 +".parse::<RatPoly>().is_err());
        assert!("".parse::<RatPoly>().is_err());
    }

    #[test]
    fn json_forms() {
        let p = RatPoly::parse_any(r#"["1/3", "0", "1"]"#).unwrap();
        assert_eq!(p, RatPoly::new(vec![rat(1, 3), int(0), int(1)]));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["1/3","0","1"]"#);
        let back: RatPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn division_and_gcd() {
        let a = RatPoly::from_ints(&[-1, 0, 1]);
        let b = RatPoly::from_ints(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, RatPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let g = (&a * &RatPoly::from_ints(&[2, 1])).gcd(&(&a * &RatPoly::from_ints(&[3, 1])));
        assert_eq!(g, a);
    }

    #[test]
    fn primitive_part_and_reflect() {
        let p = RatPoly::new(vec![rat(-16, 9), int(0), int(1)]);
        let (c, prim) = p.primitive_part();
        assert_eq!(c, rat(1, 9));
        assert_eq!(prim, vec![BigInt::from(-16), BigInt::from(0), BigInt::from(9)]);
        let q = RatPoly::from_ints(&[1, 2, 3]);
        assert_eq!(q.reflect(), RatPoly::from_ints(&[1, -2, 3]));
        assert_eq!(q.compose(&RatPoly::from_ints(&[0, -1])), q.reflect());
    }
}
