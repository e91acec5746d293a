use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::perm::{generate_group, Perm};
use crate::error::{arg_err, cap_err, Error, Result};

/// The group acting on the `t0` level-0 points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseGroup {
    Trivial,
    /// Generated by `i -> i + 1 mod t0`.
    Cyclic,
    Symmetric,
    /// An explicit list of permutations, closed under composition.
    Explicit(Vec<Perm>),
}

/// Labels allowed on the nodes of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSpec {
    /// Every tuple in `(Z/d)^m`.
    Full,
    /// Tuples whose coordinate sum lies in the subgroup generated by `r`.
    SumIn(u32),
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Full => write!(f, "full"),
            KernelSpec::SumIn(r) => write!(f, "sum_in:{r}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "full" {
            return Ok(KernelSpec::Full);
        }
        if let Some(r) = t.strip_prefix("sum_in:") {
            return r.parse().map(KernelSpec::SumIn).map_err(|_| Error::Argument(format!("bad kernel {s:?}")));
        }
        arg_err(format!("bad kernel {s:?}; expected \"full\" or \"sum_in:R\""))
    }
}

impl Serialize for KernelSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for KernelSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BaseRepr {
    Name(String),
    List(Vec<Vec<usize>>),
}

impl Serialize for BaseGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BaseGroup::Trivial => s.serialize_str("trivial"),
            BaseGroup::Cyclic => s.serialize_str("cyclic"),
            BaseGroup::Symmetric => s.serialize_str("symmetric"),
            BaseGroup::Explicit(ps) => BaseRepr::List(ps.iter().map(|p| p.images().to_vec()).collect()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BaseGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match BaseRepr::deserialize(d)? {
            BaseRepr::Name(n) => n.parse().map_err(serde::de::Error::custom),
            BaseRepr::List(l) => l
                .into_iter()
                .map(Perm::new)
                .collect::<Result<Vec<_>>>()
                .map(BaseGroup::Explicit)
                .map_err(serde::de::Error::custom),
        }
    }
}

impl FromStr for BaseGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trivial" => Ok(BaseGroup::Trivial),
            "cyclic" => Ok(BaseGroup::Cyclic),
            "symmetric" => Ok(BaseGroup::Symmetric),
            other => arg_err(format!("bad base group {other:?}")),
        }
    }
}

/// A tower of depth `kernels.len()`: `t0` roots at level 0, each node of
/// level `k` has `d` children, and `kernels[k]` constrains the labels on the
/// nodes of level `k` (which move the points of level `k + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub d: u32,
    pub t0: usize,
    pub base: BaseGroup,
    pub kernels: Vec<KernelSpec>,
}

/// Most base points for the symmetric group when elements must be listed.
pub(crate) const LISTABLE_SYMMETRIC: usize = 8;

impl TowerSpec {
    pub fn full(d: u32, t0: usize, depth: usize) -> Self {
        TowerSpec { d, t0, base: BaseGroup::Trivial, kernels: vec![KernelSpec::Full; depth] }
    }

    pub fn depth(&self) -> usize {
        self.kernels.len()
    }

    /// Number of nodes at level `k`, or `None` on overflow.
    pub fn width(&self, k: usize) -> Option<u64> {
        (self.d as u64).checked_pow(k as u32)?.checked_mul(self.t0 as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return arg_err("d must be at least 2");
        }
        if self.t0 == 0 {
            return arg_err("t0 must be at least 1");
        }
        if self.depth() > 64 {
            return cap_err("depth above 64 is not supported");
        }
        if let BaseGroup::Explicit(ps) = &self.base {
            if ps.is_empty() {
                return arg_err("explicit base group is empty");
            }
            if ps.iter().any(|p| p.len() != self.t0) {
                return arg_err("base permutations must act on t0 points");
            }
            let closure = generate_group(ps, self.t0, 1 << 20)?;
            let mut listed = ps.clone();
            listed.sort();
            listed.dedup();
            if closure.len() != listed.len() {
                return arg_err("explicit base group is not closed under composition");
            }
        }
        Ok(())
    }

    /// `|<r>|` inside `Z/d`.
    pub(crate) fn subgroup_size(&self, r: u32) -> u64 {
        (self.d / (r % self.d).gcd(&self.d)) as u64
    }

    pub fn base_order(&self) -> BigUint {
        match &self.base {
            BaseGroup::Trivial => BigUint::one(),
            BaseGroup::Cyclic => BigUint::from(self.t0),
            BaseGroup::Symmetric => (1..=self.t0).map(BigUint::from).product(),
            BaseGroup::Explicit(ps) => {
                let mut v = ps.clone();
                v.sort();
                v.dedup();
                BigUint::from(v.len())
            }
        }
    }

    /// Order of the whole group: base order times the size of every kernel.
    pub fn order(&self) -> BigUint {
        let d = BigUint::from(self.d);
        let mut total = self.base_order();
        for (k, ker) in self.kernels.iter().enumerate() {
            let m = self.width(k).unwrap_or(u64::MAX);
            let m = u32::try_from(m).unwrap_or(u32::MAX);
            total *= match ker {
                KernelSpec::Full => d.pow(m),
                KernelSpec::SumIn(r) => d.pow(m - 1) * self.subgroup_size(*r),
            };
        }
        total
    }

    /// Elements of the base group as permutations (capped for the symmetric group).
    pub fn base_elements(&self) -> Result<Vec<Perm>> {
        let t0 = self.t0;
        Ok(match &self.base {
            BaseGroup::Trivial => vec![Perm::identity(t0)],
            BaseGroup::Cyclic => (0..t0).map(|s| Perm::from_fn(t0, |i| (i + s) % t0)).collect(),
            BaseGroup::Symmetric => {
                if t0 > LISTABLE_SYMMETRIC {
                    return cap_err("symmetric base group too large to list");
                }
                let gens: Vec<Perm> = if t0 == 1 {
                    vec![Perm::identity(1)]
                } else {
                    vec![Perm::from_fn(t0, |i| (i + 1) % t0), Perm::transposition(t0, 0, 1)]
                };
                generate_group(&gens, t0, usize::MAX)?
            }
            BaseGroup::Explicit(ps) => {
                let mut v = ps.clone();
                v.sort();
                v.dedup();
                v
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let json = r#"{"d": 2, "t0": 1, "base": "trivial", "kernels": ["full", "sum_in:0"]}"#;
        let spec: TowerSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.kernels, vec![KernelSpec::Full, KernelSpec::SumIn(0)]);
        let back: TowerSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let json = r#"{"d": 3, "t0": 2, "base": [[0, 1], [1, 0]], "kernels": []}"#;
        let spec: TowerSpec = serde_json::from_str(json).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.base_elements().unwrap().len(), 2);
    }

    #[test]
    fn explicit_base_must_be_closed() {
        let spec = TowerSpec {
            d: 2,
            t0: 3,
            base: BaseGroup::Explicit(vec![Perm::identity(3), Perm::new(vec![1, 2, 0]).unwrap()]),
            kernels: vec![],
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn base_group_sizes() {
        let mut spec = TowerSpec::full(2, 4, 1);
        spec.base = BaseGroup::Symmetric;
        assert_eq!(spec.base_elements().unwrap().len(), 24);
        spec.base = BaseGroup::Cyclic;
        assert_eq!(spec.base_elements().unwrap().len(), 4);
    }

    #[test]
    fn order() {
        assert_eq!(TowerSpec::full(2, 1, 3).order(), BigUint::from(128u32));
        let mut spec = TowerSpec::full(3, 1, 2);
        spec.kernels[1] = KernelSpec::SumIn(0);
        assert_eq!(spec.order(), BigUint::from(3u32 * 9));
    }
}
