use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, cap_err, Error, Result};

/// A permutation of `0..n`, stored as its list of images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm(Vec<usize>);

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return arg_err(format!("{images:?} is not a permutation"));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Panics unless `f` is a bijection of `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Self {
        Perm::new((0..n).map(f).collect()).expect("not a bijection")
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Perm(v)
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut v: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (i, &a) in cyc.iter().enumerate() {
                if a >= n {
                    return arg_err(format!("point {a} out of range"));
                }
                v[a] = cyc[(i + 1) % cyc.len()];
            }
        }
        Perm::new(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j] = i;
        }
        Perm(v)
    }

    pub fn pow(&self, k: usize) -> Perm {
        let mut out = Perm::identity(self.len());
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i == j).count()
    }

    /// Orbits, each listed from its smallest point along the cycle.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut x = self.0[s];
            while x != s {
                seen[x] = true;
                cyc.push(x);
                x = self.0[x];
            }
            out.push(cyc);
        }
        out
    }
}

/// All elements of the group generated by `gens` on `n` points, sorted.
/// Fails with a capability error once more than `limit` elements appear.
pub fn generate_group(gens: &[Perm], n: usize, limit: usize) -> Result<Vec<Perm>> {
    if gens.iter().any(|g| g.len() != n) {
        return arg_err("generators act on different sets");
    }
    let id = Perm::identity(n);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if !seen.contains(&y) {
                if seen.len() >= limit {
                    return cap_err(format!("group has more than {limit} elements"));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

pub fn centralizes(g: &Perm, s: &Perm) -> bool {
    g.compose(s) == s.compose(g)
}

pub fn is_transitive(group: &[Perm], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let mut hit = vec![false; n];
    for g in group {
        hit[g.apply(0)] = true;
    }
    // The orbit of 0 under a group is the set of images of 0.
    hit.into_iter().all(|h| h)
}

/// A subgroup of `Z/d`, described by its generator `g | d` and its elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiImage {
    pub d: u32,
    pub generator: u32,
    pub elements: Vec<u32>,
    pub proper: bool,
}

/// The subgroup of `Z/d` generated by `values`.
pub fn subgroup_of_zd(values: impl IntoIterator<Item = u32>, d: u32) -> PsiImage {
    let g = values.into_iter().fold(d, |g, v| g.gcd(&(v % d)));
    let elements: Vec<u32> = (0..d / g).map(|k| k * g).collect();
    PsiImage { d, generator: g % d, proper: g != 1, elements }
}

/// `psi(tau)`: with `s_i` the least point of each fiber (orbit of `sigma_s`)
/// and `tau(s_i) = sigma_s^{r_i}(s_j)`, returns `sum r_i mod d`.
pub fn psi_of_perm(tau: &Perm, sigma_s: &Perm, d: u32) -> Result<u32> {
    let fibers = fiber_index(sigma_s, d)?;
    let mut total = 0u64;
    for cyc in sigma_s.cycles() {
        let image = tau.apply(cyc[0]);
        total += fibers[image].1 as u64;
    }
    Ok((total % d as u64) as u32)
}

/// For each point, its fiber number and its position `r` with `point = sigma^r(least point)`.
fn fiber_index(sigma_s: &Perm, d: u32) -> Result<Vec<(usize, usize)>> {
    let mut out = vec![(0, 0); sigma_s.len()];
    for (f, cyc) in sigma_s.cycles().iter().enumerate() {
        if cyc.len() != d as usize {
            return arg_err(format!("sigma_S has an orbit of size {} instead of {d}", cyc.len()));
        }
        for (r, &x) in cyc.iter().enumerate() {
            out[x] = (f, r);
        }
    }
    Ok(out)
}

/// `psi` over an explicit list of group elements. The list must be closed
/// under composition and every element must commute with `sigma_s`.
pub fn psi_image_explicit(d: u32, sigma_s: &Perm, elements: &[Perm]) -> Result<PsiImage> {
    let n = sigma_s.len();
    if elements.is_empty() {
        return arg_err("no group elements given");
    }
    if elements.iter().any(|e| e.len() != n) {
        return arg_err("elements must act on the same points as sigma_S");
    }
    let set: HashSet<&Perm> = elements.iter().collect();
    for a in elements {
        for b in elements {
            if !set.contains(&a.compose(b)) {
                return arg_err("element list is not closed under composition");
            }
        }
    }
    if let Some(bad) = elements.iter().position(|e| !centralizes(e, sigma_s)) {
        return arg_err(format!("element {bad} does not commute with sigma_S"));
    }
    let values = elements.iter().map(|e| psi_of_perm(e, sigma_s, d)).collect::<Result<Vec<_>>>()?;
    Ok(subgroup_of_zd(values, d))
}
