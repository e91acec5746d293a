use num_bigint::BigUint;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::perm::{subgroup_of_zd, Perm, PsiImage};
use super::tower::{BaseGroup, KernelSpec, TowerSpec};
use crate::error::{arg_err, cap_err, Result};

/// Most nodes (summed over all levels) an element may carry.
pub(crate) const MAX_NODES: u64 = 1 << 22;

/// An element of an iterated wreath product. Node `x` of level `k` has
/// children `x*d .. x*d + d - 1`; the element sends child `x*d + j` to
/// `y*d + (j + labels[k][x]) mod d` where `y` is the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WreathElement {
    pub d: u32,
    pub base: Perm,
    pub labels: Vec<Vec<u32>>,
}

impl WreathElement {
    pub fn identity(spec: &TowerSpec) -> Result<Self> {
        check_size(spec)?;
        Ok(WreathElement {
            d: spec.d,
            base: Perm::identity(spec.t0),
            labels: (0..spec.depth()).map(|k| vec![0; spec.width(k).unwrap() as usize]).collect(),
        })
    }

    /// The element rotating every fiber over level `n - 1` by one step and
    /// fixing everything below.
    pub fn fiber_rotation(spec: &TowerSpec, n: usize) -> Result<Self> {
        if n == 0 || n > spec.depth() {
            return arg_err(format!("level {n} outside 1..={}", spec.depth()));
        }
        let mut e = Self::identity(spec)?;
        e.labels[n - 1].iter_mut().for_each(|l| *l = 1 % spec.d);
        Ok(e)
    }

    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    pub fn t0(&self) -> usize {
        self.base.len()
    }

    /// Images of all nodes at levels `0..=level`.
    fn images_through(&self, level: usize) -> Vec<Vec<usize>> {
        let d = self.d as usize;
        let mut out = vec![self.base.images().to_vec()];
        for k in 0..level {
            let prev = &out[k];
            let lab = &self.labels[k];
            let next: Vec<usize> =
                (0..prev.len() * d).map(|y| prev[y / d] * d + (y % d + lab[y / d] as usize) % d).collect();
            out.push(next);
        }
        out
    }

    /// The permutation induced on the nodes of `level`.
    pub fn level_perm(&self, level: usize) -> Perm {
        Perm::new(self.images_through(level).pop().unwrap()).expect("wreath action is a bijection")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WreathElement) -> WreathElement {
        let imgs = other.images_through(self.depth());
        let d = self.d;
        let labels = (0..self.depth())
            .map(|k| {
                (0..other.labels[k].len()).map(|x| (other.labels[k][x] + self.labels[k][imgs[k][x]]) % d).collect()
            })
            .collect();
        WreathElement { d, base: self.base.compose(&other.base), labels }
    }

    pub fn inverse(&self) -> WreathElement {
        let inv_imgs = self.inverse_level_images();
        let d = self.d;
        let labels = (0..self.depth())
            .map(|k| {
                let mut out = vec![0; self.labels[k].len()];
                for (y, slot) in out.iter_mut().enumerate() {
                    *slot = (d - self.labels[k][inv_imgs[k][y]]) % d;
                }
                out
            })
            .collect();
        WreathElement { d, base: self.base.inverse(), labels }
    }

    fn inverse_level_images(&self) -> Vec<Vec<usize>> {
        self.images_through(self.depth().saturating_sub(1))
            .into_iter()
            .take(self.depth())
            .map(|img| {
                let mut inv = vec![0; img.len()];
                for (x, &y) in img.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect()
    }

    /// Whether the element lies in the group described by `spec`
    /// (the base part is checked only for listable base groups).
    pub fn in_group(&self, spec: &TowerSpec) -> bool {
        if self.d != spec.d || self.t0() != spec.t0 || self.depth() != spec.depth() {
            return false;
        }
        let base_ok = match &spec.base {
            BaseGroup::Trivial => self.base.is_identity(),
            BaseGroup::Cyclic => {
                let s = self.base.apply(0);
                (0..spec.t0).all(|i| self.base.apply(i) == (i + s) % spec.t0)
            }
            BaseGroup::Symmetric => true,
            BaseGroup::Explicit(ps) => ps.contains(&self.base),
        };
        base_ok
            && spec.kernels.iter().zip(&self.labels).all(|(ker, lab)| match ker {
                KernelSpec::Full => true,
                KernelSpec::SumIn(r) => label_sum(lab, spec.d).is_multiple_of(spec.d.gcd(r)),
            })
    }
}

fn label_sum(lab: &[u32], d: u32) -> u32 {
    (lab.iter().map(|&l| l as u64).sum::<u64>() % d as u64) as u32
}

fn check_size(spec: &TowerSpec) -> Result<()> {
    spec.validate()?;
    let mut total = 0u64;
    for k in 0..spec.depth() {
        total = total.saturating_add(spec.width(k).unwrap_or(u64::MAX));
    }
    if total > MAX_NODES {
        return cap_err(format!("tower has more than {MAX_NODES} labelled nodes"));
    }
    Ok(())
}

/// Number of fixed nodes at each level `0..=depth`.
pub fn fixed_per_level(e: &WreathElement) -> Vec<u64> {
    let d = e.d as usize;
    let mut fixed: Vec<usize> = (0..e.t0()).filter(|&i| e.base.apply(i) == i).collect();
    let mut out = vec![fixed.len() as u64];
    for lab in &e.labels {
        fixed = fixed.iter().filter(|&&x| lab[x] == 0).flat_map(|&x| x * d..x * d + d).collect();
        out.push(fixed.len() as u64);
    }
    out
}

/// Fixed points on the deepest level.
pub fn fixed_leaves(e: &WreathElement) -> u64 {
    *fixed_per_level(e).last().unwrap()
}

/// `psi` at level `n >= 1`: the sum of the labels on level `n - 1`, mod `d`.
pub fn psi(e: &WreathElement, n: usize) -> Result<u32> {
    if n == 0 || n > e.depth() {
        return arg_err(format!("psi needs a level in 1..={}", e.depth()));
    }
    Ok(label_sum(&e.labels[n - 1], e.d))
}

/// Image of `psi` at level `n` over the whole group of `spec`.
pub fn psi_image(spec: &TowerSpec, n: usize) -> Result<PsiImage> {
    spec.validate()?;
    if n == 0 || n > spec.depth() {
        return arg_err(format!("psi needs a level in 1..={}", spec.depth()));
    }
    Ok(match spec.kernels[n - 1] {
        KernelSpec::Full => subgroup_of_zd([1], spec.d),
        KernelSpec::SumIn(r) => subgroup_of_zd([r], spec.d),
    })
}

fn random_labels<R: Rng>(rng: &mut R, d: u32, m: usize, ker: KernelSpec) -> Vec<u32> {
    let mut v: Vec<u32> = (0..m).map(|_| rng.gen_range(0..d)).collect();
    if let KernelSpec::SumIn(r) = ker {
        let g = d.gcd(&r);
        let target = g * rng.gen_range(0..d / g);
        let partial = label_sum(&v[..m - 1], d);
        v[m - 1] = (target + d - partial) % d;
    }
    v
}

/// A uniformly random element of the group of `spec`.
pub fn sample_uniform<R: Rng>(spec: &TowerSpec, rng: &mut R) -> Result<WreathElement> {
    check_size(spec)?;
    let t0 = spec.t0;
    let base = match &spec.base {
        BaseGroup::Trivial => Perm::identity(t0),
        BaseGroup::Cyclic => {
            let s = rng.gen_range(0..t0);
            Perm::from_fn(t0, |i| (i + s) % t0)
        }
        BaseGroup::Symmetric => {
            let mut v: Vec<usize> = (0..t0).collect();
            v.shuffle(rng);
            Perm::new(v)?
        }
        BaseGroup::Explicit(_) => spec.base_elements()?.choose(rng).unwrap().clone(),
    };
    let labels = spec
        .kernels
        .iter()
        .enumerate()
        .map(|(k, &ker)| random_labels(rng, spec.d, spec.width(k).unwrap() as usize, ker))
        .collect();
    Ok(WreathElement { d: spec.d, base, labels })
}

/// Every element of the group of `spec`; refuses groups larger than `limit`.
pub fn enumerate_group(spec: &TowerSpec, limit: u64) -> Result<Vec<WreathElement>> {
    check_size(spec)?;
    let order = spec.order();
    if order > BigUint::from(limit) {
        return cap_err(format!("group order {order} exceeds the enumeration limit {limit}"));
    }
    let d = spec.d;
    let per_level: Vec<Vec<Vec<u32>>> = spec
        .kernels
        .iter()
        .enumerate()
        .map(|(k, &ker)| {
            let m = spec.width(k).unwrap() as usize;
            all_tuples(d, m)
                .into_iter()
                .filter(|t| match ker {
                    KernelSpec::Full => true,
                    KernelSpec::SumIn(r) => label_sum(t, d).is_multiple_of(d.gcd(&r)),
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for base in spec.base_elements()? {
        let mut idx = vec![0usize; per_level.len()];
        loop {
            let labels = idx.iter().zip(&per_level).map(|(&i, l)| l[i].clone()).collect();
            out.push(WreathElement { d, base: base.clone(), labels });
            // Odometer over the label choices.
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < per_level[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(out)
}

fn all_tuples(d: u32, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u32>| {
                (0..d).map(move |a| {
                    let mut u = t.clone();
                    u.push(a);
                    u
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galoisprocess::perm::psi_of_perm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixed_leaves_example() {
        let e = WreathElement { d: 2, base: Perm::identity(1), labels: vec![vec![0], vec![0, 1]] };
        assert_eq!(fixed_leaves(&e), 2);
        assert_eq!(fixed_per_level(&e), vec![1, 2, 2]);
        assert_eq!(e.level_perm(2).fixed_points(), 2);
    }

    #[test]
    fn psi_of_fiber_rotation() {
        for d in 2..5 {
            for depth in 1..4 {
                let spec = TowerSpec::full(d, 1, depth);
                let s = WreathElement::fiber_rotation(&spec, depth).unwrap();
                let m = spec.width(depth - 1).unwrap();
                assert_eq!(psi(&s, depth).unwrap() as u64, m % d as u64);
            }
        }
    }

    #[test]
    fn action_matches_composition() {
        let mut spec = TowerSpec::full(3, 2, 3);
        spec.base = BaseGroup::Symmetric;
        spec.kernels[1] = KernelSpec::SumIn(0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = sample_uniform(&spec, &mut rng).unwrap();
            let b = sample_uniform(&spec, &mut rng).unwrap();
            assert!(a.in_group(&spec) && b.in_group(&spec));
            let ab = a.compose(&b);
            assert!(ab.in_group(&spec));
            for lvl in 0..=3 {
                assert_eq!(ab.level_perm(lvl), a.level_perm(lvl).compose(&b.level_perm(lvl)));
                assert_eq!(a.level_perm(lvl).fixed_points() as u64, fixed_per_level(&a)[lvl]);
            }
            assert!(a.compose(&a.inverse()) == WreathElement::identity(&spec).unwrap());
            // psi from the labels agrees with psi read off the permutation
            // of the leaves relative to the fiber rotation.
            let s = WreathElement::fiber_rotation(&spec, 3).unwrap().level_perm(3);
            let ap = a.level_perm(3);
            if ap.compose(&s) == s.compose(&ap) {
                let from_perm = psi_of_perm(&ap, &s, 3).unwrap();
                let from_labels = psi(&a, 3).unwrap();
                // The labels are relative to the least point of each fiber, as in psi_of_perm.
                assert_eq!(from_perm, from_labels);
            }
            assert_eq!(psi(&a, 2).unwrap(), 0);
        }
    }

    #[test]
    fn enumeration_counts() {
        let spec = TowerSpec::full(2, 1, 3);
        let g = enumerate_group(&spec, 1000).unwrap();
        assert_eq!(g.len(), 128);
        let mut spec = TowerSpec::full(2, 2, 2);
        spec.base = BaseGroup::Cyclic;
        spec.kernels[1] = KernelSpec::SumIn(0);
        let g = enumerate_group(&spec, 1000).unwrap();
        assert_eq!(BigUint::from(g.len()), spec.order());
        assert!(g.iter().all(|e| e.in_group(&spec)));
        assert!(enumerate_group(&TowerSpec::full(3, 1, 3), 100_000).is_err());
    }

    #[test]
    fn psi_image_of_spec() {
        let mut spec = TowerSpec::full(4, 1, 2);
        assert_eq!(psi_image(&spec, 2).unwrap().elements, vec![0, 1, 2, 3]);
        spec.kernels[1] = KernelSpec::SumIn(2);
        assert_eq!(psi_image(&spec, 2).unwrap().elements, vec![0, 2]);
        assert!(psi_image(&spec, 0).is_err());
    }
}
