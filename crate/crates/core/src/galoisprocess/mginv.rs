use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::perm::{generate_group, Perm};
use crate::error::{arg_err, cap_err, Result};

/// Largest module `(Z/d)^m` that is searched exhaustively.
const MAX_MODULE: usize = 1 << 12;

/// Result of checking that every non-zero submodule of `(Z/d)^m`, with `G`
/// permuting coordinates, contains a non-zero `G`-fixed vector.
#[derive(Debug, Clone, Serialize)]
pub struct MgInvReport {
    pub d: u32,
    pub m: usize,
    pub group_order: usize,
    pub generators: Vec<Perm>,
    pub submodules: usize,
    /// Submodules (as sorted vector codes) with no non-zero fixed vector.
    pub failures: Vec<Vec<u32>>,
}

impl MgInvReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Prime divisors of a small positive integer.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Coordinates of a vector code, least significant first.
fn decode(mut code: u32, d: u32, m: usize) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let a = code % d;
            code /= d;
            a
        })
        .collect()
}

fn encode(v: &[u32], d: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &a| acc * d + a)
}

fn act(g: &Perm, v: &[u32]) -> Vec<u32> {
    let mut out = vec![0; v.len()];
    for (i, &a) in v.iter().enumerate() {
        out[g.apply(i)] = a;
    }
    out
}

fn add(a: &[u32], b: &[u32], d: u32) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % d).collect()
}

/// Smallest submodule containing `start` and `extra`.
fn closure(start: &BTreeSet<u32>, extra: u32, gens: &[Perm], d: u32, m: usize) -> BTreeSet<u32> {
    let mut set = start.clone();
    let mut queue = vec![extra];
    while let Some(c) = queue.pop() {
        if !set.insert(c) {
            continue;
        }
        let v = decode(c, d, m);
        for g in gens {
            let w = encode(&act(g, &v), d);
            if !set.contains(&w) {
                queue.push(w);
            }
        }
        let members: Vec<u32> = set.iter().copied().collect();
        for u in members {
            let s = encode(&add(&v, &decode(u, d, m), d), d);
            if !set.contains(&s) {
                queue.push(s);
            }
        }
    }
    set
}

/// Checks every non-zero `G`-submodule of `(Z/d)^m` for a non-zero fixed
/// vector. The order of `G` must only involve primes dividing `d`.
pub fn mginv_check(d: u32, gens: &[Perm], m: usize) -> Result<MgInvReport> {
    if d < 2 {
        return arg_err("d must be at least 2");
    }
    let size = (d as usize).checked_pow(m as u32).filter(|&s| s <= MAX_MODULE);
    let Some(size) = size else {
        return cap_err(format!("module (Z/{d})^{m} is larger than {MAX_MODULE}"));
    };
    let gens: Vec<Perm> = if gens.is_empty() { vec![Perm::identity(m)] } else { gens.to_vec() };
    let group = generate_group(&gens, m, 1 << 16)?;
    let d_primes = prime_factors(d as u64);
    if prime_factors(group.len() as u64).iter().any(|p| !d_primes.contains(p)) {
        return arg_err(format!("group of order {} is not a group of {d}-power order", group.len()));
    }
    let fixed: Vec<bool> = (0..size as u32)
        .map(|c| {
            let v = decode(c, d, m);
            gens.iter().all(|g| act(g, &v) == v)
        })
        .collect();
    let zero = BTreeSet::from([0u32]);
    let mut seen: HashSet<BTreeSet<u32>> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    let mut failures = Vec::new();
    while let Some(n) = frontier.pop() {
        for v in 0..size as u32 {
            if n.contains(&v) {
                continue;
            }
            let bigger = closure(&n, v, &gens, d, m);
            if seen.insert(bigger.clone()) {
                if !bigger.iter().any(|&c| c != 0 && fixed[c as usize]) {
                    failures.push(bigger.iter().copied().collect());
                }
                frontier.push(bigger);
            }
        }
    }
    Ok(MgInvReport { d, m, group_order: group.len(), generators: gens, submodules: seen.len() - 1, failures })
}

/// Runs [`mginv_check`] for every subgroup of `Sym(m)`, `m <= max_m`, whose
/// order divides `d^3` and involves only primes dividing `d`.
pub fn mginv_exhaustive(d: u32, max_m: usize) -> Result<Vec<MgInvReport>> {
    if max_m > 5 {
        return cap_err("subgroup enumeration is limited to at most 5 points");
    }
    let d_primes = prime_factors(d as u64);
    let cube = (d as usize).pow(3);
    let mut reports = Vec::new();
    for m in 1..=max_m {
        let sym = generate_group(
            &[Perm::from_fn(m, |i| (i + 1) % m), if m > 1 { Perm::transposition(m, 0, 1) } else { Perm::identity(1) }],
            m,
            usize::MAX,
        )?;
        let mut groups: BTreeSet<Vec<Perm>> = BTreeSet::new();
        // Every subgroup of Sym(m) for m <= 5 is generated by two elements.
        for a in &sym {
            for b in &sym {
                if a > b {
                    continue;
                }
                let g = generate_group(&[a.clone(), b.clone()], m, usize::MAX)?;
                let order = g.len();
                if cube.is_multiple_of(order) && prime_factors(order as u64).iter().all(|p| d_primes.contains(p)) {
                    groups.insert(g);
                }
            }
        }
        for g in groups {
            reports.push(mginv_check(d, &g, m)?);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases_hold() {
        for d in [2, 3] {
            let reports = mginv_exhaustive(d, 4).unwrap();
            assert!(!reports.is_empty());
            assert!(reports.iter().all(|r| r.holds()), "d={d}");
        }
    }

    #[test]
    fn subspace_counts() {
        // Trivial group: every subspace of F_2^3 (15 non-zero ones).
        let r = mginv_check(2, &[], 3).unwrap();
        assert_eq!(r.submodules, 15);
        // Cyclic shift on F_3^3: x^3 - 1 = (x - 1)^3, so the submodules form a chain of length 3.
        let r = mginv_check(3, &[Perm::from_fn(3, |i| (i + 1) % 3)], 3).unwrap();
        assert_eq!(r.submodules, 3);
        assert!(r.holds());
    }

    #[test]
    fn coprime_action_can_fail_and_is_rejected() {
        // A 3-cycle over F_2 has the submodule {v : sum v = 0} with no fixed
        // non-zero vector; the hypothesis on the group order rules it out.
        assert!(mginv_check(2, &[Perm::from_fn(3, |i| (i + 1) % 3)], 3).is_err());
    }
}
