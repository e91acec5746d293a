//! The Galois process on towers modeled as iterated wreath products of `Z/d`:
//! exact fixed-point distributions, extinction probabilities, Monte Carlo
//! sampling, the `psi` homomorphism and brute-force group checks.

mod distribution;
mod mginv;
mod perm;
mod tower;
mod wreath;

pub use distribution::{
    brute_force_distribution, conditional_check, exact_yn_distribution, expected_fixed_points, extinction_curve,
    monte_carlo, ConditionalEntry, ConditionalReport, ExtinctionPoint, MonteCarloReport, ProbVector,
};
pub use mginv::{mginv_check, mginv_exhaustive, MgInvReport};
pub use perm::{
    centralizes, generate_group, is_transitive, psi_image_explicit, psi_of_perm, subgroup_of_zd, Perm, PsiImage,
};
pub use tower::{BaseGroup, KernelSpec, TowerSpec};
pub use wreath::{enumerate_group, fixed_leaves, fixed_per_level, psi, psi_image, sample_uniform, WreathElement};
