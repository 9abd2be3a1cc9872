//! Exact rounding algorithms for fractional matchings in non-uniform
//! hypergraphs.
//!
//! Given a fractional b-matching `x`, the crate provides three ways to turn it
//! into integral solutions, each with a per-edge guarantee expressed through
//! `g(e) = |e| − (|e| − 1)·x(e)`:
//!
//! * [`clocks`]: exponential-clocks sampling (capacities 1) where every edge is
//!   kept with probability exactly `x(e)/(x(e) + x(N(e))) ≥ x(e)/g(e)`;
//! * [`greedy`]: weight-ordered greedy with `Σ_{e∈M} g(e)w(e) ≥ Σ_e w(e)x(e)`;
//! * [`distribution`]: an explicit convex combination of b-matchings with
//!   marginals at least `x(e)/g(e)`, built by column generation over an exact
//!   simplex ([`lp`]) with greedy as the separation oracle.
//!
//! All arithmetic that is checked is exact rational arithmetic.

pub mod clocks;
pub mod distribution;
pub mod error;
pub mod generators;
pub mod greedy;
pub mod hypergraph;
pub mod instance;
pub mod lp;
pub mod oracles;
pub mod rational;

pub use clocks::{
    analytic_marginal, estimate_marginals, marginal_lower_bound, sample_matching, ClockSampler,
    MarginalEstimate, RngSeed,
};
pub use distribution::{
    build_distribution, marginal_target_from, reduce_support, separation_oracle,
    verify_distribution, DistributionBuild, MarginalTarget, MatchingDistribution,
};
pub use error::{Error, Result};
pub use generators::{gen_fano, gen_projective_plane, gen_random, GeneratorConfig};
pub use greedy::{greedy, verify_charging_chain, verify_greedy_bound, GreedyTrace};
pub use hypergraph::{
    guarantee_g, is_b_matching, is_fractional_b_matching, lp_value, BMatching, EdgeWeights,
    FractionalPoint, Hypergraph, VertexCapacities,
};
pub use instance::Instance;
pub use lp::{solve_fractional_bmatching, tight_vertices, LinearProgram, LpOutcome};
pub use oracles::{brute_force_max_bmatching, enumerate_b_matchings};
pub use rational::Rational;
