//! Deterministic recursive local search for unconstrained maximization of
//! non-negative submodular set functions in the value-oracle model.
//!
//! - [`oracle`]: subsets, counted oracles, shift/restrict/pin combinators
//! - [`instance`]: cut and coverage functions, generators, file format
//! - [`localsearch`]: double greedy and approximate local search
//! - [`recursive`]: the recursive algorithm, traces, and trace verification
//! - [`exact`]: brute-force optima and local maxima

pub mod error;
pub mod exact;
pub mod instance;
pub mod localsearch;
pub mod oracle;
pub mod recursive;
pub mod rng;
pub mod subset;
pub mod tolerance;

pub use error::{Error, Result};
pub use exact::{brute_force_opt, enumerate_exact_local_maxima, ratio, ExactResult};
pub use instance::{
    build_oracle, check_submodular, parse, random_instance, serialize, CheckMode, Instance, InstanceKind, Payload,
    RandomParams, Verdict, Witness,
};
pub use localsearch::{
    double_greedy_det, double_greedy_rand, is_approx_local_max, ls_approx_local_max, LocalMaxMode, LsConfig, LsResult,
};
pub use oracle::{QueryLedger, SetFunction, ValueOracle};
pub use recursive::{
    alg, alpha0_bound, alpha1_bound, depth_sweep, node_optima, verify_trace, AlgConfig, AlgOutcome, AlphaBound,
    CheckKind, CheckOutcome, CheckStatus, NodeOptima, TraceNode, TraceReport,
};
pub use rng::Rng;
pub use subset::{GroundSet, Subset};
