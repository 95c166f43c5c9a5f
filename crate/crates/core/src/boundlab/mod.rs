//! Numerical companions to the minimax lower bound for variance estimation
//! under a rough mean.
//!
//! The construction pairs a normal null `N(0, 1 + θ²)` with a location
//! mixture whose mixing distribution matches the first `q` normal moments;
//! when `(q + 1) α > 1` the two are nearly indistinguishable while the
//! corresponding mean functions stay inside the Hölder ball.

mod adversarial;
mod hc;
mod hellinger;
mod lower_bound;
mod moments;

pub use adversarial::{bump, AdversarialMean};
pub use hc::{hc_expectation, hc_integral, hc_integrand};
pub use hellinger::{
    affinity_by_trapezoid, hellinger_affinity, mixture_density, null_density, Affinity,
    TestingProblem,
};
pub use lower_bound::{
    control_experiment, lower_bound_experiment, LowerBoundConfig, LowerBoundPoint, LowerBoundRow,
};
pub use moments::{moment_distribution, normal_moment, smallest_odd_q, MomentDistribution};
