//! Simulation harness: data generation for `y = f(x) + V(x)^{1/2} z`, the
//! four-mean CDMSE comparison, and empirical convergence-rate fits.

mod experiment;
mod functions;
mod noise;
mod rates;

pub use experiment::{
    generate, run_table1, CvSettings, ExperimentConfig, ExperimentSummary, MethodSummary,
    ReplicationRecord,
};
pub use functions::{
    roughness, roughness_by_quadrature, CustomFn, FunctionSpec, MeanFn, VarianceFn,
};
pub use noise::Noise;
pub use rates::{rate_study, RatePoint, RateStudy};
