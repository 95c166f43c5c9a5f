use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::{FunctionSpec, MeanFn, VarianceFn};
use super::noise::Noise;
use crate::diffvar::{estimate_variance, Method};
use crate::modelsel::{cdmse, default_h_grid, kfold_cv_diff, kfold_cv_fanyao, CvConfig};
use crate::residvar::fan_yao_variance;
use crate::rng::{derive_seed, stream_rng};
use crate::sample::fixed_design;
use crate::stats::{median, quantile};
use crate::{Design, Error, Result, Sample};

/// Cross-validation settings shared by every replication.
///
/// The fold seed of replication `r` is `derive_seed(master_seed, r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSettings {
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Candidate bandwidths; `None` selects the default grid for `n`.
    #[serde(default)]
    pub h_grid: Option<Vec<f64>>,
}

fn default_folds() -> usize {
    10
}

impl Default for CvSettings {
    fn default() -> Self {
        CvSettings {
            folds: default_folds(),
            h_grid: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub replications: usize,
    pub functions: FunctionSpec,
    #[serde(default)]
    pub noise: Noise,
    #[serde(default = "default_design")]
    pub design: Design,
    #[serde(default)]
    pub cv: CvSettings,
    pub master_seed: u64,
    /// Kernel order of the difference-based estimator.
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
}

fn default_design() -> Design {
    Design::Fixed
}

fn default_order() -> usize {
    2
}

fn default_methods() -> Vec<Method> {
    vec![Method::ResidualBased, Method::DifferenceBased]
}

impl ExperimentConfig {
    /// n = 1000, 100 replications, 10-fold CV, Gaussian noise, `v-quadratic`.
    pub fn table1(mean: MeanFn, master_seed: u64) -> Self {
        ExperimentConfig {
            n: 1000,
            replications: 100,
            functions: FunctionSpec::new(mean, VarianceFn::VQuadratic),
            noise: Noise::Gaussian,
            design: Design::Fixed,
            cv: CvSettings::default(),
            master_seed,
            order: 2,
            methods: default_methods(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::config("n", format!("need n >= 10, got {}", self.n)));
        }
        if self.replications < 1 {
            return Err(Error::config(
                "replications",
                "need at least one replication",
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "no estimation method selected"));
        }
        Ok(())
    }

    pub fn cv_config(&self, replication: usize) -> CvConfig {
        CvConfig {
            folds: self.cv.folds,
            h_grid: self
                .cv
                .h_grid
                .clone()
                .unwrap_or_else(|| default_h_grid(self.n)),
            seed: derive_seed(self.master_seed, replication as u64),
        }
    }

    /// True variance at the design points of `sample`.
    pub fn truth(&self, sample: &Sample) -> Vec<f64> {
        sample
            .x()
            .iter()
            .map(|&x| self.functions.variance.eval(x))
            .collect()
    }
}

/// One replication's data.
///
/// The random stream is `stream_rng(master_seed, replication)`: for a random
/// design the `n` uniforms are drawn first, then the `n` noise values.
pub fn generate(config: &ExperimentConfig, replication: usize) -> Result<Sample> {
    config.validate()?;
    let n = config.n;
    let mut rng = stream_rng(config.master_seed, replication as u64);
    let x = match config.design {
        Design::Fixed => fixed_design(n),
        Design::RandomUniform => {
            let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            x.sort_by(f64::total_cmp);
            x
        }
    };
    let f = &config.functions;
    let mut y = Vec::with_capacity(n);
    for &xi in &x {
        let v = f.variance.eval(xi);
        if !(v >= 0.0) {
            return Err(Error::config(
                "variance",
                format!("V({xi}) = {v} is negative"),
            ));
        }
        let z = config.noise.draw(&mut rng);
        y.push(f.mean.eval(xi) + v.sqrt() * z);
    }
    Sample::new(x, y, config.design)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub rep: usize,
    /// Fold seed used by cross-validation in this replication.
    pub seed: u64,
    pub method: Method,
    /// Variance bandwidth.
    pub h: Option<f64>,
    /// Mean bandwidth (residual-based only).
    pub h_mean: Option<f64>,
    pub cdmse: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub mean: String,
    pub per_replication: Vec<ReplicationRecord>,
    pub methods: BTreeMap<Method, MethodSummary>,
}

impl ExperimentSummary {
    pub fn median_cdmse(&self, method: Method) -> Option<f64> {
        self.methods.get(&method).map(|s| s.median)
    }

    pub fn quartiles(&self, method: Method) -> Option<(f64, f64)> {
        self.methods.get(&method).map(|s| (s.q1, s.q3))
    }

    /// Recomputes the per-method aggregates from the replication records.
    pub fn aggregate(
        records: &[ReplicationRecord],
        methods: &[Method],
    ) -> BTreeMap<Method, MethodSummary> {
        let mut out = BTreeMap::new();
        for &m in methods {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.method == m)
                .filter_map(|r| r.cdmse)
                .collect();
            let failed = records
                .iter()
                .filter(|r| r.method == m && r.cdmse.is_none())
                .count();
            if let (Some(med), Some(q1), Some(q3)) = (
                median(&values),
                quantile(&values, 0.25),
                quantile(&values, 0.75),
            ) {
                out.insert(
                    m,
                    MethodSummary {
                        median: med,
                        q1,
                        q3,
                        completed: values.len(),
                        failed,
                    },
                );
            }
        }
        out
    }
}

fn run_method(
    config: &ExperimentConfig,
    sample: &Sample,
    truth: &[f64],
    cv: &CvConfig,
    method: Method,
) -> Result<(f64, Option<f64>, f64)> {
    match method {
        Method::DifferenceBased => {
            let sel = kfold_cv_diff(sample, config.order, cv)?;
            let est = estimate_variance(sample, sel.h_selected, config.order, sample.x(), false)?;
            Ok((sel.h_selected, None, cdmse(&est, truth)?))
        }
        Method::ResidualBased => {
            let sel = kfold_cv_fanyao(sample, cv)?;
            let est = fan_yao_variance(sample, sel.h_mean(), sel.h_var(), sample.x())?;
            Ok((sel.h_var(), Some(sel.h_mean()), cdmse(&est, truth)?))
        }
    }
}

/// Runs the CDMSE comparison for one mean/variance pair.
///
/// Each replication generates a sample, cross-validates and fits every
/// configured method, and scores it against the true variance at the design
/// points. A failed replication is kept in `per_replication` with its error
/// and left out of the aggregates.
pub fn run_table1(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let per_rep: Vec<Vec<ReplicationRecord>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| -> Result<Vec<ReplicationRecord>> {
            let sample = generate(config, rep)?;
            let truth = config.truth(&sample);
            let cv = config.cv_config(rep);
            Ok(config
                .methods
                .iter()
                .map(
                    |&method| match run_method(config, &sample, &truth, &cv, method) {
                        Ok((h, h_mean, loss)) => ReplicationRecord {
                            rep,
                            seed: cv.seed,
                            method,
                            h: Some(h),
                            h_mean,
                            cdmse: Some(loss),
                            error: None,
                        },
                        Err(e) => ReplicationRecord {
                            rep,
                            seed: cv.seed,
                            method,
                            h: None,
                            h_mean: None,
                            cdmse: None,
                            error: Some(e.to_string()),
                        },
                    },
                )
                .collect())
        })
        .collect::<Result<_>>()?;
    let per_replication: Vec<ReplicationRecord> = per_rep.into_iter().flatten().collect();
    let methods = ExperimentSummary::aggregate(&per_replication, &config.methods);
    Ok(ExperimentSummary {
        mean: config.functions.mean.id().to_string(),
        per_replication,
        methods,
    })
}
