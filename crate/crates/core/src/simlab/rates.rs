use rayon::prelude::*;
use serde::Serialize;

use super::experiment::{generate, ExperimentConfig};
use crate::diffvar::estimate_variance;
use crate::modelsel::cdmse;
use crate::stats::{least_squares_line, median};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub h: f64,
    pub log_n: f64,
    pub median_cdmse: f64,
    pub log_median_cdmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStudy {
    /// Least-squares slope of `log median CDMSE` against `log n`.
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<RatePoint>,
}

/// Empirical convergence rate of the difference-based estimator with the
/// fixed bandwidth rule `h = n^{h_exponent}`.
///
/// Every sample size reuses `config` with `n` replaced; replication `r` at
/// each size draws from stream `r` of `config.master_seed`.
pub fn rate_study(ns: &[usize], config: &ExperimentConfig, h_exponent: f64) -> Result<RateStudy> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input(
            "ns",
            "sample sizes must be strictly increasing",
        ));
    }
    if ns.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: ns.len(),
        });
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 50) {
        return Err(Error::input(
            "ns",
            format!("each sample size must be >= 50, got {n}"),
        ));
    }
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut cfg = config.clone();
        cfg.n = n;
        cfg.validate()?;
        let h = (n as f64).powf(h_exponent);
        let losses = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| -> Result<f64> {
                let sample = generate(&cfg, rep)?;
                let truth = cfg.truth(&sample);
                let est = estimate_variance(&sample, h, cfg.order, sample.x(), false)?;
                cdmse(&est, &truth)
            })
            .collect::<Result<Vec<_>>>()?;
        let med = median(&losses).expect("at least one replication");
        points.push(RatePoint {
            n,
            h,
            log_n: (n as f64).ln(),
            median_cdmse: med,
            log_median_cdmse: med.ln(),
        });
    }
    let line: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.log_n, p.log_median_cdmse))
        .collect();
    let (slope, intercept) = least_squares_line(&line)?;
    Ok(RateStudy {
        slope,
        intercept,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simlab::{MeanFn, VarianceFn};

    #[test]
    fn needs_three_sizes() {
        let c = ExperimentConfig::table1(MeanFn::F1, 1);
        assert!(matches!(
            rate_study(&[100, 200], &c, -0.2),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(rate_study(&[100, 40, 200], &c, -0.2).is_err());
        assert!(rate_study(&[20, 100, 200], &c, -0.2).is_err());
    }

    #[test]
    fn constant_variance_medians_decrease() {
        let mut c = ExperimentConfig::table1(MeanFn::F1, 5);
        c.functions.variance = VarianceFn::Constant(1.0);
        c.replications = 40;
        let study = rate_study(&[100, 400, 1600], &c, -0.2).unwrap();
        assert!(study.points.iter().all(|p| p.median_cdmse > 0.0));
        assert!(study
            .points
            .windows(2)
            .all(|w| w[1].median_cdmse < w[0].median_cdmse));
        assert!(study.slope < 0.0);
    }
}
