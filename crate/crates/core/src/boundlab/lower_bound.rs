use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adversarial::{check_condition, AdversarialMean};
use super::moments::{moment_distribution, smallest_odd_q};
use crate::diffvar::estimate_variance;
use crate::rng::{derive_seed, stream_rng};
use crate::stats::{least_squares_line, median};
use crate::{Error, Result, Sample};

/// Settings for the rough-mean rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LowerBoundConfig {
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub replications: usize,
    /// Matched moment order; `None` picks the smallest admissible odd `q`
    /// for each alpha.
    pub q: Option<usize>,
    pub m_f: f64,
    pub order: usize,
    /// Bandwidth rule `h = n^{h_exponent}`.
    pub h_exponent: f64,
    /// Evaluation point of the pointwise loss.
    pub x0: f64,
    pub master_seed: u64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig {
            alphas: vec![0.15],
            ns: vec![500, 1000, 2000, 4000, 8000],
            replications: 4000,
            q: None,
            m_f: 10.0,
            order: 2,
            h_exponent: -0.2,
            x0: 0.5,
            master_seed: 20_240_101,
        }
    }
}

impl LowerBoundConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ns.len() < 3 {
            return Err(Error::InsufficientPoints {
                needed: 3,
                got: self.ns.len(),
            });
        }
        if self.ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "ns",
                "sample sizes must be strictly increasing",
            ));
        }
        if self.ns[0] < 10 {
            return Err(Error::config(
                "ns",
                format!("each n must be >= 10, got {}", self.ns[0]),
            ));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be at least 1"));
        }
        if !(self.m_f > 0.0 && self.m_f.is_finite()) {
            return Err(Error::config(
                "m_f",
                format!("must be positive, got {}", self.m_f),
            ));
        }
        if !(0.0..=1.0).contains(&self.x0) {
            return Err(Error::config(
                "x0",
                format!("must lie in [0, 1], got {}", self.x0),
            ));
        }
        for &alpha in &self.alphas {
            if !(alpha > 0.0 && alpha < 0.25) {
                return Err(Error::config(
                    "alphas",
                    format!("each alpha must lie in (0, 1/4), got {alpha}"),
                ));
            }
            check_condition(alpha, self.q_for(alpha)?)?;
        }
        Ok(())
    }

    fn q_for(&self, alpha: f64) -> Result<usize> {
        match self.q {
            Some(q) => Ok(q),
            None => smallest_odd_q(alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundPoint {
    pub n: usize,
    pub h: f64,
    /// Bump height scale; zero for the control run.
    pub theta: f64,
    pub median_sq_error: f64,
    pub log_n: f64,
    pub log_median_sq_error: f64,
}

/// One alpha (or the smooth control when `alpha` is `None`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub alpha: Option<f64>,
    pub q: Option<usize>,
    /// `max(-4 alpha, -4/5)`, or `-4/5` for the control.
    pub predicted_slope: f64,
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<LowerBoundPoint>,
}

/// Smooth-branch exponent for a twice-differentiable variance.
const SMOOTH_SLOPE: f64 = -0.8;

fn run_row(config: &LowerBoundConfig, alpha: Option<f64>, tag: u64) -> Result<LowerBoundRow> {
    let q = alpha.map(|a| config.q_for(a)).transpose()?;
    let g = q.map(moment_distribution).transpose()?;
    let mut points = Vec::with_capacity(config.ns.len());
    for &n in &config.ns {
        let h = (n as f64).powf(config.h_exponent);
        let cell_seed = derive_seed(derive_seed(config.master_seed, tag), n as u64);
        let errors = (0..config.replications)
            .into_par_iter()
            .map(|rep| -> Result<f64> {
                let mut rng = stream_rng(cell_seed, rep as u64);
                let mean = match (alpha, &g) {
                    (Some(a), Some(g)) => {
                        AdversarialMean::draw(n, a, config.m_f, g.clone(), &mut rng).design_values()
                    }
                    _ => vec![0.0; n],
                };
                let y = mean
                    .into_iter()
                    .map(|f| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        f + z
                    })
                    .collect();
                let sample = Sample::fixed(y)?;
                let est = estimate_variance(&sample, h, config.order, &[config.x0], false)?;
                Ok((est.values[0] - 1.0).powi(2))
            })
            .collect::<Result<Vec<_>>>()?;
        let med = median(&errors).expect("replications >= 1");
        let theta = match (alpha, &g) {
            (Some(a), Some(g)) => config.m_f / (2.0 * g.b) * (n as f64).powf(-a),
            _ => 0.0,
        };
        points.push(LowerBoundPoint {
            n,
            h,
            theta,
            median_sq_error: med,
            log_n: (n as f64).ln(),
            log_median_sq_error: med.ln(),
        });
    }
    let line: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.log_n, p.log_median_sq_error))
        .collect();
    let (slope, intercept) = least_squares_line(&line)?;
    Ok(LowerBoundRow {
        alpha,
        q,
        predicted_slope: alpha.map_or(SMOOTH_SLOPE, |a| (-4.0 * a).max(SMOOTH_SLOPE)),
        slope,
        intercept,
        points,
    })
}

/// Median squared error of `V̂(x0)` under the rough random mean with
/// `V ≡ 1`, one row per alpha.
///
/// Each replication draws a fresh mean realization and fresh noise from
/// its own stream.
pub fn lower_bound_experiment(config: &LowerBoundConfig) -> Result<Vec<LowerBoundRow>> {
    config.validate()?;
    config
        .alphas
        .iter()
        .map(|&alpha| run_row(config, Some(alpha), alpha.to_bits()))
        .collect()
}

/// The same experiment with `f ≡ 0`.
pub fn control_experiment(config: &LowerBoundConfig) -> Result<LowerBoundRow> {
    config.validate()?;
    run_row(config, None, u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LowerBoundConfig {
        LowerBoundConfig {
            ns: vec![200, 400, 800],
            replications: 40,
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        let mut c = small();
        assert!(c.validate().is_ok());
        c.alphas = vec![0.3];
        assert!(c.validate().is_err());
        let mut c = small();
        c.q = Some(3);
        assert!(c.validate().is_err());
        let mut c = small();
        c.ns = vec![200, 100, 400];
        assert!(c.validate().is_err());
        c.ns = vec![200, 400];
        assert!(matches!(
            c.validate(),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn rows_are_deterministic_and_shaped() {
        let c = small();
        let a = lower_bound_experiment(&c).unwrap();
        let b = lower_bound_experiment(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].q, Some(7));
        assert_eq!(a[0].points.len(), 3);
        assert!((a[0].predicted_slope + 0.6).abs() < 1e-12);
        assert!(a[0].points.iter().all(|p| p.median_sq_error > 0.0));
    }

    #[test]
    fn rough_mean_inflates_error_over_control() {
        let c = small();
        let rough = &lower_bound_experiment(&c).unwrap()[0];
        let control = control_experiment(&c).unwrap();
        assert_eq!(control.alpha, None);
        assert_eq!(control.predicted_slope, -0.8);
        for (r, s) in rough.points.iter().zip(&control.points) {
            assert!(r.median_sq_error > s.median_sq_error);
        }
    }
}
