//! K-fold cross-validated bandwidths and the CDMSE loss.
//!
//! Difference-based CV scores the targets `T_i = d_i²/2` placed at the
//! midpoints `m_i = (x_i + x_{i+1})/2`: each held-out target is predicted
//! from the training-fold targets with the bin weights renormalised to sum
//! to one over the training bins. A training target adjacent to any
//! held-out target is dropped as well, since the two share an observation. Residual-based CV runs two stages: the
//! mean bandwidth is chosen on held-out responses, then, with residuals from
//! the full-sample mean fit, the variance bandwidth is chosen on held-out
//! squared residuals.
//!
//! Folds are a uniform random partition drawn from `CvConfig::seed`. Ties in
//! the score go to the smallest bandwidth.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffvar::{difference_series, layout_for, VarianceEstimate};
use crate::kernel::Smoother;
use crate::residvar::{squared_residuals, LocalLinear};
use crate::{Error, Result, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    /// Strictly increasing candidate bandwidths.
    pub h_grid: Vec<f64>,
    pub seed: u64,
}

impl CvConfig {
    /// Ten folds over [`default_h_grid`].
    pub fn standard(n: usize, seed: u64) -> Self {
        CvConfig {
            folds: 10,
            h_grid: default_h_grid(n),
            seed,
        }
    }

    /// `n` is the sample size; `K <= n` is required.
    fn validate(&self, n: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::config(
                "folds",
                format!("need at least 2 folds, got {}", self.folds),
            ));
        }
        if self.folds > n {
            return Err(Error::config(
                "folds",
                format!(
                    "{} folds exceed the {} available observations",
                    self.folds, n
                ),
            ));
        }
        if self.h_grid.is_empty() {
            return Err(Error::config("h_grid", "candidate grid is empty"));
        }
        if self.h_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "h_grid",
                "candidates must be strictly increasing",
            ));
        }
        Ok(())
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|k| {
                    if k + 1 == count {
                        hi
                    } else {
                        (a + (b - a) * k as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Largest candidate the default grid will propose; valid bandwidths are below 1/2.
pub const MAX_DEFAULT_H: f64 = 0.49;

/// Twenty log-spaced candidates on `[0.5 n^{-1/5}, 5 n^{-1/5}]`, with the
/// upper end capped at [`MAX_DEFAULT_H`].
pub fn default_h_grid(n: usize) -> Vec<f64> {
    let base = (n as f64).powf(-0.2);
    let lo = (0.5 * base).min(MAX_DEFAULT_H * 0.5);
    let hi = (5.0 * base).min(MAX_DEFAULT_H);
    log_grid(lo, hi, 20)
}

/// Fold label for each of `units` indices.
pub fn assign_folds(units: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..units).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut label = vec![0; units];
    for (pos, &idx) in order.iter().enumerate() {
        label[idx] = pos % folds;
    }
    label
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvScore {
    pub h: f64,
    /// Mean held-out squared error; `None` when every point was skipped.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    pub h_selected: f64,
    pub scores: Vec<CvScore>,
}

fn select(scores: Vec<CvScore>) -> Result<CvResult> {
    let mut best: Option<(f64, f64)> = None;
    for s in &scores {
        if let Some(v) = s.score {
            // Candidates are ascending, so a strict comparison keeps the smallest h on ties.
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((s.h, v));
            }
        }
    }
    match best {
        Some((h, _)) => Ok(CvResult {
            h_selected: h,
            scores,
        }),
        None => Err(Error::config(
            "h_grid",
            "every candidate bandwidth was disqualified",
        )),
    }
}

fn mean_score(total: f64, count: usize) -> Option<f64> {
    (count > 0).then(|| total / count as f64)
}

/// Cross-validated bandwidth for the difference-based estimator.
pub fn kfold_cv_diff(sample: &Sample, order: usize, config: &CvConfig) -> Result<CvResult> {
    let targets = difference_series(sample)?.half_squares();
    let units = targets.len();
    config.validate(sample.len())?;
    let x = sample.x();
    let mids: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let folds = assign_folds(units, config.folds, config.seed);
    let layout = layout_for(sample)?;

    let scores = config
        .h_grid
        .par_iter()
        .map(|&h| -> Result<CvScore> {
            let smoother = Smoother::new(order, h, layout.clone())?;
            let mut total = 0.0;
            let mut count = 0usize;
            for i in 0..units {
                let held = folds[i];
                let w = smoother.weights(mids[i])?;
                let (mut num, mut den, mut positive) = (0.0, 0.0, false);
                for (j, wj) in w.iter() {
                    // Neighbouring targets share an observation with a held-out one.
                    let touches =
                        |k: Option<usize>| k.is_some_and(|k| k < units && folds[k] == held);
                    if folds[j] != held && !touches(j.checked_sub(1)) && !touches(Some(j + 1)) {
                        num += wj * targets[j];
                        den += wj;
                        positive |= wj > 0.0;
                    }
                }
                if !positive || den.abs() < 1e-12 {
                    continue;
                }
                total += (targets[i] - num / den).powi(2);
                count += 1;
            }
            Ok(CvScore {
                h,
                score: mean_score(total, count),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    select(scores)
}

/// Held-out local linear scores of `response` for every candidate.
fn local_linear_scores(
    x: &[f64],
    response: &[f64],
    folds: &[usize],
    h_grid: &[f64],
) -> Result<Vec<CvScore>> {
    h_grid
        .par_iter()
        .map(|&h| -> Result<CvScore> {
            let ll = LocalLinear::new(x, response, h)?;
            let mut total = 0.0;
            let mut count = 0usize;
            for i in 0..x.len() {
                let held = folds[i];
                match ll.fit_with(x[i], |j| folds[j] != held) {
                    Ok(pred) => {
                        total += (response[i] - pred).powi(2);
                        count += 1;
                    }
                    Err(Error::BandwidthTooSmall { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(CvScore {
                h,
                score: mean_score(total, count),
            })
        })
        .collect()
}

/// Mean and variance bandwidths selected for the residual-based estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanYaoCv {
    pub mean: CvResult,
    pub var: CvResult,
}

impl FanYaoCv {
    pub fn h_mean(&self) -> f64 {
        self.mean.h_selected
    }

    pub fn h_var(&self) -> f64 {
        self.var.h_selected
    }
}

/// Two-stage cross-validation for the residual-based estimator.
pub fn kfold_cv_fanyao(sample: &Sample, config: &CvConfig) -> Result<FanYaoCv> {
    let units = sample.len();
    config.validate(units)?;
    let folds = assign_folds(units, config.folds, config.seed);
    let mean = select(local_linear_scores(
        sample.x(),
        sample.y(),
        &folds,
        &config.h_grid,
    )?)?;
    let r2 = squared_residuals(sample, mean.h_selected)?;
    let var = select(local_linear_scores(
        sample.x(),
        &r2,
        &folds,
        &config.h_grid,
    )?)?;
    Ok(FanYaoCv { mean, var })
}

/// `n^{-1} Σ (V̂(x_i) - V(x_i))²` over the design points.
pub fn cdmse(estimate: &VarianceEstimate, truth: &[f64]) -> Result<f64> {
    if estimate.values.len() != truth.len() {
        return Err(Error::LengthMismatch {
            field: "truth",
            expected: estimate.values.len(),
            got: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::input("truth", "empty"));
    }
    let sse: f64 = estimate
        .values
        .iter()
        .zip(truth)
        .map(|(v, t)| (v - t).powi(2))
        .sum();
    Ok(sse / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffvar::Method;
    use crate::kernel::make_boundary_kernel;
    use crate::quadrature::Integrator;
    use crate::sample::fixed_design;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn noisy(n: usize, seed: u64) -> Sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = fixed_design(n)
            .iter()
            .map(|x| (4.0 * x).sin() + (0.5 + x) * rng.random_range(-1.0..1.0))
            .collect();
        Sample::fixed(y).unwrap()
    }

    fn estimate(values: Vec<f64>) -> VarianceEstimate {
        VarianceEstimate {
            grid: vec![0.0; values.len()],
            values,
            h: 0.1,
            method: Method::DifferenceBased,
            truncated: false,
        }
    }

    #[test]
    fn cdmse_arithmetic() {
        assert_eq!(cdmse(&estimate(vec![1.0, 2.0]), &[1.0, 2.0]).unwrap(), 0.0);
        let v = cdmse(&estimate(vec![1.1, 0.9, 1.2]), &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 0.02).abs() < 1e-15);
        assert!(cdmse(&estimate(vec![1.0]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn default_grid_is_valid() {
        for n in [10, 100, 1000, 100_000] {
            let g = default_h_grid(n);
            assert_eq!(g.len(), 20);
            assert!(g.windows(2).all(|w| w[1] > w[0]));
            assert!(g[0] > 0.0 && g[19] < 0.5);
            if n >= 100 {
                assert!((g[0] - 0.5 * (n as f64).powf(-0.2)).abs() < 1e-12);
            }
        }
        assert_eq!(default_h_grid(100_000)[19], MAX_DEFAULT_H);
        assert!((default_h_grid(1000)[19] - MAX_DEFAULT_H).abs() < 1e-15);
    }

    #[test]
    fn folds_are_balanced_and_seeded() {
        let f = assign_folds(23, 5, 1);
        for k in 0..5 {
            let c = f.iter().filter(|&&l| l == k).count();
            assert!(c == 4 || c == 5);
        }
        assert_eq!(f, assign_folds(23, 5, 1));
        assert_ne!(f, assign_folds(23, 5, 2));
    }

    #[test]
    fn constant_response_picks_smallest_h() {
        let s = Sample::fixed(vec![2.0; 100]).unwrap();
        let cfg = CvConfig {
            folds: 10,
            h_grid: vec![0.1, 0.2, 0.3],
            seed: 4,
        };
        let r = kfold_cv_diff(&s, 2, &cfg).unwrap();
        assert_eq!(r.h_selected, 0.1);
        assert!(r.scores.iter().all(|s| s.score == Some(0.0)));
    }

    #[test]
    fn linear_response_has_vanishing_mean_scores() {
        let x = fixed_design(80);
        let s = Sample::fixed(x.iter().map(|v| 1.0 + 2.0 * v).collect()).unwrap();
        let cfg = CvConfig {
            folds: 8,
            h_grid: vec![0.1, 0.2, 0.4],
            seed: 1,
        };
        let r = kfold_cv_fanyao(&s, &cfg).unwrap();
        assert!(r.mean.scores.iter().all(|s| s.score.unwrap() < 1e-20));
    }

    #[test]
    fn config_errors() {
        let s = noisy(30, 1);
        let bad_folds = CvConfig {
            folds: 1,
            h_grid: vec![0.2],
            seed: 0,
        };
        assert!(kfold_cv_diff(&s, 2, &bad_folds).is_err());
        let too_many = CvConfig {
            folds: 40,
            h_grid: vec![0.2],
            seed: 0,
        };
        assert!(kfold_cv_diff(&s, 2, &too_many).is_err());
        let unsorted = CvConfig {
            folds: 5,
            h_grid: vec![0.3, 0.2],
            seed: 0,
        };
        assert!(kfold_cv_fanyao(&s, &unsorted).is_err());
        let empty = CvConfig {
            folds: 5,
            h_grid: vec![],
            seed: 0,
        };
        assert!(kfold_cv_diff(&s, 2, &empty).is_err());
    }

    #[test]
    fn tiny_bandwidths_are_disqualified() {
        let s = noisy(30, 2);
        let cfg = CvConfig {
            folds: 5,
            h_grid: vec![0.001, 0.2],
            seed: 3,
        };
        let r = kfold_cv_fanyao(&s, &cfg).unwrap();
        assert_eq!(r.mean.scores[0].score, None);
        assert_eq!(r.h_mean(), 0.2);
        let all_bad = CvConfig {
            folds: 5,
            h_grid: vec![0.001, 0.002],
            seed: 3,
        };
        assert!(kfold_cv_fanyao(&s, &all_bad).is_err());
    }

    // Leave-one-out enumeration of the difference criterion, with bin
    // weights obtained by quadrature of the effective kernel.
    fn brute_diff_score(y: &[f64], order: usize, h: f64) -> f64 {
        let n = y.len();
        let nf = n as f64;
        let targets: Vec<f64> = (0..n - 1)
            .map(|i| 0.5 * (y[i] - y[i + 1]).powi(2))
            .collect();
        let quad = Integrator::with_abs_tol(1e-15).initial_panels(4);
        let (mut total, mut count) = (0.0, 0usize);
        for held in 0..n - 1 {
            let m = (held as f64 + 1.5) / nf;
            let kernel = if m > h && m < 1.0 - h {
                make_boundary_kernel(order, 1.0).unwrap()
            } else if m <= h {
                make_boundary_kernel(order, m / h).unwrap()
            } else {
                make_boundary_kernel(order, (1.0 - m) / h)
                    .unwrap()
                    .reflected()
            };
            let (mut num, mut den, mut positive) = (0.0, 0.0, false);
            for j in 0..n - 1 {
                if j.abs_diff(held) <= 1 {
                    continue;
                }
                let i1 = (j + 1) as f64;
                let a = if j == 0 { 0.0 } else { (i1 - 0.5) / nf };
                let b = if j == n - 2 { 1.0 } else { (i1 + 0.5) / nf };
                let w = quad
                    .integrate(|u| kernel.eval((m - u) / h) / h, a, b)
                    .unwrap()
                    .value;
                num += w * targets[j];
                den += w;
                positive |= w > 0.0;
            }
            if positive && den.abs() >= 1e-12 {
                total += (targets[held] - num / den).powi(2);
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn diff_cv_matches_enumeration_leave_one_out() {
        let s = noisy(12, 8);
        let cfg = CvConfig {
            folds: 12,
            h_grid: vec![0.25, 0.45],
            seed: 5,
        };
        let r = kfold_cv_diff(&s, 2, &cfg).unwrap();
        for sc in &r.scores {
            let oracle = brute_diff_score(s.y(), 2, sc.h);
            assert!(
                (sc.score.unwrap() - oracle).abs() < 1e-10 * oracle.max(1.0),
                "h {}",
                sc.h
            );
        }
        let best = if brute_diff_score(s.y(), 2, 0.25) <= brute_diff_score(s.y(), 2, 0.45) {
            0.25
        } else {
            0.45
        };
        assert_eq!(r.h_selected, best);
    }

    fn wls_intercept(x: &[f64], y: &[f64], rows: &[usize], x0: f64) -> f64 {
        let a = DMatrix::from_fn(
            rows.len(),
            2,
            |r, c| if c == 0 { 1.0 } else { x[rows[r]] - x0 },
        );
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| y[i]));
        (a.transpose() * &a)
            .lu()
            .solve(&(a.transpose() * b))
            .unwrap()[0]
    }

    fn brute_ll_score(x: &[f64], y: &[f64], h: f64) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for i in 0..n {
            let rows: Vec<usize> = (0..n)
                .filter(|&j| j != i && (x[j] - x[i]).abs() <= h)
                .collect();
            total += (y[i] - wls_intercept(x, y, &rows, x[i])).powi(2);
        }
        total / n as f64
    }

    #[test]
    fn fanyao_cv_matches_enumeration_leave_one_out() {
        let s = noisy(12, 21);
        let cfg = CvConfig {
            folds: 12,
            h_grid: vec![0.3, 0.6],
            seed: 2,
        };
        let r = kfold_cv_fanyao(&s, &cfg).unwrap();
        let x = s.x();
        for sc in &r.mean.scores {
            let oracle = brute_ll_score(x, s.y(), sc.h);
            assert!((sc.score.unwrap() - oracle).abs() < 1e-10);
        }
        let h_mean = r.h_mean();
        let r2: Vec<f64> = (0..12)
            .map(|i| {
                let rows: Vec<usize> = (0..12).filter(|&j| (x[j] - x[i]).abs() <= h_mean).collect();
                (s.y()[i] - wls_intercept(x, s.y(), &rows, x[i])).powi(2)
            })
            .collect();
        for sc in &r.var.scores {
            let oracle = brute_ll_score(x, &r2, sc.h);
            assert!((sc.score.unwrap() - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn cv_is_deterministic() {
        let s = noisy(200, 3);
        let cfg = CvConfig::standard(200, 99);
        assert_eq!(
            kfold_cv_diff(&s, 2, &cfg).unwrap(),
            kfold_cv_diff(&s, 2, &cfg).unwrap()
        );
        assert_eq!(
            kfold_cv_fanyao(&s, &cfg).unwrap(),
            kfold_cv_fanyao(&s, &cfg).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn diff_scores_scale_with_fourth_power(seed in 0u64..200, k in -3i32..3) {
            let s = noisy(120, seed);
            let c = 2f64.powi(k);
            let scaled = s.with_y(s.y().iter().map(|v| c * v).collect()).unwrap();
            let cfg = CvConfig { folds: 10, h_grid: vec![0.1, 0.2, 0.3, 0.45], seed };
            let a = kfold_cv_diff(&s, 2, &cfg).unwrap();
            let b = kfold_cv_diff(&scaled, 2, &cfg).unwrap();
            prop_assert_eq!(a.h_selected, b.h_selected);
            for (sa, sb) in a.scores.iter().zip(&b.scores) {
                prop_assert_eq!(c.powi(4) * sa.score.unwrap(), sb.score.unwrap());
            }
        }
    }
}
