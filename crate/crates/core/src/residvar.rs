//! Residual-based comparator: local linear mean fit, then local linear
//! smoothing of the squared residuals.
//!
//! Both stages use the order-1 interior kernel (uniform on `[-1, 1]`) and
//! rely on the local linear fit's own boundary behaviour rather than on
//! boundary kernels.

use rayon::prelude::*;

use crate::diffvar::{Method, VarianceEstimate};
use crate::kernel::make_interior_kernel;
use crate::{Error, Result, Sample};

/// Fitted mean values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFit {
    pub grid: Vec<f64>,
    pub fitted: Vec<f64>,
    pub h: f64,
}

/// Weighted least-squares line fits with kernel weights `K((x_i - x0)/h)`.
#[derive(Debug, Clone)]
pub struct LocalLinear<'a> {
    x: &'a [f64],
    y: &'a [f64],
    h: f64,
    /// Value of the uniform kernel on its closed support `[-1, 1]`.
    weight: f64,
}

impl<'a> LocalLinear<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64], h: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                field: "y",
                expected: x.len(),
                got: y.len(),
            });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::config(
                "h",
                format!("bandwidth must be positive, got {h}"),
            ));
        }
        Ok(LocalLinear {
            x,
            y,
            h,
            weight: make_interior_kernel(1).eval(0.0),
        })
    }

    /// Intercept of the local line at `x0`, using only indices where
    /// `keep(i)` holds.
    pub fn fit_with<F: Fn(usize) -> bool>(&self, x0: f64, keep: F) -> Result<f64> {
        let h = self.h;
        let start = self.x.partition_point(|&xi| xi < x0 - h);
        let end = self.x.partition_point(|&xi| xi <= x0 + h);
        let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut used = 0usize;
        for i in start..end {
            if !keep(i) {
                continue;
            }
            let u = self.x[i] - x0;
            let w = self.weight;
            used += 1;
            s0 += w;
            s1 += w * u;
            s2 += w * u * u;
            t0 += w * self.y[i];
            t1 += w * u * self.y[i];
        }
        if used < 2 {
            return Err(Error::BandwidthTooSmall {
                h,
                x0,
                reason: "fewer than 2 positively weighted points",
            });
        }
        let det = s0 * s2 - s1 * s1;
        if !(det > 1e-12 * s0 * s2) {
            return Err(Error::BandwidthTooSmall {
                h,
                x0,
                reason: "singular normal equations",
            });
        }
        Ok((s2 * t0 - s1 * t1) / det)
    }

    pub fn fit(&self, x0: f64) -> Result<f64> {
        self.fit_with(x0, |_| true)
    }
}

/// Local linear estimate of the mean at `x0`.
pub fn local_linear_fit(sample: &Sample, h: f64, x0: f64) -> Result<f64> {
    LocalLinear::new(sample.x(), sample.y(), h)?.fit(x0)
}

/// Local linear mean fit on a grid.
pub fn fit_mean(sample: &Sample, h: f64, grid: &[f64]) -> Result<MeanFit> {
    let ll = LocalLinear::new(sample.x(), sample.y(), h)?;
    let fitted = grid
        .par_iter()
        .map(|&x0| ll.fit(x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeanFit {
        grid: grid.to_vec(),
        fitted,
        h,
    })
}

/// Squared residuals `(y_i - f̂(x_i))²` from a local linear fit with `h_mean`.
pub fn squared_residuals(sample: &Sample, h_mean: f64) -> Result<Vec<f64>> {
    let fit = fit_mean(sample, h_mean, sample.x())?;
    Ok(sample
        .y()
        .iter()
        .zip(&fit.fitted)
        .map(|(y, f)| (y - f).powi(2))
        .collect())
}

/// Two-step residual-based variance estimate on `grid`.
pub fn fan_yao_variance(
    sample: &Sample,
    h_mean: f64,
    h_var: f64,
    grid: &[f64],
) -> Result<VarianceEstimate> {
    if grid.is_empty() {
        return Err(Error::input("grid", "evaluation grid is empty"));
    }
    let r2 = squared_residuals(sample, h_mean)?;
    let smoother = LocalLinear::new(sample.x(), &r2, h_var)?;
    let values = grid
        .par_iter()
        .map(|&x0| smoother.fit(x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceEstimate {
        grid: grid.to_vec(),
        values,
        h: h_var,
        method: Method::ResidualBased,
        truncated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::fixed_design;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy(n: usize, seed: u64) -> Sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = fixed_design(n)
            .iter()
            .map(|x| (6.0 * x).sin() + rng.random_range(-0.5..0.5))
            .collect();
        Sample::fixed(y).unwrap()
    }

    // Weighted least squares via an explicit design matrix, independent of
    // the accumulated normal-equation sums.
    fn wls_oracle(x: &[f64], y: &[f64], h: f64, x0: f64) -> f64 {
        let rows: Vec<usize> = (0..x.len()).filter(|&i| (x[i] - x0).abs() <= h).collect();
        let a = DMatrix::from_fn(
            rows.len(),
            2,
            |r, c| if c == 0 { 1.0 } else { x[rows[r]] - x0 },
        );
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|&i| y[i]));
        let w = DMatrix::from_diagonal(&DVector::from_element(rows.len(), 0.5));
        let lhs = a.transpose() * &w * &a;
        let rhs = a.transpose() * &w * b;
        lhs.lu().solve(&rhs).unwrap()[0]
    }

    #[test]
    fn reproduces_lines_and_constants() {
        let x = fixed_design(50);
        let line = Sample::fixed(x.iter().map(|v| 1.5 - 2.0 * v).collect()).unwrap();
        let c = Sample::fixed(vec![0.3; 50]).unwrap();
        for h in [0.05, 0.1, 0.4, 2.0] {
            for x0 in [0.0, 0.02, 0.5, 1.0] {
                let f = local_linear_fit(&line, h, x0).unwrap();
                assert!((f - (1.5 - 2.0 * x0)).abs() < 1e-9);
                assert!((local_linear_fit(&c, h, x0).unwrap() - 0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn five_point_hand_case() {
        // x = 0.2..1.0, y = (1, 3, 2, 5, 4); h = 1 covers every point with
        // equal weight, so this is ordinary least squares:
        // x̄ = 0.6, ȳ = 3, Sxy = 1.6, Sxx = 0.4, slope 4.
        let s = Sample::fixed(vec![1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        for x0 in [0.0, 0.6, 1.0] {
            let expected = 3.0 + 4.0 * (x0 - 0.6);
            let f = local_linear_fit(&s, 1.0, x0).unwrap();
            assert!((f - expected).abs() < 1e-12, "x0 {x0}: {f}");
        }
    }

    #[test]
    fn too_small_bandwidth_is_reported() {
        let s = Sample::fixed(vec![0.0; 10]).unwrap();
        let err = local_linear_fit(&s, 0.01, 0.5).unwrap_err();
        assert!(matches!(err, Error::BandwidthTooSmall { .. }));
        assert!(fan_yao_variance(&s, 0.01, 0.2, &[0.5]).is_err());
    }

    #[test]
    fn linear_data_has_zero_variance() {
        let x = fixed_design(100);
        let s = Sample::fixed(x.iter().map(|v| 0.4 + v).collect()).unwrap();
        let est = fan_yao_variance(&s, 0.1, 0.2, s.x()).unwrap();
        assert!(est.values.iter().all(|v| v.abs() < 1e-18));
        assert_eq!(est.method, Method::ResidualBased);
    }

    #[test]
    fn squared_residuals_are_nonnegative() {
        let s = noisy(200, 5);
        assert!(squared_residuals(&s, 0.05)
            .unwrap()
            .iter()
            .all(|&r| r >= 0.0));
    }

    #[test]
    fn matches_wls_oracle_on_random_configurations() {
        let s = noisy(120, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let x0 = rng.random_range(0.0..1.0);
            let h = rng.random_range(0.03..0.6);
            let f = local_linear_fit(&s, h, x0).unwrap();
            let oracle = wls_oracle(s.x(), s.y(), h, x0);
            assert!((f - oracle).abs() < 1e-9, "x0 {x0} h {h}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn scaling_response_scales_variance_quadratically(seed in 0u64..500, k in -4i32..4) {
            let s = noisy(80, seed);
            let c = 2f64.powi(k);
            let scaled = s.with_y(s.y().iter().map(|v| c * v).collect()).unwrap();
            let grid = [0.0, 0.3, 0.7, 1.0];
            let a = fan_yao_variance(&s, 0.1, 0.2, &grid).unwrap();
            let b = fan_yao_variance(&scaled, 0.1, 0.2, &grid).unwrap();
            for (va, vb) in a.values.iter().zip(&b.values) {
                prop_assert_eq!(c * c * va, *vb);
            }
        }
    }
}
