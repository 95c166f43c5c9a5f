//! The first-order-difference variance estimator.
//!
//! With `D_i = y_i - y_{i+1}`, the estimate at `x` is
//! `V̂(x) = ½ Σ_i K_i^h(x) D_i²`, where `K_i^h` are the bin weights from
//! [`crate::kernel`]. Differencing removes the mean up to `f(x_i) - f(x_{i+1})`
//! without any preliminary fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::{check_bandwidth, BinLayout, Smoother};
use crate::{Design, Error, Result, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DifferenceBased,
    ResidualBased,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::DifferenceBased => "difference-based",
            Method::ResidualBased => "residual-based",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// `d_i = y_i - y_{i+1}` for `i = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    pub d: Vec<f64>,
}

impl DifferenceSeries {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Smoothing targets `d_i² / 2`.
    pub fn half_squares(&self) -> Vec<f64> {
        self.d.iter().map(|d| 0.5 * d * d).collect()
    }
}

pub fn difference_series(sample: &Sample) -> Result<DifferenceSeries> {
    let y = sample.y();
    if y.len() < 3 {
        return Err(Error::input("sample", "need at least 3 observations"));
    }
    Ok(DifferenceSeries {
        d: y.windows(2).map(|w| w[0] - w[1]).collect(),
    })
}

/// An estimated variance curve on an evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Bandwidth of the variance smoother.
    pub h: f64,
    pub method: Method,
    pub truncated: bool,
}

/// `n^{-1/(1+2β)}`.
pub fn default_bandwidth(n: usize, beta: f64) -> f64 {
    (n as f64).powf(-1.0 / (1.0 + 2.0 * beta))
}

/// Bin layout matching the sample's design.
pub fn layout_for(sample: &Sample) -> Result<BinLayout> {
    match sample.design() {
        Design::Fixed => BinLayout::fixed(sample.len()),
        Design::RandomUniform => BinLayout::from_design(sample.x()),
    }
}

/// Evaluates `Σ_i K_i^h(x) targets_i` at `x`.
pub fn smooth_targets(smoother: &Smoother, targets: &[f64], x: f64) -> Result<f64> {
    let w = smoother.weights(x)?;
    Ok(w.iter().map(|(i, wi)| wi * targets[i]).sum())
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::input("grid", "evaluation grid is empty"));
    }
    if let Some(&g) = grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::input(
            "grid",
            format!("grid point {g} outside [0, 1]"),
        ));
    }
    Ok(())
}

/// Difference-based estimate `½ Σ K_i^h(x) D_i²` on `grid`.
///
/// With `truncate`, negative values (possible with higher-order kernels) are
/// clipped to zero after smoothing.
pub fn estimate_variance(
    sample: &Sample,
    h: f64,
    order: usize,
    grid: &[f64],
    truncate: bool,
) -> Result<VarianceEstimate> {
    check_bandwidth(h)?;
    validate_grid(grid)?;
    let targets = difference_series(sample)?.half_squares();
    let smoother = Smoother::new(order, h, layout_for(sample)?)?;
    let values = grid
        .par_iter()
        .map(|&x| {
            smooth_targets(&smoother, &targets, x).map(|v| if truncate { v.max(0.0) } else { v })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceEstimate {
        grid: grid.to_vec(),
        values,
        h,
        method: Method::DifferenceBased,
        truncated: truncate,
    })
}
