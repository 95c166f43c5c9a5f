use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erfc;

use super::moments::{moment_distribution, MomentDistribution};
use crate::quadrature::{trapezoid, Integrator};
use crate::{Error, Result};

const AFFINITY_TOL: f64 = 1e-10;
/// Beyond this many unit deviations from every mixture centre, `√d1` is
/// below `e^{-36}`.
const COMPONENT_REACH: f64 = 12.0;
/// Largest spacing of doubles across the range that still resolves a
/// unit-width component.
const MAX_RESOLUTION: f64 = 1e-6;

fn normal_pdf(mean: f64, var: f64, t: f64) -> f64 {
    let z = t - mean;
    (-0.5 * z * z / var).exp() / (2.0 * PI * var).sqrt()
}

/// Density of `N(0, 1 + theta²)` at `t`.
pub fn null_density(theta: f64, t: f64) -> f64 {
    normal_pdf(0.0, 1.0 + theta * theta, t)
}

/// `Σ_k w_k φ(t - theta v_k)`.
pub fn mixture_density(g: &MomentDistribution, theta: f64, t: f64) -> f64 {
    g.nodes
        .iter()
        .zip(&g.weights)
        .map(|(v, w)| w * normal_pdf(theta * v, 1.0, t))
        .sum()
}

/// Two simple hypotheses about one observation: a scale-inflated normal
/// against a location mixture that matches its first `q` moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestingProblem {
    pub theta: f64,
    pub n: usize,
    pub g: MomentDistribution,
    pub alpha: f64,
    pub m_f: f64,
}

impl TestingProblem {
    /// Builds the problem with `theta = (M_f / 2B) n^{-alpha}`.
    pub fn new(n: usize, alpha: f64, q: usize, m_f: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("n", "must be positive"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::input(
                "alpha",
                format!("must be positive, got {alpha}"),
            ));
        }
        if !(m_f > 0.0 && m_f.is_finite()) {
            return Err(Error::input("m_f", format!("must be positive, got {m_f}")));
        }
        let g = moment_distribution(q)?;
        if g.b == 0.0 {
            return Err(Error::input("q", "q = 1 gives a point mass; use q >= 3"));
        }
        let theta = m_f / (2.0 * g.b) * (n as f64).powf(-alpha);
        Ok(TestingProblem {
            theta,
            n,
            g,
            alpha,
            m_f,
        })
    }

    /// A problem with an explicit `theta`; `alpha` and `m_f` are recorded
    /// as `NaN`.
    pub fn with_theta(theta: f64, n: usize, g: MomentDistribution) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::input(
                "theta",
                format!("must be nonnegative, got {theta}"),
            ));
        }
        Ok(TestingProblem {
            theta,
            n,
            g,
            alpha: f64::NAN,
            m_f: f64::NAN,
        })
    }

    /// Half-width of the integration range: eight null standard deviations
    /// plus the largest mixture shift.
    pub fn integration_half_width(&self) -> f64 {
        let sigma0 = (1.0 + self.theta * self.theta).sqrt();
        8.0 * sigma0 + self.theta * self.g.b
    }

    /// Upper bound on `∫ (√d0 - √d1)²` outside the integration range.
    pub fn tail_bound(&self) -> f64 {
        let l = self.integration_half_width();
        let sigma0 = (1.0 + self.theta * self.theta).sqrt();
        erfc(l / (sigma0 * SQRT_2)) + erfc((l - self.theta * self.g.b) / SQRT_2)
    }

    /// Disjoint intervals covering every mixture component out to
    /// [`COMPONENT_REACH`], clipped to the integration range.
    fn component_windows(&self) -> Vec<(f64, f64)> {
        let l = self.integration_half_width();
        let mut windows: Vec<(f64, f64)> = Vec::new();
        for v in &self.g.nodes {
            let (a, b) = (
                (self.theta * v - COMPONENT_REACH).max(-l),
                (self.theta * v + COMPONENT_REACH).min(l),
            );
            match windows.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => windows.push((a, b)),
            }
        }
        windows
    }

    /// The integration range cut at the component window edges.
    fn pieces(&self) -> Vec<(f64, f64)> {
        let l = self.integration_half_width();
        let mut cuts = vec![-l];
        for (a, b) in self.component_windows() {
            cuts.extend([a, b]);
        }
        cuts.push(l);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(a, b)| b > a)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Affinity {
    /// `∫ √(d0 d1)` for a single observation.
    pub single: f64,
    /// Squared Hellinger distance `½ ∫ (√d0 - √d1)²`.
    pub hellinger_sq: f64,
    /// `single^n`.
    pub rho: f64,
    /// Quadrature error estimate plus the tail bound, both on `hellinger_sq`.
    pub error_bound: f64,
}

/// Hellinger affinity between the `n`-fold products of the two hypotheses.
///
/// The integrand is `(√d0 - √d1)²` rather than `√(d0 d1)`, so that small
/// distances are not lost to cancellation against 1.
pub fn hellinger_affinity(problem: &TestingProblem) -> Result<Affinity> {
    let resolution = problem.integration_half_width() * f64::EPSILON;
    if !(resolution <= MAX_RESOLUTION) {
        return Err(Error::NumericTolerance {
            context: "hellinger affinity (range too wide to resolve the mixture components)",
            estimate: resolution,
            tolerance: MAX_RESOLUTION,
        });
    }
    let theta = problem.theta;
    let g = &problem.g;
    let integrand = |t: f64| {
        let d = null_density(theta, t).sqrt() - mixture_density(g, theta, t).sqrt();
        d * d
    };
    let pieces = problem.pieces();
    let quad = Integrator::with_abs_tol(AFFINITY_TOL / pieces.len() as f64).initial_panels(32);
    let (mut value, mut error) = (0.0, 0.0);
    for (a, b) in pieces {
        let part = quad.integrate(integrand, a, b)?;
        value += part.value;
        error += part.error;
    }
    let tail = problem.tail_bound();
    let error_bound = 0.5 * (error + tail);
    if error_bound > AFFINITY_TOL {
        return Err(Error::NumericTolerance {
            context: "hellinger affinity",
            estimate: error_bound,
            tolerance: AFFINITY_TOL,
        });
    }
    let hellinger_sq = (0.5 * value).clamp(0.0, 1.0);
    let single = 1.0 - hellinger_sq;
    let rho = (problem.n as f64 * (-hellinger_sq).ln_1p()).exp();
    Ok(Affinity {
        single,
        hellinger_sq,
        rho,
        error_bound,
    })
}

/// `∫ √(d0 d1)` by a composite trapezoid rule, used as an independent check
/// on [`hellinger_affinity`].
///
/// The integrand is negligible away from the mixture components, so only
/// the component windows are covered; `steps` is shared among them in
/// proportion to their length.
pub fn affinity_by_trapezoid(problem: &TestingProblem, steps: usize) -> f64 {
    let theta = problem.theta;
    let windows = problem.component_windows();
    let total: f64 = windows.iter().map(|(a, b)| b - a).sum();
    windows
        .iter()
        .map(|&(a, b)| {
            let share = ((steps as f64 * (b - a) / total).ceil() as usize).max(1);
            trapezoid(
                |t| (null_density(theta, t) * mixture_density(&problem.g, theta, t)).sqrt(),
                a,
                b,
                share,
            )
        })
        .sum()
}
