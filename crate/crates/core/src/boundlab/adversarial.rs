use std::sync::Arc;

use rand::Rng;

use super::moments::{moment_distribution, MomentDistribution};
use crate::rng::stream_rng;
use crate::simlab::{CustomFn, MeanFn};
use crate::{Error, Result};

/// A random rough mean: one triangular bump of height `theta r_i` at each
/// design point `i/n`, with `r_i` drawn from a moment-matched distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialMean {
    pub n: usize,
    pub alpha: f64,
    pub m_f: f64,
    pub theta: f64,
    pub g: MomentDistribution,
    /// `r_1..r_n`.
    pub r: Vec<f64>,
}

/// Triangular bump `1 - 2n|x|` on `|x| <= 1/(2n)`.
pub fn bump(n: usize, x: f64) -> f64 {
    (1.0 - 2.0 * n as f64 * x.abs()).max(0.0)
}

pub(crate) fn check_condition(alpha: f64, q: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config(
            "alpha",
            format!("must be positive, got {alpha}"),
        ));
    }
    if (q + 1) as f64 * alpha <= 1.0 {
        return Err(Error::config(
            "q",
            format!("need (q + 1) alpha > 1, got q = {q}, alpha = {alpha}"),
        ));
    }
    Ok(())
}

impl AdversarialMean {
    /// Draws `r_i` once from stream 0 of `seed`.
    pub fn new(n: usize, alpha: f64, q: usize, m_f: f64, seed: u64) -> Result<Self> {
        let g = Self::distribution(n, alpha, q, m_f)?;
        let mut rng = stream_rng(seed, 0);
        Ok(Self::draw(n, alpha, m_f, g, &mut rng))
    }

    fn distribution(n: usize, alpha: f64, q: usize, m_f: f64) -> Result<MomentDistribution> {
        if n < 3 {
            return Err(Error::config(
                "n",
                format!("need at least 3 design points, got {n}"),
            ));
        }
        check_condition(alpha, q)?;
        if !(m_f > 0.0 && m_f.is_finite()) {
            return Err(Error::config("m_f", format!("must be positive, got {m_f}")));
        }
        moment_distribution(q)
    }

    pub(crate) fn draw<R: Rng>(
        n: usize,
        alpha: f64,
        m_f: f64,
        g: MomentDistribution,
        rng: &mut R,
    ) -> Self {
        let theta = m_f / (2.0 * g.b) * (n as f64).powf(-alpha);
        let r = (0..n).map(|_| g.quantile(rng.random::<f64>())).collect();
        AdversarialMean {
            n,
            alpha,
            m_f,
            theta,
            g,
            r,
        }
    }

    /// `f(x)` for `x` in `[0, 1]`; zero outside.
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let nf = self.n as f64;
        // Bumps are disjoint, so only the nearest design point matters.
        let i = (x * nf).round() as usize;
        if i == 0 {
            return 0.0;
        }
        let i = i.min(self.n);
        self.theta * self.r[i - 1] * bump(self.n, x - i as f64 / nf)
    }

    /// `f(i/n) = theta r_i`.
    pub fn design_values(&self) -> Vec<f64> {
        self.r.iter().map(|r| self.theta * r).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.theta * self.r.iter().fold(0.0_f64, |a, r| a.max(r.abs()))
    }

    /// Largest `|f(x) - f(y)| / |x - y|^alpha` over random pairs. Half the
    /// pairs are uniform on the square; the rest are separated by a
    /// log-uniform gap in `[1e-6, 1]` so that short scales are probed.
    pub fn holder_quotient(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = stream_rng(seed, 1);
        let mut worst = 0.0_f64;
        for k in 0..pairs {
            let x: f64 = rng.random();
            let y = if k % 2 == 0 {
                rng.random()
            } else {
                let gap = 10f64.powf(-6.0 * rng.random::<f64>());
                let y = if rng.random::<bool>() {
                    x + gap
                } else {
                    x - gap
                };
                y.clamp(0.0, 1.0)
            };
            if x == y {
                continue;
            }
            let q = (self.eval(x) - self.eval(y)).abs() / (x - y).abs().powf(self.alpha);
            worst = worst.max(q);
        }
        worst
    }

    /// Wraps this realization as a custom simulation mean.
    pub fn to_mean_fn(&self) -> MeanFn {
        let f = Arc::new(self.clone());
        MeanFn::Custom(CustomFn::new(
            format!("adversarial(alpha={}, n={})", self.alpha, self.n),
            move |x| f.eval(x),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_endpoints() {
        assert_eq!(bump(10, 0.0), 1.0);
        assert_eq!(bump(10, 0.05), 0.0);
        assert_eq!(bump(10, -0.05), 0.0);
        assert_abs_diff_eq!(bump(10, 0.025), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn design_values_and_sup_norm() {
        let f = AdversarialMean::new(200, 0.15, 7, 1.0, 3).unwrap();
        assert_abs_diff_eq!(
            f.theta,
            1.0 / (2.0 * f.g.b) * 200f64.powf(-0.15),
            epsilon = 1e-15
        );
        for (i, v) in f.design_values().iter().enumerate() {
            assert_abs_diff_eq!(f.eval((i + 1) as f64 / 200.0), *v, epsilon = 1e-15);
        }
        assert!(f.sup_norm() <= f.theta * f.g.b + 1e-15);
        for k in 0..=5000 {
            assert!(f.eval(k as f64 / 5000.0).abs() <= f.theta * f.g.b + 1e-15);
        }
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(0.5 / 200.0), 0.0);
    }

    #[test]
    fn holder_bound_holds() {
        for (alpha, q, m_f) in [
            (0.15, 7, 1.0),
            (0.15, 7, 10.0),
            (0.3, 5, 1.0),
            (0.24, 5, 2.0),
        ] {
            for n in [10, 500, 4000] {
                let f = AdversarialMean::new(n, alpha, q, m_f, 11).unwrap();
                let h = f.holder_quotient(10_000, 5);
                assert!(h <= m_f * (1.0 + 1e-12), "alpha {alpha} n {n}: {h}");
                assert!(h > 0.05 * m_f, "quotient suspiciously small: {h}");
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = AdversarialMean::new(100, 0.15, 7, 1.0, 9).unwrap();
        let b = AdversarialMean::new(100, 0.15, 7, 1.0, 9).unwrap();
        let c = AdversarialMean::new(100, 0.15, 7, 1.0, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.r, c.r);
    }

    #[test]
    fn condition_is_enforced() {
        assert!(AdversarialMean::new(100, 0.15, 5, 1.0, 1).is_err());
        assert!(AdversarialMean::new(100, 0.2, 3, 1.0, 1).is_err());
        assert!(AdversarialMean::new(2, 0.3, 5, 1.0, 1).is_err());
        assert!(AdversarialMean::new(100, 0.3, 4, 1.0, 1).is_err());
    }

    #[test]
    fn wraps_as_mean_fn() {
        let f = AdversarialMean::new(50, 0.3, 5, 1.0, 2).unwrap();
        let m = f.to_mean_fn();
        assert_eq!(m.eval(0.3), f.eval(0.3));
    }
}
