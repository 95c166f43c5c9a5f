use std::f64::consts::PI;

use crate::quadrature::Integrator;
use crate::{Error, Result};

const HC_TOL: f64 = 1e-12;

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::input(
            "d",
            format!("must be positive and finite, got {d}"),
        ))
    }
}

/// `x / (e^{x/2} + e^{-x/2}) · (2πd)^{-1/2} e^{-x²/(2d) - d/8}`.
pub fn hc_integrand(d: f64, x: f64) -> f64 {
    x / (2.0 * (0.5 * x).cosh()) * (-x * x / (2.0 * d) - d / 8.0).exp() / (2.0 * PI * d).sqrt()
}

fn half_width(d: f64) -> f64 {
    // The Gaussian factor is below e^{-200} past 20 standard deviations.
    20.0 * d.sqrt() + 20.0
}

/// `∫ hc_integrand(d, x) dx` over the real line.
pub fn hc_integral(d: f64) -> Result<f64> {
    check_d(d)?;
    let l = half_width(d);
    let quad = Integrator::with_abs_tol(HC_TOL).initial_panels(64);
    Ok(quad.integrate(|x| hc_integrand(d, x), -l, l)?.value)
}

/// The same quantity written as `E[X / (1 + e^X)]` with `X ~ N(d/2, d)`;
/// its integrand has no odd symmetry, so it is an independent check.
pub fn hc_expectation(d: f64) -> Result<f64> {
    check_d(d)?;
    let s = d.sqrt();
    let l = 40.0;
    let quad = Integrator::with_abs_tol(HC_TOL).initial_panels(64);
    let f = |z: f64| {
        let x = 0.5 * d + s * z;
        // x / (1 + e^x), written to avoid overflow for large x.
        let g = if x > 0.0 {
            x * (-x).exp() / (1.0 + (-x).exp())
        } else {
            x / (1.0 + x.exp())
        };
        g * (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
    };
    Ok(quad.integrate(f, -l, l)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DS: [f64; 7] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0];

    #[test]
    fn integrand_is_odd() {
        for d in DS {
            for x in [0.0, 0.01, 0.7, 3.3, 19.0] {
                assert_eq!(hc_integrand(d, x) + hc_integrand(d, -x), 0.0);
            }
        }
    }

    #[test]
    fn integral_vanishes() {
        for d in DS {
            let v = hc_integral(d).unwrap();
            assert!(v.abs() < 1e-10, "d {d}: {v}");
        }
    }

    #[test]
    fn expectation_form_vanishes() {
        for d in DS {
            let v = hc_expectation(d).unwrap();
            assert!(v.abs() < 1e-10, "d {d}: {v}");
        }
    }

    #[test]
    fn half_line_mass_is_not_zero() {
        // The two halves cancel; neither is negligible on its own.
        let quad = Integrator::with_abs_tol(1e-12).initial_panels(16);
        let right = quad
            .integrate(|x| hc_integrand(1.0, x), 0.0, 40.0)
            .unwrap()
            .value;
        assert!(right > 0.05);
    }

    #[test]
    fn rejects_nonpositive_d() {
        assert!(hc_integral(0.0).is_err());
        assert!(hc_expectation(-1.0).is_err());
    }
}
