//! One-dimensional numerical integration.
//!
//! [`Integrator`] is a globally adaptive Gauss–Kronrod (7, 15) scheme: the
//! interval with the largest error estimate is bisected until the summed
//! estimate satisfies `err <= max(abs_tol, rel_tol * |I|)`. The error
//! estimate of a panel is `|K15 - G7|`, which is conservative for smooth
//! integrands.
//!
//! [`trapezoid`] is a plain composite rule, kept around as an independent
//! cross-check for the adaptive routine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Summed `|K15 - G7|` over the final partition.
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Number of equal panels the range is split into before adapting.
    pub initial_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 4096,
            initial_panels: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

impl Integrator {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Integrator {
            abs_tol,
            ..Default::default()
        }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    pub fn max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    /// Integrates `f` over `[a, b]`.
    ///
    /// Returns [`Error::NumericTolerance`] when the interval budget runs out
    /// before the tolerance is met, and [`Error::InvalidInput`] for a
    /// non-finite range or a non-finite integrand value.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::input("range", "integration bounds must be finite"));
        }
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

        let panels = self.initial_panels.max(1);
        let step = (hi - lo) / panels as f64;
        let mut heap = BinaryHeap::with_capacity(self.max_intervals.max(panels) + 1);
        for k in 0..panels {
            let pa = lo + step * k as f64;
            let pb = if k + 1 == panels {
                hi
            } else {
                lo + step * (k + 1) as f64
            };
            heap.push(gauss_kronrod(&f, pa, pb));
        }

        loop {
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            if !value.is_finite() {
                return Err(Error::input("integrand", "non-finite value encountered"));
            }
            let tol = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= tol {
                return Ok(Integral {
                    value: sign * value,
                    error,
                    intervals: heap.len(),
                });
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::NumericTolerance {
                    context: "adaptive quadrature",
                    estimate: error,
                    tolerance: tol,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                return Err(Error::NumericTolerance {
                    context: "adaptive quadrature (interval underflow)",
                    estimate: error,
                    tolerance: tol,
                });
            }
            heap.push(gauss_kronrod(&f, worst.a, mid));
            heap.push(gauss_kronrod(&f, mid, worst.b));
        }
    }
}

/// Composite trapezoid rule with `steps` equal sub-intervals.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps.max(1);
    let dx = (b - a) / steps as f64;
    let inner: f64 = (1..steps).map(|k| f(a + dx * k as f64)).sum();
    dx * (0.5 * (f(a) + f(b)) + inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_up_to_degree_29_are_exact() {
        let q = Integrator::with_abs_tol(1e-14);
        let r = q
            .integrate(|x| x.powi(20) - 3.0 * x.powi(7), -1.0, 2.0)
            .unwrap();
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0;
        assert!((r.value - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn gaussian_normalises() {
        let q = Integrator::with_abs_tol(1e-13);
        let r = q
            .integrate(|x| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(), -12.0, 12.0)
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let q = Integrator::default();
        let fwd = q.integrate(f64::sin, 0.0, 1.0).unwrap().value;
        let back = q.integrate(f64::sin, 1.0, 0.0).unwrap().value;
        assert_eq!(fwd, -back);
    }

    #[test]
    fn kink_is_resolved_adaptively() {
        let q = Integrator::with_abs_tol(1e-12);
        let r = q.integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0).unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
        assert!(r.intervals > 1);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let q = Integrator::with_abs_tol(1e-15).max_intervals(4);
        let err = q.integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0).unwrap_err();
        assert!(err.is_numeric());
    }

    #[test]
    fn trapezoid_agrees_on_periodic_integrand() {
        let t = trapezoid(|x: f64| x.cos().powi(2), 0.0, 2.0 * PI, 64);
        assert!((t - PI).abs() < 1e-12);
    }
}
