//! Vanishing-moment polynomial kernels and bin-integrated smoothing weights.
//!
//! An order-`p` kernel on `[lo, hi]` is the polynomial of degree at most `p`
//! with `∫K = 1` and `∫x^j K = 0` for `j = 1..=p`. Interior kernels live on
//! `[-1, 1]`; the left boundary kernel `K_t` lives on `[-1, t]`. Near the
//! right edge the reflected kernel `K_t(-s)` on `[-t, 1]` is used.
//!
//! Weights are exact integrals of `(1/h) K((x - u)/h)` over the bins that
//! partition `[0, 1]`, so they sum to one for every `x`.

use std::borrow::Cow;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    support_lo: f64,
    support_hi: f64,
    /// Ascending-degree coefficients, valid on the support only.
    coeffs: Vec<f64>,
    order: usize,
    l2_norm_sq: f64,
}

fn power_integral(lo: f64, hi: f64, m: usize) -> f64 {
    let e = (m + 1) as i32;
    (hi.powi(e) - lo.powi(e)) / (m + 1) as f64
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// Orthonormal Legendre polynomials on `[-1, 1]` up to `degree`, as
/// ascending coefficient vectors.
fn orthonormal_legendre(degree: usize) -> Vec<Vec<f64>> {
    let mut p: Vec<Vec<f64>> = vec![vec![1.0]];
    if degree >= 1 {
        p.push(vec![0.0, 1.0]);
    }
    for k in 1..degree {
        // (k + 1) P_{k+1} = (2k + 1) u P_k - k P_{k-1}
        let kf = k as f64;
        let mut next = vec![0.0; k + 2];
        for (m, &c) in p[k].iter().enumerate() {
            next[m + 1] += (2.0 * kf + 1.0) * c / (kf + 1.0);
        }
        for (m, &c) in p[k - 1].iter().enumerate() {
            next[m] -= kf * c / (kf + 1.0);
        }
        p.push(next);
    }
    p.into_iter()
        .enumerate()
        .map(|(k, poly)| {
            let norm = ((2 * k + 1) as f64 / 2.0).sqrt();
            poly.into_iter().map(|c| c * norm).collect()
        })
        .collect()
}

/// Solves the moment system `∫K = 1, ∫x^j K = 0 (j = 1..=order)` on
/// `[lo, hi]` and returns `(monomial coefficients in x, ∫K²)`.
///
/// The conditions say `∫ p K = p(0)` for every polynomial of degree at most
/// `order`. In the orthonormal Legendre basis of the support the Gram matrix
/// is the identity, so the solution is `Σ_k φ_k(0) φ_k`; the monomial Gram
/// matrix is far too ill-conditioned near `t = 0` for the 1e-12 targets.
fn solve_moment_system(order: usize, lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let center = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);
    let u0 = -center / radius;
    let basis = orthonormal_legendre(order);
    // G(u) = Σ φ_k(u0) φ_k(u); K(x) = G((x - c)/r) / r.
    let mut g = vec![0.0; order + 1];
    let mut l2 = 0.0;
    for phi in &basis {
        let at = horner(phi, u0);
        l2 += at * at;
        for (m, &c) in phi.iter().enumerate() {
            g[m] += at * c;
        }
    }
    let mut coeffs = vec![0.0; order + 1];
    for (m, &gm) in g.iter().enumerate() {
        // ((x - c)/r)^m = r^-m Σ_l C(m, l) x^l (-c)^(m - l)
        let scale = gm / radius.powi(m as i32 + 1);
        let mut binom = 1.0;
        for l in 0..=m {
            coeffs[l] += scale * binom * (-center).powi((m - l) as i32);
            binom = binom * (m - l) as f64 / (l + 1) as f64;
        }
    }
    (coeffs, l2 / radius)
}

impl Kernel {
    fn solve(order: usize, lo: f64, hi: f64) -> Self {
        let (coeffs, l2_norm_sq) = solve_moment_system(order, lo, hi);
        Kernel {
            support_lo: lo,
            support_hi: hi,
            coeffs,
            order,
            l2_norm_sq,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `∫ K^2` over the support.
    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_norm_sq
    }

    /// Kernel value; zero outside the closed support.
    pub fn eval(&self, s: f64) -> f64 {
        if s < self.support_lo || s > self.support_hi {
            0.0
        } else {
            horner(&self.coeffs, s)
        }
    }

    fn antiderivative_raw(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * s + c / (k + 1) as f64;
        }
        acc * s
    }

    /// `∫_{lo}^{s} K`, with `s` clamped into the support.
    pub fn cdf(&self, s: f64) -> f64 {
        let s = s.clamp(self.support_lo, self.support_hi);
        self.antiderivative_raw(s) - self.antiderivative_raw(self.support_lo)
    }

    /// Exact `∫ s^j K(s) ds` over the support.
    pub fn moment(&self, j: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * power_integral(self.support_lo, self.support_hi, j + k))
            .sum()
    }

    /// The mirror image `s ↦ K(-s)`, supported on `[-hi, -lo]`.
    pub fn reflected(&self) -> Kernel {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
            .collect();
        Kernel {
            support_lo: -self.support_hi,
            support_hi: -self.support_lo,
            coeffs,
            order: self.order,
            l2_norm_sq: self.l2_norm_sq,
        }
    }
}

/// Interior kernel of the given order on `[-1, 1]`.
pub fn make_interior_kernel(order: usize) -> Kernel {
    let mut kernel = Kernel::solve(order, -1.0, 1.0);
    // Odd Legendre polynomials vanish at 0, so the solution is even.
    for (k, c) in kernel.coeffs.iter_mut().enumerate() {
        if k % 2 == 1 {
            *c = 0.0;
        }
    }
    kernel
}

/// Boundary kernel `K_t` on `[-1, t]` with the same moment conditions.
pub fn make_boundary_kernel(order: usize, t: f64) -> Result<Kernel> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::input("t", format!("must lie in [0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(make_interior_kernel(order));
    }
    Ok(Kernel::solve(order, -1.0, t))
}

/// Bin edges partitioning `[0, 1]`, one bin per first-order difference.
///
/// For design points `x_1 < ... < x_n` the `n - 1` bins are
/// `[(x_{i-1} + x_i)/2, (x_i + x_{i+1})/2]`, with the first starting at 0 and
/// the last ending at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BinLayout {
    edges: Vec<f64>,
}

impl BinLayout {
    /// Layout for the equidistant design `x_i = i / n`.
    pub fn fixed(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::config("n", format!("need n >= 3, got {n}")));
        }
        let nf = n as f64;
        let mut edges = Vec::with_capacity(n);
        edges.push(0.0);
        edges.extend((1..n - 1).map(|i| (2 * i + 1) as f64 / (2.0 * nf)));
        edges.push(1.0);
        Ok(BinLayout { edges })
    }

    /// Layout built from observed, strictly increasing design points in `[0, 1]`.
    pub fn from_design(x: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(Error::config("n", format!("need n >= 3, got {n}")));
        }
        let mut edges = Vec::with_capacity(n);
        edges.push(0.0);
        edges.extend(x[..n - 1].windows(2).map(|w| 0.5 * (w[0] + w[1])));
        edges.push(1.0);
        Ok(BinLayout { edges })
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Bin `i` (zero-based) as `(left, right)`.
    pub fn bin(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }
}

/// Nonzero stretch of a weight vector: `values[k]` is the weight of bin
/// `first + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeights {
    pub first: usize,
    pub values: Vec<f64>,
    /// `∫K^2` of the kernel that produced these weights.
    pub kernel_l2_norm_sq: f64,
}

impl SparseWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &w)| (self.first + k, w))
    }

    pub fn to_dense(&self, bins: usize) -> Vec<f64> {
        let mut dense = vec![0.0; bins];
        for (i, w) in self.iter() {
            dense[i] = w;
        }
        dense
    }
}

/// Which kernel applies at a given evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Interior,
    /// `x = t h` near the left edge.
    Left(f64),
    /// `x = 1 - t h` near the right edge.
    Right(f64),
}

/// Bin-weight generator for one `(order, h, layout)` combination.
#[derive(Debug, Clone)]
pub struct Smoother {
    order: usize,
    h: f64,
    layout: BinLayout,
    interior: Kernel,
}

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h < 0.5 {
        Ok(())
    } else {
        Err(Error::config(
            "h",
            format!("bandwidth must lie in (0, 1/2), got {h}"),
        ))
    }
}

impl Smoother {
    pub fn new(order: usize, h: f64, layout: BinLayout) -> Result<Self> {
        check_bandwidth(h)?;
        Ok(Smoother {
            order,
            h,
            layout,
            interior: make_interior_kernel(order),
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn layout(&self) -> &BinLayout {
        &self.layout
    }

    pub fn regime(&self, x: f64) -> Regime {
        let h = self.h;
        if x > h && x < 1.0 - h {
            Regime::Interior
        } else if x <= h {
            Regime::Left((x / h).clamp(0.0, 1.0))
        } else {
            Regime::Right(((1.0 - x) / h).clamp(0.0, 1.0))
        }
    }

    /// Kernel in the `s = (x - u)/h` variable used at `x`.
    pub fn effective_kernel(&self, x: f64) -> Cow<'_, Kernel> {
        match self.regime(x) {
            Regime::Interior | Regime::Left(1.0) | Regime::Right(1.0) => {
                Cow::Borrowed(&self.interior)
            }
            Regime::Left(t) => {
                Cow::Owned(make_boundary_kernel(self.order, t).expect("t is clamped into [0, 1]"))
            }
            Regime::Right(t) => Cow::Owned(
                make_boundary_kernel(self.order, t)
                    .expect("t is clamped into [0, 1]")
                    .reflected(),
            ),
        }
    }

    /// Weights of every bin that overlaps the kernel window at `x`.
    pub fn weights(&self, x: f64) -> Result<SparseWeights> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::input(
                "x",
                format!("evaluation point must lie in [0, 1], got {x}"),
            ));
        }
        let kernel = self.effective_kernel(x);
        let (lo, hi) = kernel.support();
        let h = self.h;
        // u-range covered by the kernel: u = x - h s.
        let u_lo = x - h * hi;
        let u_hi = x - h * lo;
        let edges = self.layout.edges();
        let bins = self.layout.bins();
        let first = edges[1..].partition_point(|&e| e <= u_lo).min(bins - 1);
        let last = edges[..bins].partition_point(|&e| e < u_hi).max(first + 1);
        // Bins first..last (exclusive) intersect the window.
        let g = |e: f64| kernel.cdf((x - e) / h);
        let mut values = Vec::with_capacity(last - first);
        let mut left = g(edges[first]);
        for i in first..last {
            let right = g(edges[i + 1]);
            values.push(left - right);
            left = right;
        }
        Ok(SparseWeights {
            first,
            values,
            kernel_l2_norm_sq: kernel.l2_norm_sq(),
        })
    }
}

/// Dense bin weights at one evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub x: f64,
    pub h: f64,
    /// Entry `i` is the weight of bin `i + 1` in one-based numbering.
    pub weights: Vec<f64>,
}

/// Weights `K_i^h(x)`, `i = 1..n-1`, for the fixed design `x_i = i/n`.
pub fn bin_weights(order: usize, h: f64, x: f64, n: usize) -> Result<WeightVector> {
    let layout = BinLayout::fixed(n)?;
    let bins = layout.bins();
    let smoother = Smoother::new(order, h, layout)?;
    let sparse = smoother.weights(x)?;
    Ok(WeightVector {
        x,
        h,
        weights: sparse.to_dense(bins),
    })
}
