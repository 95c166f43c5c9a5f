use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::{Error, Result};

/// A symmetric discrete distribution whose moments through order `q` agree
/// with those of the standard normal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentDistribution {
    /// Support points in increasing order.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub q: usize,
    /// `max |node|`.
    pub b: f64,
}

/// `(j - 1)!!` for even `j` (with `(-1)!! = 1`), `0` for odd `j`: the
/// standard normal moments.
pub fn normal_moment(j: usize) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    (1..j).step_by(2).map(|k| k as f64).product()
}

/// Smallest odd `q` with `(q + 1) alpha > 1`.
pub fn smallest_odd_q(alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::input(
            "alpha",
            format!("must be positive, got {alpha}"),
        ));
    }
    let mut q = 1usize;
    while (q + 1) as f64 * alpha <= 1.0 {
        q += 2;
    }
    Ok(q)
}

/// Gauss–Hermite measure with `(q + 1)/2` nodes for the standard normal
/// weight, built with the Golub–Welsch eigenvalue method.
pub fn moment_distribution(q: usize) -> Result<MomentDistribution> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(Error::input(
            "q",
            format!("must be odd and at least 1, got {q}"),
        ));
    }
    let m = q.div_ceil(2);
    // Jacobi matrix of the monic probabilists' Hermite recurrence
    // He_{k+1} = x He_k - k He_{k-1}.
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Enforce the exact symmetry that the eigen-solver only reproduces to
    // rounding.
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for k in 0..m {
        let mirror = m - 1 - k;
        let v = 0.5 * (pairs[k].0 - pairs[mirror].0);
        let w = 0.5 * (pairs[k].1 + pairs[mirror].1);
        nodes[k] = v;
        weights[k] = w;
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let b = nodes.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok(MomentDistribution {
        nodes,
        weights,
        q,
        b,
    })
}

impl MomentDistribution {
    /// `Σ w_k v_k^j`.
    pub fn moment(&self, j: usize) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.powi(j as i32))
            .sum()
    }

    /// Maps a uniform draw in `[0, 1)` to a node by inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            acc += w;
            if u < acc {
                return *v;
            }
        }
        *self.nodes.last().expect("at least one node")
    }
}
