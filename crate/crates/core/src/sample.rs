use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// How the design points were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    /// `x_i = i / n`, `i = 1..=n`.
    Fixed,
    /// Sorted i.i.d. uniform draws on `[0, 1]`.
    RandomUniform,
}

/// A regression dataset with `x` strictly increasing in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    x: Vec<f64>,
    y: Vec<f64>,
    design: Design,
}

/// The equidistant design `i / n` for `i = 1..=n`.
pub fn fixed_design(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (1..=n).map(|i| i as f64 / nf).collect()
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Vec<f64>, design: Design) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                field: "y",
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 3 {
            return Err(Error::input(
                "sample",
                format!("need at least 3 observations, got {}", x.len()),
            ));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::input("sample", "values must be finite"));
        }
        if x[0] < 0.0 || x[x.len() - 1] > 1.0 {
            return Err(Error::input("x", "design points must lie in [0, 1]"));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::input(
                "x",
                format!(
                    "design must be strictly increasing (x[{}] = {} >= x[{}] = {})",
                    i,
                    x[i],
                    i + 1,
                    x[i + 1]
                ),
            ));
        }
        if design == Design::Fixed {
            let n = x.len() as f64;
            if x.iter()
                .enumerate()
                .any(|(i, &xi)| xi != (i + 1) as f64 / n)
            {
                return Err(Error::input("x", "fixed design requires x_i = i/n exactly"));
            }
        }
        Ok(Sample { x, y, design })
    }

    /// Sample on the equidistant design `x_i = i/n`.
    pub fn fixed(y: Vec<f64>) -> Result<Self> {
        Sample::new(fixed_design(y.len()), y, Design::Fixed)
    }

    /// Detects the equidistant design; anything else is treated as random.
    pub fn infer(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len() as f64;
        let fixed = x
            .iter()
            .enumerate()
            .all(|(i, &xi)| xi == (i + 1) as f64 / n);
        let design = if fixed {
            Design::Fixed
        } else {
            Design::RandomUniform
        };
        Sample::new(x, y, design)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Same design, new responses.
    pub fn with_y(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.y.len() {
            return Err(Error::LengthMismatch {
                field: "y",
                expected: self.y.len(),
                got: y.len(),
            });
        }
        Ok(Sample {
            x: self.x.clone(),
            y,
            design: self.design,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_design_is_exact() {
        let s = Sample::fixed(vec![0.0; 4]).unwrap();
        assert_eq!(s.x(), &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.design(), Design::Fixed);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(Sample::fixed(vec![1.0, 2.0]).is_err());
        assert!(Sample::new(vec![0.1, 0.1, 0.2], vec![0.0; 3], Design::RandomUniform).is_err());
        assert!(Sample::new(vec![0.1, 0.2, 1.2], vec![0.0; 3], Design::RandomUniform).is_err());
        assert!(Sample::new(vec![0.1, 0.2, 0.3], vec![0.0; 2], Design::RandomUniform).is_err());
        assert!(Sample::new(vec![0.1, 0.2, 0.3], vec![0.0; 3], Design::Fixed).is_err());
    }

    #[test]
    fn infer_detects_design() {
        let s = Sample::infer(vec![1.0 / 3.0, 2.0 / 3.0, 1.0], vec![0.0; 3]).unwrap();
        assert_eq!(s.design(), Design::Fixed);
        let s = Sample::infer(vec![0.1, 0.5, 0.7], vec![0.0; 3]).unwrap();
        assert_eq!(s.design(), Design::RandomUniform);
    }
}
