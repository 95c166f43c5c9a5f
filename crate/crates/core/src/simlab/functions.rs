use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quadrature::Integrator;
use crate::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied function with an optional analytic derivative.
#[derive(Clone)]
pub struct CustomFn {
    pub label: String,
    pub value: RealFn,
    pub derivative: Option<RealFn>,
}

impl CustomFn {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CustomFn {
            label: label.into(),
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("label", &self.label)
            .field("differentiable", &self.derivative.is_some())
            .finish()
    }
}

/// Mean functions: `f1 = 0` and `f_k = ¾ sin(5·2^{k-1} π x)` for k = 2, 3, 4.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanFn {
    F1,
    F2,
    F3,
    F4,
    #[serde(skip)]
    Custom(CustomFn),
}

const AMPLITUDE: f64 = 0.75;

impl MeanFn {
    pub fn builtin(id: &str) -> Option<MeanFn> {
        match id {
            "f1" => Some(MeanFn::F1),
            "f2" => Some(MeanFn::F2),
            "f3" => Some(MeanFn::F3),
            "f4" => Some(MeanFn::F4),
            _ => None,
        }
    }

    pub fn all_builtin() -> [MeanFn; 4] {
        [MeanFn::F1, MeanFn::F2, MeanFn::F3, MeanFn::F4]
    }

    pub fn id(&self) -> &str {
        match self {
            MeanFn::F1 => "f1",
            MeanFn::F2 => "f2",
            MeanFn::F3 => "f3",
            MeanFn::F4 => "f4",
            MeanFn::Custom(c) => &c.label,
        }
    }

    /// Angular frequency of the sine means.
    fn frequency(&self) -> Option<f64> {
        match self {
            MeanFn::F2 => Some(10.0 * PI),
            MeanFn::F3 => Some(20.0 * PI),
            MeanFn::F4 => Some(40.0 * PI),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MeanFn::F1 => 0.0,
            MeanFn::Custom(c) => (c.value)(x),
            _ => AMPLITUDE * (self.frequency().unwrap() * x).sin(),
        }
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            MeanFn::F1 => Some(0.0),
            MeanFn::Custom(c) => c.derivative.as_ref().map(|d| d(x)),
            _ => {
                let w = self.frequency().unwrap();
                Some(AMPLITUDE * w * (w * x).cos())
            }
        }
    }
}

/// Variance functions; `VQuadratic` is `(x - ½)² + ½`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceFn {
    #[serde(rename = "v-quadratic")]
    VQuadratic,
    Constant(f64),
    #[serde(skip)]
    Custom(CustomFn),
}

impl VarianceFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            VarianceFn::VQuadratic => (x - 0.5).powi(2) + 0.5,
            VarianceFn::Constant(c) => *c,
            VarianceFn::Custom(c) => (c.value)(x),
        }
    }

    pub fn id(&self) -> String {
        match self {
            VarianceFn::VQuadratic => "v-quadratic".into(),
            VarianceFn::Constant(c) => format!("constant({c})"),
            VarianceFn::Custom(c) => c.label.clone(),
        }
    }
}

/// A mean/variance pair with its nominal smoothness parameters.
///
/// `alpha` and `beta` are the Hölder orders of `f` and `V`, `m_f` and `m_v`
/// the class radii. They document the setting; the estimators do not read
/// them except where noted (kernel order defaults to `⌊beta⌋`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub mean: MeanFn,
    pub variance: VarianceFn,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_radius")]
    pub m_f: f64,
    #[serde(default = "default_radius")]
    pub m_v: f64,
}

fn default_alpha() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    2.0
}

fn default_radius() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn new(mean: MeanFn, variance: VarianceFn) -> Self {
        FunctionSpec {
            mean,
            variance,
            alpha: default_alpha(),
            beta: default_beta(),
            m_f: default_radius(),
            m_v: default_radius(),
        }
    }
}

/// `∫_0^1 f'(x)² dx` in closed form for the built-in means.
///
/// The sine means complete whole periods on `[0, 1]`, so the integral is
/// `¾² ω² / 2`. Custom means fall back to [`roughness_by_quadrature`].
pub fn roughness(mean: &MeanFn) -> Result<f64> {
    match mean {
        MeanFn::F1 => Ok(0.0),
        MeanFn::Custom(_) => roughness_by_quadrature(mean),
        _ => {
            let w = mean.frequency().unwrap();
            Ok(0.5 * AMPLITUDE * AMPLITUDE * w * w)
        }
    }
}

/// `∫_0^1 f'(x)² dx` by adaptive quadrature of the derivative.
pub fn roughness_by_quadrature(mean: &MeanFn) -> Result<f64> {
    if mean.derivative(0.5).is_none() {
        return Err(Error::Unsupported(format!(
            "mean `{}` has no derivative; roughness needs a differentiable mean",
            mean.id()
        )));
    }
    let integrand = |x: f64| mean.derivative(x).unwrap_or(f64::NAN).powi(2);
    Integrator::with_abs_tol(1e-10)
        .rel_tol(1e-14)
        .initial_panels(64)
        .integrate(integrand, 0.0, 1.0)
        .map(|r| r.value)
}
