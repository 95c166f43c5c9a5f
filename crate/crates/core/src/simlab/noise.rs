use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Standardised noise families: mean 0, variance 1, finite fourth moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Noise {
    #[default]
    Gaussian,
    /// ±1 with probability ½ each.
    TwoPoint,
}

impl Noise {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Noise::Gaussian => rng.sample(StandardNormal),
            Noise::TwoPoint => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `E z⁴`.
    pub fn fourth_moment(self) -> f64 {
        match self {
            Noise::Gaussian => 3.0,
            Noise::TwoPoint => 1.0,
        }
    }
}
