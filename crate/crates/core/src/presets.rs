//! Initial data used by the experiments.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{Grid, GridFunction, ReflectionConfig};

/// `exp(1 - 1/(1 - r²))` on `r < 1`, zero outside; peak value 1.
pub fn bump_profile(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

fn dist(x: &[f64], center: &[f64]) -> f64 {
    x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Named initial data `u₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `e^{-|x|²}`.
    Gaussian,
    /// Unit-radius bump centred at `(0.4, …, 0.4)`.
    Bump,
    /// Centred bump minus a smaller bump at `0.5 e₁`; positive mass.
    DipolePlusMass,
    /// `x₁ ψ(|x|)`, odd, so the mass vanishes.
    ZeroMass,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Self::Gaussian, Self::Bump, Self::DipolePlusMass, Self::ZeroMass];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Bump => "bump",
            Self::DipolePlusMass => "dipole-plus-mass",
            Self::ZeroMass => "zero-mass",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            Self::Gaussian => (-r * r).exp(),
            Self::Bump => {
                let c = vec![0.4; x.len()];
                bump_profile(dist(x, &c))
            }
            Self::DipolePlusMass => {
                let mut c = vec![0.0; x.len()];
                c[0] = 0.5;
                bump_profile(r) - 0.6 * bump_profile(dist(x, &c) / 0.5)
            }
            Self::ZeroMass => x[0] * bump_profile(r),
        }
    }

    /// Half-width of a box outside which the data vanish (below 1e-16 for
    /// the Gaussian).
    pub fn reach(self) -> f64 {
        match self {
            Self::Gaussian => 6.1,
            Self::Bump => 1.4,
            Self::DipolePlusMass | Self::ZeroMass => 1.0,
        }
    }

    /// Samples on a uniform grid of `n` nodes per axis over the box.
    pub fn sample(self, cfg: &ReflectionConfig, n: usize) -> Result<GridFunction> {
        let grid = Arc::new(Grid::uniform(cfg, n, self.reach())?);
        Ok(GridFunction::sample(grid, |x| self.eval(x)))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .map_or_else(|| domain("Preset", format!("unknown preset {s:?}")), Ok)
    }
}
