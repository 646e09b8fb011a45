//! Named scenario spaces used in examples and tests.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrands::{Generator, IntegrandSpec};
use crate::scenario::{Atom, ScenarioSpace};

/// Default Gauss–Legendre order for the quadrature presets.
pub const DEFAULT_NODES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Two equally weighted atoms with payoffs 0 and 1 under KL.
    Kl2pt,
    /// (0, 1) with μ(dr) = 2r dr, X(r) = r, p0 ≡ 1 under BURG.
    Burg2r,
    /// As `Burg2r` but p0(r) = 1/(2r) and BURG in Bregman mode.
    NeverBreg,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Kl2pt, Preset::Burg2r, Preset::NeverBreg];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Kl2pt => "kl2pt",
            Preset::Burg2r => "burg2r",
            Preset::NeverBreg => "never-breg",
        }
    }

    /// The space; `nodes` is ignored for the two-point space.
    pub fn space(self, nodes: usize) -> Result<ScenarioSpace> {
        match self {
            Preset::Kl2pt => kl_two_point(),
            Preset::Burg2r => burg_linear(nodes),
            Preset::NeverBreg => never_bregman(nodes),
        }
    }

    /// The integrand the preset is meant to be paired with.
    pub fn spec(self, space: &ScenarioSpace) -> Result<IntegrandSpec> {
        match self {
            Preset::Kl2pt => Ok(IntegrandSpec::f_divergence(Generator::Kl)),
            Preset::Burg2r => Ok(IntegrandSpec::f_divergence(Generator::Burg)),
            Preset::NeverBreg => IntegrandSpec::bregman_over(Generator::Burg, space),
        }
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
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Validation(format!("unknown preset '{s}' (kl2pt, burg2r, never-breg)")))
    }
}

pub fn kl_two_point() -> Result<ScenarioSpace> {
    ScenarioSpace::build_discrete(vec![
        Atom::new("a", 0.0, 0.5, 0.0, 1.0),
        Atom::new("b", 1.0, 0.5, 1.0, 1.0),
    ])
}

pub fn burg_linear(nodes: usize) -> Result<ScenarioSpace> {
    ScenarioSpace::build_quadrature(0.0, 1.0, nodes, |r| 2.0 * r, |r| r, |_| 1.0)
}

pub fn never_bregman(nodes: usize) -> Result<ScenarioSpace> {
    ScenarioSpace::build_quadrature(0.0, 1.0, nodes, |r| 2.0 * r, |r| r, |r| 1.0 / (2.0 * r))
}
