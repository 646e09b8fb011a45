//! The measure space as a finite list of weighted atoms.
//!
//! Each atom carries its μ-mass, the payoff X(r) and the default density
//! p0(r). Continuous one-dimensional spaces are discretised once, at
//! construction, by Gauss–Legendre quadrature; everything downstream is a
//! finite weighted sum.
//!
//! A space may also carry *support limits*: massless points (such as the
//! endpoints of a quadrature interval) that are limits of the support. They
//! enter the essential infimum/supremum of the payoff and bound the
//! θ1-domain of the dual, but never contribute to an integral.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::sum::pairwise;

const MASS_TOL: f64 = 1e-8;
const QUADRATURE_RESCALE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub node_id: String,
    pub coordinate: f64,
    /// μ-mass of the atom.
    pub weight: f64,
    pub payoff: f64,
    pub default_density: f64,
}

impl Atom {
    pub fn new(node_id: impl Into<String>, coordinate: f64, weight: f64, payoff: f64, default_density: f64) -> Self {
        Self {
            node_id: node_id.into(),
            coordinate,
            weight,
            payoff,
            default_density,
        }
    }
}

/// A massless limit point of the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportLimit {
    pub coordinate: f64,
    pub payoff: f64,
    /// May be +∞ (e.g. p0(r) = 1/(2r) at r = 0).
    pub default_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpace {
    node_ids: Vec<String>,
    coordinates: Vec<f64>,
    weights: Vec<f64>,
    payoffs: Vec<f64>,
    default_density: Vec<f64>,
    limits: Vec<SupportLimit>,
    m: f64,
    big_m: f64,
    b0: f64,
}

/// Nonnegative values of a function at the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Validation(format!(
                "density value at atom {i} is {v}, must be >= 0"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for DensityVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl ScenarioSpace {
    /// Validates a list of atoms (no support limits).
    pub fn build_discrete(atoms: Vec<Atom>) -> Result<Self> {
        Self::build_with_limits(atoms, Vec::new())
    }

    /// Validates atoms plus massless support limits.
    pub fn build_with_limits(atoms: Vec<Atom>, limits: Vec<SupportLimit>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Validation("scenario space has no atoms".into()));
        }
        let n = atoms.len();
        let mut node_ids = Vec::with_capacity(n);
        let mut coordinates = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut payoffs = Vec::with_capacity(n);
        let mut default_density = Vec::with_capacity(n);
        for (i, a) in atoms.into_iter().enumerate() {
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(Error::Validation(format!(
                    "atom {i} ({}) has nonpositive or non-finite weight {}",
                    a.node_id, a.weight
                )));
            }
            if !a.payoff.is_finite() {
                return Err(Error::Validation(format!(
                    "atom {i} ({}) has non-finite payoff",
                    a.node_id
                )));
            }
            if !a.coordinate.is_finite() {
                return Err(Error::Validation(format!(
                    "atom {i} ({}) has non-finite coordinate",
                    a.node_id
                )));
            }
            if !(a.default_density >= 0.0) || !a.default_density.is_finite() {
                return Err(Error::Validation(format!(
                    "atom {i} ({}) has invalid default density {}",
                    a.node_id, a.default_density
                )));
            }
            node_ids.push(a.node_id);
            coordinates.push(a.coordinate);
            weights.push(a.weight);
            payoffs.push(a.payoff);
            default_density.push(a.default_density);
        }
        for (j, l) in limits.iter().enumerate() {
            if !l.payoff.is_finite() || !l.coordinate.is_finite() {
                return Err(Error::Validation(format!(
                    "support limit {j} has non-finite payoff or coordinate"
                )));
            }
            if !(l.default_density >= 0.0) {
                return Err(Error::Validation(format!(
                    "support limit {j} has invalid default density {}",
                    l.default_density
                )));
            }
        }

        let mass = pairwise(n, |i| weights[i] * default_density[i]);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!(
                "default density is not normalised: total mass {mass} differs from 1"
            )));
        }
        let b0 = pairwise(n, |i| weights[i] * default_density[i] * payoffs[i]);
        let limit_payoffs = limits.iter().map(|l| l.payoff);
        let m = payoffs
            .iter()
            .copied()
            .chain(limit_payoffs.clone())
            .fold(f64::INFINITY, f64::min);
        let big_m = payoffs
            .iter()
            .copied()
            .chain(limit_payoffs)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(m < b0 && b0 < big_m) {
            return Err(Error::Validation(format!(
                "payoff range must satisfy m < b0 < M, got m={m}, b0={b0}, M={big_m}"
            )));
        }
        Ok(Self {
            node_ids,
            coordinates,
            weights,
            payoffs,
            default_density,
            limits,
            m,
            big_m,
            b0,
        })
    }

    /// Discretises (a, b) with an `n`-point Gauss–Legendre rule.
    ///
    /// Atom weights are quadrature weights times `mu_density` at the nodes.
    /// The endpoints become support limits. The default density is rescaled
    /// by its computed total mass when that mass is within 1e-6 of one, to
    /// absorb quadrature error.
    pub fn build_quadrature<Mu, X, P>(a: f64, b: f64, n: usize, mu_density: Mu, payoff: X, p0: P) -> Result<Self>
    where
        Mu: Fn(f64) -> f64,
        X: Fn(f64) -> f64,
        P: Fn(f64) -> f64,
    {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Validation(format!(
                "quadrature interval needs finite a < b, got ({a}, {b})"
            )));
        }
        if n < 2 {
            return Err(Error::Validation(format!("quadrature needs at least 2 nodes, got {n}")));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 2"));
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut atoms = Vec::with_capacity(n);
        for (i, &(x, w)) in rule.as_node_weight_pairs().iter().enumerate() {
            let r = half * x + mid;
            let mu = mu_density(r);
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::Validation(format!(
                    "mu density must be positive at node r={r}, got {mu}"
                )));
            }
            atoms.push(Atom::new(format!("q{i}"), r, half * w * mu, payoff(r), p0(r)));
        }
        let raw_mass = pairwise(n, |i| atoms[i].weight * atoms[i].default_density);
        if !((raw_mass - 1.0).abs() < QUADRATURE_RESCALE_TOL) {
            return Err(Error::Validation(format!(
                "default density has quadrature mass {raw_mass}, too far from 1 to rescale"
            )));
        }
        for atom in &mut atoms {
            atom.default_density /= raw_mass;
        }
        let limits = [a, b]
            .into_iter()
            .map(|r| SupportLimit {
                coordinate: r,
                payoff: payoff(r),
                default_density: p0(r) / raw_mass,
            })
            .collect();
        Self::build_with_limits(atoms, limits)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn default_density(&self) -> &[f64] {
        &self.default_density
    }

    pub fn default_density_vector(&self) -> DensityVector {
        DensityVector(self.default_density.clone())
    }

    pub fn limits(&self) -> &[SupportLimit] {
        &self.limits
    }

    pub fn atoms(&self) -> Vec<Atom> {
        (0..self.len())
            .map(|i| {
                Atom::new(
                    self.node_ids[i].clone(),
                    self.coordinates[i],
                    self.weights[i],
                    self.payoffs[i],
                    self.default_density[i],
                )
            })
            .collect()
    }

    /// Essential infimum of the payoff.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Essential supremum of the payoff.
    #[allow(non_snake_case)]
    pub fn M(&self) -> f64 {
        self.big_m
    }

    /// Expected payoff under the default density.
    pub fn b0(&self) -> f64 {
        self.b0
    }

    /// The same space with every payoff (atoms and limits) shifted by `delta`.
    pub fn with_payoff_shift(&self, delta: f64) -> Result<Self> {
        let atoms = self
            .atoms()
            .into_iter()
            .map(|mut a| {
                a.payoff += delta;
                a
            })
            .collect();
        let limits = self
            .limits
            .iter()
            .map(|l| SupportLimit {
                payoff: l.payoff + delta,
                ..*l
            })
            .collect();
        Self::build_with_limits(atoms, limits)
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Σ w_i p_i.
    pub fn total_mass(&self, p: &[f64]) -> Result<f64> {
        self.check_len(p)?;
        Ok(pairwise(p.len(), |i| self.weights[i] * p[i]))
    }

    /// Σ w_i p_i x_i.
    pub fn expectation(&self, p: &[f64]) -> Result<f64> {
        self.check_len(p)?;
        Ok(pairwise(p.len(), |i| self.weights[i] * p[i] * self.payoffs[i]))
    }

    /// True if `p` is a probability density within 1e-8.
    pub fn is_density(&self, p: &[f64]) -> Result<bool> {
        Ok((self.total_mass(p)? - 1.0).abs() <= MASS_TOL && p.iter().all(|v| *v >= 0.0))
    }
}
