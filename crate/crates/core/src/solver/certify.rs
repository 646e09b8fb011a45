//! Almost-worst-case certification and the penalised gap.

use super::{Solver, TrivialBranch};
use crate::error::{Error, Result};
use crate::functionals::{bregman_distance, evaluate_h};
use crate::integrands::IntegrandSpec;
use crate::scenario::{DensityVector, ScenarioSpace};

const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AwcdCertificate {
    pub epsilon: f64,
    pub gamma: f64,
    pub is_awcd: bool,
    /// B(p, q̂_k).
    pub bregman_to_localiser: f64,
    /// γ − θ2*·ε.
    pub bound: f64,
    pub bound_holds: bool,
}

impl Solver<'_> {
    fn require_density(&self, p: &DensityVector) -> Result<()> {
        if p.len() != self.space.len() {
            return Err(Error::Dimension {
                expected: self.space.len(),
                got: p.len(),
            });
        }
        if !self.space.is_density(p.values())? {
            return Err(Error::Validation("p does not integrate to 1".into()));
        }
        Ok(())
    }

    /// Checks whether p is an (ε, γ)-almost worst case at level k and whether
    /// it sits inside the Bregman ball around the localiser.
    pub fn certify_awcd(&self, p: &DensityVector, k: f64, epsilon: f64, gamma: f64) -> Result<AwcdCertificate> {
        if !(epsilon >= 0.0) || !(gamma >= 0.0) {
            return Err(Error::Domain(format!(
                "epsilon and gamma must be >= 0, got {epsilon}, {gamma}"
            )));
        }
        self.require_density(p)?;
        let k_max = self.k_max_estimate()?;
        if !(k > 0.0 && k < k_max) {
            return Err(Error::Domain(format!("k={k} outside (0, k_max={k_max})")));
        }
        let report = self.value_at_k(k)?;
        debug_assert_eq!(report.trivial_branch, TrivialBranch::None);
        let p = p.values();
        let h = evaluate_h(self.spec, self.space, p)?;
        let e = self.space.expectation(p)?;
        let is_awcd = h <= k + gamma && e <= report.v + epsilon;
        let b = bregman_distance(self.spec, self.space, p, &report.localiser)?;
        let bound = gamma - report.theta2_star * epsilon;
        Ok(AwcdCertificate {
            epsilon,
            gamma,
            is_awcd,
            bregman_to_localiser: b,
            bound,
            bound_holds: b <= bound + BOUND_SLACK,
        })
    }

    /// [E(p) + λH(p)] − [W(λ) + λ·B(p, q_{−1/λ})], never below rounding level.
    pub fn penalised_gap(&self, p: &DensityVector, lambda: f64) -> Result<f64> {
        self.require_density(p)?;
        let p = p.values();
        let h = evaluate_h(self.spec, self.space, p)?;
        if !h.is_finite() {
            return Err(Error::Domain("H(p) is infinite".into()));
        }
        let w = self.penalised_value(lambda)?;
        let (_, q) = self.q_theta2(-1.0 / lambda)?;
        let b = bregman_distance(self.spec, self.space, p, &q)?;
        let e = self.space.expectation(p)?;
        Ok((e + lambda * h) - (w + lambda * b))
    }
}

pub fn certify_awcd(
    spec: &IntegrandSpec,
    space: &ScenarioSpace,
    p: &DensityVector,
    k: f64,
    epsilon: f64,
    gamma: f64,
) -> Result<AwcdCertificate> {
    Solver::new(spec, space)?.certify_awcd(p, k, epsilon, gamma)
}

pub fn penalised_gap(spec: &IntegrandSpec, space: &ScenarioSpace, p: &DensityVector, lambda: f64) -> Result<f64> {
    Solver::new(spec, space)?.penalised_gap(p, lambda)
}
