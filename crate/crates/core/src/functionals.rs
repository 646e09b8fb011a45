//! Integral functionals over a scenario space: H(p), the Bregman distance
//! B(p, q), the dual integral K(θ1, θ2), its gradient, the dual family
//! p_θ(r) = (β*)'(r, θ1 + θ2 X(r)), and the generalised Pythagorean
//! identity that ties them together.
//!
//! All sums use a fixed pairwise reduction order.

use crate::error::{Error, Result};
use crate::integrands::IntegrandSpec;
use crate::scenario::ScenarioSpace;
use crate::sum::pairwise;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPair {
    pub theta1: f64,
    pub theta2: f64,
}

impl ThetaPair {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    /// θ1 + θ2 x.
    pub fn tau(&self, x: f64) -> f64 {
        self.theta1 + self.theta2 * x
    }
}

fn check(spec: &IntegrandSpec, space: &ScenarioSpace, p: Option<&[f64]>) -> Result<()> {
    spec.check_bound(space.len())?;
    if let Some(p) = p {
        if p.len() != space.len() {
            return Err(Error::Dimension {
                expected: space.len(),
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// H(p) = Σ w_i β(r_i, p_i).
pub fn evaluate_h(spec: &IntegrandSpec, space: &ScenarioSpace, p: &[f64]) -> Result<f64> {
    check(spec, space, Some(p))?;
    let w = space.weights();
    Ok(pairwise(p.len(), |i| w[i] * spec.beta_value(i, p[i])))
}

/// B(p, q) = Σ w_i Δ_{β(r_i,·)}(p_i, q_i).
pub fn bregman_distance(spec: &IntegrandSpec, space: &ScenarioSpace, p: &[f64], q: &[f64]) -> Result<f64> {
    check(spec, space, Some(p))?;
    check(spec, space, Some(q))?;
    let w = space.weights();
    Ok(pairwise(p.len(), |i| w[i] * spec.bregman_delta(i, p[i], q[i])))
}

/// True when some support limit lies strictly inside the +∞-region of β*.
fn limit_outside(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> bool {
    space.limits().iter().any(|l| {
        let (_, upper) = spec.limit_section(l.default_density).deriv_limits();
        theta.tau(l.payoff) > upper
    })
}

/// K(θ) = Σ w_i β*(r_i, θ1 + θ2 x_i); +∞ when any atom (or support limit)
/// falls in the +∞-region of β*.
pub fn evaluate_k(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Result<f64> {
    check(spec, space, None)?;
    if limit_outside(spec, space, theta) {
        return Ok(f64::INFINITY);
    }
    let (w, x) = (space.weights(), space.payoffs());
    Ok(pairwise(space.len(), |i| {
        w[i] * spec.beta_conjugate(i, theta.tau(x[i]))
    }))
}

/// Membership in Θ: K finite, θ1 + θ2 x_i strictly below β'(r_i, +∞) at
/// every atom, and not above it at any support limit.
pub fn in_theta(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Result<bool> {
    check(spec, space, None)?;
    if !theta.theta1.is_finite() || !theta.theta2.is_finite() {
        return Ok(false);
    }
    let x = space.payoffs();
    let strict = (0..space.len()).all(|i| {
        let (_, upper) = spec.beta_deriv_limits(i);
        theta.tau(x[i]) < upper
    });
    Ok(strict && evaluate_k(spec, space, theta)?.is_finite())
}

fn require_theta(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Result<()> {
    if in_theta(spec, space, theta)? {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta=({}, {}) is outside the parameter set Theta",
            theta.theta1, theta.theta2
        )))
    }
}

/// The dual family member p_θ(r_i) = (β*)'(r_i, θ1 + θ2 x_i). Not
/// necessarily of unit mass.
pub fn family_density(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Result<Vec<f64>> {
    require_theta(spec, space, theta)?;
    Ok(family_values(spec, space, theta))
}

pub(crate) fn family_values(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Vec<f64> {
    let x = space.payoffs();
    (0..space.len())
        .map(|i| spec.section(i).conjugate_deriv_extended(theta.tau(x[i])))
        .collect()
}

/// (∂K/∂θ1, ∂K/∂θ2) = (∫ p_θ dμ, ∫ X p_θ dμ). At the boundary of dom K these
/// are the left partial derivatives.
pub fn k_gradient(spec: &IntegrandSpec, space: &ScenarioSpace, theta: ThetaPair) -> Result<(f64, f64)> {
    let q = family_density(spec, space, theta)?;
    Ok((space.total_mass(&q)?, space.expectation(&q)?))
}

/// LHS − RHS of the generalised Pythagorean identity
///
/// ```text
/// H(p) = θ1·∫p + θ2·∫Xp − K(θ) + B(p, p_θ) + ∫ |β'(r,0) − θ1 − θ2 X|₊ p dμ
/// ```
///
/// For a density ∫p = 1 and this is the usual form.
pub fn pythagorean_residual(spec: &IntegrandSpec, space: &ScenarioSpace, p: &[f64], theta: ThetaPair) -> Result<f64> {
    require_theta(spec, space, theta)?;
    let h = evaluate_h(spec, space, p)?;
    if !h.is_finite() {
        return Err(Error::Undefined("H(p) is infinite".into()));
    }
    let expectation = space.expectation(p)?;
    if !expectation.is_finite() {
        return Err(Error::Undefined("expectation of p is not finite".into()));
    }
    let mass = space.total_mass(p)?;
    let k = evaluate_k(spec, space, theta)?;
    let q = family_values(spec, space, theta);
    let b = bregman_distance(spec, space, p, &q)?;
    let (w, x) = (space.weights(), space.payoffs());
    let positive_part = pairwise(p.len(), |i| {
        if p[i] == 0.0 {
            return 0.0;
        }
        let (lower, _) = spec.beta_deriv_limits(i);
        w[i] * (lower - theta.tau(x[i])).max(0.0) * p[i]
    });
    let rhs = theta.theta1 * mass + theta.theta2 * expectation - k + b + positive_part;
    Ok(h - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrands::Generator;
    use crate::scenario::Atom;

    fn kl2pt() -> ScenarioSpace {
        ScenarioSpace::build_discrete(vec![
            Atom::new("a", 0.0, 0.5, 0.0, 1.0),
            Atom::new("b", 1.0, 0.5, 1.0, 1.0),
        ])
        .unwrap()
    }

    fn burg2r() -> ScenarioSpace {
        ScenarioSpace::build_quadrature(0.0, 1.0, 200, |r| 2.0 * r, |r| r, |_| 1.0).unwrap()
    }

    fn fdiv(g: Generator) -> IntegrandSpec {
        IntegrandSpec::f_divergence(g)
    }

    #[test]
    fn h_examples() {
        let s = kl2pt();
        for g in Generator::ALL {
            assert_eq!(evaluate_h(&fdiv(g), &s, &[1.0, 1.0]).unwrap(), 0.0, "{g}");
        }
        let h = evaluate_h(&fdiv(Generator::Kl), &s, &[2.0, 0.0]).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
        assert_eq!(
            evaluate_h(&fdiv(Generator::Burg), &s, &[2.0, 0.0]).unwrap(),
            f64::INFINITY
        );
        assert!(evaluate_h(&fdiv(Generator::Kl), &s, &[1.0]).is_err());
    }

    #[test]
    fn bregman_distance_examples() {
        let s = kl2pt();
        let sq = fdiv(Generator::Squared);
        assert_eq!(bregman_distance(&sq, &s, &[2.0, 0.0], &[2.0, 0.0]).unwrap(), 0.0);
        assert_eq!(bregman_distance(&sq, &s, &[2.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);

        let space = burg2r();
        let ones = vec![1.0; space.len()];
        let q: Vec<f64> = space.coordinates().iter().map(|r| 1.0 / (4.0 * r)).collect();
        let b = bregman_distance(&fdiv(Generator::Burg), &space, &ones, &q).unwrap();
        let expected = -(4f64.ln()) + 13.0 / 6.0;
        assert!((b - expected).abs() < 1e-7, "{b} vs {expected}");
    }

    #[test]
    fn k_examples() {
        let s = kl2pt();
        assert_eq!(
            evaluate_k(&fdiv(Generator::Kl), &s, ThetaPair::new(1.0, 0.0)).unwrap(),
            1.0
        );
        let space = burg2r();
        let burg = fdiv(Generator::Burg);
        let k = evaluate_k(&burg, &space, ThetaPair::new(0.0, -2.0)).unwrap();
        assert!((k - (-0.5 - 2f64.ln())).abs() < 1e-8, "{k}");
        assert_eq!(
            evaluate_k(&burg, &space, ThetaPair::new(0.5, -0.2)).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn support_limit_truncates_domain() {
        // Every atom is fine at θ1 = 1e-7, but the limit r = 0 is not.
        let space = burg2r();
        let theta = ThetaPair::new(1e-7, -4.0);
        let x = space.payoffs();
        assert!(x.iter().all(|&xi| theta.tau(xi) < 0.0));
        assert_eq!(
            evaluate_k(&fdiv(Generator::Burg), &space, theta).unwrap(),
            f64::INFINITY
        );
        assert!(in_theta(&fdiv(Generator::Burg), &space, ThetaPair::new(0.0, -4.0)).unwrap());
    }

    #[test]
    fn gradient_examples() {
        let s = kl2pt();
        assert_eq!(
            k_gradient(&fdiv(Generator::Kl), &s, ThetaPair::new(1.0, 0.0)).unwrap(),
            (1.0, 0.5)
        );
        let space = burg2r();
        let burg = fdiv(Generator::Burg);
        let (mass, _) = k_gradient(&burg, &space, ThetaPair::new(0.0, -4.0)).unwrap();
        assert!((mass - 0.5).abs() < 1e-12);
        let (mass, _) = k_gradient(&burg, &space, ThetaPair::new(0.0, -2.0)).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(matches!(
            k_gradient(&burg, &space, ThetaPair::new(0.1, -2.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn family_density_examples() {
        // exponential tilting on the two-point space
        let s = kl2pt();
        let t2: f64 = -0.7;
        let lambda = (0.5 + 0.5 * t2.exp()).ln();
        let q = family_density(&fdiv(Generator::Kl), &s, ThetaPair::new(1.0 - lambda, t2)).unwrap();
        for (qi, xi) in q.iter().zip(s.payoffs()) {
            assert!((qi - (t2 * xi - lambda).exp()).abs() < 1e-15);
        }
        assert!((s.total_mass(&q).unwrap() - 1.0).abs() < 1e-15);

        let space = burg2r();
        let q = family_density(&fdiv(Generator::Burg), &space, ThetaPair::new(0.0, -4.0)).unwrap();
        for (qi, r) in q.iter().zip(space.coordinates()) {
            assert!((qi - 1.0 / (4.0 * r)).abs() <= 1e-12 * qi);
        }

        let q = family_density(&fdiv(Generator::Squared), &s, ThetaPair::new(-1.0, -1.0)).unwrap();
        assert_eq!(q, vec![0.0, 0.0]);
    }

    #[test]
    fn pythagorean_examples() {
        let s = kl2pt();
        let r = pythagorean_residual(&fdiv(Generator::Kl), &s, &[2.0, 0.0], ThetaPair::new(1.0, -1.0)).unwrap();
        assert!(r.abs() < 1e-12, "{r}");

        let sq = fdiv(Generator::Squared);
        let theta = ThetaPair::new(-1.0, -1.0);
        let r = pythagorean_residual(&sq, &s, &[2.0, 0.0], theta).unwrap();
        assert!(r.abs() < 1e-12, "{r}");
        // the positive-part term carries the identity: dropping it breaks it
        let k = evaluate_k(&sq, &s, theta).unwrap();
        let b = bregman_distance(&sq, &s, &[2.0, 0.0], &[0.0, 0.0]).unwrap();
        let h = evaluate_h(&sq, &s, &[2.0, 0.0]).unwrap();
        assert!((h - (theta.theta1 + theta.theta2 * 0.0 - k + b)).abs() > 0.5);

        // p = p_θ when p_θ is a density
        let t2: f64 = 0.4;
        let lambda = (0.5 + 0.5 * t2.exp()).ln();
        let theta = ThetaPair::new(1.0 - lambda, t2);
        let q = family_density(&fdiv(Generator::Kl), &s, theta).unwrap();
        let r = pythagorean_residual(&fdiv(Generator::Kl), &s, &q, theta).unwrap();
        assert!(r.abs() < 1e-14);
    }

    #[test]
    fn pythagorean_requires_finite_h() {
        let s = kl2pt();
        let err =
            pythagorean_residual(&fdiv(Generator::Burg), &s, &[2.0, 0.0], ThetaPair::new(-1.0, -0.5)).unwrap_err();
        assert!(matches!(err, Error::Undefined(_)));
    }
}
