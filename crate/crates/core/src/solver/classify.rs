//! Existence classification for worst-case densities.

use std::fmt;

use super::search::bisect;
use super::{InnerCase, Solver};
use crate::error::{Error, Result};
use crate::sum::pairwise;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    AlwaysWcd,
    Critical,
    NeverWcdObserved,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::AlwaysWcd => "ALWAYS_WCD",
            Regime::Critical => "CRITICAL",
            Regime::NeverWcdObserved => "NEVER_WCD_OBSERVED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyReport {
    pub regime: Regime,
    pub k_critical: Option<f64>,
    pub theta_tilde_min: Option<f64>,
    /// Left endpoint of the θ2-domain, −∞ when unbounded.
    pub theta_min: f64,
    /// Supremum of θ2 where the mass function g is finite.
    pub sigma: Option<f64>,
    /// (θ2, mass of q_θ2) at each probe.
    pub probe_grid: Vec<(f64, f64)>,
    /// Existence of a WCD at the requested k, if one was given.
    pub wcd_at_k_probe: Option<bool>,
    pub note: Option<String>,
}

pub(super) struct AutonomousCritical {
    pub theta_tilde: f64,
    pub sigma: f64,
    pub k_critical: f64,
}

const BISECT_TOL: f64 = 1e-14;
const BISECT_ITER: usize = 400;

impl Solver<'_> {
    fn probe_thetas(&self) -> Vec<f64> {
        let n = self.tol.probe_count.max(2);
        let (hi, lo) = self.tol.probe_exponents;
        (0..n)
            .map(|j| {
                let e = hi as f64 + (lo as f64 - hi as f64) * j as f64 / (n - 1) as f64;
                -(2f64).powf(e)
            })
            .collect()
    }

    /// θ̃_min, σ and k̃_cr for an autonomous integrand with finite c, computed
    /// on the payoff-shifted space where m = 0. `None` when the mass function
    /// g is +∞ at every probe.
    pub(super) fn autonomous_critical(&self) -> Result<Option<AutonomousCritical>> {
        let c = self.spec.c();
        let shifted = self.space.with_payoff_shift(-self.space.m())?;
        let gen = self.spec.generator();
        let w = shifted.weights().to_vec();
        let x = shifted.payoffs().to_vec();
        let g = |t2: f64| pairwise(w.len(), |i| w[i] * gen.conjugate_deriv(c + t2 * x[i]));

        let probes = self.probe_thetas();
        let finite: Vec<f64> = probes.iter().copied().filter(|&t| g(t).is_finite()).collect();
        if finite.is_empty() {
            return Ok(None);
        }

        // g is increasing in θ2; σ is where it turns infinite.
        let sigma = match probes.iter().copied().filter(|&t| !g(t).is_finite()).reduce(f64::min) {
            None => 0.0,
            Some(inf_at) => {
                let finite_at = finite.iter().copied().filter(|&t| t < inf_at).fold(f64::NAN, f64::max);
                if finite_at.is_nan() {
                    return Ok(None);
                }
                bisect(|t| Ok(g(t).is_finite()), finite_at, inf_at, BISECT_TOL, BISECT_ITER)?.0
            }
        };

        let mut lo = -1.0;
        let mut n = 0;
        while !(g(lo) < 1.0) {
            lo *= 2.0;
            n += 1;
            if n > self.tol.max_expand {
                return Ok(None);
            }
        }
        // Walk right towards σ looking for g ≥ 1; if it never gets there, θ̃ = σ.
        let mut hi = lo;
        let mut n = 0;
        while !(g(hi) >= 1.0) && hi < sigma && n <= self.tol.max_expand {
            hi *= 0.5;
            n += 1;
        }
        let theta_tilde = if hi < sigma && g(hi) >= 1.0 {
            let (a, b) = bisect(|t| Ok(g(t) < 1.0), lo, hi, BISECT_TOL, BISECT_ITER)?;
            0.5 * (a + b)
        } else {
            sigma
        };

        let shifted_solver = Solver::with_tolerances(self.spec, &shifted, self.tol)?;
        let e = shifted_solver.solve_inner(theta_tilde)?;
        let k_critical = theta_tilde * e.payoff_moment - e.g_value;
        Ok(Some(AutonomousCritical {
            theta_tilde,
            sigma,
            k_critical,
        }))
    }

    /// Decides whether worst-case densities exist and, if so, up to which k.
    pub fn classify(&self, k_probe: Option<f64>) -> Result<ClassifyReport> {
        let wcd_at_k_probe = match k_probe {
            Some(k) => Some(self.value_at_k(k)?.is_wcd),
            None => None,
        };
        let thetas = self.probe_thetas();

        if self.spec.is_autonomous() {
            let probe_grid = self.probe_grid(&thetas)?;
            if self.spec.cofinite() {
                return Ok(ClassifyReport {
                    regime: Regime::AlwaysWcd,
                    k_critical: None,
                    theta_tilde_min: None,
                    theta_min: f64::NEG_INFINITY,
                    sigma: None,
                    probe_grid,
                    wcd_at_k_probe,
                    note: None,
                });
            }
            return Ok(match self.autonomous_critical()? {
                None => ClassifyReport {
                    regime: Regime::AlwaysWcd,
                    k_critical: None,
                    theta_tilde_min: None,
                    theta_min: f64::NEG_INFINITY,
                    sigma: None,
                    probe_grid,
                    wcd_at_k_probe,
                    note: Some("mass function infinite at every probe".into()),
                },
                Some(ac) => ClassifyReport {
                    regime: Regime::Critical,
                    k_critical: Some(ac.k_critical),
                    theta_tilde_min: Some(ac.theta_tilde),
                    theta_min: f64::NEG_INFINITY,
                    sigma: Some(ac.sigma),
                    probe_grid,
                    wcd_at_k_probe,
                    note: None,
                },
            });
        }

        let mut probe_grid = Vec::with_capacity(thetas.len());
        let mut cases = Vec::with_capacity(thetas.len());
        let mut outside = Vec::new();
        for &t in &thetas {
            match self.solve_inner(t) {
                Ok(e) => {
                    probe_grid.push((t, e.mass));
                    cases.push((t, e.case == InnerCase::Boundary && e.mass < 1.0));
                }
                Err(Error::Domain(_)) => outside.push(t),
                Err(e) => return Err(e),
            }
        }
        if cases.is_empty() {
            return Err(Error::Convergence("every probe lies outside the theta2-domain".into()));
        }

        let theta_min = match outside.iter().copied().fold(f64::NAN, f64::max) {
            x if x.is_nan() => f64::NEG_INFINITY,
            inside_bound => {
                let first_ok = cases
                    .iter()
                    .map(|c| c.0)
                    .filter(|&t| t > inside_bound)
                    .fold(f64::NAN, f64::min);
                let (_, hi) = bisect(
                    |t| Ok(matches!(self.solve_inner(t), Err(Error::Domain(_)))),
                    inside_bound,
                    first_ok,
                    BISECT_TOL,
                    BISECT_ITER,
                )?;
                hi
            }
        };

        let boundary_count = cases.iter().filter(|c| c.1).count();
        if boundary_count == cases.len() {
            return Ok(ClassifyReport {
                regime: Regime::NeverWcdObserved,
                k_critical: None,
                theta_tilde_min: None,
                theta_min,
                sigma: None,
                probe_grid,
                wcd_at_k_probe,
                note: Some(format!(
                    "boundary case with mass < 1 at all {} probes; evidential, not a proof",
                    cases.len()
                )),
            });
        }
        if boundary_count == 0 {
            let k_critical = if theta_min.is_finite() {
                let e = self.solve_inner(theta_min)?;
                let kc = theta_min * e.payoff_moment - e.g_value;
                kc.is_finite().then_some(kc)
            } else {
                None
            };
            return Ok(ClassifyReport {
                regime: if k_critical.is_some() {
                    Regime::Critical
                } else {
                    Regime::AlwaysWcd
                },
                k_critical,
                theta_tilde_min: None,
                theta_min,
                sigma: None,
                probe_grid,
                wcd_at_k_probe,
                note: None,
            });
        }

        // Mixed: densities for θ2 to the right of the most negative interior probe.
        let idx = cases.iter().rposition(|c| !c.1).expect("some interior probe");
        let interior_at = cases[idx].0;
        let boundary_at = cases
            .iter()
            .map(|c| c.0)
            .filter(|&t| t < interior_at)
            .fold(f64::NAN, f64::max);
        let transition = if boundary_at.is_nan() {
            interior_at
        } else {
            let (a, b) = bisect(
                |t| {
                    let e = self.solve_inner(t)?;
                    Ok(e.case == InnerCase::Boundary && e.mass < 1.0)
                },
                boundary_at,
                interior_at,
                BISECT_TOL,
                BISECT_ITER,
            )?;
            0.5 * (a + b)
        };
        let e = self.solve_inner(transition)?;
        Ok(ClassifyReport {
            regime: Regime::Critical,
            k_critical: Some(transition * e.payoff_moment - e.g_value),
            theta_tilde_min: Some(transition),
            theta_min,
            sigma: None,
            probe_grid,
            wcd_at_k_probe,
            note: Some("transition located between probes; boundary behaviour on both sides is evidential".into()),
        })
    }

    fn probe_grid(&self, thetas: &[f64]) -> Result<Vec<(f64, f64)>> {
        thetas.iter().map(|&t| Ok((t, self.solve_inner(t)?.mass))).collect()
    }
}

pub fn classify(
    spec: &crate::integrands::IntegrandSpec,
    space: &crate::scenario::ScenarioSpace,
    k_probe: Option<f64>,
) -> Result<ClassifyReport> {
    Solver::new(spec, space)?.classify(k_probe)
}
