//! The dual machinery: the curve G(θ2) = min_θ1 [K(θ1, θ2) − θ1], the
//! worst-case value V(k) as the slope of the supporting line to G through
//! (0, −k), the penalised value W(λ) = −λ G(−1/λ), the rate function
//! F(b) = G*(b), and the worst-case localiser.

mod certify;
mod classify;
pub(crate) mod search;

use std::cell::OnceCell;
use std::fmt;

use crate::error::{Error, Result};
use crate::functionals::{evaluate_h, ThetaPair};
use crate::integrands::{IntegrandSpec, Section};
use crate::scenario::ScenarioSpace;
use crate::sum::pairwise;

pub use certify::{certify_awcd, penalised_gap, AwcdCertificate};
pub use classify::{classify, ClassifyReport, Regime};

use search::{bracket_negative_max, golden_max, Bracket};

/// Numerical tolerances and search budgets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// |∫q dμ − 1| accepted as unit mass.
    pub tol_mass: f64,
    /// Relative width at which golden-section search on θ2 stops.
    pub tol_theta2: f64,
    /// Geometric bracket expansions before giving up.
    pub max_expand: usize,
    /// Number of log-spaced θ2 probes used by `classify`.
    pub probe_count: usize,
    /// Probe range [-2^hi, -2^lo] in base-2 exponents.
    pub probe_exponents: (i32, i32),
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_mass: 1e-10,
            tol_theta2: 1e-10,
            max_expand: 200,
            probe_count: 64,
            probe_exponents: (20, -10),
        }
    }
}

const STANDING_TOL: f64 = 1e-8;
const GOLDEN_MAX_ITER: usize = 400;
const BISECT_MAX_ITER: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerCase {
    /// θ1* solves ∫ p_θ dμ = 1.
    Interior,
    /// θ1* sits on the boundary of dom K with ∫ p_θ dμ < 1.
    Boundary,
}

impl fmt::Display for InnerCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InnerCase::Interior => "INTERIOR",
            InnerCase::Boundary => "BOUNDARY",
        })
    }
}

/// One point of the dual curve.
#[derive(Debug, Clone, PartialEq)]
pub struct GEval {
    pub theta2: f64,
    pub g_value: f64,
    pub theta1_star: f64,
    pub case: InnerCase,
    /// ∫ q_θ2 dμ.
    pub mass: f64,
    /// ∫ X q_θ2 dμ, the derivative of G along the curve.
    pub payoff_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrivialBranch {
    None,
    KZero,
    KGeKmax,
}

impl fmt::Display for TrivialBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrivialBranch::None => "NONE",
            TrivialBranch::KZero => "K_ZERO",
            TrivialBranch::KGeKmax => "K_GE_KMAX",
        })
    }
}

/// V(k) together with the worst-case localiser q̂_k.
///
/// On the `KGeKmax` branch no localiser exists: `localiser` is empty and
/// both θ fields are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseReport {
    pub k: f64,
    pub v: f64,
    pub theta2_star: f64,
    pub theta1_star: f64,
    pub localiser: Vec<f64>,
    pub localiser_mass: f64,
    pub is_density: bool,
    pub is_wcd: bool,
    pub trivial_branch: TrivialBranch,
    pub k_max: f64,
    /// F(v) − k; zero up to solver tolerance on the non-trivial branch.
    pub f_residual: f64,
}

/// Solver bound to one integrand and one scenario space.
///
/// Caches k_max and the critical threshold after first use, so it is not
/// `Sync`; build one per thread.
pub struct Solver<'a> {
    spec: &'a IntegrandSpec,
    space: &'a ScenarioSpace,
    tol: Tolerances,
    sections: Vec<Section>,
    limit_sections: Vec<(Section, f64)>,
    k_max: OnceCell<f64>,
    critical: OnceCell<Option<f64>>,
}

impl<'a> Solver<'a> {
    pub fn new(spec: &'a IntegrandSpec, space: &'a ScenarioSpace) -> Result<Self> {
        Self::with_tolerances(spec, space, Tolerances::default())
    }

    /// Validates the binding and the standing assumption H(p0) = 0.
    pub fn with_tolerances(spec: &'a IntegrandSpec, space: &'a ScenarioSpace, tol: Tolerances) -> Result<Self> {
        spec.check_bound(space.len())?;
        let h0 = evaluate_h(spec, space, space.default_density())?;
        if !(h0.abs() <= STANDING_TOL) {
            return Err(Error::Validation(format!(
                "standing assumption H(p0) = 0 fails (H(p0) = {h0}); f-divergence mode needs p0 = 1 at every atom"
            )));
        }
        let sections = (0..space.len()).map(|i| spec.section(i)).collect();
        let limit_sections = space
            .limits()
            .iter()
            .map(|l| (spec.limit_section(l.default_density), l.payoff))
            .collect();
        Ok(Self {
            spec,
            space,
            tol,
            sections,
            limit_sections,
            k_max: OnceCell::new(),
            critical: OnceCell::new(),
        })
    }

    pub fn spec(&self) -> &IntegrandSpec {
        self.spec
    }

    pub fn space(&self) -> &ScenarioSpace {
        self.space
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn mass_at(&self, theta1: f64, theta2: f64) -> f64 {
        let (w, x) = (self.space.weights(), self.space.payoffs());
        pairwise(w.len(), |i| {
            w[i] * self.sections[i].conjugate_deriv_extended(theta1 + theta2 * x[i])
        })
    }

    // K over the atoms only; callers keep θ1 at or below `theta1_upper`, which
    // already respects the support limits.
    fn k_atoms(&self, theta1: f64, theta2: f64) -> f64 {
        let (w, x) = (self.space.weights(), self.space.payoffs());
        pairwise(w.len(), |i| w[i] * self.sections[i].conjugate(theta1 + theta2 * x[i]))
    }

    /// Supremum of θ1 over dom K(·, θ2): c − θ2·m for autonomous integrands
    /// (c − θ2·M when θ2 > 0), otherwise the smallest β'(r, +∞) − θ2 x over
    /// atoms and support limits.
    pub fn theta1_upper(&self, theta2: f64) -> f64 {
        if self.spec.is_autonomous() {
            let c = self.spec.c();
            if c.is_infinite() {
                return f64::INFINITY;
            }
            return if theta2 < 0.0 {
                c - theta2 * self.space.m()
            } else if theta2 > 0.0 {
                c - theta2 * self.space.M()
            } else {
                c
            };
        }
        let x = self.space.payoffs();
        let atoms = self
            .sections
            .iter()
            .zip(x)
            .map(|(s, &xi)| s.deriv_limits().1 - theta2 * xi);
        let limits = self
            .limit_sections
            .iter()
            .map(|(s, xl)| s.deriv_limits().1 - theta2 * xl);
        atoms
            .chain(limits)
            .fold(f64::INFINITY, |acc, v| if v.is_nan() { f64::NAN } else { acc.min(v) })
    }

    fn atoms_strictly_inside(&self, theta1: f64, theta2: f64) -> bool {
        let x = self.space.payoffs();
        self.sections
            .iter()
            .zip(x)
            .all(|(s, &xi)| theta1 + theta2 * xi < s.deriv_limits().1)
    }

    fn evaluate_at(&self, theta1: f64, theta2: f64, case: InnerCase) -> GEval {
        let q = self.family(theta1, theta2);
        let (w, x) = (self.space.weights(), self.space.payoffs());
        let mass = pairwise(q.len(), |i| w[i] * q[i]);
        let payoff_moment = pairwise(q.len(), |i| w[i] * q[i] * x[i]);
        GEval {
            theta2,
            g_value: self.k_atoms(theta1, theta2) - theta1,
            theta1_star: theta1,
            case,
            mass,
            payoff_moment,
        }
    }

    fn family(&self, theta1: f64, theta2: f64) -> Vec<f64> {
        let x = self.space.payoffs();
        self.sections
            .iter()
            .zip(x)
            .map(|(s, &xi)| s.conjugate_deriv_extended(theta1 + theta2 * xi))
            .collect()
    }

    /// Minimises K(θ1, θ2) − θ1 over θ1.
    ///
    /// The θ1-derivative is the mass of p_θ, continuous and increasing on
    /// dom K. If the mass at the upper end of the domain is still below one
    /// the minimiser is that endpoint; otherwise the unit-mass crossing is
    /// bracketed geometrically and bisected.
    pub fn solve_inner(&self, theta2: f64) -> Result<GEval> {
        if !theta2.is_finite() {
            return Err(Error::Domain(format!("theta2={theta2} is not finite")));
        }
        let upper = self.theta1_upper(theta2);
        if upper.is_nan() || upper == f64::NEG_INFINITY {
            return Err(Error::Domain(format!(
                "theta2={theta2} is outside Theta2 (empty theta1-domain)"
            )));
        }
        let tol = self.tol.tol_mass;
        let mass = |t1: f64| self.mass_at(t1, theta2);

        let mut hi;
        if upper.is_finite() {
            if self.atoms_strictly_inside(upper, theta2) && self.k_atoms(upper, theta2).is_finite() {
                let mu = mass(upper);
                if mu < 1.0 - tol {
                    return Ok(self.evaluate_at(upper, theta2, InnerCase::Boundary));
                }
                if mu <= 1.0 + tol {
                    return Ok(self.evaluate_at(upper, theta2, InnerCase::Interior));
                }
            }
            hi = upper;
        } else {
            hi = 1.0;
            let mut n = 0;
            while !(mass(hi) >= 1.0) {
                hi *= 2.0;
                n += 1;
                if n > self.tol.max_expand {
                    return Err(Error::Convergence(format!(
                        "unit mass not reached for theta2={theta2} up to theta1={hi}"
                    )));
                }
            }
        }

        let mut step = 1.0;
        let mut lo = hi - step;
        let mut n = 0;
        while !(mass(lo) < 1.0) {
            step *= 2.0;
            lo = hi - step;
            n += 1;
            if n > self.tol.max_expand {
                return Err(Error::Convergence(format!(
                    "mass stays >= 1 for theta2={theta2} down to theta1={lo}"
                )));
            }
        }

        for _ in 0..BISECT_MAX_ITER {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let mm = mass(mid);
            if (mm - 1.0).abs() <= tol {
                return Ok(self.evaluate_at(mid, theta2, InnerCase::Interior));
            }
            if mm < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Bracket collapsed to adjacent floats; lo is the admissible side.
        Ok(self.evaluate_at(lo, theta2, InnerCase::Interior))
    }

    /// G(θ2), with +∞ outside Θ2.
    pub fn g(&self, theta2: f64) -> Result<f64> {
        match self.solve_inner(theta2) {
            Ok(e) => Ok(e.g_value),
            Err(Error::Domain(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// The function q_θ2 at the inner minimiser.
    pub fn q_theta2(&self, theta2: f64) -> Result<(GEval, Vec<f64>)> {
        let e = self.solve_inner(theta2)?;
        let q = self.family(e.theta1_star, theta2);
        Ok((e, q))
    }

    /// W(λ) = −λ G(−1/λ).
    pub fn penalised_value(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        let e = self.solve_inner(-1.0 / lambda)?;
        Ok(-lambda * e.g_value)
    }

    /// F(b) = sup_{θ2 ≤ 0} [θ2 b − G(θ2)] for m ≤ b ≤ b0.
    pub fn f_of_b(&self, b: f64) -> Result<f64> {
        let (m, b0) = (self.space.m(), self.space.b0());
        if !(m <= b && b <= b0) {
            return Err(Error::Domain(format!("b={b} outside [m, b0] = [{m}, {b0}]")));
        }
        if b == b0 {
            return Ok(0.0);
        }
        let objective = |t2: f64| -> Result<f64> {
            let g = self.g(t2)?;
            Ok(if g.is_infinite() { f64::NEG_INFINITY } else { t2 * b - g })
        };
        match bracket_negative_max(objective, self.tol.max_expand)? {
            Bracket::Interior { left, right, .. } => {
                let (_, v) = golden_max(objective, left, right, self.tol.tol_theta2, GOLDEN_MAX_ITER)?;
                Ok(v)
            }
            // Increasing all the way to -∞: report the monotone limit if the tail has settled.
            Bracket::Unbounded { prev, last } => {
                if (last.1 - prev.1).abs() <= 1e-12 * last.1.abs().max(1.0) {
                    Ok(last.1)
                } else {
                    Ok(f64::INFINITY)
                }
            }
        }
    }

    /// lim_{b↓m} F(b), estimated from F(m + (b0 − m) 2^{-j}), j = 1..40.
    /// Reported as +∞ unless the last step changes by less than 1e-6
    /// relatively. Cached.
    pub fn k_max_estimate(&self) -> Result<f64> {
        if let Some(v) = self.k_max.get() {
            return Ok(*v);
        }
        let (m, b0) = (self.space.m(), self.space.b0());
        let mut prev = f64::NAN;
        let mut last = f64::NAN;
        for j in 1..=40 {
            let b = m + (b0 - m) * 2f64.powi(-j);
            let f = self.f_of_b(b)?;
            if f.is_infinite() {
                last = f64::INFINITY;
                break;
            }
            prev = last;
            last = f;
        }
        let stable = last.is_finite() && (last - prev).abs() < 1e-6 * last.abs();
        let k_max = if stable { last } else { f64::INFINITY };
        let _ = self.k_max.set(k_max);
        Ok(k_max)
    }

    /// V(k) and the worst-case localiser.
    pub fn value_at_k(&self, k: f64) -> Result<WorstCaseReport> {
        if !(k >= 0.0) {
            return Err(Error::Domain(format!("k must be >= 0, got {k}")));
        }
        let k_max = self.k_max_estimate()?;
        if k == 0.0 {
            let e = self.solve_inner(0.0)?;
            let p0 = self.space.default_density().to_vec();
            return Ok(WorstCaseReport {
                k,
                v: self.space.b0(),
                theta2_star: 0.0,
                theta1_star: e.theta1_star,
                localiser_mass: self.space.total_mass(&p0)?,
                localiser: p0,
                is_density: true,
                is_wcd: true,
                trivial_branch: TrivialBranch::KZero,
                k_max,
                f_residual: 0.0,
            });
        }
        if k >= k_max {
            return Ok(WorstCaseReport {
                k,
                v: self.space.m(),
                theta2_star: f64::NAN,
                theta1_star: f64::NAN,
                localiser: Vec::new(),
                localiser_mass: 0.0,
                is_density: false,
                is_wcd: false,
                trivial_branch: TrivialBranch::KGeKmax,
                k_max,
                f_residual: 0.0,
            });
        }

        let slope = |t2: f64| -> Result<f64> {
            let g = self.g(t2)?;
            Ok(if g.is_infinite() {
                f64::NEG_INFINITY
            } else {
                (k + g) / t2
            })
        };
        let (left, right) = match bracket_negative_max(slope, self.tol.max_expand)? {
            Bracket::Interior { left, right, .. } => (left, right),
            Bracket::Unbounded { last, .. } => {
                return Err(Error::Convergence(format!(
                    "supporting-line slope still increasing at theta2={} for k={k} < k_max={k_max}",
                    last.0
                )))
            }
        };
        let (theta2, v) = golden_max(slope, left, right, self.tol.tol_theta2, GOLDEN_MAX_ITER)?;
        let (e, q) = self.q_theta2(theta2)?;
        let is_density = (e.mass - 1.0).abs() <= self.tol.tol_mass;
        let beyond_critical = match self.critical_threshold()? {
            Some(kc) => k > kc,
            None => false,
        };
        let f_residual = self.f_of_b(v.clamp(self.space.m(), self.space.b0()))? - k;
        Ok(WorstCaseReport {
            k,
            v,
            theta2_star: theta2,
            theta1_star: e.theta1_star,
            localiser: q,
            localiser_mass: e.mass,
            is_density,
            is_wcd: is_density && !beyond_critical,
            trivial_branch: TrivialBranch::None,
            k_max,
            f_residual,
        })
    }

    /// k̃_cr for autonomous non-cofinite integrands; `None` otherwise or when
    /// the WCD exists for every k. Cached.
    fn critical_threshold(&self) -> Result<Option<f64>> {
        if let Some(v) = self.critical.get() {
            return Ok(*v);
        }
        let v = if self.spec.is_autonomous() && !self.spec.cofinite() {
            self.autonomous_critical()?.map(|c| c.k_critical)
        } else {
            None
        };
        let _ = self.critical.set(v);
        Ok(v)
    }
}

/// One-shot helpers mirroring the solver methods.
pub fn solve_inner(spec: &IntegrandSpec, space: &ScenarioSpace, theta2: f64) -> Result<GEval> {
    Solver::new(spec, space)?.solve_inner(theta2)
}

pub fn value_at_k(spec: &IntegrandSpec, space: &ScenarioSpace, k: f64) -> Result<WorstCaseReport> {
    Solver::new(spec, space)?.value_at_k(k)
}

pub fn penalised_value(spec: &IntegrandSpec, space: &ScenarioSpace, lambda: f64) -> Result<f64> {
    Solver::new(spec, space)?.penalised_value(lambda)
}

pub fn f_of_b(spec: &IntegrandSpec, space: &ScenarioSpace, b: f64) -> Result<f64> {
    Solver::new(spec, space)?.f_of_b(b)
}

pub fn k_max_estimate(spec: &IntegrandSpec, space: &ScenarioSpace) -> Result<f64> {
    Solver::new(spec, space)?.k_max_estimate()
}

/// The parameter pair of a G evaluation.
impl GEval {
    pub fn theta(&self) -> ThetaPair {
        ThetaPair::new(self.theta1_star, self.theta2)
    }
}
