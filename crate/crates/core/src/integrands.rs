//! Convex integrands β(r, s), their conjugates and Bregman increments.
//!
//! An integrand is either *autonomous* (β(r, s) = f(s), giving an
//! f-divergence when μ = P0) or *Bregman-lifted* by a reference density t(r),
//! in which case β(r, s) = Δ_f(s, t(r)) and the functional is the Bregman
//! distance from the reference.
//!
//! Every generator is supplied in closed form (f, f', f*, (f*)' and the
//! limits f(0), f'(0), f'(+∞)); nothing here conjugates numerically.
//!
//! Extended reals use IEEE semantics. β(r, s) = +∞ for s < 0 and β(r, 0) is
//! the limit from the right.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::ScenarioSpace;

/// Built-in strictly convex generators, normalised so that f(1) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// f(s) = s log s.
    Kl,
    /// f(s) = -log s.
    Burg,
    /// f(s) = s² - 1.
    Squared,
    /// f(s) = (s - 1)².
    Chi2,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::Kl, Generator::Burg, Generator::Squared, Generator::Chi2];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Kl => "kl",
            Generator::Burg => "burg",
            Generator::Squared => "squared",
            Generator::Chi2 => "chi2",
        }
    }

    /// f(s), with f(s) = +∞ for s < 0 and f(0) the right limit.
    pub fn f(self, s: f64) -> f64 {
        if s < 0.0 {
            return f64::INFINITY;
        }
        if s == 0.0 {
            return self.f_at_zero();
        }
        match self {
            Generator::Kl => {
                if s.is_infinite() {
                    f64::INFINITY
                } else {
                    s * s.ln()
                }
            }
            Generator::Burg => -s.ln(),
            Generator::Squared => s * s - 1.0,
            Generator::Chi2 => (s - 1.0) * (s - 1.0),
        }
    }

    pub fn f_at_zero(self) -> f64 {
        match self {
            Generator::Kl => 0.0,
            Generator::Burg => f64::INFINITY,
            Generator::Squared => -1.0,
            Generator::Chi2 => 1.0,
        }
    }

    /// f'(s) for s > 0; the limits at 0 and +∞ are returned at the endpoints.
    pub fn f_prime(self, s: f64) -> f64 {
        if s == 0.0 {
            return self.f_prime_at_zero();
        }
        if s == f64::INFINITY {
            return self.f_prime_at_inf();
        }
        match self {
            Generator::Kl => s.ln() + 1.0,
            Generator::Burg => -1.0 / s,
            Generator::Squared => 2.0 * s,
            Generator::Chi2 => 2.0 * (s - 1.0),
        }
    }

    pub fn f_prime_at_zero(self) -> f64 {
        match self {
            Generator::Kl | Generator::Burg => f64::NEG_INFINITY,
            Generator::Squared => 0.0,
            Generator::Chi2 => -2.0,
        }
    }

    pub fn f_prime_at_inf(self) -> f64 {
        match self {
            Generator::Burg => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// lim f(s)/s as s → +∞.
    pub fn linear_growth(self) -> f64 {
        match self {
            Generator::Burg => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn is_cofinite(self) -> bool {
        self.linear_growth() == f64::INFINITY
    }

    /// Convex conjugate f*(τ) = sup_s (sτ - f(s)).
    pub fn conjugate(self, tau: f64) -> f64 {
        match self {
            Generator::Kl => (tau - 1.0).exp(),
            Generator::Burg => {
                if tau < 0.0 {
                    -1.0 - (-tau).ln()
                } else {
                    f64::INFINITY
                }
            }
            Generator::Squared => {
                if tau <= 0.0 {
                    1.0
                } else {
                    0.25 * tau * tau + 1.0
                }
            }
            Generator::Chi2 => {
                if tau <= -2.0 {
                    -1.0
                } else {
                    tau + 0.25 * tau * tau
                }
            }
        }
    }

    /// (f*)'(τ), extended by +∞ at and beyond f'(+∞).
    pub fn conjugate_deriv(self, tau: f64) -> f64 {
        match self {
            Generator::Kl => (tau - 1.0).exp(),
            Generator::Burg => {
                if tau < 0.0 {
                    -1.0 / tau
                } else {
                    f64::INFINITY
                }
            }
            Generator::Squared => 0.5 * tau.max(0.0),
            Generator::Chi2 => (1.0 + 0.5 * tau).max(0.0),
        }
    }

    /// Δ_f(s, t) = f(s) - f(t) - f'(t)(s - t) for s, t ≥ 0, with the limit
    /// conventions at t = 0: when f(0) = +∞ or f'(0) = -∞, Δ_f(0, 0) = 0 and
    /// Δ_f(s, 0) = +∞ for s > 0.
    pub fn delta(self, s: f64, t: f64) -> f64 {
        if s < 0.0 || t < 0.0 || s.is_nan() || t.is_nan() {
            return f64::INFINITY;
        }
        if t == 0.0 && (self.f_at_zero() == f64::INFINITY || self.f_prime_at_zero() == f64::NEG_INFINITY) {
            return if s == 0.0 { 0.0 } else { f64::INFINITY };
        }
        if s.is_infinite() {
            return f64::INFINITY;
        }
        let d = match self {
            Generator::Kl => {
                if s == 0.0 {
                    t
                } else {
                    s * (s / t).ln() - s + t
                }
            }
            Generator::Burg => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    let x = s / t;
                    (x - 1.0) - (x - 1.0).ln_1p()
                }
            }
            Generator::Squared | Generator::Chi2 => (s - t) * (s - t),
        };
        d.max(0.0)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kl" => Ok(Generator::Kl),
            "burg" => Ok(Generator::Burg),
            "squared" => Ok(Generator::Squared),
            "chi2" => Ok(Generator::Chi2),
            other => Err(Error::Validation(format!(
                "unknown divergence '{other}' (expected kl, burg, squared or chi2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    FDivergence,
    Bregman,
}

/// Precomputed Bregman lift by a reference value t: β(s) = Δ_f(s, t).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lift {
    t: f64,
    f_t: f64,
    fp_t: f64,
}

/// The section s ↦ β(r, s) of an integrand at one point r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    generator: Generator,
    lift: Option<Lift>,
}

impl Section {
    pub fn autonomous(generator: Generator) -> Self {
        Self { generator, lift: None }
    }

    /// Lifts `generator` by the reference value `t ≥ 0` (t may be +∞ at
    /// support limits, where only the derivative limits are meaningful).
    pub fn lifted(generator: Generator, t: f64) -> Self {
        let lift = Lift {
            t,
            f_t: generator.f(t),
            fp_t: generator.f_prime(t),
        };
        Self {
            generator,
            lift: Some(lift),
        }
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    /// β(r, s).
    pub fn value(&self, s: f64) -> f64 {
        match self.lift {
            None => self.generator.f(s),
            Some(l) => self.generator.delta(s, l.t),
        }
    }

    /// β'(r, s) for s > 0 (limits at the endpoints).
    pub fn deriv(&self, s: f64) -> f64 {
        let fp = self.generator.f_prime(s);
        match self.lift {
            None => fp,
            Some(l) => lifted_difference(fp, l.fp_t),
        }
    }

    /// β*(r, τ).
    pub fn conjugate(&self, tau: f64) -> f64 {
        match self.lift {
            None => self.generator.conjugate(tau),
            Some(l) => {
                let inner = self.generator.conjugate(tau + l.fp_t);
                if inner == f64::INFINITY {
                    return f64::INFINITY;
                }
                inner + l.f_t - l.fp_t * l.t
            }
        }
    }

    /// (β*)'(r, τ), returning +∞ where τ ≥ β'(r, +∞) is finite.
    pub fn conjugate_deriv_extended(&self, tau: f64) -> f64 {
        match self.lift {
            None => self.generator.conjugate_deriv(tau),
            Some(l) => self.generator.conjugate_deriv(tau + l.fp_t),
        }
    }

    /// (β*)'(r, τ); defined only below a finite β'(r, +∞).
    pub fn conjugate_deriv(&self, tau: f64) -> Result<f64> {
        let (_, upper) = self.deriv_limits();
        if upper.is_finite() && tau >= upper {
            return Err(Error::Domain(format!(
                "conjugate derivative undefined at tau={tau} >= beta'(r,+inf)={upper}"
            )));
        }
        Ok(self.conjugate_deriv_extended(tau))
    }

    /// (β'(r, 0), β'(r, +∞)).
    pub fn deriv_limits(&self) -> (f64, f64) {
        let g = self.generator;
        match self.lift {
            None => (g.f_prime_at_zero(), g.f_prime_at_inf()),
            Some(l) => (
                lifted_difference(g.f_prime_at_zero(), l.fp_t),
                lifted_difference(g.f_prime_at_inf(), l.fp_t),
            ),
        }
    }

    /// Δ_{β(r,·)}(s, t). Linear terms cancel, so this is Δ_f(s, t) in both modes.
    pub fn delta(&self, s: f64, t: f64) -> f64 {
        self.generator.delta(s, t)
    }
}

// f'(x) - f'(t) where an infinite f'(x) dominates any reference slope.
fn lifted_difference(fp_x: f64, fp_t: f64) -> f64 {
    if fp_x.is_infinite() {
        fp_x
    } else {
        fp_x - fp_t
    }
}

/// A convex integrand family, optionally Bregman-lifted by a per-atom
/// reference density.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandSpec {
    generator: Generator,
    mode: Mode,
    reference: Option<Vec<f64>>,
    sections: Vec<Section>,
}

impl IntegrandSpec {
    pub fn f_divergence(generator: Generator) -> Self {
        Self {
            generator,
            mode: Mode::FDivergence,
            reference: None,
            sections: Vec::new(),
        }
    }

    /// Bregman distance from `reference`. When f'(0) = -∞ the reference
    /// must be strictly positive at every atom.
    pub fn bregman(generator: Generator, reference: Vec<f64>) -> Result<Self> {
        if reference.is_empty() {
            return Err(Error::Validation("reference density is empty".into()));
        }
        for (i, &t) in reference.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Validation(format!(
                    "reference density must be finite and nonnegative (atom {i}: {t})"
                )));
            }
            if t == 0.0 && generator.f_prime_at_zero() == f64::NEG_INFINITY {
                return Err(Error::Validation(format!(
                    "{generator} Bregman mode needs a strictly positive reference density (atom {i} is 0)"
                )));
            }
        }
        let sections = reference.iter().map(|&t| Section::lifted(generator, t)).collect();
        Ok(Self {
            generator,
            mode: Mode::Bregman,
            reference: Some(reference),
            sections,
        })
    }

    /// Bregman distance from the space's default density.
    pub fn bregman_over(generator: Generator, space: &ScenarioSpace) -> Result<Self> {
        Self::bregman(generator, space.default_density().to_vec())
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_autonomous(&self) -> bool {
        self.mode == Mode::FDivergence
    }

    pub fn reference_density(&self) -> Option<&[f64]> {
        self.reference.as_deref()
    }

    /// lim f(s)/s as s → +∞.
    pub fn c(&self) -> f64 {
        self.generator.linear_growth()
    }

    pub fn cofinite(&self) -> bool {
        self.generator.is_cofinite()
    }

    pub fn f_prime_at_zero(&self) -> f64 {
        self.generator.f_prime_at_zero()
    }

    pub fn f_prime_at_inf(&self) -> f64 {
        self.generator.f_prime_at_inf()
    }

    /// Number of atoms this spec is bound to; `None` for autonomous specs.
    pub fn bound_len(&self) -> Option<usize> {
        self.reference.as_ref().map(Vec::len)
    }

    /// Checks that the integrand can be evaluated on a space with `n` atoms.
    pub fn check_bound(&self, n: usize) -> Result<()> {
        match self.bound_len() {
            Some(len) if len != n => Err(Error::Dimension { expected: len, got: n }),
            _ => Ok(()),
        }
    }

    /// The section β(r, ·) at atom `atom`.
    ///
    /// Panics if the integrand is Bregman-lifted and `atom` is out of range.
    pub fn section(&self, atom: usize) -> Section {
        match self.mode {
            Mode::FDivergence => Section::autonomous(self.generator),
            Mode::Bregman => self.sections[atom],
        }
    }

    /// The section at a massless support limit with default density `p0`.
    pub fn limit_section(&self, p0: f64) -> Section {
        match self.mode {
            Mode::FDivergence => Section::autonomous(self.generator),
            Mode::Bregman => Section::lifted(self.generator, p0),
        }
    }

    pub fn beta_value(&self, atom: usize, s: f64) -> f64 {
        self.section(atom).value(s)
    }

    pub fn beta_conjugate(&self, atom: usize, tau: f64) -> f64 {
        self.section(atom).conjugate(tau)
    }

    pub fn beta_conjugate_deriv(&self, atom: usize, tau: f64) -> Result<f64> {
        self.section(atom).conjugate_deriv(tau)
    }

    pub fn beta_deriv_limits(&self, atom: usize) -> (f64, f64) {
        self.section(atom).deriv_limits()
    }

    pub fn bregman_delta(&self, atom: usize, s: f64, t: f64) -> f64 {
        self.section(atom).delta(s, t)
    }
}
