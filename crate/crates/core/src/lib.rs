//! Worst-case expectations over divergence balls.
//!
//! Given a scenario space (atoms with μ-mass, payoff X and default density
//! p0) and a convex integrand β, computes
//!
//! ```text
//! V(k) = inf { ∫ X p dμ : p a density, H(p) = ∫ β(r, p(r)) dμ ≤ k }
//! ```
//!
//! through its two-parameter convex dual, together with the worst-case
//! localiser, the penalised value W(λ), the rate function F(b), existence
//! classification and almost-worst-case certification.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod functionals;
pub mod integrands;
pub mod io;
pub mod oracle;
pub mod presets;
pub mod scenario;
pub mod solver;
mod sum;

pub use error::{Error, Result};
pub use functionals::{
    bregman_distance, evaluate_h, evaluate_k, family_density, in_theta, k_gradient, pythagorean_residual, ThetaPair,
};
pub use integrands::{Generator, IntegrandSpec, Mode, Section};
pub use presets::Preset;
pub use scenario::{Atom, DensityVector, ScenarioSpace, SupportLimit};
pub use solver::{
    certify_awcd, classify, f_of_b, k_max_estimate, penalised_gap, penalised_value, solve_inner, value_at_k,
    AwcdCertificate, ClassifyReport, GEval, InnerCase, Regime, Solver, Tolerances, TrivialBranch, WorstCaseReport,
};
