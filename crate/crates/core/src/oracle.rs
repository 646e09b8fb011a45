//! Brute-force reference values on spaces with two or three atoms.
//!
//! Densities are enumerated through their mass fractions u_i = w_i p_i on
//! the simplex grid {j / resolution}, so unit mass holds exactly and no dual
//! quantity is involved.

use crate::error::{Error, Result};
use crate::integrands::IntegrandSpec;
use crate::scenario::ScenarioSpace;

const MIN_RESOLUTION: usize = 100;
// Absorbs rounding when a grid point sits exactly on the constraint.
const FEASIBILITY_SLACK: f64 = 1e-12;

fn check(spec: &IntegrandSpec, space: &ScenarioSpace, resolution: usize) -> Result<()> {
    spec.check_bound(space.len())?;
    if !(2..=3).contains(&space.len()) {
        return Err(Error::Size(format!("oracle handles 2 or 3 atoms, got {}", space.len())));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::Validation(format!(
            "resolution must be >= {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    Ok(())
}

/// Calls `visit(expectation, H)` for every grid density.
fn sweep<F: FnMut(f64, f64)>(spec: &IntegrandSpec, space: &ScenarioSpace, resolution: usize, mut visit: F) {
    let (w, x) = (space.weights(), space.payoffs());
    let n = resolution as f64;
    let term = |i: usize, j: usize| {
        let u = j as f64 / n;
        (u * x[i], w[i] * spec.beta_value(i, u / w[i]))
    };
    if space.len() == 2 {
        for j in 0..=resolution {
            let (e0, h0) = term(0, j);
            let (e1, h1) = term(1, resolution - j);
            visit(e0 + e1, h0 + h1);
        }
    } else {
        for j0 in 0..=resolution {
            let (e0, h0) = term(0, j0);
            for j1 in 0..=(resolution - j0) {
                let (e1, h1) = term(1, j1);
                let (e2, h2) = term(2, resolution - j0 - j1);
                visit(e0 + e1 + e2, h0 + h1 + h2);
            }
        }
    }
}

/// min E(p) subject to H(p) ≤ k over the grid.
pub fn brute_force_v(spec: &IntegrandSpec, space: &ScenarioSpace, k: f64, resolution: usize) -> Result<f64> {
    check(spec, space, resolution)?;
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("k must be >= 0, got {k}")));
    }
    let mut best = f64::INFINITY;
    sweep(spec, space, resolution, |e, h| {
        if h <= k + FEASIBILITY_SLACK && e < best {
            best = e;
        }
    });
    if best.is_infinite() {
        // Only p0 may be feasible at k = 0 and it need not lie on the grid.
        if k == 0.0 {
            return Ok(space.b0());
        }
        return Err(Error::Undefined(format!("no grid density has H <= {k}")));
    }
    Ok(best)
}

/// min H(p) subject to |E(p) − b| ≤ 1/resolution over the grid.
pub fn brute_force_f(spec: &IntegrandSpec, space: &ScenarioSpace, b: f64, resolution: usize) -> Result<f64> {
    check(spec, space, resolution)?;
    if !(space.m() <= b && b <= space.b0()) {
        return Err(Error::Domain(format!(
            "b={b} outside [m, b0] = [{}, {}]",
            space.m(),
            space.b0()
        )));
    }
    let band = 1.0 / resolution as f64;
    let mut best = f64::INFINITY;
    sweep(spec, space, resolution, |e, h| {
        if (e - b).abs() <= band && h < best {
            best = h;
        }
    });
    Ok(best)
}

/// min E(p) + λH(p) over the grid.
pub fn brute_force_w(spec: &IntegrandSpec, space: &ScenarioSpace, lambda: f64, resolution: usize) -> Result<f64> {
    check(spec, space, resolution)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    let mut best = f64::INFINITY;
    sweep(spec, space, resolution, |e, h| {
        let v = e + lambda * h;
        if v < best {
            best = v;
        }
    });
    Ok(best)
}
