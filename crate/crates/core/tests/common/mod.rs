#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use worstcase::{Atom, Generator, IntegrandSpec, ScenarioSpace, ThetaPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Random normalised weights.
pub fn weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}

/// Random space with distinct payoffs in [-2, 2]. With `reference`, p0 is a
/// random positive density; otherwise p0 ≡ 1.
pub fn random_space(rng: &mut impl Rng, n: usize, reference: bool) -> ScenarioSpace {
    loop {
        let w = weights(rng, n);
        let p0: Vec<f64> = if reference {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
            let mass: f64 = raw.iter().zip(&w).map(|(p, w)| p * w).sum();
            raw.into_iter().map(|p| p / mass).collect()
        } else {
            vec![1.0; n]
        };
        let atoms = (0..n)
            .map(|i| {
                let x = rng.gen_range(-2.0..2.0);
                Atom::new(format!("a{i}"), i as f64, w[i], x, p0[i])
            })
            .collect();
        if let Ok(space) = ScenarioSpace::build_discrete(atoms) {
            return space;
        }
    }
}

/// Random density; with `allow_zeros` some atoms may carry no mass.
pub fn random_density(rng: &mut impl Rng, space: &ScenarioSpace, allow_zeros: bool) -> Vec<f64> {
    let raw: Vec<f64> = (0..space.len())
        .map(|_| {
            if allow_zeros && rng.gen_bool(0.25) {
                0.0
            } else {
                rng.gen_range(0.05..3.0)
            }
        })
        .collect();
    let mass: f64 = raw.iter().zip(space.weights()).map(|(p, w)| p * w).sum();
    if mass == 0.0 {
        return space.default_density().to_vec();
    }
    raw.into_iter().map(|p| p / mass).collect()
}

/// Random θ strictly inside Θ, with θ1 + θ2 x kept in a moderate range.
pub fn random_theta(rng: &mut impl Rng, spec: &IntegrandSpec, space: &ScenarioSpace) -> ThetaPair {
    let theta2 = rng.gen_range(-1.5..1.5);
    let upper = (0..space.len())
        .map(|i| spec.beta_deriv_limits(i).1 - theta2 * space.payoffs()[i])
        .fold(f64::INFINITY, f64::min);
    let theta1 = if upper.is_finite() {
        upper - rng.gen_range(0.05..3.0)
    } else {
        rng.gen_range(-2.5..2.5)
    };
    ThetaPair::new(theta1, theta2)
}

pub fn spec_for(generator: Generator, bregman: bool, space: &ScenarioSpace) -> IntegrandSpec {
    if bregman {
        IntegrandSpec::bregman_over(generator, space).unwrap()
    } else {
        IntegrandSpec::f_divergence(generator)
    }
}
