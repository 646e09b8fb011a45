mod common;

use proptest::prelude::*;
use worstcase::{Generator, IntegrandSpec, Section};

// Numerical conjugation: coarse τ grid, then golden refinement of the best cell.
fn numeric_biconjugate(g: Generator, s: f64) -> f64 {
    let obj = |tau: f64| s * tau - g.conjugate(tau);
    let lo = -60.0f64;
    let hi = 60.0f64;
    let n = 24_000;
    let step = (hi - lo) / n as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = obj(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = (lo + step * (best_i as f64 - 1.0), lo + step * (best_i as f64 + 1.0));
    let r = 0.618_033_988_749_894_9;
    for _ in 0..200 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if obj(x1) >= obj(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(obj(0.5 * (a + b)))
}

#[test]
fn conjugacy_round_trip() {
    for g in Generator::ALL {
        for j in 0..=25 {
            let s = 10f64.powf(-3.0 + 5.0 * j as f64 / 25.0);
            // KL and CHI2 at s = 100 need τ beyond the grid; the grid covers f'(s) for s ≤ 10.
            let tau_star = g.f_prime(s);
            if tau_star.abs() > 55.0 {
                continue;
            }
            let got = numeric_biconjugate(g, s);
            let want = g.f(s);
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                "{g} s={s}: {got} vs {want}"
            );
        }
    }
}

fn generator() -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::Kl),
        Just(Generator::Burg),
        Just(Generator::Squared),
        Just(Generator::Chi2)
    ]
}

fn section() -> impl Strategy<Value = Section> {
    (generator(), prop::option::of(0.01f64..20.0)).prop_map(|(g, t)| match t {
        None => Section::autonomous(g),
        Some(t) => Section::lifted(g, t),
    })
}

proptest! {
    #[test]
    fn conjugate_derivative_is_nondecreasing(sec in section(), a in -30.0f64..30.0, b in -30.0f64..30.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sec.conjugate_deriv_extended(lo) <= sec.conjugate_deriv_extended(hi));
    }

    #[test]
    fn conjugate_derivative_vanishes_below_lower_slope(sec in section(), d in 0.0f64..10.0) {
        let (lower, _) = sec.deriv_limits();
        if lower.is_finite() {
            prop_assert_eq!(sec.conjugate_deriv_extended(lower - d), 0.0);
        }
    }

    #[test]
    fn bregman_delta_nonnegative(g in generator(), s in 0.0f64..50.0, t in 0.0f64..50.0) {
        let d = g.delta(s, t);
        prop_assert!(d >= 0.0);
        if (s - t).abs() >= 1e-6 && t > 0.0 {
            prop_assert!(d > 0.0, "delta({s},{t}) = {d}");
        }
        prop_assert_eq!(g.delta(s, s), 0.0);
    }

    #[test]
    fn bregman_lifting(g in generator(), t in 0.01f64..20.0, tau in -20.0f64..20.0) {
        let spec = IntegrandSpec::bregman(g, vec![t]).unwrap();
        let direct = g.conjugate_deriv(tau + g.f_prime(t));
        match spec.beta_conjugate_deriv(0, tau) {
            Ok(v) => prop_assert!((v - direct).abs() <= 1e-12 * direct.abs().max(1.0)),
            Err(_) => prop_assert!(tau >= spec.beta_deriv_limits(0).1),
        }
    }

    #[test]
    fn fenchel_young(sec in section(), s in 0.001f64..20.0, tau in -10.0f64..10.0) {
        let lhs = sec.value(s) + sec.conjugate(tau);
        prop_assert!(lhs >= s * tau - 1e-9 * (s * tau).abs().max(1.0));
    }
}
