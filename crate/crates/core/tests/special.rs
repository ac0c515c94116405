use std::f64::consts::PI;

use approx::assert_relative_eq;
use darboux::special::{beta, binomial, falling, gamma, ln_gamma, power_derivative};

#[test]
fn gamma_known_values() {
    assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
    assert_relative_eq!(gamma(1.5), 0.5 * PI.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(gamma(0.1), 9.513_507_698_668_732, max_relative = 1e-13);
}

#[test]
fn gamma_agrees_with_statrs() {
    for i in 1..60 {
        let x = 0.05 * i as f64 + 0.01;
        assert_relative_eq!(gamma(x), statrs::function::gamma::gamma(x), max_relative = 1e-12);
        assert_relative_eq!(
            ln_gamma(x + 3.0),
            statrs::function::gamma::ln_gamma(x + 3.0),
            max_relative = 1e-13
        );
    }
}

#[test]
fn beta_values() {
    assert_relative_eq!(beta(0.5, 0.5), PI, max_relative = 1e-14);
    assert_relative_eq!(beta(2.0, 0.5), 4.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(
        beta(0.7, 0.5),
        statrs::function::beta::beta(0.7, 0.5),
        max_relative = 1e-13
    );
}

#[test]
fn falling_and_power_derivative() {
    assert_eq!(falling(3.0, 4), 0.0);
    assert_relative_eq!(power_derivative(0.5, 2, 4.0), -0.25 * 4f64.powf(-1.5));
    assert_eq!(power_derivative(2.0, 3, 0.7), 0.0);
    assert_eq!(binomial(6, 2), 15.0);
    assert_eq!(binomial(2, 6), 0.0);
}
