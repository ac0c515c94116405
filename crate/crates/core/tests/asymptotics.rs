use std::f64::consts::PI;

use approx::assert_relative_eq;
use darboux::asymptotics::{
    c_constant, coefficient_a, coefficient_b, evaluate_expansion, expansion, h_function, log_moment_derivatives,
    low_order_g, remainder_order_fit, taylor_remainder, ExpansionTable, UniversalConstants, Which,
};
use darboux::goursat::{BoundaryData, Profile, SolutionField, TrianglePoint};
use darboux::oracle::khan_penrose_expansion;
use darboux::special::factorial;
use darboux::{Error, QuadratureConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn kp() -> BoundaryData {
    BoundaryData::khan_penrose()
}

/// V_0 = x^2, V_1 = y^3
fn poly() -> BoundaryData {
    BoundaryData::polynomial(&[0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap()
}

/// V_0 = x, V_1 = 0
fn linear() -> BoundaryData {
    BoundaryData::new(
        darboux::goursat::Trace::polynomial(&[1.0]).unwrap(),
        darboux::goursat::Trace::zero(),
    )
    .unwrap()
}

#[test]
fn c_values() {
    assert_eq!(c_constant(0), 1.0);
    assert_eq!(c_constant(1), 0.5);
    assert_eq!(c_constant(2), 0.75);
    assert_eq!(c_constant(3), 1.875);
}

#[test]
fn c_recurrence() {
    for j in 1..=12 {
        let rec = c_constant(j - 1) * (2 * j - 1) as f64 / 2.0;
        assert!((c_constant(j) - rec).abs() <= 4.0 * f64::EPSILON * rec);
        let product: f64 = (0..j).map(|l| (2 * l + 1) as f64).product::<f64>() / 2f64.powi(j as i32);
        assert_relative_eq!(c_constant(j), product, max_relative = 1e-15);
    }
}

#[test]
fn c_two_is_a_kernel_derivative() {
    // d^2/dt^2 (1 - t)^(-1/2) at t = 0
    let k1 = |t: f64| (1.0 - t).powf(-0.5);
    let h = 1e-3;
    let fd = (-k1(2.0 * h) + 16.0 * k1(h) - 30.0 * k1(0.0) + 16.0 * k1(-h) - k1(-2.0 * h)) / (12.0 * h * h);
    assert!((fd - c_constant(2)).abs() < 1e-6);
}

#[test]
fn constants_at_order_zero() {
    let u = UniversalConstants::get();
    let ln4 = 4f64.ln();
    assert!((u.tail_k0[0] - ln4).abs() < 1e-12);
    assert!((u.tail_k1[0] - ln4).abs() < 1e-12);
    assert!(u.max_order() >= 4);
}

#[test]
fn h_function_examples() {
    for k in [0.2, 0.5, 0.8] {
        assert_relative_eq!(
            h_function(&kp(), Which::H0, k, 0, &cfg()).unwrap(),
            -PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            h_function(&kp(), Which::H1, k, 0, &cfg()).unwrap(),
            -PI,
            max_relative = 1e-12
        );
        assert!(h_function(&kp(), Which::H0, k, 1, &cfg()).unwrap().abs() < 1e-9);
        let exact = 2.0 * k.sqrt() * (1.0 - k).sqrt();
        assert_relative_eq!(
            h_function(&linear(), Which::H0, k, 0, &cfg()).unwrap(),
            exact,
            max_relative = 1e-12
        );
    }
}

#[test]
fn taylor_remainder_examples() {
    for j in 0..=2 {
        assert!(taylor_remainder(&kp(), Which::H0, 0.4, 0.1, j, &cfg()).unwrap().abs() < 1e-9);
    }
    assert!(
        taylor_remainder(&linear(), Which::H0, 0.5, 0.5, 0, &cfg())
            .unwrap()
            .abs()
            < 1e-15
    );
    // vanishes like |x - k|^(j+1)
    let x = 0.4;
    for j in 0..=2usize {
        let ratios: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&d: &f64| taylor_remainder(&linear(), Which::H0, x, x - d, j, &cfg()).unwrap() / d.powi(j as i32 + 1))
            .collect();
        let h = h_function(&linear(), Which::H0, x, j + 1, &cfg()).unwrap();
        let limit = h / factorial(j + 1) * if j % 2 == 0 { -1.0 } else { 1.0 };
        assert!(
            (ratios[2] - limit).abs() < 1e-2 * limit.abs().max(1.0),
            "j={j}: {ratios:?} vs {limit}"
        );
    }
}

#[test]
fn khan_penrose_coefficient_tables() {
    for x in [0.25f64, 0.5, 0.75] {
        let a = |j| coefficient_a(&kp(), j, x, &cfg()).unwrap();
        let b = |j| coefficient_b(&kp(), j, x, &cfg()).unwrap();
        let y = 1.0 - x;
        assert!((a(0) + PI * (x.ln() + 4f64.ln())).abs() < 1e-8);
        assert!((a(1) - PI / (2.0 * x)).abs() < 1e-8);
        assert!((a(2) - 3.0 * PI / (16.0 * x * x)).abs() < 1e-8);
        assert!((b(0) + PI * (y.ln() + 4f64.ln())).abs() < 1e-8);
        assert!((b(1) - PI / (2.0 * y)).abs() < 1e-8);
        assert!((b(2) - 3.0 * PI / (16.0 * y * y)).abs() < 1e-8);
    }
}

#[test]
fn khan_penrose_expansion_matches_reference_coefficients() {
    for x in [0.25, 0.5, 0.75] {
        let t = expansion(&kp(), x, 2, &cfg()).unwrap();
        let reference = khan_penrose_expansion(x);
        for j in 0..3 {
            assert!((t.f[j] - reference[j]).abs() < 1e-8, "f_{j} at {x}");
            assert!((t.g[j] - reference[3 + j]).abs() < 1e-8, "g_{j} at {x}");
        }
    }
}

#[test]
fn zero_data_expands_to_zero() {
    let t = expansion(&BoundaryData::zero(), 0.3, 3, &cfg()).unwrap();
    assert_eq!(t, ExpansionTable::zero(0.3, 3));
    assert_eq!(evaluate_expansion(&ExpansionTable::zero(0.3, 3), 1e-3), 0.0);
}

#[test]
fn midpoint_expansion_value() {
    let t = expansion(&kp(), 0.5, 2, &cfg()).unwrap();
    let eps = 1e-3f64;
    let expected = 2.0 * eps.ln() - 4f64.ln() + 1.5 * eps * eps;
    assert!((evaluate_expansion(&t, eps) - expected).abs() < 1e-9);
    assert_eq!(t.f.len(), 3);
    assert_eq!(expansion(&kp(), 0.5, 0, &cfg()).unwrap().g.len(), 1);
}

#[test]
fn remainder_is_bounded_by_next_order() {
    let t = expansion(&kp(), 0.5, 2, &cfg()).unwrap();
    let f = SolutionField::new(kp(), cfg()).unwrap().with_eps_min(1e-4).unwrap();
    for eps in [1e-3f64, 3e-3, 1e-2] {
        let v = f.evaluate(TrianglePoint::new(0.5, 0.5 - eps).unwrap()).unwrap();
        let r = (v - evaluate_expansion(&t, eps)).abs();
        assert!(r <= 10.0 * eps.powi(3) * eps.ln().abs(), "eps={eps}: {r:e}");
    }
}

#[test]
fn low_order_cross_check() {
    let data = poly();
    for x in [0.3, 0.5, 0.7] {
        let t = expansion(&data, x, 1, &cfg()).unwrap();
        let h0 = |j| h_function(&data, Which::H0, x, j, &cfg()).unwrap();
        let h1 = |j| h_function(&data, Which::H1, x, j, &cfg()).unwrap();
        assert_relative_eq!(t.f[0], -(h0(0) + h1(0)) / PI, epsilon = 1e-10);
        assert_relative_eq!(t.f[1], -(h0(1) + h1(1)) / (2.0 * PI), epsilon = 1e-10);
        let [g0, g1] = low_order_g(&data, x, &cfg()).unwrap();
        assert!((t.g[0] - g0).abs() < 1e-7, "g0 at {x}: {} vs {g0}", t.g[0]);
        assert!((t.g[1] - g1).abs() < 1e-7, "g1 at {x}: {} vs {g1}", t.g[1]);
    }
}

#[test]
fn a0_equals_log_moment_derivative() {
    let data = poly();
    let x = 0.4;
    let (first, _) = log_moment_derivatives(&Profile::new(&data.v0), x, &cfg()).unwrap();
    let a0 = coefficient_a(&data, 0, x, &cfg()).unwrap();
    assert!((a0 - first).abs() < 1e-8, "{a0} vs {first}");
}

#[test]
fn swap_consistency() {
    let data = BoundaryData::combine(1.0, &kp(), 1.0, &poly());
    for x in [0.3, 0.6] {
        let t = expansion(&data, x, 2, &cfg()).unwrap();
        let s = expansion(&data.swapped(), x, 2, &cfg()).unwrap();
        for j in 0..=2 {
            assert!((t.g_swapped[j] - s.g[j]).abs() < 1e-8 * (1.0 + s.g[j].abs()));
        }
    }
}

#[test]
fn order_fit_zero_data_is_noise_floor() {
    let r = remainder_order_fit(&BoundaryData::zero(), 0.5, 1, (1e-3, 1e-2), 6, &cfg());
    assert!(matches!(r, Err(Error::DegenerateFit(_))));
}

#[test]
fn order_fit_rejects_bad_ranges() {
    let r = remainder_order_fit(&kp(), 0.5, 1, (1e-3, 1e-1), 6, &cfg());
    assert!(matches!(r, Err(Error::InvalidConfig(_))));
    let r = remainder_order_fit(&kp(), 0.5, 1, (1e-3, 1e-2), 4, &cfg());
    assert!(matches!(r, Err(Error::InvalidConfig(_))));
}

#[test]
fn order_fit_off_centre() {
    for j in 0..=2usize {
        let fit = remainder_order_fit(&kp(), 0.25, j, (1e-3, 1e-2), 6, &cfg()).unwrap();
        let target = j as f64 + 1.0;
        assert!(
            fit.slope >= target - 0.15 && fit.slope <= target + 0.2,
            "J={j}: {}",
            fit.slope
        );
    }
}
