use approx::assert_relative_eq;
use darboux::asymptotics::expansion;
use darboux::goursat::{BoundaryData, SolutionField, TrianglePoint};
use darboux::oracle::khan_penrose;
use darboux::weyl::{
    big_g_coefficients, gamma_coefficients, inverse_map, map_coordinates, weyl_direct, weyl_from_derivatives,
    weyl_series, WaveProfile, WeylSeries,
};
use darboux::{Error, QuadratureConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn pt(x: f64, y: f64) -> TrianglePoint {
    TrianglePoint::new(x, y).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn zero_data_only_psi2_survives() {
    let f = SolutionField::new(BoundaryData::zero(), cfg()).unwrap();
    let prof = WaveProfile::new(1.5, 0.7, 2.0, 3.0).unwrap();
    let (x, y) = (0.3f64, 0.2f64);
    let w = weyl_direct(&f, pt(x, y), &prof).unwrap();
    assert_eq!(w.psi0, 0.0);
    assert_eq!(w.psi4, 0.0);
    let exact = -1.5 * 2.0 * 0.7 * 3.0 * y.powf(0.5) * x.powf(2.0 / 3.0) / (0.5f64 * 0.5);
    assert_relative_eq!(w.psi2, exact, max_relative = 1e-14);
    let linear = WaveProfile::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let w = weyl_direct(&f, pt(x, y), &linear).unwrap();
    assert_relative_eq!(w.psi2, -4.0, max_relative = 1e-14);
}

#[test]
fn amplitude_scaling() {
    let f = SolutionField::new(BoundaryData::khan_penrose(), cfg()).unwrap();
    let p = pt(0.3, 0.4);
    let base = WaveProfile::default();
    let lambda = 1.7;
    let scaled = WaveProfile {
        c2: lambda * base.c2,
        ..base
    };
    let a = weyl_direct(&f, p, &base).unwrap();
    let b = weyl_direct(&f, p, &scaled).unwrap();
    assert_relative_eq!(b.psi0, lambda * lambda * a.psi0, max_relative = 1e-13);
    assert_relative_eq!(b.psi2, lambda * a.psi2, max_relative = 1e-13);
    assert_relative_eq!(b.psi4, a.psi4, max_relative = 1e-13);
}

#[test]
fn direct_matches_closed_form() {
    let f = SolutionField::new(BoundaryData::khan_penrose(), cfg()).unwrap();
    let prof = WaveProfile::default();
    for (x, y) in [(0.3, 0.3), (0.2, 0.5), (0.6, 0.2), (0.1, 0.1), (0.45, 0.45)] {
        let p = pt(x, y);
        let k = khan_penrose(p).unwrap();
        let exact = weyl_from_derivatives(p, &prof, (k.vx, k.vy), (k.vxx, k.vyy)).unwrap();
        let w = weyl_direct(&f, p, &prof).unwrap();
        assert!(rel(w.psi0, exact.psi0) < 1e-6, "psi0 at ({x},{y})");
        assert!(rel(w.psi2, exact.psi2) < 1e-6, "psi2 at ({x},{y})");
        assert!(rel(w.psi4, exact.psi4) < 1e-6, "psi4 at ({x},{y})");
    }
}

#[test]
fn coordinate_map_examples() {
    let prof = WaveProfile::default();
    let c = map_coordinates(pt(0.0, 0.0), &prof).unwrap();
    assert_eq!((c.u, c.v, c.f, c.g), (0.0, 0.0, 0.5, 0.5));
    let linear = WaveProfile::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let c = map_coordinates(pt(0.3, 0.2), &linear).unwrap();
    assert_relative_eq!(c.u, 0.2, max_relative = 1e-15);
    assert_relative_eq!(c.v, 0.3, max_relative = 1e-15);
    for (x, y) in [(0.3, 0.2), (0.01, 0.9), (0.7, 0.25)] {
        let prof = WaveProfile::new(0.8, 1.3, 2.0, 3.5).unwrap();
        let c = map_coordinates(pt(x, y), &prof).unwrap();
        assert!((c.f + c.g - (1.0 - x - y)).abs() <= 2.0 * f64::EPSILON);
        let back = inverse_map(c.u, c.v, &prof).unwrap();
        assert!((back.x - x).abs() < 1e-12 && (back.y - y).abs() < 1e-12);
    }
    assert!(matches!(inverse_map(-1.0, 0.1, &prof), Err(Error::Domain(_))));
    assert!(WaveProfile::new(0.0, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn axis_points_rejected() {
    let f = SolutionField::new(BoundaryData::zero(), cfg()).unwrap();
    assert!(matches!(
        weyl_direct(&f, pt(0.0, 0.3), &WaveProfile::default()),
        Err(Error::Domain(_))
    ));
}

#[test]
fn khan_penrose_series_coefficients() {
    let s = weyl_series(&BoundaryData::khan_penrose(), 0.5, 2, &WaveProfile::default(), &cfg()).unwrap();
    assert_relative_eq!(s.gamma[0], 2.0, max_relative = 1e-10);
    assert_relative_eq!(s.big_g[0], -2.0, max_relative = 1e-10);
    assert_relative_eq!(s.gamma_t[0], 2.0, max_relative = 1e-10);
    assert!(s.gamma[0] * s.gamma_t[0] - 1.0 - 3.0 < 1e-9);
}

#[test]
fn recurrences_against_expansion() {
    let data = BoundaryData::combine(
        1.0,
        &BoundaryData::khan_penrose(),
        0.5,
        &BoundaryData::polynomial(&[1.0], &[0.0, 1.0]).unwrap(),
    );
    let t = expansion(&data, 0.4, 4, &cfg()).unwrap();
    let gamma = gamma_coefficients(&t.f, &t.g);
    let big_g = big_g_coefficients(&t.f, &gamma);
    for j in 0..=4 {
        let jf = j as f64;
        assert_eq!(gamma[j], jf * t.g[j] + t.f[j]);
        assert_eq!(big_g[j], (jf - 1.0) * gamma[j] + jf * t.f[j]);
    }
    assert_eq!(gamma[0], t.f[0]);
    assert_eq!(big_g[0], -t.f[0]);
    let s = WeylSeries::from_table(&t, &WaveProfile::default(), None, None);
    assert_eq!(s.gamma, gamma);
    assert!(matches!(s.evaluate(1e-3), Err(Error::InvalidConfig(_))));
}

#[test]
fn leading_psi2_coefficient() {
    let x = 0.5;
    let prof = WaveProfile::default();
    let s = weyl_series(&BoundaryData::khan_penrose(), x, 2, &prof, &cfg()).unwrap();
    let eps = 1e-4;
    let y = 1.0 - x - eps;
    let pre = prof.f_prime_magnitude(y) * prof.g_prime_magnitude(x);
    let w = s.evaluate(eps).unwrap();
    assert!((w.psi2 * eps * eps / pre - 3.0).abs() < 1e-2);
}

#[test]
fn series_approaches_direct() {
    let x = 0.5;
    let prof = WaveProfile::default();
    let data = BoundaryData::khan_penrose();
    let s = weyl_series(&data, x, 2, &prof, &cfg()).unwrap();
    let f = SolutionField::new(data, cfg()).unwrap();
    let gap = |eps: f64| {
        let p = pt(x, 1.0 - x - eps);
        let d = weyl_direct(&f, p, &prof).unwrap();
        let w = s.evaluate(eps).unwrap();
        rel(w.psi0, d.psi0).max(rel(w.psi2, d.psi2)).max(rel(w.psi4, d.psi4))
    };
    let gaps: Vec<f64> = [1e-2, 3e-3, 1e-3].iter().map(|&e| gap(e)).collect();
    assert!(gaps[2] <= 1e-2, "{gaps:?}");
    assert!(gaps[1] <= gaps[0] * 1.05 && gaps[2] <= gaps[1] * 1.05, "{gaps:?}");
}

#[test]
fn exchange_symmetry() {
    let data = BoundaryData::combine(
        1.0,
        &BoundaryData::khan_penrose(),
        0.3,
        &BoundaryData::polynomial(&[0.0, 1.0], &[1.0]).unwrap(),
    );
    let prof = WaveProfile::new(1.2, 0.8, 2.0, 3.0).unwrap();
    let f = SolutionField::new(data.clone(), cfg()).unwrap();
    let g = SolutionField::new(data.swapped(), cfg()).unwrap();
    let (x, y) = (0.3, 0.45);
    let a = weyl_direct(&f, pt(x, y), &prof).unwrap();
    let b = weyl_direct(&g, pt(y, x), &prof.swapped()).unwrap();
    assert!(rel(a.psi0, b.psi4) < 1e-9);
    assert!(rel(a.psi4, b.psi0) < 1e-9);
    assert!(rel(a.psi2, b.psi2) < 1e-9);
}

#[test]
fn series_needs_positive_order() {
    let r = weyl_series(&BoundaryData::khan_penrose(), 0.5, 0, &WaveProfile::default(), &cfg());
    assert!(matches!(r, Err(Error::InvalidConfig(_))));
}
