use approx::assert_relative_eq;
use darboux::goursat::{
    BoundaryData, GridSpec, Level, Profile, RowStatus, SolutionField, Trace, TrianglePoint, EPS_MIN,
};
use darboux::oracle::{interior_grid, khan_penrose};
use darboux::{Error, QuadratureConfig};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn pt(x: f64, y: f64) -> TrianglePoint {
    TrianglePoint::new(x, y).unwrap()
}

fn kp_field() -> SolutionField {
    SolutionField::new(BoundaryData::khan_penrose(), cfg()).unwrap()
}

fn poly() -> BoundaryData {
    // V_0 = x^2, V_1 = y^3
    BoundaryData::polynomial(&[0.0, 1.0], &[0.0, 0.0, 1.0]).unwrap()
}

#[test]
fn points_outside_triangle_rejected() {
    assert!(matches!(TrianglePoint::new(-0.1, 0.2), Err(Error::Domain(_))));
    assert!(matches!(TrianglePoint::new(0.7, 0.4), Err(Error::Domain(_))));
    assert!(pt(0.2, 0.3).interior());
    assert!(!pt(0.0, 0.3).interior());
    assert_relative_eq!(pt(0.2, 0.3).eps(), 0.5, max_relative = 1e-15);
}

#[test]
fn zero_data_gives_zero() {
    let f = SolutionField::new(BoundaryData::zero(), cfg()).unwrap();
    for (x, y) in [(0.2, 0.3), (0.05, 0.9), (0.5, 1e-3)] {
        let j = f.jet(pt(x, y), Level::Full).unwrap();
        assert_eq!(j.v, 0.0);
        assert_eq!(j.vxy, Some(0.0));
    }
    assert_eq!(f.evaluate(pt(0.5, 0.0)).unwrap(), 0.0);
    assert_eq!(f.evaluate_gradient(pt(0.3, 0.3)).unwrap(), (0.0, 0.0));
    assert_eq!(f.evaluate_second(pt(0.3, 0.3)).unwrap(), (0.0, 0.0, 0.0));
}

#[test]
fn boundary_short_circuit_is_exact() {
    let data = BoundaryData::khan_penrose();
    let f = kp_field();
    for i in 0..=18 {
        let t = 0.05 * i as f64;
        assert_eq!(f.evaluate(pt(t, 0.0)).unwrap(), data.v0.value(t));
        assert_eq!(f.evaluate(pt(0.0, t)).unwrap(), data.v1.value(t));
    }
}

#[test]
fn khan_penrose_value() {
    let (x, y) = (0.2f64, 0.3f64);
    let s = x.sqrt() * 0.7f64.sqrt() + y.sqrt() * 0.8f64.sqrt();
    let exact = -((1.0 + s) / (1.0 - s)).ln();
    assert_relative_eq!(kp_field().evaluate(pt(x, y)).unwrap(), exact, epsilon = 1e-12);
}

#[test]
fn khan_penrose_gradient_and_second_derivatives() {
    let f = kp_field();
    for (x, y) in [(0.2, 0.3), (0.3, 0.3), (0.1, 0.7)] {
        let p = pt(x, y);
        let k = khan_penrose(p).unwrap();
        let (vx, vy) = f.evaluate_gradient(p).unwrap();
        let (vxx, vxy, vyy) = f.evaluate_second(p).unwrap();
        assert_relative_eq!(vx, k.vx, max_relative = 1e-10);
        assert_relative_eq!(vy, k.vy, max_relative = 1e-10);
        assert_relative_eq!(vxx, k.vxx, max_relative = 1e-9);
        assert_relative_eq!(vxy, k.vxy, max_relative = 1e-9);
        assert_relative_eq!(vyy, k.vyy, max_relative = 1e-9);
        assert_relative_eq!(f.evaluate_mixed(p).unwrap(), k.vxy, max_relative = 1e-9);
    }
}

#[test]
fn pde_consistency() {
    let f = kp_field();
    let p = pt(0.25, 0.35);
    let (vx, vy) = f.evaluate_gradient(p).unwrap();
    let vxy = f.evaluate_mixed(p).unwrap();
    assert!((vxy - (vx + vy) / (2.0 * p.eps())).abs() < 1e-6);
}

#[test]
fn gradient_reaches_the_axis_for_smooth_data() {
    let data = poly();
    let f = SolutionField::new(data.clone(), cfg()).unwrap();
    let (vx, _) = f.evaluate_gradient(pt(0.5, 0.0)).unwrap();
    assert_relative_eq!(vx, 1.0, max_relative = 1e-10);
    assert_eq!(
        f.jet(pt(0.5, 0.0), Level::Full),
        Err(Error::Domain(
            "second derivatives are only evaluated in the interior".into()
        ))
    );
    let (vx_near, _) = f.evaluate_gradient(pt(0.5, 1e-9)).unwrap();
    assert!((vx_near - 1.0).abs() < 1e-6);
}

#[test]
fn data_swap_symmetry() {
    let data = BoundaryData::combine(1.0, &BoundaryData::khan_penrose(), 0.7, &poly());
    let f = SolutionField::new(data.clone(), cfg()).unwrap();
    let g = SolutionField::new(data.swapped(), cfg()).unwrap();
    for (x, y) in [(0.2, 0.3), (0.6, 0.1), (0.05, 0.8)] {
        let a = f.evaluate(pt(x, y)).unwrap();
        let b = g.evaluate(pt(y, x)).unwrap();
        assert!((a - b).abs() <= 2.0 * cfg().rel_tol * a.abs().max(1.0));
    }
}

#[test]
fn superposition() {
    let kp = BoundaryData::khan_penrose();
    let p = poly();
    let combo = SolutionField::new(BoundaryData::combine(2.0, &kp, -0.5, &p), cfg()).unwrap();
    let fk = kp_field();
    let fp = SolutionField::new(p, cfg()).unwrap();
    for (x, y) in [(0.2, 0.3), (0.4, 0.1), (0.1, 0.7)] {
        let lhs = combo.evaluate(pt(x, y)).unwrap();
        let rhs = 2.0 * fk.evaluate(pt(x, y)).unwrap() - 0.5 * fp.evaluate(pt(x, y)).unwrap();
        assert!((lhs - rhs).abs() <= 2.0 * cfg().rel_tol * (1.0 + rhs.abs()));
    }
}

#[test]
fn grid_on_zero_data() {
    let f = SolutionField::new(BoundaryData::zero(), cfg()).unwrap();
    let rows = f.evaluate_grid(&GridSpec::square(0.1, 0.3, 2)).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.jet.unwrap().v == 0.0 && r.status == RowStatus::Ok));
}

#[test]
fn grid_symmetric_data_is_symmetric() {
    let data = BoundaryData::polynomial(&[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]).unwrap();
    let f = SolutionField::new(data, cfg()).unwrap();
    let rows = f.evaluate_grid(&GridSpec::square(0.1, 0.4, 4)).unwrap();
    for r in &rows {
        let mirror = rows.iter().find(|m| m.x == r.y && m.y == r.x).unwrap();
        let (a, b) = (r.jet.unwrap(), mirror.jet.unwrap());
        assert!((a.v - b.v).abs() < 1e-12);
        assert!((a.vx.unwrap() - b.vy.unwrap()).abs() < 1e-10);
    }
}

#[test]
fn grid_rows_are_ordered_and_flag_the_diagonal() {
    let f = kp_field();
    let mut spec = GridSpec::square(0.3, 0.7, 3);
    spec.level = Level::Mixed;
    let rows = f.evaluate_grid(&spec).unwrap();
    let pts = spec.points().unwrap();
    assert_eq!(rows.len(), pts.len());
    for (r, (x, y)) in rows.iter().zip(pts) {
        assert_eq!((r.x, r.y), (x, y));
        if x + y >= 1.0 - EPS_MIN {
            assert_eq!(r.status, RowStatus::SkippedDiagonal);
            assert!(r.jet.is_none());
        } else {
            assert_eq!(r.status, RowStatus::Ok);
            assert!(r.jet.unwrap().vxy.is_some());
        }
    }
}

#[test]
fn khan_penrose_grid_matches_closed_form() {
    let f = kp_field();
    let mut worst = 0.0f64;
    for (x, y) in interior_grid(0.05, 0.85, 10, 0.9) {
        let p = pt(x, y);
        worst = worst.max((f.evaluate(p).unwrap() - khan_penrose(p).unwrap().v).abs());
    }
    assert!(worst <= 1e-8, "max error {worst:e}");
}

#[test]
fn missing_smoothness_is_reported() {
    let trace = Trace::power(0.0, &[1.0]).unwrap();
    let slope = trace.slope().clone();
    let rough = Trace::new(
        |t| t,
        darboux::abel::SingularFunction::new(0.0, 0, move |_, k| slope.eval(k)).unwrap(),
    );
    let data = BoundaryData::new(rough, Trace::zero()).unwrap();
    let f = SolutionField::new(data, cfg()).unwrap();
    assert!(f.evaluate(pt(0.2, 0.3)).is_ok());
    assert!(matches!(
        f.jet(pt(0.2, 0.3), Level::Full),
        Err(Error::MissingDerivative { .. })
    ));
}

#[test]
fn diagonal_and_eps_min() {
    let f = kp_field();
    assert!(matches!(TrianglePoint::new(0.5, 0.5), Err(Error::Domain(_))));
    let on_diagonal = TrianglePoint { x: 0.5, y: 0.5 };
    assert!(matches!(f.evaluate(on_diagonal), Err(Error::DiagonalBlowup(_))));
    assert!(matches!(f.evaluate(pt(0.5, 0.5 - 1e-9)), Err(Error::Domain(_))));
    assert!(f.clone().with_eps_min(0.0).is_err());
    let coarse = f.with_eps_min(1e-2).unwrap();
    assert!(coarse.evaluate(pt(0.5, 0.495)).is_err());
}

#[test]
fn profile_is_constant_for_khan_penrose() {
    let profile = Profile::new(&BoundaryData::khan_penrose().v0);
    for k in [0.1, 0.5, 0.9] {
        let h = profile.derivatives(k, 2, &cfg()).unwrap();
        assert_relative_eq!(h[0], -std::f64::consts::PI, max_relative = 1e-12);
        assert!(h[1].abs() < 1e-9 && h[2].abs() < 1e-8, "{h:?}");
    }
}
