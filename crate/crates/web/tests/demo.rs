use darboux::goursat::TrianglePoint;
use darboux::oracle::khan_penrose;
use darboux::weyl::WaveProfile;
use darboux_web::{boundary, expansion_table, heatmap, weyl_table};

#[test]
fn heatmap_matches_closed_form_and_masks_the_diagonal() {
    let n = 8;
    let v = heatmap(boundary("khan_penrose", 0.0, &[]).unwrap(), n).unwrap();
    assert_eq!(v.len(), n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
            let cell = v[j * n + i];
            if 1.0 - x - y < 1e-3 {
                assert!(cell.is_nan());
            } else {
                let exact = khan_penrose(TrianglePoint::new(x, y).unwrap()).unwrap().v;
                assert!((cell - exact).abs() < 1e-8, "({x}, {y}): {cell} vs {exact}");
            }
        }
    }
}

#[test]
fn expansion_remainder_shrinks() {
    let d = boundary("power", 0.25, &[1.0, -0.5]).unwrap();
    let r = expansion_table(d, 0.3, 2, &[1e-3, 1e-2]).unwrap();
    assert_eq!(r.len(), 6);
    let rem = |k: usize| (r[3 * k + 1] - r[3 * k + 2]).abs();
    assert!(rem(0) < rem(1));
    assert!(rem(1) < 1e-3);
}

#[test]
fn weyl_series_approaches_direct() {
    let d = boundary("khan_penrose", 0.0, &[]).unwrap();
    let r = weyl_table(d, 0.5, 2, WaveProfile::default(), &[1e-3, 1e-2]).unwrap();
    assert_eq!(r.len(), 14);
    let gap = |row: usize| ((r[7 * row + 2] - r[7 * row + 5]) / r[7 * row + 2]).abs();
    assert!(gap(0) < 1e-2);
    assert!(gap(0) < gap(1));
}

#[test]
fn bad_inputs_are_reported() {
    assert!(boundary("cubic", 0.0, &[]).is_err());
    assert!(boundary("power", 1.5, &[1.0]).is_err());
    assert!(heatmap(boundary("poly", 0.0, &[1.0]).unwrap(), 0).is_err());
}
