//! Browser bindings: a field heatmap, the near-diagonal expansion against the
//! direct solution, and the Weyl scalars as the diagonal is approached.
//!
//! The same boundary trace is placed on both axes. `kind` is `khan_penrose`,
//! `poly` (coefficients of t, t^2, ...) or `power` (`alpha` plus coefficients
//! of t^(1-alpha), t^(2-alpha), ...). Results are flat `f64` arrays.

use darboux::asymptotics::{evaluate_expansion, expansion};
use darboux::goursat::{BoundaryData, Level, SolutionField, Trace, TrianglePoint};
use darboux::weyl::{weyl_direct, WaveProfile, WeylSeries};
use darboux::QuadratureConfig;
use wasm_bindgen::prelude::*;

/// Heatmap cells closer than this to the diagonal are left as NaN.
pub const HEATMAP_MARGIN: f64 = 1e-3;

pub fn boundary(kind: &str, alpha: f64, coeffs: &[f64]) -> Result<BoundaryData, String> {
    let trace = match kind {
        "khan_penrose" => Trace::khan_penrose(),
        "poly" => Trace::polynomial(coeffs).map_err(|e| e.to_string())?,
        "power" => Trace::power(alpha, coeffs).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown data kind '{other}'")),
    };
    BoundaryData::new(trace.clone(), trace).map_err(|e| e.to_string())
}

/// V at cell centres of an n x n grid on the unit square, row-major with y
/// increasing by row; NaN outside the triangle.
pub fn heatmap(data: BoundaryData, n: usize) -> Result<Vec<f64>, String> {
    if n == 0 || n > 200 {
        return Err("grid size must be between 1 and 200".into());
    }
    let field = SolutionField::new(data, QuadratureConfig::default()).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let y = (j as f64 + 0.5) / n as f64;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            if 1.0 - x - y < HEATMAP_MARGIN {
                out.push(f64::NAN);
                continue;
            }
            let p = TrianglePoint::new(x, y).map_err(|e| e.to_string())?;
            let v = field.jet(p, Level::Value).map_err(|e| format!("({x}, {y}): {e}"))?.v;
            out.push(v);
        }
    }
    Ok(out)
}

/// Triples `(eps, V(x, 1-x-eps), expansion_J(eps))` per eps.
pub fn expansion_table(data: BoundaryData, x: f64, order: usize, eps: &[f64]) -> Result<Vec<f64>, String> {
    let cfg = QuadratureConfig::default();
    let table = expansion(&data, x, order, &cfg).map_err(|e| e.to_string())?;
    let field = SolutionField::new(data, cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * eps.len());
    for &e in eps {
        let p = TrianglePoint::new(x, 1.0 - x - e).map_err(|err| err.to_string())?;
        let direct = field.evaluate(p).map_err(|err| format!("eps = {e}: {err}"))?;
        out.extend([e, direct, evaluate_expansion(&table, e)]);
    }
    Ok(out)
}

/// Per eps: `eps, psi0, psi2, psi4` direct, then `psi0, psi2, psi4` from the series.
pub fn weyl_table(
    data: BoundaryData,
    x: f64,
    order: usize,
    profile: WaveProfile,
    eps: &[f64],
) -> Result<Vec<f64>, String> {
    let cfg = QuadratureConfig::default();
    let series = WeylSeries::new(&data, x, order, &profile, &cfg).map_err(|e| e.to_string())?;
    let field = SolutionField::new(data, cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(7 * eps.len());
    for &e in eps {
        let p = TrianglePoint::new(x, 1.0 - x - e).map_err(|err| err.to_string())?;
        let d = weyl_direct(&field, p, &profile).map_err(|err| format!("eps = {e}: {err}"))?;
        let s = series.evaluate(e).map_err(|err| format!("eps = {e}: {err}"))?;
        out.extend([e, d.psi0, d.psi2, d.psi4, s.psi0, s.psi2, s.psi4]);
    }
    Ok(out)
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn field_heatmap(kind: &str, alpha: f64, coeffs: &[f64], n: usize) -> Result<Vec<f64>, JsError> {
    js(boundary(kind, alpha, coeffs).and_then(|d| heatmap(d, n)))
}

#[wasm_bindgen]
pub fn expansion_vs_direct(
    kind: &str,
    alpha: f64,
    coeffs: &[f64],
    x: f64,
    order: usize,
    eps: &[f64],
) -> Result<Vec<f64>, JsError> {
    js(boundary(kind, alpha, coeffs).and_then(|d| expansion_table(d, x, order, eps)))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn weyl_vs_eps(
    kind: &str,
    alpha: f64,
    coeffs: &[f64],
    x: f64,
    order: usize,
    c1: f64,
    c2: f64,
    n1: f64,
    n2: f64,
    eps: &[f64],
) -> Result<Vec<f64>, JsError> {
    let profile = WaveProfile::new(c1, c2, n1, n2).map_err(|e| JsError::new(&e.to_string()))?;
    js(boundary(kind, alpha, coeffs).and_then(|d| weyl_table(d, x, order, profile, eps)))
}
