//! Reference values: the closed-form Khan-Penrose solution, an independent
//! brute-force evaluation of the integral representation, and residual checks
//! of the differential equation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goursat::{BoundaryData, Level, SolutionField, Trace, TrianglePoint};
use crate::quadrature::{integrate_smooth, QuadratureConfig};

/// Value and partial derivatives up to order two of
/// `V = -ln((1 + S) / (1 - S))`, `S = sqrt(x (1 - y)) + sqrt(y (1 - x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KhanPenrose {
    pub v: f64,
    pub vx: f64,
    pub vy: f64,
    pub vxx: f64,
    pub vxy: f64,
    pub vyy: f64,
}

/// Closed form at an interior point. Uses `1 - S^2 = eps^2 / (sqrt((1-x)(1-y)) + sqrt(xy))^2`
/// so the logarithmic singularity is resolved without cancellation.
pub fn khan_penrose(p: TrianglePoint) -> Result<KhanPenrose> {
    let (x, y) = (p.x, p.y);
    let eps = p.eps();
    if !(eps > 0.0) {
        return Err(Error::DiagonalBlowup(eps));
    }
    let (sx, sy, cx, cy) = (x.sqrt(), y.sqrt(), (1.0 - x).sqrt(), (1.0 - y).sqrt());
    let s = sx * cy + sy * cx;
    let d = cx * cy + sx * sy;
    let one_minus_s2 = (eps / d).powi(2);
    let v = -2.0 * (1.0 + s).ln() + 2.0 * eps.ln() - 2.0 * d.ln();
    if x == 0.0 || y == 0.0 {
        return Ok(KhanPenrose {
            v,
            vx: f64::NAN,
            vy: f64::NAN,
            vxx: f64::NAN,
            vxy: f64::NAN,
            vyy: f64::NAN,
        });
    }
    let s_x = 0.5 * cy / sx - 0.5 * sy / cx;
    let s_y = 0.5 * cx / sy - 0.5 * sx / cy;
    let s_xx = -0.25 * cy / (sx * x) - 0.25 * sy / (cx * (1.0 - x));
    let s_yy = -0.25 * cx / (sy * y) - 0.25 * sx / (cy * (1.0 - y));
    let s_xy = -0.25 / (sx * cy) - 0.25 / (sy * cx);
    let w = 1.0 / one_minus_s2;
    Ok(KhanPenrose {
        v,
        vx: -2.0 * s_x * w,
        vy: -2.0 * s_y * w,
        vxx: -2.0 * (s_xx * w + 2.0 * s * s_x * s_x * w * w),
        vxy: -2.0 * (s_xy * w + 2.0 * s * s_x * s_y * w * w),
        vyy: -2.0 * (s_yy * w + 2.0 * s * s_y * s_y * w * w),
    })
}

/// Partial derivative `d^i/dx^i d^j/dy^j V` with `i + j <= 2`.
pub fn khan_penrose_partial(p: TrianglePoint, i: usize, j: usize) -> Result<f64> {
    let k = khan_penrose(p)?;
    match (i, j) {
        (0, 0) => Ok(k.v),
        (1, 0) => Ok(k.vx),
        (0, 1) => Ok(k.vy),
        (2, 0) => Ok(k.vxx),
        (1, 1) => Ok(k.vxy),
        (0, 2) => Ok(k.vyy),
        _ => Err(Error::MissingDerivative {
            needed: i + j,
            available: 2,
        }),
    }
}

/// Known near-diagonal coefficients `(f_0, f_1, f_2, g_0, g_1, g_2)` of
/// `V(x, 1 - x - eps) ~ sum f_j eps^j ln eps + sum g_j eps^j`.
pub fn khan_penrose_expansion(x: f64) -> [f64; 6] {
    let q = x * (1.0 - x);
    [
        2.0,
        0.0,
        0.0,
        -(16.0 * q).ln(),
        -(1.0 - 2.0 * x) / (2.0 * q),
        3.0 * (1.0 - 2.0 * x + 2.0 * x * x) / (16.0 * q * q),
    ]
}

/// The integral representation evaluated without the solver's kernels:
/// Gauss-Legendre panels after substitutions that make every integrand
/// bounded (`t = k sin^2 th` inside, `k = v^2` and `k = a - u^2` outside).
pub fn brute_force_solution(data: &BoundaryData, p: TrianglePoint, cfg: &QuadratureConfig) -> Result<f64> {
    if p.eps() < 1e-4 {
        return Err(Error::Domain(format!(
            "brute force needs 1 - x - y >= 1e-4, got {:e}",
            p.eps()
        )));
    }
    if p.y == 0.0 {
        return Ok(data.v0.value(p.x));
    }
    if p.x == 0.0 {
        return Ok(data.v1.value(p.y));
    }
    Ok(brute_half(&data.v0, p.x, p.y, cfg)? + brute_half(&data.v1, p.y, p.x, cfg)?)
}

fn brute_half(trace: &Trace, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let slope = trace.slope();
    let h = |k: f64| -> Result<f64> {
        let inner = integrate_smooth(
            |th| {
                let s = th.sin();
                slope.eval(k * s * s) * s
            },
            0.0,
            0.5 * PI,
            cfg,
        )?;
        Ok((1.0 - k).sqrt() * 2.0 * k.sqrt() * inner)
    };
    let eps = 1.0 - a - b;
    let fail = std::cell::Cell::new(None);
    let guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            fail.set(Some(e));
            0.0
        }
    };
    let left = integrate_smooth(
        |v| {
            let k = v * v;
            2.0 * v * guard(h(k)) / ((a - k).sqrt() * (1.0 - b - k).sqrt())
        },
        0.0,
        (0.5 * a).sqrt(),
        cfg,
    )?;
    let right = integrate_smooth(
        |u| 2.0 * guard(h(a - u * u)) / (u * u + eps).sqrt(),
        0.0,
        (0.5 * a).sqrt(),
        cfg,
    )?;
    if let Some(e) = fail.take() {
        return Err(e);
    }
    Ok((left + right) / PI)
}

/// Something that can be probed for the differential-equation residual.
pub trait Field: Sync {
    fn value(&self, x: f64, y: f64) -> Result<f64>;
    /// `(V_x, V_y, V_xy)` from the evaluator itself, if it has them.
    fn derivatives(&self, x: f64, y: f64) -> Result<Option<(f64, f64, f64)>>;
}

impl Field for SolutionField {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        self.evaluate(TrianglePoint::new(x, y)?)
    }

    fn derivatives(&self, x: f64, y: f64) -> Result<Option<(f64, f64, f64)>> {
        let j = self.jet(TrianglePoint::new(x, y)?, Level::Mixed)?;
        Ok(Some((
            j.vx.unwrap_or_default(),
            j.vy.unwrap_or_default(),
            j.vxy.unwrap_or_default(),
        )))
    }
}

/// The closed-form solution as a [`Field`].
#[derive(Debug, Clone, Copy, Default)]
pub struct KhanPenroseField;

impl Field for KhanPenroseField {
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(khan_penrose(TrianglePoint::new(x, y)?)?.v)
    }

    fn derivatives(&self, x: f64, y: f64) -> Result<Option<(f64, f64, f64)>> {
        let k = khan_penrose(TrianglePoint::new(x, y)?)?;
        Ok(Some((k.vx, k.vy, k.vxy)))
    }
}

/// A plain closure with values only.
pub struct FnField<F>(pub F);

impl<F> Field for FnField<F>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok((self.0)(x, y))
    }

    fn derivatives(&self, _: f64, _: f64) -> Result<Option<(f64, f64, f64)>> {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub x: f64,
    pub y: f64,
    /// From the evaluator's own derivatives.
    pub analytic: Option<f64>,
    pub analytic_rel: Option<f64>,
    /// From finite differences of values.
    pub fd: f64,
    pub fd_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub points: Vec<ResidualPoint>,
    pub max_abs: f64,
    pub max_rel: f64,
    pub fd_max_abs: f64,
    pub fd_max_rel: f64,
    pub threshold: f64,
    pub fd_threshold: f64,
    pub pass: bool,
}

/// Finite-difference step for the residual stencils.
pub const FD_STEP: f64 = 1e-4;

/// Residual `V_xy - (V_x + V_y) / (2 (1 - x - y))`, relative to `1 + |V_xy|`.
/// Passes when the evaluator's own residual is within `threshold` and the
/// finite-difference one within `fd_threshold`.
pub fn residual_check<F: Field + ?Sized>(
    field: &F,
    grid: &[(f64, f64)],
    threshold: f64,
    fd_threshold: f64,
) -> Result<ResidualReport> {
    let mut points = Vec::with_capacity(grid.len());
    for &(x, y) in grid {
        let eps = 1.0 - x - y;
        let analytic = field.derivatives(x, y)?.map(|(vx, vy, vxy)| {
            let r = vxy - (vx + vy) / (2.0 * eps);
            (r, r.abs() / (1.0 + vxy.abs()))
        });
        let (vx, vy, vxy) = fd_derivatives(field, x, y)?;
        let fd = vxy - (vx + vy) / (2.0 * eps);
        points.push(ResidualPoint {
            x,
            y,
            analytic: analytic.map(|a| a.0),
            analytic_rel: analytic.map(|a| a.1),
            fd,
            fd_rel: fd.abs() / (1.0 + vxy.abs()),
        });
    }
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |m, v| m.max(v.abs()));
    let max_abs = fold(&mut points.iter().filter_map(|p| p.analytic));
    let max_rel = fold(&mut points.iter().filter_map(|p| p.analytic_rel));
    let fd_max_abs = fold(&mut points.iter().map(|p| p.fd));
    let fd_max_rel = fold(&mut points.iter().map(|p| p.fd_rel));
    let pass = max_rel <= threshold && fd_max_rel <= fd_threshold;
    Ok(ResidualReport {
        points,
        max_abs,
        max_rel,
        fd_max_abs,
        fd_max_rel,
        threshold,
        fd_threshold,
        pass,
    })
}

/// Five-point first-derivative stencil, one-sided when `t` is within two steps of 0.
fn stencil(t: f64, h: f64) -> Vec<(f64, f64)> {
    if t >= 2.0 * h {
        vec![
            (-2.0 * h, 1.0 / (12.0 * h)),
            (-h, -8.0 / (12.0 * h)),
            (h, 8.0 / (12.0 * h)),
            (2.0 * h, -1.0 / (12.0 * h)),
        ]
    } else {
        vec![
            (0.0, -25.0 / (12.0 * h)),
            (h, 48.0 / (12.0 * h)),
            (2.0 * h, -36.0 / (12.0 * h)),
            (3.0 * h, 16.0 / (12.0 * h)),
            (4.0 * h, -3.0 / (12.0 * h)),
        ]
    }
}

fn fd_derivatives<F: Field + ?Sized>(field: &F, x: f64, y: f64) -> Result<(f64, f64, f64)> {
    let h = FD_STEP;
    let (sx, sy) = (stencil(x, h), stencil(y, h));
    let mut vx = 0.0;
    for &(d, w) in &sx {
        vx += w * field.value(x + d, y)?;
    }
    let mut vy = 0.0;
    for &(d, w) in &sy {
        vy += w * field.value(x, y + d)?;
    }
    let mut vxy = 0.0;
    for &(dx, wx) in &sx {
        for &(dy, wy) in &sy {
            vxy += wx * wy * field.value(x + dx, y + dy)?;
        }
    }
    Ok((vx, vy, vxy))
}

/// Interior grid `n x n` over `[lo, hi]^2` clipped to `x + y <= diag`.
pub fn interior_grid(lo: f64, hi: f64, n: usize, diag: f64) -> Vec<(f64, f64)> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (lo + step * i as f64, lo + step * j as f64);
            if x + y <= diag + 1e-12 {
                out.push((x, y));
            }
        }
    }
    out
}
