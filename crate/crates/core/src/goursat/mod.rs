//! Solution of the Goursat problem on the triangle `x, y >= 0, x + y < 1`.
//!
//! With `h_0(k) = sqrt(1 - k) A[V_0'](k)` and `h~(k) = sqrt(1 - k) A[V_1'](k)`,
//!
//! ```text
//! V(x, y) = T[h_0](x, y) + T[h~](y, x),
//! T[h](a, b) = (1/pi) int_0^a h(k) (a - k)^(-1/2) (1 - b - k)^(-1/2) dk.
//! ```
//!
//! Both halves go through the same kernel. Writing `eps = 1 - a - b`, the
//! outer integral is a member of the family
//! `N_beta[phi] = int_0^a phi(k) (a - k)^(-1/2) (a - k + eps)^(-beta) dk`, and the
//! substitution `a - k = eps sinh^2 s` turns it into
//! `2 eps^(1/2 - beta) int_0^S phi(k(s)) cosh^(1 - 2 beta)(s) ds` with
//! `S = asinh(sqrt(a / eps))`, whose integrand is smooth up to `s = 0`. The
//! partial derivatives of `T` are combinations of `N_{1/2}`, `N_{3/2}` and
//! `N_{5/2}` applied to `h`, `k h'`, `k^2 h''` and friends; the inner Abel
//! integral is computed once per outer node and shared by all of them.

mod data;

pub use data::{BoundaryData, Trace, ValueFn, SMOOTH_ORDER};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::abel::{combine_moments, moments, SingularFunction};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vector, EndpointExponents, QuadratureConfig};
use crate::special::{binomial, falling};

/// Default closest approach to the diagonal for direct evaluation.
pub const EPS_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrianglePoint {
    pub x: f64,
    pub y: f64,
}

impl TrianglePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x >= 0.0 && y >= 0.0 && x + y < 1.0) {
            return Err(Error::Domain(format!("({x}, {y}) is not in the triangle")));
        }
        Ok(Self { x, y })
    }

    /// Distance parameter `1 - x - y` to the diagonal.
    pub fn eps(&self) -> f64 {
        1.0 - self.x - self.y
    }

    pub fn interior(&self) -> bool {
        self.x > 0.0 && self.y > 0.0
    }
}

/// `h(k) = sqrt(1 - k) A[V'](k)` for one trace, with derivatives.
#[derive(Debug, Clone)]
pub struct Profile {
    pieces: Vec<SingularFunction>,
}

impl Profile {
    pub fn new(trace: &Trace) -> Self {
        Self {
            pieces: trace.pieces().to_vec(),
        }
    }

    /// One profile per piece of the trace, each with a single corner exponent.
    pub fn split(&self) -> Vec<Profile> {
        self.pieces
            .iter()
            .map(|p| Profile {
                pieces: vec![p.clone()],
            })
            .collect()
    }

    /// Highest derivative of h the trace supports.
    pub fn order(&self) -> usize {
        self.pieces.iter().map(|p| p.order()).min().unwrap_or(0)
    }

    pub fn alpha(&self) -> f64 {
        self.pieces.iter().map(|p| p.alpha()).fold(0.0, f64::max)
    }

    /// `h(k), h'(k), ..., h^(max_j)(k)` from one pass of the inner integral per piece.
    pub fn derivatives(&self, k: f64, max_j: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain(format!("profile argument {k} outside (0, 1)")));
        }
        let mut abel = vec![0.0; max_j + 1];
        for piece in &self.pieces {
            let m = moments(piece, k, max_j, cfg)?;
            for (j, a) in abel.iter_mut().enumerate() {
                *a += combine_moments(&m, k, j);
            }
        }
        let q = 1.0 - k;
        // (1 - k)^(1/2) and its derivatives
        let root: Vec<f64> = (0..=max_j)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * falling(0.5, i) * q.powf(0.5 - i as f64)
            })
            .collect();
        Ok((0..=max_j)
            .map(|j| (0..=j).map(|i| binomial(j, i) * root[i] * abel[j - i]).sum())
            .collect())
    }
}

/// How much of the local jet to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Value,
    Gradient,
    /// Value, gradient and `V_xy`.
    Mixed,
    Full,
}

impl Level {
    /// Smoothness of the data required, counted as derivatives of `V_0`, `V_1`.
    pub fn data_order(self) -> usize {
        match self {
            Level::Value => 1,
            Level::Gradient | Level::Mixed => 2,
            Level::Full => 3,
        }
    }

    fn profile_order(self) -> usize {
        self.data_order() - 1
    }
}

/// Value and partial derivatives of V at a point; entries beyond the
/// requested [`Level`] are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet {
    pub v: f64,
    pub vx: Option<f64>,
    pub vy: Option<f64>,
    pub vxx: Option<f64>,
    pub vxy: Option<f64>,
    pub vyy: Option<f64>,
}

/// `T` and its partials in (own, other) coordinates.
#[derive(Debug, Clone, Copy, Default)]
struct HalfJet {
    t: f64,
    ta: f64,
    tb: f64,
    taa: f64,
    tab: f64,
    tbb: f64,
}

/// Column layout of the N_beta family evaluated per outer node.
/// index: (beta index 0/1/2 for 1/2, 3/2, 5/2)
const BETAS: [usize; 10] = [0, 1, 2, 0, 1, 1, 2, 0, 1, 2];

fn columns(level: Level) -> &'static [usize] {
    match level {
        Level::Value => &[0],
        Level::Gradient => &[0, 1, 3, 4],
        Level::Mixed => &[0, 1, 3, 4, 5, 6],
        Level::Full => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
    }
}

/// Integrand of each column from `k` and `h, h', h''`.
fn phi(col: usize, k: f64, h: &[f64]) -> f64 {
    match col {
        0..=2 => h[0],
        3 | 5 => k * h[1] + 0.5 * h[0],
        4 | 6 => k * h[0],
        7 => k * h[1] + k * k * h[2] - 0.25 * h[0],
        8 => k * k * h[1] + 0.5 * k * h[0],
        9 => k * k * h[0],
        _ => unreachable!("ten columns"),
    }
}

/// Evaluator for V and its derivatives on the interior of the triangle.
#[derive(Debug, Clone)]
pub struct SolutionField {
    data: BoundaryData,
    profiles: [Profile; 2],
    pieces: [Vec<Profile>; 2],
    cfg: QuadratureConfig,
    eps_min: f64,
}

impl SolutionField {
    pub fn new(data: BoundaryData, cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        data.validate()?;
        data.require_order(1)?;
        let profiles = [Profile::new(&data.v0), Profile::new(&data.v1)];
        let pieces = [profiles[0].split(), profiles[1].split()];
        Ok(Self {
            data,
            profiles,
            pieces,
            cfg,
            eps_min: EPS_MIN,
        })
    }

    pub fn with_eps_min(mut self, eps_min: f64) -> Result<Self> {
        if !(eps_min > 0.0 && eps_min < 1.0) {
            return Err(Error::InvalidConfig(format!("eps_min {eps_min} outside (0, 1)")));
        }
        self.eps_min = eps_min;
        Ok(self)
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    pub fn eps_min(&self) -> f64 {
        self.eps_min
    }

    /// `h_0` (index 0) or `h~` (index 1).
    pub fn profile(&self, side: usize) -> &Profile {
        &self.profiles[side]
    }

    pub fn evaluate(&self, p: TrianglePoint) -> Result<f64> {
        if p.y == 0.0 {
            return Ok(self.data.v0.value(p.x));
        }
        if p.x == 0.0 {
            return Ok(self.data.v1.value(p.y));
        }
        Ok(self.jet(p, Level::Value)?.v)
    }

    pub fn evaluate_gradient(&self, p: TrianglePoint) -> Result<(f64, f64)> {
        let j = self.jet(p, Level::Gradient)?;
        Ok((j.vx.unwrap_or_default(), j.vy.unwrap_or_default()))
    }

    /// `(V_xx, V_xy, V_yy)`; needs data with three derivatives.
    pub fn evaluate_second(&self, p: TrianglePoint) -> Result<(f64, f64, f64)> {
        let j = self.jet(p, Level::Full)?;
        Ok((
            j.vxx.unwrap_or_default(),
            j.vxy.unwrap_or_default(),
            j.vyy.unwrap_or_default(),
        ))
    }

    /// Mixed derivative alone; data with two derivatives suffices.
    pub fn evaluate_mixed(&self, p: TrianglePoint) -> Result<f64> {
        Ok(self.jet(p, Level::Mixed)?.vxy.unwrap_or_default())
    }

    /// The local jet up to `level`.
    pub fn jet(&self, p: TrianglePoint, level: Level) -> Result<Jet> {
        self.data.require_order(level.data_order())?;
        let eps = p.eps();
        if !(eps >= self.eps_min) {
            return Err(if eps <= 0.0 {
                Error::DiagonalBlowup(eps)
            } else {
                Error::Domain(format!(
                    "1 - x - y = {eps:e} is below eps_min = {:e}; use the near-diagonal expansion",
                    self.eps_min
                ))
            });
        }
        if p.x < 0.0 || p.y < 0.0 {
            return Err(Error::Domain(format!("({}, {}) is not in the triangle", p.x, p.y)));
        }
        if !p.interior() {
            return self.axis_jet(p, level);
        }
        let first = self.half(0, p.x, p.y, level)?;
        let second = self.half(1, p.y, p.x, level)?;
        Ok(assemble(first, second, level))
    }

    fn axis_jet(&self, p: TrianglePoint, level: Level) -> Result<Jet> {
        let mut jet = Jet {
            v: self.evaluate(p)?,
            ..Jet::default()
        };
        if level == Level::Value {
            return Ok(jet);
        }
        if level > Level::Gradient {
            return Err(Error::Domain(
                "second derivatives are only evaluated in the interior".into(),
            ));
        }
        if p.x == 0.0 && p.y == 0.0 {
            return Err(Error::Domain("gradient is not evaluated at the corner".into()));
        }
        // on y = 0 the along-axis derivative is the data; the transverse one
        // picks up the limit V_1'(0) / sqrt(1 - x) of the other half
        let (own, a, trace_along, trace_across) = if p.y == 0.0 {
            (0, p.x, &self.data.v0, &self.data.v1)
        } else {
            (1, p.y, &self.data.v1, &self.data.v0)
        };
        if trace_across.alpha() > 0.0 {
            return Err(Error::Domain(
                "transverse derivative on an axis is unbounded for data with a positive corner exponent".into(),
            ));
        }
        let along = trace_along.slope().eval(a);
        let half = self.half(own, a, 0.0, Level::Gradient)?;
        let across = half.tb + trace_across.slope().eval(0.0) / (1.0 - a).sqrt();
        if p.y == 0.0 {
            jet.vx = Some(along);
            jet.vy = Some(across);
        } else {
            jet.vx = Some(across);
            jet.vy = Some(along);
        }
        Ok(jet)
    }

    /// `T[h_side](a, b)` and its partials, summed over the pieces of the trace.
    fn half(&self, side: usize, a: f64, b: f64, level: Level) -> Result<HalfJet> {
        let mut sum = HalfJet::default();
        for profile in &self.pieces[side] {
            let h = self.half_piece(profile, a, b, level)?;
            sum.t += h.t;
            sum.ta += h.ta;
            sum.tb += h.tb;
            sum.taa += h.taa;
            sum.tab += h.tab;
            sum.tbb += h.tbb;
        }
        Ok(sum)
    }

    fn half_piece(&self, profile: &Profile, a: f64, b: f64, level: Level) -> Result<HalfJet> {
        let eps = 1.0 - a - b;
        let cols = columns(level);
        let order = level.profile_order();
        let s_max = (a / eps).sqrt().asinh();
        // h ~ k^(1/2 - alpha) at k = 0, which is s = S
        let mu = profile.alpha() - 0.5;
        let exps = EndpointExponents::new(0.0, mu)?;
        let cfg = &self.cfg;
        let est = integrate_vector(
            |n, out: &mut [f64]| {
                let k = eps * n.to_right.sinh() * (s_max + n.t).sinh();
                let h = profile.derivatives(k, order, cfg)?;
                let c = n.t.cosh();
                let weights = [1.0, c.powi(-2), c.powi(-4)];
                for (o, &col) in out.iter_mut().zip(cols) {
                    *o = phi(col, k, &h) * weights[BETAS[col]];
                }
                Ok(())
            },
            cols.len(),
            0.0,
            s_max,
            exps,
            cfg,
        )?;
        // N_beta = 2 eps^(1/2 - beta) * integral
        let scale = [2.0, 2.0 / eps, 2.0 / (eps * eps)];
        let mut n = [0.0; 10];
        for (i, &col) in cols.iter().enumerate() {
            n[col] = scale[BETAS[col]] * est.value[i];
        }
        let mut hj = HalfJet {
            t: n[0] / PI,
            ..HalfJet::default()
        };
        if level >= Level::Gradient {
            hj.tb = n[1] / (2.0 * PI);
            hj.ta = (n[3] + 0.5 * n[4]) / (PI * a);
        }
        if level >= Level::Mixed {
            hj.tab = (0.5 * n[5] + 0.75 * n[6]) / (PI * a);
        }
        if level == Level::Full {
            hj.tbb = 0.75 * n[2] / PI;
            hj.taa = (n[7] + n[8] + 0.75 * n[9]) / (PI * a * a);
        }
        Ok(hj)
    }

    /// Rows of the grid in iteration order (x outer, y inner).
    pub fn evaluate_grid(&self, grid: &GridSpec) -> Result<Vec<GridRow>> {
        let points = grid.points()?;
        let level = grid.level;
        let eval = |&(x, y): &(f64, f64)| self.grid_row(x, y, level, grid.eps_min.max(self.eps_min));
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            Ok(points.par_iter().map(eval).collect())
        }
        #[cfg(not(feature = "parallel"))]
        {
            Ok(points.iter().map(eval).collect())
        }
    }

    fn grid_row(&self, x: f64, y: f64, level: Level, eps_min: f64) -> GridRow {
        let mut row = GridRow {
            x,
            y,
            jet: None,
            status: RowStatus::Ok,
        };
        if !(1.0 - x - y >= eps_min) {
            row.status = RowStatus::SkippedDiagonal;
            return row;
        }
        let p = TrianglePoint { x, y };
        let result = self.jet(p, level).or_else(|e| match e {
            // axes carry no second derivatives; keep what is defined there
            Error::Domain(_) if !p.interior() && level > Level::Gradient => {
                self.jet(p, Level::Gradient).or_else(|_| self.jet(p, Level::Value))
            }
            Error::Domain(_) if !p.interior() && level > Level::Value => self.jet(p, Level::Value),
            other => Err(other),
        });
        match result {
            Ok(j) => row.jet = Some(j),
            Err(e) => row.status = RowStatus::Failed(e.to_string()),
        }
        row
    }
}

fn assemble(first: HalfJet, second: HalfJet, level: Level) -> Jet {
    let mut jet = Jet {
        v: first.t + second.t,
        ..Jet::default()
    };
    if level >= Level::Gradient {
        jet.vx = Some(first.ta + second.tb);
        jet.vy = Some(first.tb + second.ta);
    }
    if level >= Level::Mixed {
        jet.vxy = Some(first.tab + second.tab);
    }
    if level == Level::Full {
        jet.vxx = Some(first.taa + second.tbb);
        jet.vyy = Some(first.tbb + second.taa);
    }
    jet
}

/// Rectangular grid clipped to the triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub eps_min: f64,
    pub level: Level,
}

impl GridSpec {
    pub fn square(lo: f64, hi: f64, n: usize) -> Self {
        Self {
            x_min: lo,
            x_max: hi,
            nx: n,
            y_min: lo,
            y_max: hi,
            ny: n,
            eps_min: EPS_MIN,
            level: Level::Gradient,
        }
    }

    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidConfig("grid needs at least one node per axis".into()));
        }
        if self.x_min < 0.0 || self.y_min < 0.0 || self.x_max < self.x_min || self.y_max < self.y_min {
            return Err(Error::InvalidConfig(
                "grid ranges must be non-negative and ordered".into(),
            ));
        }
        let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                vec![lo]
            } else {
                (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
            }
        };
        let xs = axis(self.x_min, self.x_max, self.nx);
        let ys = axis(self.y_min, self.y_max, self.ny);
        Ok(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RowStatus {
    Ok,
    SkippedDiagonal,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub jet: Option<Jet>,
    pub status: RowStatus,
}
