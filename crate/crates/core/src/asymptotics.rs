//! Expansion of `V(x, 1 - x - eps)` to all orders as `eps -> 0`:
//!
//! ```text
//! V ~ sum_j f_j(x) eps^j ln eps + sum_j g_j(x) eps^j,
//! f_j = -c_j (h_0^(j)(x) + h_1^(j)(x)) / (pi j!^2),
//! g_j = ((-1)^j A_j(x) + B_j(x)) / pi,
//! ```
//!
//! with `h_1(k) = h~(1 - k)`. Both `A_j` and `B_j` are instances of one
//! expression: `A_j = P_j[h_0](x) + h_0^(j)(x) U0_j / j!` and
//! `B_j = P_j[h~](1 - x) + h_1^(j)(x) U1_j / j!`, where
//!
//! ```text
//! P_j[h](x) = c_j/j! ( int_0^x H^j(x,k) (x-k)^(-j-1) dk
//!                      + sum_{l<j} (-1)^l h^(l)(x) x^(l-j) / (l! (l-j))
//!                      + (-1)^j h^(j)(x) ln x / j! )
//! ```
//!
//! and `H^j` is the Taylor remainder of `h` about `x`. The data-independent
//! numbers `U0_j`, `U1_j` collect the kernel integrals and are computed once.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goursat::{BoundaryData, Profile, SolutionField, TrianglePoint};
use crate::quadrature::{
    integrate_singular, integrate_subtracted_tail, integrate_vector, integrate_vector_scaled, EndpointExponents,
    KernelKind, QuadratureConfig,
};
use crate::special::factorial;

/// Highest expansion order accepted.
pub const J_CAP: usize = 6;

/// `c_j = (1/2)(3/2)...(j - 1/2) = 2^-j prod_{l<j} (2l + 1)`.
pub fn c_constant(j: usize) -> f64 {
    (0..j).fold(1.0, |acc, l| acc * (l as f64 + 0.5))
}

/// The x- and data-independent numbers entering `A_j` and `B_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    pub c: Vec<f64>,
    /// `int_0^1 v^j K_0(v,1) dv` + subtracted tail + `sum_{l<j} (-1)^l c_l / (l! (l-j))`.
    pub tail_k0: Vec<f64>,
    /// Subtracted tail + `sum_{l<j} c_l / (l! (l-j))`.
    pub tail_k1: Vec<f64>,
}

impl UniversalConstants {
    /// Computed once per process with a tight private tolerance.
    pub fn get() -> &'static UniversalConstants {
        static CONSTANTS: OnceLock<UniversalConstants> = OnceLock::new();
        CONSTANTS.get_or_init(|| Self::compute(J_CAP).expect("universal constants converge"))
    }

    pub fn compute(max_j: usize) -> Result<Self> {
        let cfg = QuadratureConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_subdivisions: 64,
            base_nodes: 32,
        };
        let c: Vec<f64> = (0..=max_j).map(c_constant).collect();
        let mut tail_k0 = Vec::with_capacity(max_j + 1);
        let mut tail_k1 = Vec::with_capacity(max_j + 1);
        for j in 0..=max_j {
            let head = integrate_singular(
                |v| v.powf(j as f64 - 0.5) / (1.0 + v).sqrt(),
                0.0,
                1.0,
                EndpointExponents::new(0.5, 0.0)?,
                &cfg,
            )?;
            let (mut s0, mut s1) = (0.0, 0.0);
            for (l, cl) in c.iter().enumerate().take(j) {
                let r = cl / (factorial(l) * (l as f64 - j as f64));
                s0 += if l % 2 == 0 { r } else { -r };
                s1 += r;
            }
            tail_k0.push(head + integrate_subtracted_tail(j, KernelKind::K0Like, &cfg)? + s0);
            tail_k1.push(integrate_subtracted_tail(j, KernelKind::K1Like, &cfg)? + s1);
        }
        Ok(Self { c, tail_k0, tail_k1 })
    }

    pub fn max_order(&self) -> usize {
        self.c.len() - 1
    }
}

/// Coefficients of the expansion at one abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTable {
    pub x: f64,
    pub order: usize,
    /// `eps^j ln eps` coefficients.
    pub f: Vec<f64>,
    /// `eps^j` coefficients.
    pub g: Vec<f64>,
    /// `g_j` of the data with `V_0` and `V_1` exchanged, at the same `x`.
    pub g_swapped: Vec<f64>,
}

impl ExpansionTable {
    pub fn zero(x: f64, order: usize) -> Self {
        Self {
            x,
            order,
            f: vec![0.0; order + 1],
            g: vec![0.0; order + 1],
            g_swapped: vec![0.0; order + 1],
        }
    }
}

/// Partial sum `sum_{j<=J} (f_j ln eps + g_j) eps^j`.
pub fn evaluate_expansion(table: &ExpansionTable, eps: f64) -> f64 {
    let ln = eps.ln();
    let mut acc = 0.0;
    let mut p = 1.0;
    for (f, g) in table.f.iter().zip(&table.g) {
        acc += (f * ln + g) * p;
        p *= eps;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    H0,
    H1,
}

/// `h_0^(j)(k)` or `h_1^(j)(k)`.
pub fn h_function(data: &BoundaryData, which: Which, k: f64, j: usize, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(h_derivatives(data, which, k, j, cfg)?[j])
}

fn h_derivatives(data: &BoundaryData, which: Which, k: f64, j: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    data.require_order(j + 1)?;
    match which {
        Which::H0 => Profile::new(&data.v0).derivatives(k, j, cfg),
        Which::H1 => {
            let d = Profile::new(&data.v1).derivatives(1.0 - k, j, cfg)?;
            Ok(d.into_iter()
                .enumerate()
                .map(|(l, v)| if l % 2 == 0 { v } else { -v })
                .collect())
        }
    }
}

/// `H^j(x, k)`: `h(k)` minus its order-j Taylor polynomial about `x`.
pub fn taylor_remainder(
    data: &BoundaryData,
    which: Which,
    x: f64,
    k: f64,
    j: usize,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let at_x = h_derivatives(data, which, x, j, cfg)?;
    let hk = h_function(data, which, k, 0, cfg)?;
    let mut poly = 0.0;
    let mut p = 1.0;
    for (l, d) in at_x.iter().enumerate() {
        poly += d * p / factorial(l);
        p *= k - x;
    }
    Ok(hk - poly)
}

/// Computes expansion tables; the universal constants can be replaced, which
/// the verification suite uses to check that a corrupted constant is caught.
#[derive(Debug, Clone)]
pub struct Expander {
    cfg: QuadratureConfig,
    constants: Arc<UniversalConstants>,
}

impl Expander {
    pub fn new(cfg: QuadratureConfig) -> Self {
        Self {
            cfg,
            constants: Arc::new(UniversalConstants::get().clone()),
        }
    }

    pub fn with_constants(mut self, constants: UniversalConstants) -> Self {
        self.constants = Arc::new(constants);
        self
    }

    pub fn constants(&self) -> &UniversalConstants {
        &self.constants
    }

    fn check(&self, data: &BoundaryData, x: f64, order: usize) -> Result<()> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("expansion abscissa {x} outside (0, 1)")));
        }
        if order > self.constants.max_order() {
            return Err(Error::InvalidConfig(format!(
                "expansion order {order} exceeds the cap {}",
                self.constants.max_order()
            )));
        }
        data.require_order(order + 2)
    }

    pub fn expansion(&self, data: &BoundaryData, x: f64, order: usize) -> Result<ExpansionTable> {
        self.check(data, x, order)?;
        let p0 = Profile::new(&data.v0);
        let p1 = Profile::new(&data.v1);
        let direct = self.parts(&p0, &p1, x, order)?;
        let swapped = self.parts(&p1, &p0, x, order)?;
        Ok(ExpansionTable {
            x,
            order,
            f: direct.f,
            g: direct.g,
            g_swapped: swapped.g,
        })
    }

    /// `(f, g)` only, without the swapped-data column.
    pub fn coefficients(&self, data: &BoundaryData, x: f64, order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(data, x, order)?;
        let parts = self.parts(&Profile::new(&data.v0), &Profile::new(&data.v1), x, order)?;
        Ok((parts.f, parts.g))
    }

    pub fn coefficient_a(&self, data: &BoundaryData, j: usize, x: f64) -> Result<f64> {
        self.check(data, x, j)?;
        let p0 = Profile::new(&data.v0);
        let at_x = p0.derivatives(x, j + 1, &self.cfg)?;
        let pj = self.p_sums(&p0, x, j, &at_x)?;
        Ok(pj[j] + at_x[j] / factorial(j) * self.constants.tail_k0[j])
    }

    pub fn coefficient_b(&self, data: &BoundaryData, j: usize, x: f64) -> Result<f64> {
        self.check(data, x, j)?;
        let p1 = Profile::new(&data.v1);
        let at = p1.derivatives(1.0 - x, j + 1, &self.cfg)?;
        let pj = self.p_sums(&p1, 1.0 - x, j, &at)?;
        let h1j = if j.is_multiple_of(2) { at[j] } else { -at[j] };
        Ok(pj[j] + h1j / factorial(j) * self.constants.tail_k1[j])
    }

    /// f and g with `a` in the role of `h_0` and `b` in the role of `h~`.
    fn parts(&self, a: &Profile, b: &Profile, x: f64, order: usize) -> Result<Parts> {
        let ha = a.derivatives(x, order + 1, &self.cfg)?;
        let hb = b.derivatives(1.0 - x, order + 1, &self.cfg)?;
        let pa = self.p_sums(a, x, order, &ha)?;
        let pb = self.p_sums(b, 1.0 - x, order, &hb)?;
        let mut f = Vec::with_capacity(order + 1);
        let mut g = Vec::with_capacity(order + 1);
        for j in 0..=order {
            let jf = factorial(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let h1j = sign * hb[j];
            f.push(-self.constants.c[j] * (ha[j] + h1j) / (PI * jf * jf));
            let aj = pa[j] + ha[j] / jf * self.constants.tail_k0[j];
            let bj = pb[j] + h1j / jf * self.constants.tail_k1[j];
            g.push((sign * aj + bj) / PI);
        }
        Ok(Parts { f, g })
    }

    /// `P_j[h](x)` for j = 0..=order; `at_x` holds `h^(l)(x)` for l <= order + 1.
    fn p_sums(&self, h: &Profile, x: f64, order: usize, at_x: &[f64]) -> Result<Vec<f64>> {
        let integrals = remainder_integrals(h, x, order, at_x, &self.cfg)?;
        let ln_x = x.ln();
        Ok((0..=order)
            .map(|j| {
                let jf = factorial(j);
                let mut s = integrals[j];
                for (l, hl) in at_x.iter().enumerate().take(j) {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    s += sign * hl * x.powi(l as i32 - j as i32) / (factorial(l) * (l as f64 - j as f64));
                }
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * at_x[j] * ln_x / jf;
                self.constants.c[j] / jf * s
            })
            .collect())
    }
}

struct Parts {
    f: Vec<f64>,
    g: Vec<f64>,
}

/// `int_0^x H^j(x,k) (x-k)^(-j-1) dk` for j = 0..=order, split at x/2.
///
/// On `(0, x/2)` the data singularity `k^(1/2 - alpha)` is declared and the
/// Taylor pieces are integrated in closed form. On `(x/2, x)` the ratio is
/// written as `(-1)^(j+1)/j! int_0^1 h^(j+1)(x - s(x-k)) (1-s)^j ds`, which
/// is bounded, and integrated as an iterated integral.
fn remainder_integrals(h: &Profile, x: f64, order: usize, at_x: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let dim = order + 1;
    let half = 0.5 * x;
    // natural size of the j-th integral: the Taylor data it is built from
    let scales: Vec<f64> = (0..dim)
        .map(|j| {
            at_x.iter()
                .enumerate()
                .take(j + 2)
                .map(|(l, hl)| hl.abs() * x.powi(l as i32 - j as i32) / factorial(l))
                .sum::<f64>()
        })
        .collect();
    let inner_scales: Vec<f64> = scales.iter().enumerate().map(|(j, s)| s * factorial(j) / x).collect();
    let far = integrate_vector_scaled(
        |n, out: &mut [f64]| {
            let hk = h.derivatives(n.t, 0, cfg)?[0];
            let u = x - n.t;
            let mut p = hk / u;
            for o in out.iter_mut() {
                *o = p;
                p /= u;
            }
            Ok(())
        },
        dim,
        0.0,
        half,
        EndpointExponents::new(h.alpha() - 0.5, 0.0)?,
        cfg,
        &scales,
    )?
    .value;
    let near = integrate_vector_scaled(
        |n, out: &mut [f64]| {
            let u = x - n.t;
            let inner = integrate_vector_scaled(
                |m, acc: &mut [f64]| {
                    let d = h.derivatives(x - m.t * u, order + 1, cfg)?;
                    let mut w = 1.0;
                    for (j, a) in acc.iter_mut().enumerate() {
                        *a = d[j + 1] * w;
                        w *= m.to_right;
                    }
                    Ok(())
                },
                dim,
                0.0,
                1.0,
                EndpointExponents::NONE,
                cfg,
                &inner_scales,
            )?;
            for (j, o) in out.iter_mut().enumerate() {
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                *o = sign * inner.value[j] / factorial(j);
            }
            Ok(())
        },
        dim,
        half,
        x,
        EndpointExponents::NONE,
        cfg,
        &scales,
    )?
    .value;
    Ok((0..dim)
        .map(|j| {
            // Taylor polynomial over (0, x/2): int_{x/2}^{x} u^(l-j-1) du
            let mut taylor = 0.0;
            for (l, hl) in at_x.iter().enumerate().take(j + 1) {
                let p = l as i32 - j as i32 - 1;
                let piece = if p == -1 {
                    std::f64::consts::LN_2
                } else {
                    let q = (p + 1) as f64;
                    (x.powi(p + 1) - half.powi(p + 1)) / q
                };
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                taylor += sign * hl / factorial(l) * piece;
            }
            far[j] - taylor + near[j]
        })
        .collect())
}

pub fn expansion(data: &BoundaryData, x: f64, order: usize, cfg: &QuadratureConfig) -> Result<ExpansionTable> {
    Expander::new(*cfg).expansion(data, x, order)
}

pub fn coefficient_a(data: &BoundaryData, j: usize, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Expander::new(*cfg).coefficient_a(data, j, x)
}

pub fn coefficient_b(data: &BoundaryData, j: usize, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Expander::new(*cfg).coefficient_b(data, j, x)
}

/// `g_0` and `g_1` through derivatives of `int_0^x h(k) ln(4(x-k)) dk`,
/// an independent route to the first two power coefficients.
pub fn low_order_g(data: &BoundaryData, x: f64, cfg: &QuadratureConfig) -> Result<[f64; 2]> {
    data.require_order(3)?;
    let p0 = Profile::new(&data.v0);
    let p1 = Profile::new(&data.v1);
    let (a1, a2) = log_moment_derivatives(&p0, x, cfg)?;
    let (b1, b2) = log_moment_derivatives(&p1, 1.0 - x, cfg)?;
    Ok([(a1 + b1) / PI, (a2 - b2) / (2.0 * PI)])
}

/// First and second derivatives of `F(x) = int_0^x h(k) ln(4(x-k)) dk`,
/// split at `delta = x/2`.
pub fn log_moment_derivatives(h: &Profile, x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let delta = 0.5 * x;
    let len = x - delta;
    let left = integrate_vector(
        |n, out: &mut [f64]| {
            let hk = h.derivatives(n.t, 0, cfg)?[0];
            let u = x - n.t;
            out[0] = hk / u;
            out[1] = hk / (u * u);
            Ok(())
        },
        2,
        0.0,
        delta,
        EndpointExponents::new(h.alpha() - 0.5, 0.0)?,
        cfg,
    )?
    .value;
    // x - k = len r^3 makes the log factor integrable by plain panels
    let logs = integrate_vector(
        |n, out: &mut [f64]| {
            let r = n.t;
            let u = len * r * r * r;
            let d = h.derivatives(x - u, 2, cfg)?;
            let w = (4.0 * u).ln() * 3.0 * len * r * r;
            out[0] = d[1] * w;
            out[1] = d[2] * w;
            Ok(())
        },
        2,
        0.0,
        1.0,
        EndpointExponents::NONE,
        &QuadratureConfig {
            max_subdivisions: cfg.max_subdivisions.max(48),
            ..*cfg
        },
    )?
    .value;
    let hd = h.derivatives(delta, 1, cfg)?;
    let l = (4.0 * len).ln();
    let first = left[0] + hd[0] * l + logs[0];
    let second = -left[1] + hd[0] / len + hd[1] * l + logs[1];
    Ok((first, second))
}

/// Least-squares slope of `ln|R_J|` against `ln eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub x: f64,
    pub order: usize,
    pub slope: f64,
    /// Samples `(eps, R_J(eps))` used in the fit.
    pub samples: Vec<(f64, f64)>,
    /// Samples discarded as indistinguishable from quadrature noise.
    pub below_noise: usize,
}

/// Fits the decay rate of `R_J(eps) = V(x, 1-x-eps) - expansion_J(eps)` over
/// `n` log-spaced `eps` in `range`. Samples with `|R_J|` under the quadrature
/// noise floor `max(abs_tol, rel_tol |V|)` are discarded; fewer than three
/// remaining samples is a [`Error::DegenerateFit`].
pub fn remainder_order_fit(
    data: &BoundaryData,
    x: f64,
    order: usize,
    range: (f64, f64),
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<OrderFit> {
    let (lo, hi) = range;
    if n < 5 || !(lo > 0.0 && lo < hi && hi <= 0.05) {
        return Err(Error::InvalidConfig(format!(
            "order fit needs >= 5 samples in (0, 0.05], got {n} over [{lo}, {hi}]"
        )));
    }
    let table = expansion(data, x, order, cfg)?;
    let field = SolutionField::new(data.clone(), *cfg)?.with_eps_min(lo.min(crate::goursat::EPS_MIN))?;
    let mut samples = Vec::new();
    let mut below_noise = 0;
    for i in 0..n {
        let eps = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        let v = field.evaluate(TrianglePoint::new(x, 1.0 - x - eps)?)?;
        let r = v - evaluate_expansion(&table, eps);
        let floor = cfg.abs_tol.max(cfg.rel_tol * v.abs());
        if r.abs() <= floor {
            below_noise += 1;
        } else {
            samples.push((eps, r));
        }
    }
    if samples.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "{} of {n} remainders at or below the quadrature noise floor",
            below_noise
        )));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(e, r)| (e.ln(), r.abs().ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(OrderFit {
        x,
        order,
        slope: sxy / sxx,
        samples,
        below_noise,
    })
}
