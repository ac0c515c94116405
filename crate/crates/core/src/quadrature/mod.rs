//! Adaptive quadrature for integrands with algebraic endpoint singularities.
//!
//! Every panel is integrated with a Gauss-Jacobi rule whose weight absorbs the
//! declared endpoint exponents; the error estimate is the difference between
//! the `base_nodes` rule and the rule of half that size. Panels are bisected
//! globally (largest estimated error first) until the total estimate meets
//! `max(abs_tol, rel_tol * |value|)` for every component.

pub mod jacobi;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::factorial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub base_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 24,
            base_nodes: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be >= 1".into()));
        }
        if self.base_nodes < 2 {
            return Err(Error::InvalidConfig("base_nodes must be >= 2".into()));
        }
        Ok(())
    }

    /// Same configuration with a larger node budget, for reference evaluations.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            base_nodes: self.base_nodes * factor,
            max_subdivisions: self.max_subdivisions * factor,
            ..*self
        }
    }
}

/// Integrand behaves like `(t - a)^(-left)` and `(b - t)^(-right)` at the ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointExponents {
    pub left: f64,
    pub right: f64,
}

impl EndpointExponents {
    pub const NONE: Self = Self { left: 0.0, right: 0.0 };

    pub fn new(left: f64, right: f64) -> Result<Self> {
        let e = Self { left, right };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.left, self.right] {
            if !(v < 1.0) {
                return Err(Error::InvalidExponent(v));
            }
        }
        Ok(())
    }
}

/// A quadrature node with its exact distances to the interval ends.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub t: f64,
    pub from_left: f64,
    pub to_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub panels: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    at_left: bool,
    at_right: bool,
    value: Vec<f64>,
    error: Vec<f64>,
}

struct Problem<'a, F> {
    f: &'a F,
    dim: usize,
    a: f64,
    b: f64,
    exps: EndpointExponents,
    cfg: &'a QuadratureConfig,
}

impl<F> Problem<'_, F>
where
    F: Fn(Node, &mut [f64]) -> Result<()>,
{
    fn panel(&self, lo: f64, hi: f64, at_left: bool, at_right: bool) -> Result<Panel> {
        let mu = if at_left { self.exps.left } else { 0.0 };
        let nu = if at_right { self.exps.right } else { 0.0 };
        let half = 0.5 * (hi - lo);
        let check = (self.cfg.base_nodes / 2).max(2);
        let mut sums = [vec![0.0; self.dim], vec![0.0; self.dim]];
        let mut buf = vec![0.0; self.dim];
        for (slot, n) in [self.cfg.base_nodes, check].into_iter().enumerate() {
            let r = jacobi::rule(n, -nu, -mu);
            for i in 0..n {
                let from_lo = half * r.one_plus[i];
                let to_hi = half * r.one_minus[i];
                let t = if r.nodes[i] < 0.0 { lo + from_lo } else { hi - to_hi };
                let node = Node {
                    t: t.clamp(lo, hi),
                    from_left: if at_left { from_lo } else { (lo - self.a) + from_lo },
                    to_right: if at_right { to_hi } else { (self.b - hi) + to_hi },
                };
                buf.iter_mut().for_each(|v| *v = 0.0);
                (self.f)(node, &mut buf)?;
                for (s, v) in sums[slot].iter_mut().zip(&buf) {
                    if !v.is_finite() {
                        return Err(Error::NonFinite(node.t));
                    }
                    *s += r.full_weights[i] * v;
                }
            }
        }
        let value: Vec<f64> = sums[0].iter().map(|s| half * s).collect();
        let error = sums[0]
            .iter()
            .zip(&sums[1])
            .map(|(p, q)| (half * (p - q)).abs())
            .collect();
        Ok(Panel {
            lo,
            hi,
            at_left,
            at_right,
            value,
            error,
        })
    }
}

/// Adaptive integral over (a, b) of a `dim`-component integrand.
///
/// `f` receives each node together with its distances to `a` and `b`, so
/// singular factors such as `(b - t)^(-1/2)` can be formed without
/// cancellation, and writes its components into the output slice. `exps`
/// declares the endpoint behaviour shared by all components.
pub fn integrate_vector<F>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    exps: EndpointExponents,
    cfg: &QuadratureConfig,
) -> Result<Estimate>
where
    F: Fn(Node, &mut [f64]) -> Result<()>,
{
    integrate_vector_scaled(f, dim, a, b, exps, cfg, &[])
}

/// As [`integrate_vector`], but component `c` is also accepted once its error
/// is below `rel_tol * scales[c]`. Use this when a component may cancel to
/// zero and its integrand is only known to a precision relative to `scales[c]`.
pub fn integrate_vector_scaled<F>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    exps: EndpointExponents,
    cfg: &QuadratureConfig,
    scales: &[f64],
) -> Result<Estimate>
where
    F: Fn(Node, &mut [f64]) -> Result<()>,
{
    cfg.validate()?;
    exps.validate()?;
    if !(a < b) {
        if a == b {
            return Ok(Estimate {
                value: vec![0.0; dim],
                error: vec![0.0; dim],
                panels: 0,
            });
        }
        return Err(Error::Domain(format!("integration interval ({a}, {b}) is reversed")));
    }
    let problem = Problem {
        f: &f,
        dim,
        a,
        b,
        exps,
        cfg,
    };
    let mut panels = vec![problem.panel(a, b, true, true)?];
    let mut splits = 0;
    loop {
        let mut total = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        for p in &panels {
            for c in 0..dim {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
        }
        let tol: Vec<f64> = total
            .iter()
            .enumerate()
            .map(|(c, v)| {
                let scale = scales.get(c).copied().unwrap_or(0.0).abs();
                cfg.abs_tol.max(cfg.rel_tol * v.abs().max(scale))
            })
            .collect();
        if (0..dim).all(|c| err[c] <= tol[c]) {
            return Ok(Estimate {
                value: total,
                error: err,
                panels: panels.len(),
            });
        }
        let worst = |e: &[f64]| {
            (0..dim)
                .map(|c| (e[c], tol[c]))
                .max_by(|p, q| (p.0 / p.1).total_cmp(&(q.0 / q.1)))
                .unwrap_or((0.0, cfg.abs_tol))
        };
        if splits >= cfg.max_subdivisions {
            let (estimate, tolerance) = worst(&err);
            return Err(Error::NonConvergence {
                estimate,
                tolerance,
                subdivisions: splits,
            });
        }
        let ratio = |p: &Panel| (0..dim).map(|c| p.error[c] / tol[c]).fold(0.0_f64, f64::max);
        let idx = (0..panels.len())
            .max_by(|&i, &j| ratio(&panels[i]).total_cmp(&ratio(&panels[j])))
            .expect("at least one panel");
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            let (estimate, tolerance) = worst(&err);
            return Err(Error::NonConvergence {
                estimate,
                tolerance,
                subdivisions: splits,
            });
        }
        panels.push(problem.panel(p.lo, mid, p.at_left, false)?);
        panels.push(problem.panel(mid, p.hi, false, p.at_right)?);
        splits += 1;
    }
}

/// Scalar integral with access to the exact endpoint distances of each node.
pub fn integrate_nodes<F>(f: F, a: f64, b: f64, exps: EndpointExponents, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(Node) -> f64,
{
    integrate_vector(
        |n, out: &mut [f64]| {
            out[0] = f(n);
            Ok(())
        },
        1,
        a,
        b,
        exps,
        cfg,
    )
    .map(|e| e.value[0])
}

/// Improper integral of `f` over (a, b) where `f (t-a)^left (b-t)^right` is bounded.
pub fn integrate_singular<F>(f: F, a: f64, b: f64, exps: EndpointExponents, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_nodes(|n| f(n.t), a, b, exps, cfg)
}

pub fn integrate_smooth<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_singular(f, a, b, EndpointExponents::NONE, cfg)
}

/// Which large-argument kernel a subtracted tail refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// 1 / (sqrt(v) sqrt(v + 1))
    K0Like,
    /// 1 / (sqrt(v - 1) sqrt(v))
    K1Like,
}

/// Integral over (1, inf) of v^j (K(v, 1) - sum_{l <= j} s_l c_l / l! v^(-l-1)),
/// with s_l = (-1)^l for `K0Like` and 1 for `K1Like`.
///
/// Uses v = 1/t; the integrand becomes t^(-j-1) times the Taylor remainder of
/// (1 +- t)^(-1/2), summed as a power series on (0, 1/2] and formed directly on
/// (1/2, 1) where the `K1Like` case carries a (1 - t)^(-1/2) singularity.
pub fn integrate_subtracted_tail(j: usize, kind: KernelKind, cfg: &QuadratureConfig) -> Result<f64> {
    let sign = |l: usize| match kind {
        KernelKind::K0Like => {
            if l.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        }
        KernelKind::K1Like => 1.0,
    };
    // binomial-series coefficients c_l / l! of (1 -+ t)^(-1/2)
    let coeff = |l: usize| crate::asymptotics::c_constant(l) / factorial(l);
    let series = move |t: f64| {
        let mut acc = 0.0;
        let mut term_coeff = coeff(j + 1);
        let mut tp = 1.0;
        let mut l = j + 1;
        loop {
            let term = sign(l) * term_coeff * tp;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs().max(1e-300) || l > j + 400 {
                break;
            }
            // c_{l+1}/(l+1)! = c_l/l! * (2l+1)/(2(l+1))
            term_coeff *= (2 * l + 1) as f64 / (2 * (l + 1)) as f64;
            tp *= t;
            l += 1;
        }
        acc
    };
    let poly = move |t: f64| {
        let mut acc = 0.0;
        let mut tp = 1.0;
        for l in 0..=j {
            acc += sign(l) * coeff(l) * tp;
            tp *= t;
        }
        acc / t.powi(j as i32 + 1)
    };
    let near = integrate_smooth(series, 0.0, 0.5, cfg)?;
    let far = match kind {
        KernelKind::K0Like => {
            integrate_smooth(|t| (1.0 + t).powf(-0.5) / t.powi(j as i32 + 1) - poly(t), 0.5, 1.0, cfg)?
        }
        KernelKind::K1Like => {
            // the singular part alone, so the Jacobi weight leaves a smooth remainder
            let singular = integrate_nodes(
                |n| n.to_right.powf(-0.5) / n.t.powi(j as i32 + 1),
                0.5,
                1.0,
                EndpointExponents::new(0.0, 0.5)?,
                cfg,
            )?;
            singular - integrate_smooth(poly, 0.5, 1.0, cfg)?
        }
    };
    Ok(near + far)
}
