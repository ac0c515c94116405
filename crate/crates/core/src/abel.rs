//! The Abel transform `A h(x) = int_0^x h(k) (x - k)^(-1/2) dk`, its
//! derivatives, its inverse, and the two-variable variant.
//!
//! Derivatives never difference quadrature output. Repeatedly applying
//! `d/dx A h = A h / (2x) + A(k h') / x` gives
//! `(d/dx)^m A h = x^(-m) sum_r a_{m,r} A(k^r h^(r))`, where the coefficients
//! follow `a_{m+1,r} = (r - m + 1/2) a_{m,r} + a_{m,r-1}`. Each moment
//! `A(k^r h^(r))` has the same endpoint behaviour as `A h`, so all of them are
//! computed in one pass over the same nodes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_nodes, integrate_vector, EndpointExponents, QuadratureConfig};

pub type DerivativeFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A function on (0, b) with caller-supplied analytic derivatives and a
/// declared corner exponent: `k^(alpha + j) h^(j)(k)` stays bounded as k -> 0.
#[derive(Clone)]
pub struct SingularFunction {
    f: DerivativeFn,
    alpha: f64,
    order: usize,
    /// Leading power used to weight the quadrature: h(k) ~ k^(-endpoint) * smooth.
    endpoint: f64,
}

impl fmt::Debug for SingularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularFunction")
            .field("alpha", &self.alpha)
            .field("order", &self.order)
            .field("endpoint", &self.endpoint)
            .finish()
    }
}

impl SingularFunction {
    /// `f(j, k)` must return the j-th derivative at k for every j <= order.
    pub fn new<F>(alpha: f64, order: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidData(format!("corner exponent {alpha} outside [0, 1)")));
        }
        Ok(Self {
            f: Arc::new(f),
            alpha,
            order,
            endpoint: alpha,
        })
    }

    /// Builds from one closure per derivative order, value first.
    pub fn from_derivatives(alpha: f64, derivatives: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>) -> Result<Self> {
        if derivatives.is_empty() {
            return Err(Error::InvalidData("at least the function value is required".into()));
        }
        let order = derivatives.len() - 1;
        Self::new(alpha, order, move |j, k| derivatives[j](k))
    }

    pub(crate) fn from_shared(f: DerivativeFn, alpha: f64, order: usize, endpoint: f64) -> Self {
        Self {
            f,
            alpha,
            order,
            endpoint,
        }
    }

    /// Overrides the leading power k^(-mu) used for the quadrature weight.
    /// Negative values describe functions vanishing like k^|mu|.
    pub fn with_endpoint_exponent(mut self, mu: f64) -> Result<Self> {
        if !(mu < 1.0) {
            return Err(Error::InvalidExponent(mu));
        }
        self.endpoint = mu;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn endpoint_exponent(&self) -> f64 {
        self.endpoint
    }

    pub fn eval(&self, k: f64) -> f64 {
        (self.f)(0, k)
    }

    pub fn derivative(&self, j: usize, k: f64) -> Result<f64> {
        self.require(j)?;
        Ok((self.f)(j, k))
    }

    pub(crate) fn raw(&self, j: usize, k: f64) -> f64 {
        (self.f)(j, k)
    }

    pub fn require(&self, j: usize) -> Result<()> {
        if j > self.order {
            Err(Error::MissingDerivative {
                needed: j,
                available: self.order,
            })
        } else {
            Ok(())
        }
    }

    /// Spot check of the corner hypothesis at k = 1e-3 and 1e-6.
    pub fn check_corner_bounds(&self) -> Result<()> {
        for j in 0..=self.order.min(3) {
            let at = |k: f64| k.powf(self.alpha + j as f64) * (self.f)(j, k).abs();
            let (coarse, fine) = (at(1e-3), at(1e-6));
            if !fine.is_finite() || fine > 100.0 * coarse.max(1.0) {
                return Err(Error::InvalidData(format!(
                    "k^(alpha+{j}) h^({j}) grows from {coarse:.3e} to {fine:.3e} toward 0"
                )));
            }
        }
        Ok(())
    }

    /// `c * self`.
    pub fn scaled(&self, c: f64) -> Self {
        let f = Arc::clone(&self.f);
        Self::from_shared(Arc::new(move |j, k| c * f(j, k)), self.alpha, self.order, self.endpoint)
    }
}

/// Coefficients a_{m,r}, r = 0..=m, of the m-th derivative of the transform.
pub fn derivative_coefficients(m: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for step in 0..m {
        let mut next = vec![0.0; a.len() + 1];
        for (r, &c) in a.iter().enumerate() {
            next[r] += c * (r as f64 - step as f64 + 0.5);
            next[r + 1] += c;
        }
        a = next;
    }
    a
}

/// Moments `A(k^r h^(r))(x)` for r = 0..=max_r.
pub fn moments(h: &SingularFunction, x: f64, max_r: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    h.require(max_r)?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Abel transform needs x > 0, got {x}")));
    }
    let exps = EndpointExponents::new(h.endpoint, 0.5)?;
    let est = integrate_vector(
        |n, out: &mut [f64]| {
            let w = n.to_right.powf(-0.5);
            let mut kr = 1.0;
            for (r, o) in out.iter_mut().enumerate() {
                *o = kr * h.raw(r, n.t) * w;
                kr *= n.t;
            }
            Ok(())
        },
        max_r + 1,
        0.0,
        x,
        exps,
        cfg,
    )?;
    Ok(est.value)
}

pub fn transform(h: &SingularFunction, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(moments(h, x, 0, cfg)?[0])
}

/// j-th derivative of the transform, assembled from the moment recursion.
pub fn transform_derivative(h: &SingularFunction, x: f64, j: usize, cfg: &QuadratureConfig) -> Result<f64> {
    let m = moments(h, x, j, cfg)?;
    Ok(combine_moments(&m, x, j))
}

/// All derivatives 0..=max_j of the transform at x from a single moment pass.
pub fn transform_derivatives(h: &SingularFunction, x: f64, max_j: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let m = moments(h, x, max_j, cfg)?;
    Ok((0..=max_j).map(|j| combine_moments(&m, x, j)).collect())
}

pub(crate) fn combine_moments(moments: &[f64], x: f64, j: usize) -> f64 {
    let coeffs = derivative_coefficients(j);
    let s: f64 = coeffs.iter().zip(moments).map(|(a, m)| a * m).sum();
    s * x.powi(-(j as i32))
}

/// First derivative through the split form at `delta` in (0, x):
/// h(delta)/sqrt(x - delta) - 1/2 int_0^delta h (x-k)^(-3/2) + int_delta^x h' (x-k)^(-1/2).
pub fn transform_derivative_split(h: &SingularFunction, x: f64, delta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    h.require(1)?;
    if !(delta > 0.0 && delta < x) {
        return Err(Error::Domain(format!("split point {delta} not inside (0, {x})")));
    }
    let near_zero = integrate_nodes(
        |n| h.raw(0, n.t) * (x - n.t).powf(-1.5),
        0.0,
        delta,
        EndpointExponents::new(h.endpoint, 0.0)?,
        cfg,
    )?;
    let near_x = integrate_nodes(
        |n| h.raw(1, n.t) * n.to_right.powf(-0.5),
        delta,
        x,
        EndpointExponents::new(0.0, 0.5)?,
        cfg,
    )?;
    Ok(h.eval(delta) / (x - delta).sqrt() - 0.5 * near_zero + near_x)
}

/// Recovers h(k) from f = A h: h = (1/pi) d/dk A f, using the derivative
/// identity on `f` (which must carry its first derivative).
pub fn invert(f: &SingularFunction, k: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(transform_derivative(f, k, 1, cfg)? / PI)
}

/// The transform of `h` packaged as a [`SingularFunction`] with derivatives up
/// to `order`, each evaluated through the moment recursion.
pub fn transformed(h: &SingularFunction, order: usize, cfg: QuadratureConfig) -> Result<SingularFunction> {
    h.require(order)?;
    let inner = h.clone();
    let endpoint = h.endpoint - 0.5;
    let f: crate::abel::DerivativeFn =
        Arc::new(move |j, x| transform_derivative(&inner, x, j, &cfg).unwrap_or(f64::NAN));
    Ok(SingularFunction::from_shared(
        f,
        (h.alpha - 0.5).max(0.0),
        order,
        endpoint,
    ))
}

/// `f(x, y) = int_0^x g(y, k) h(k) (x - k)^(-1/2) dk` for (x, y) in the interior
/// of the triangle.
pub fn transform_with_parameter<G>(h: &SingularFunction, g: G, x: f64, y: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    let eps = 1.0 - x - y;
    if !(eps > 0.0) {
        return Err(Error::DiagonalBlowup(eps));
    }
    if !(x > 0.0) || y < 0.0 {
        return Err(Error::Domain(format!("({x}, {y}) outside the triangle interior")));
    }
    integrate_nodes(
        |n| g(y, n.t) * h.raw(0, n.t) * n.to_right.powf(-0.5),
        0.0,
        x,
        EndpointExponents::new(h.endpoint, 0.5)?,
        cfg,
    )
}
