//! Goursat data on the two characteristic axes.

use std::fmt;
use std::sync::Arc;

use crate::abel::SingularFunction;
use crate::error::{Error, Result};
use crate::special::{factorial, power_derivative};

/// Order reported for data whose derivatives exist to every order.
pub const SMOOTH_ORDER: usize = 12;

pub type ValueFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One boundary trace: the values `V(t)` together with `V'` as a
/// [`SingularFunction`] carrying `V''`, `V'''`, ... as its derivatives.
///
/// A trace built by [`Trace::combine`] also keeps `V'` split into pieces of
/// equal corner behaviour, so quadrature can weight each piece exactly.
#[derive(Clone)]
pub struct Trace {
    value: ValueFn,
    slope: SingularFunction,
    pieces: Vec<SingularFunction>,
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trace").field("slope", &self.slope).finish()
    }
}

impl Trace {
    pub fn new<F>(value: F, slope: SingularFunction) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            pieces: vec![slope.clone()],
            slope,
        }
    }

    pub fn zero() -> Self {
        let slope = SingularFunction::new(0.0, SMOOTH_ORDER - 1, |_, _| 0.0).expect("valid exponent");
        Self::new(|_| 0.0, slope)
    }

    /// `V(t) = sum_i c_i t^(i + 1 - alpha)`.
    pub fn power(alpha: f64, coeffs: &[f64]) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidData("non-finite coefficient".into()));
        }
        let cs: Arc<[f64]> = coeffs.into();
        let cv = Arc::clone(&cs);
        let value = move |t: f64| {
            cv.iter()
                .enumerate()
                .map(|(i, c)| c * power_derivative(i as f64 + 1.0 - alpha, 0, t))
                .sum()
        };
        let slope = SingularFunction::new(alpha, SMOOTH_ORDER - 1, move |j, t| {
            cs.iter()
                .enumerate()
                .map(|(i, c)| c * power_derivative(i as f64 + 1.0 - alpha, j + 1, t))
                .sum()
        })?;
        Ok(Self::new(value, slope))
    }

    /// `V(t) = sum_i c_i t^(i + 1)`.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::power(0.0, coeffs)
    }

    /// Trace of the Khan-Penrose solution: `V(t) = -2 atanh(sqrt t)`, so
    /// `V'(t) = -t^(-1/2) (1 - t)^(-1)` and the corner exponent is 1/2.
    pub fn khan_penrose() -> Self {
        let slope = SingularFunction::new(0.5, SMOOTH_ORDER - 1, |m, t| {
            // Leibniz on t^(-1/2) * (1 - t)^(-1)
            let mut acc = 0.0;
            for i in 0..=m {
                let r = m - i;
                acc += crate::special::binomial(m, i)
                    * power_derivative(-0.5, i, t)
                    * factorial(r)
                    * (1.0 - t).powi(-(r as i32) - 1);
            }
            -acc
        })
        .expect("valid exponent");
        Self::new(|t| -2.0 * t.sqrt().atanh(), slope)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn slope(&self) -> &SingularFunction {
        &self.slope
    }

    /// `V'` as a sum of pieces with distinct endpoint exponents.
    pub fn pieces(&self) -> &[SingularFunction] {
        &self.pieces
    }

    pub fn alpha(&self) -> f64 {
        self.slope.alpha()
    }

    /// Smoothness n: derivatives of V up to order n are available.
    pub fn order(&self) -> usize {
        self.slope.order() + 1
    }

    /// `a * self + b * other`; the corner exponent is the larger of the two.
    pub fn combine(a: f64, p: &Trace, b: f64, q: &Trace) -> Trace {
        let (pv, qv) = (Arc::clone(&p.value), Arc::clone(&q.value));
        let (ps, qs) = (p.slope.clone(), q.slope.clone());
        let order = ps.order().min(qs.order());
        let alpha = ps.alpha().max(qs.alpha());
        let endpoint = ps.endpoint_exponent().max(qs.endpoint_exponent());
        let slope = SingularFunction::from_shared(
            Arc::new(move |j, t| a * ps.raw(j, t) + b * qs.raw(j, t)),
            alpha,
            order,
            endpoint,
        );
        let mut pieces: Vec<SingularFunction> = Vec::new();
        let scaled = p
            .pieces
            .iter()
            .map(|s| s.scaled(a))
            .chain(q.pieces.iter().map(|s| s.scaled(b)));
        for piece in scaled {
            match pieces
                .iter_mut()
                .find(|s| s.alpha() == piece.alpha() && s.endpoint_exponent() == piece.endpoint_exponent())
            {
                Some(same) => {
                    let (alpha, endpoint) = (same.alpha(), same.endpoint_exponent());
                    let order = same.order().min(piece.order());
                    let u = same.clone();
                    *same = SingularFunction::from_shared(
                        Arc::new(move |j, t| u.raw(j, t) + piece.raw(j, t)),
                        alpha,
                        order,
                        endpoint,
                    );
                }
                None => pieces.push(piece),
            }
        }
        Trace {
            value: Arc::new(move |t| a * pv(t) + b * qv(t)),
            slope,
            pieces,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v0 = self.value(0.0);
        if !(v0.abs() <= 1e-8) {
            return Err(Error::InvalidData(format!(
                "trace must vanish at the corner, V(0) = {v0}"
            )));
        }
        self.slope.check_corner_bounds()
    }
}

/// The pair `(V_0, V_1)` prescribed on `y = 0` and `x = 0`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub v0: Trace,
    pub v1: Trace,
}

impl BoundaryData {
    pub fn new(v0: Trace, v1: Trace) -> Result<Self> {
        let d = Self { v0, v1 };
        d.validate()?;
        Ok(d)
    }

    pub fn zero() -> Self {
        Self {
            v0: Trace::zero(),
            v1: Trace::zero(),
        }
    }

    pub fn khan_penrose() -> Self {
        Self {
            v0: Trace::khan_penrose(),
            v1: Trace::khan_penrose(),
        }
    }

    /// `V_0 = sum a_i x^(i+1)`, `V_1 = sum b_i y^(i+1)`.
    pub fn polynomial(a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(Trace::polynomial(a)?, Trace::polynomial(b)?)
    }

    /// Largest corner exponent of the two traces.
    pub fn alpha(&self) -> f64 {
        self.v0.alpha().max(self.v1.alpha())
    }

    pub fn order(&self) -> usize {
        self.v0.order().min(self.v1.order())
    }

    /// Exchanges the roles of the two axes.
    pub fn swapped(&self) -> Self {
        Self {
            v0: self.v1.clone(),
            v1: self.v0.clone(),
        }
    }

    pub fn combine(a: f64, p: &BoundaryData, b: f64, q: &BoundaryData) -> Self {
        Self {
            v0: Trace::combine(a, &p.v0, b, &q.v0),
            v1: Trace::combine(a, &p.v1, b, &q.v1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.v0.validate()?;
        self.v1.validate()
    }

    pub fn require_order(&self, n: usize) -> Result<()> {
        if self.order() < n {
            Err(Error::MissingDerivative {
                needed: n,
                available: self.order(),
            })
        } else {
            Ok(())
        }
    }
}
