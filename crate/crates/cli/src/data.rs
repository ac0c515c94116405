//! Boundary trace specifications: named builtins or an expression with a
//! declared corner exponent.

use std::fmt;
use std::sync::Arc;

use darboux::abel::SingularFunction;
use darboux::goursat::{Trace, SMOOTH_ORDER};

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Zero,
    KhanPenrose,
    /// `sum c_i t^(i+1)`.
    Poly(Vec<f64>),
    /// `sum c_i t^(i+1-alpha)`.
    Power {
        alpha: f64,
        coeffs: Vec<f64>,
    },
    /// `V(t)` given by an expression in `x`; alpha must be declared.
    Expr {
        source: String,
        alpha: Option<f64>,
    },
}

impl DataSpec {
    /// Parses `zero`, `khan_penrose`, `poly:c0,c1,...`, `power:alpha,c0,...`
    /// or `expr:<expression>`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s, None),
        };
        match (head, rest) {
            ("zero", None) => Ok(DataSpec::Zero),
            ("khan_penrose", None) => Ok(DataSpec::KhanPenrose),
            ("poly", Some(r)) => Ok(DataSpec::Poly(parse_list(r)?)),
            ("power", Some(r)) => {
                let mut v = parse_list(r)?;
                if v.len() < 2 {
                    return Err("power needs alpha followed by at least one coefficient".into());
                }
                let alpha = v.remove(0);
                Ok(DataSpec::Power { alpha, coeffs: v })
            }
            ("expr", Some(r)) => {
                Expr::parse(r).map_err(|e| e.to_string())?;
                Ok(DataSpec::Expr {
                    source: r.to_string(),
                    alpha: None,
                })
            }
            _ => Err(format!(
                "unknown data spec '{s}' (expected zero, khan_penrose, poly:..., power:..., expr:...)"
            )),
        }
    }

    pub fn trace(&self) -> Result<Trace, String> {
        let trace = match self {
            DataSpec::Zero => Trace::zero(),
            DataSpec::KhanPenrose => Trace::khan_penrose(),
            DataSpec::Poly(c) => Trace::polynomial(c).map_err(|e| e.to_string())?,
            DataSpec::Power { alpha, coeffs } => Trace::power(*alpha, coeffs).map_err(|e| e.to_string())?,
            DataSpec::Expr { source, alpha } => {
                let alpha = alpha.ok_or("expression data need a declared alpha")?;
                let e = Arc::new(Expr::parse(source).map_err(|e| e.to_string())?);
                let de = Arc::clone(&e);
                let slope = SingularFunction::new(alpha, SMOOTH_ORDER - 1, move |j, t| de.derivative(j + 1, t))
                    .map_err(|e| e.to_string())?;
                Trace::new(move |t| e.eval(t), slope)
            }
        };
        trace.validate().map_err(|e| e.to_string())?;
        Ok(trace)
    }
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            DataSpec::Zero => write!(f, "zero"),
            DataSpec::KhanPenrose => write!(f, "khan_penrose"),
            DataSpec::Poly(c) => write!(f, "poly:{}", list(c)),
            DataSpec::Power { alpha, coeffs } => write!(f, "power:{alpha},{}", list(coeffs)),
            DataSpec::Expr { source, .. } => write!(f, "expr:{source}"),
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{p}' is not a finite number"))
        })
        .collect()
}
