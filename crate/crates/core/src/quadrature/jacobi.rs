//! Gauss-Jacobi rules for the weight (1 - x)^a (1 + x)^b on [-1, 1].
//!
//! Nodes come from the eigenvalues of the Jacobi matrix (implicit QL), are
//! polished by Newton steps on the orthonormal recurrence, and the weights
//! use the Christoffel sum 1 / sum_k p_k(x_i)^2.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::special::ln_gamma;

#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub nodes: Vec<f64>,
    /// 1 + x_i, kept separately so distances to the left end stay exact.
    pub one_plus: Vec<f64>,
    /// 1 - x_i.
    pub one_minus: Vec<f64>,
    /// w_i (1 + x_i)^(-b) (1 - x_i)^(-a): weights for the full integrand, so
    /// that the sum of weights times f(x_i) approximates the plain integral of f.
    pub full_weights: Vec<f64>,
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static RwLock<HashMap<RuleKey, Arc<JacobiRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<JacobiRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached n-point rule; `a` is the exponent at x = +1, `b` at x = -1.
pub fn rule(n: usize, a: f64, b: f64) -> Arc<JacobiRule> {
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(r) = cache().read().expect("rule cache poisoned").get(&key) {
        return Arc::clone(r);
    }
    let built = Arc::new(build(n, a, b));
    let mut guard = cache().write().expect("rule cache poisoned");
    Arc::clone(guard.entry(key).or_insert(built))
}

fn recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    // off[k] = sqrt(beta_{k+1}), coupling k and k+1; length n (last used by p_n)
    let mut off = vec![0.0; n];
    let ab = a + b;
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        *d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            let s = 2.0 * kf + ab;
            (b * b - a * a) / (s * (s + 2.0))
        };
    }
    for (idx, o) in off.iter_mut().enumerate() {
        let k = (idx + 1) as f64;
        let beta = if idx == 0 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            let s = 2.0 * k + ab;
            4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        *o = beta.sqrt();
    }
    (diag, off)
}

fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n < 2 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "implicit QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Orthonormal p_0..p_{n-1} summed squares, p_n and p_n' at x.
fn evaluate(x: f64, diag: &[f64], off: &[f64], p0: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let (mut prev, mut cur) = (0.0, p0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    let mut sum_sq = 0.0;
    let mut off_prev = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let next = ((x - diag[k]) * cur - off_prev * prev) / off[k];
        let dnext = (cur + (x - diag[k]) * dcur - off_prev * dprev) / off[k];
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
        off_prev = off[k];
    }
    (sum_sq, cur, dcur)
}

fn build(n: usize, a: f64, b: f64) -> JacobiRule {
    assert!(n >= 1 && a > -1.0 && b > -1.0, "invalid Jacobi rule request");
    let (diag, off) = recurrence(n, a, b);
    let mut d = diag.clone();
    let mut e = off.clone();
    tridiagonal_eigenvalues(&mut d, &mut e);
    d.sort_by(|p, q| p.partial_cmp(q).expect("NaN node"));

    let ln_mu0 = (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0);
    let p0 = (-0.5 * ln_mu0).exp();

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &guess in &d {
        let mut x = guess;
        for _ in 0..3 {
            let (_, pn, dpn) = evaluate(x, &diag, &off, p0);
            if dpn == 0.0 {
                break;
            }
            let step = pn / dpn;
            x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let x = x.clamp(-1.0, 1.0);
        let (sum_sq, _, _) = evaluate(x, &diag, &off, p0);
        nodes.push(x);
        weights.push(1.0 / sum_sq);
    }
    let one_plus: Vec<f64> = nodes.iter().map(|x| 1.0 + x).collect();
    let one_minus: Vec<f64> = nodes.iter().map(|x| 1.0 - x).collect();
    let full_weights = weights
        .iter()
        .zip(one_plus.iter().zip(&one_minus))
        .map(|(w, (p, m))| w * p.powf(-b) * m.powf(-a))
        .collect();
    JacobiRule {
        nodes,
        one_plus,
        one_minus,
        full_weights,
    }
}
