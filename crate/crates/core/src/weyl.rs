//! Weyl scalars of the colliding plane wave spacetime built on V.
//!
//! With null profiles `f(u) = 1/2 - (c_1 u)^n_1`, `g(v) = 1/2 - (c_2 v)^n_2` and
//! `x = 1/2 - g`, `y = 1/2 - f`, `eps = 1 - x - y`:
//!
//! ```text
//! Psi0 = (c_2 n_2 x^(1 - 1/n_2))^2 / 4 (2 V_xx - 3 V_x / eps + eps V_x^3)
//! Psi2 = c_1 n_1 y^(1 - 1/n_1) c_2 n_2 x^(1 - 1/n_2) (V_x V_y - 1 / eps^2)
//! Psi4 = (c_1 n_1 y^(1 - 1/n_1))^2 / 4 (2 V_yy - 3 V_y / eps + eps V_y^3)
//! ```

use serde::{Deserialize, Serialize};

use crate::asymptotics::{Expander, ExpansionTable};
use crate::error::{Error, Result};
use crate::goursat::{BoundaryData, Level, SolutionField, TrianglePoint};
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub c1: f64,
    pub c2: f64,
    pub n1: f64,
    pub n2: f64,
}

impl Default for WaveProfile {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            n1: 2.0,
            n2: 2.0,
        }
    }
}

impl WaveProfile {
    pub fn new(c1: f64, c2: f64, n1: f64, n2: f64) -> Result<Self> {
        let p = Self { c1, c2, n1, n2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("n1", self.n1), ("n2", self.n2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("profile {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// `-f'(u)` expressed through y.
    pub fn f_prime_magnitude(&self, y: f64) -> f64 {
        self.c1 * self.n1 * y.powf(1.0 - 1.0 / self.n1)
    }

    /// `-g'(v)` expressed through x.
    pub fn g_prime_magnitude(&self, x: f64) -> f64 {
        self.c2 * self.n2 * x.powf(1.0 - 1.0 / self.n2)
    }

    /// The profile with the roles of the two waves exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            c1: self.c2,
            c2: self.c1,
            n1: self.n2,
            n2: self.n1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullCoordinates {
    pub u: f64,
    pub v: f64,
    pub f: f64,
    pub g: f64,
}

pub fn map_coordinates(p: TrianglePoint, profile: &WaveProfile) -> Result<NullCoordinates> {
    profile.validate()?;
    let root = |t: f64, n: f64, c: f64| if t == 0.0 { 0.0 } else { t.powf(1.0 / n) / c };
    Ok(NullCoordinates {
        u: root(p.y, profile.n1, profile.c1),
        v: root(p.x, profile.n2, profile.c2),
        f: 0.5 - p.y,
        g: 0.5 - p.x,
    })
}

/// Recovers `(x, y)` from the null coordinates `(u, v)`.
pub fn inverse_map(u: f64, v: f64, profile: &WaveProfile) -> Result<TrianglePoint> {
    profile.validate()?;
    if u < 0.0 || v < 0.0 {
        return Err(Error::Domain(format!(
            "null coordinates ({u}, {v}) must be non-negative"
        )));
    }
    TrianglePoint::new((profile.c2 * v).powf(profile.n2), (profile.c1 * u).powf(profile.n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylComponents {
    pub psi0: f64,
    pub psi2: f64,
    pub psi4: f64,
}

/// The scalars from first and second derivatives of V at an interior point.
pub fn weyl_from_derivatives(
    p: TrianglePoint,
    profile: &WaveProfile,
    (vx, vy): (f64, f64),
    (vxx, vyy): (f64, f64),
) -> Result<WeylComponents> {
    if !p.interior() {
        return Err(Error::Domain("Weyl scalars are evaluated for x, y > 0".into()));
    }
    let eps = p.eps();
    let (fp, gp) = (profile.f_prime_magnitude(p.y), profile.g_prime_magnitude(p.x));
    let bracket = |d2: f64, d1: f64| 2.0 * d2 - 3.0 * d1 / eps + eps * d1 * d1 * d1;
    Ok(WeylComponents {
        psi0: gp * gp / 4.0 * bracket(vxx, vx),
        psi2: fp * gp * (vx * vy - 1.0 / (eps * eps)),
        psi4: fp * fp / 4.0 * bracket(vyy, vy),
    })
}

pub fn weyl_direct(field: &SolutionField, p: TrianglePoint, profile: &WaveProfile) -> Result<WeylComponents> {
    profile.validate()?;
    let j = field.jet(p, Level::Full)?;
    let get = |v: Option<f64>| v.ok_or_else(|| Error::Domain("derivative unavailable".into()));
    weyl_from_derivatives(p, profile, (get(j.vx)?, get(j.vy)?), (get(j.vxx)?, get(j.vyy)?))
}

/// Near-diagonal series of the Weyl scalars along a line of fixed `x`.
///
/// The `x`-expansion (`f`, `gamma`, `big_g`) is computed once. The
/// coefficients that describe V at fixed `y` come from the expansion of the
/// data with `V_0` and `V_1` exchanged, taken at abscissa `y = 1 - x - eps`,
/// so they are recomputed for each `eps`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylSeries {
    pub x: f64,
    pub order: usize,
    pub f: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(rename = "G")]
    pub big_g: Vec<f64>,
    /// `j g~_j + f_j` with `g~` the swapped-data coefficients at `x`.
    pub gamma_t: Vec<f64>,
    #[serde(rename = "G_t")]
    pub big_g_t: Vec<f64>,
    pub profile: WaveProfile,
    #[serde(skip)]
    data: Option<BoundaryData>,
    #[serde(skip)]
    expander: Option<Expander>,
}

/// `gamma_j = j g_j + f_j`.
pub fn gamma_coefficients(f: &[f64], g: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(g)
        .enumerate()
        .map(|(j, (f, g))| j as f64 * g + f)
        .collect()
}

/// `G_j = (j - 1) gamma_j + j f_j`.
pub fn big_g_coefficients(f: &[f64], gamma: &[f64]) -> Vec<f64> {
    f.iter()
        .zip(gamma)
        .enumerate()
        .map(|(j, (f, gm))| (j as f64 - 1.0) * gm + j as f64 * f)
        .collect()
}

impl WeylSeries {
    pub fn new(
        data: &BoundaryData,
        x: f64,
        order: usize,
        profile: &WaveProfile,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        Self::with_expander(data, x, order, profile, Expander::new(*cfg))
    }

    pub fn with_expander(
        data: &BoundaryData,
        x: f64,
        order: usize,
        profile: &WaveProfile,
        expander: Expander,
    ) -> Result<Self> {
        profile.validate()?;
        if order < 1 {
            return Err(Error::InvalidConfig("Weyl series needs order N >= 1".into()));
        }
        let table = expander.expansion(data, x, order)?;
        Ok(Self::from_table(&table, profile, Some(data.clone()), Some(expander)))
    }

    /// Coefficient arrays from an existing table; such a series can report
    /// its coefficients but not evaluate (it has no data for the `y` side).
    pub fn from_table(
        table: &ExpansionTable,
        profile: &WaveProfile,
        data: Option<BoundaryData>,
        expander: Option<Expander>,
    ) -> Self {
        let gamma = gamma_coefficients(&table.f, &table.g);
        let big_g = big_g_coefficients(&table.f, &gamma);
        let gamma_t = gamma_coefficients(&table.f, &table.g_swapped);
        let big_g_t = big_g_coefficients(&table.f, &gamma_t);
        Self {
            x: table.x,
            order: table.order,
            f: table.f.clone(),
            gamma,
            big_g,
            gamma_t,
            big_g_t,
            profile: *profile,
            data,
            expander,
        }
    }

    /// Series values at `(x, 1 - x - eps)`.
    pub fn evaluate(&self, eps: f64) -> Result<WeylComponents> {
        let (data, expander) = match (&self.data, &self.expander) {
            (Some(d), Some(e)) => (d, e),
            _ => return Err(Error::InvalidConfig("series was built without boundary data".into())),
        };
        let y = 1.0 - self.x - eps;
        if !(eps > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!(
                "eps = {eps} leaves the triangle at x = {}",
                self.x
            )));
        }
        let (ft, gt) = expander.coefficients(&data.swapped(), y, self.order)?;
        let gamma_t = gamma_coefficients(&ft, &gt);
        let big_g_t = big_g_coefficients(&ft, &gamma_t);
        let p = TrianglePoint::new(self.x, y)?;
        Ok(series_components(
            p,
            &self.profile,
            eps,
            Side {
                f: &self.f,
                gamma: &self.gamma,
                big_g: &self.big_g,
            },
            Side {
                f: &ft,
                gamma: &gamma_t,
                big_g: &big_g_t,
            },
        ))
    }
}

struct Side<'a> {
    f: &'a [f64],
    gamma: &'a [f64],
    big_g: &'a [f64],
}

/// `y` side describes V at fixed x (drives V_y, V_yy); `x` side at fixed y.
fn series_components(p: TrianglePoint, profile: &WaveProfile, eps: f64, ys: Side, xs: Side) -> WeylComponents {
    let ln = eps.ln();
    let n = ys.f.len();
    let pow = |j: usize| eps.powi(j as i32 - 2);
    // -V_y = sum (j f_j ln + gamma_j) eps^(j-1), likewise -V_x
    let first = |s: &Side| -> f64 {
        (0..n)
            .map(|j| (j as f64 * s.f[j] * ln + s.gamma[j]) * eps.powi(j as i32 - 1))
            .sum()
    };
    let scalar4 = |s: &Side| -> f64 {
        let mut acc = 0.0;
        for j in 0..n {
            let jf = j as f64;
            acc += (2.0 * s.big_g[j] + 3.0 * s.gamma[j]) * pow(j);
            acc += jf * (2.0 * jf + 1.0) * s.f[j] * pow(j) * ln;
        }
        let m = first(s);
        acc - eps * m * m * m
    };
    let mut psi2 = 0.0;
    for j in 0..n {
        let (mut plain, mut single, mut double) = (0.0, 0.0, 0.0);
        for k in 0..=j {
            let l = j - k;
            plain += ys.gamma[k] * xs.gamma[l];
            single += k as f64 * ys.f[k] * xs.gamma[l] + k as f64 * xs.f[k] * ys.gamma[l];
            double += (k * l) as f64 * ys.f[k] * xs.f[l];
        }
        if j == 0 {
            plain -= 1.0;
        }
        psi2 += (plain + single * ln + double * ln * ln) * pow(j);
    }
    let (fp, gp) = (profile.f_prime_magnitude(p.y), profile.g_prime_magnitude(p.x));
    WeylComponents {
        psi0: gp * gp / 4.0 * scalar4(&xs),
        psi2: fp * gp * psi2,
        psi4: fp * fp / 4.0 * scalar4(&ys),
    }
}

pub fn weyl_series(
    data: &BoundaryData,
    x: f64,
    order: usize,
    profile: &WaveProfile,
    cfg: &QuadratureConfig,
) -> Result<WeylSeries> {
    WeylSeries::new(data, x, order, profile, cfg)
}
