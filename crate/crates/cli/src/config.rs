//! Run configuration: flat `section.key = value` lines, `#` comments.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use darboux::asymptotics::J_CAP;
use darboux::goursat::{BoundaryData, GridSpec, Level, EPS_MIN};
use darboux::verify::{Fault, Suite};
use darboux::weyl::WaveProfile;
use darboux::QuadratureConfig;
use thiserror::Error;

use crate::data::{parse_list, DataSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylMethod {
    Direct,
    Series,
    Both,
}

impl FromStr for WeylMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(WeylMethod::Direct),
            "series" => Ok(WeylMethod::Series),
            "both" => Ok(WeylMethod::Both),
            _ => Err(format!("unknown method '{s}' (direct, series or both)")),
        }
    }
}

impl fmt::Display for WeylMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeylMethod::Direct => "direct",
            WeylMethod::Series => "series",
            WeylMethod::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub eps_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandConfig {
    pub x: Vec<f64>,
    pub order: usize,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylConfig {
    pub x: Vec<f64>,
    pub eps: Vec<f64>,
    pub order: usize,
    pub method: WeylMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub path: Option<String>,
    /// Unset means csv for tables and json for verification reports.
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub v0: DataSpec,
    pub v1: DataSpec,
    pub grid: GridConfig,
    pub expand: ExpandConfig,
    pub weyl: WeylConfig,
    pub profile: WaveProfile,
    pub quad: QuadratureConfig,
    pub verify: VerifyConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            v0: DataSpec::Zero,
            v1: DataSpec::Zero,
            grid: GridConfig {
                x_min: 0.0,
                x_max: 0.9,
                nx: 10,
                y_min: 0.0,
                y_max: 0.9,
                ny: 10,
                eps_min: EPS_MIN,
            },
            expand: ExpandConfig {
                x: vec![0.5],
                order: 2,
                eps: Vec::new(),
            },
            weyl: WeylConfig {
                x: vec![0.5],
                eps: vec![1e-3, 1e-2],
                order: 2,
                method: WeylMethod::Both,
            },
            profile: WaveProfile::default(),
            quad: QuadratureConfig::default(),
            verify: VerifyConfig {
                suite: Suite::All,
                fault: None,
            },
            output: OutputConfig {
                path: None,
                format: None,
            },
        }
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Abel => "abel",
        Suite::Goursat => "goursat",
        Suite::Asymptotics => "asymptotics",
        Suite::Weyl => "weyl",
        Suite::All => "all",
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<(String, usize)> = Vec::new();
        let mut alpha_line = [None, None];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line),
                field: content.to_string(),
                message: "expected key = value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
                return Err(ConfigError {
                    line: Some(line),
                    field: key.into(),
                    message: format!("duplicate key (first set on line {first})"),
                });
            }
            seen.push((key.to_string(), line));
            if key == "data.v0.alpha" {
                alpha_line[0] = Some(line);
            }
            if key == "data.v1.alpha" {
                alpha_line[1] = Some(line);
            }
            cfg.set(key, value).map_err(|message| ConfigError {
                line: Some(line),
                field: key.into(),
                message,
            })?;
        }
        // an alpha is only meaningful for expression data
        for (side, spec) in [&cfg.v0, &cfg.v1].into_iter().enumerate() {
            if let Some(l) = alpha_line[side] {
                if !matches!(spec, DataSpec::Expr { .. }) {
                    return Err(ConfigError {
                        line: Some(l),
                        field: format!("data.v{side}.alpha"),
                        message: "alpha is declared by the builtin; only expr data take an explicit alpha".into(),
                    });
                }
            }
        }
        let line_of = |k: &str| seen.iter().find(|(s, _)| s == k).map(|&(_, l)| l);
        cfg.check().map_err(|(field, message)| ConfigError {
            line: line_of(&field).or_else(|| line_of("data")),
            field,
            message,
        })?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(v: &str) -> Result<f64, String> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("expected a finite number, got '{v}'"))
        }
        fn count(v: &str) -> Result<usize, String> {
            v.parse::<usize>()
                .map_err(|_| format!("expected a non-negative integer, got '{v}'"))
        }
        fn list(v: &str) -> Result<Vec<f64>, String> {
            if v.is_empty() {
                Ok(Vec::new())
            } else {
                parse_list(v)
            }
        }
        fn set_alpha(spec: &mut DataSpec, a: f64) {
            if let DataSpec::Expr { alpha, .. } = spec {
                *alpha = Some(a);
            }
        }
        fn keep_alpha(old: &DataSpec, mut new: DataSpec) -> DataSpec {
            if let (DataSpec::Expr { alpha: Some(a), .. }, DataSpec::Expr { alpha, .. }) = (old, &mut new) {
                *alpha = Some(*a);
            }
            new
        }
        match key {
            "data" => {
                let spec = DataSpec::parse(value)?;
                self.v0 = keep_alpha(&self.v0, spec.clone());
                self.v1 = keep_alpha(&self.v1, spec);
            }
            "data.v0" => self.v0 = keep_alpha(&self.v0, DataSpec::parse(value)?),
            "data.v1" => self.v1 = keep_alpha(&self.v1, DataSpec::parse(value)?),
            "data.v0.alpha" => {
                let a = num(value)?;
                self.pending_alpha(0, a);
                set_alpha(&mut self.v0, a);
            }
            "data.v1.alpha" => {
                let a = num(value)?;
                self.pending_alpha(1, a);
                set_alpha(&mut self.v1, a);
            }
            "grid.x_min" => self.grid.x_min = num(value)?,
            "grid.x_max" => self.grid.x_max = num(value)?,
            "grid.nx" => self.grid.nx = count(value)?,
            "grid.y_min" => self.grid.y_min = num(value)?,
            "grid.y_max" => self.grid.y_max = num(value)?,
            "grid.ny" => self.grid.ny = count(value)?,
            "grid.eps_min" => self.grid.eps_min = num(value)?,
            "expand.x" => self.expand.x = list(value)?,
            "expand.order" => self.expand.order = count(value)?,
            "expand.eps" => self.expand.eps = list(value)?,
            "weyl.x" => self.weyl.x = list(value)?,
            "weyl.eps" => self.weyl.eps = list(value)?,
            "weyl.order" => self.weyl.order = count(value)?,
            "weyl.method" => self.weyl.method = value.parse()?,
            "profile.c1" => self.profile.c1 = num(value)?,
            "profile.c2" => self.profile.c2 = num(value)?,
            "profile.n1" => self.profile.n1 = num(value)?,
            "profile.n2" => self.profile.n2 = num(value)?,
            "quad.rel_tol" => self.quad.rel_tol = num(value)?,
            "quad.abs_tol" => self.quad.abs_tol = num(value)?,
            "quad.max_subdivisions" => self.quad.max_subdivisions = count(value)?,
            "quad.base_nodes" => self.quad.base_nodes = count(value)?,
            "verify.suite" => self.verify.suite = value.parse().map_err(|e: darboux::Error| e.to_string())?,
            "verify.fault" => {
                self.verify.fault = match value {
                    "none" => None,
                    v => Some(v.parse().map_err(|e: darboux::Error| e.to_string())?),
                }
            }
            "output.path" => self.output.path = (!value.is_empty()).then(|| value.to_string()),
            "output.format" => self.output.format = if value.is_empty() { None } else { Some(value.parse()?) },
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Alphas may precede the expression they belong to; stash them in a
    /// placeholder expression that the later `data.vN` line keeps.
    fn pending_alpha(&mut self, side: usize, a: f64) {
        let spec = if side == 0 { &mut self.v0 } else { &mut self.v1 };
        if !matches!(spec, DataSpec::Expr { .. }) {
            *spec = DataSpec::Expr {
                source: String::new(),
                alpha: Some(a),
            };
        }
    }

    /// Semantic checks; returns the offending field.
    fn check(&self) -> Result<(), (String, String)> {
        let fail = |f: &str, m: String| Err((f.to_string(), m));
        for (side, spec) in [&self.v0, &self.v1].into_iter().enumerate() {
            match spec {
                DataSpec::Expr { source, .. } if source.is_empty() => {
                    return fail(&format!("data.v{side}.alpha"), "alpha given without expr data".into())
                }
                DataSpec::Expr { alpha: None, .. } => {
                    return fail(
                        &format!("data.v{side}"),
                        format!("expression data need an explicit data.v{side}.alpha"),
                    )
                }
                _ => {}
            }
            if let Err(e) = spec.trace() {
                return fail(&format!("data.v{side}"), e);
            }
        }
        let g = &self.grid;
        if g.nx == 0 || g.ny == 0 {
            return fail(
                if g.nx == 0 { "grid.nx" } else { "grid.ny" },
                "must be at least 1".into(),
            );
        }
        if !(g.x_min >= 0.0 && g.x_min <= g.x_max) {
            return fail("grid.x_min", "need 0 <= x_min <= x_max".into());
        }
        if !(g.y_min >= 0.0 && g.y_min <= g.y_max) {
            return fail("grid.y_min", "need 0 <= y_min <= y_max".into());
        }
        if !(g.eps_min > 0.0 && g.eps_min < 1.0) {
            return fail("grid.eps_min", "must lie in (0, 1)".into());
        }
        if self.expand.order > J_CAP {
            return fail("expand.order", format!("at most {J_CAP}"));
        }
        for (field, xs) in [("expand.x", &self.expand.x), ("weyl.x", &self.weyl.x)] {
            if let Some(x) = xs.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
                return fail(field, format!("abscissa {x} outside (0, 1)"));
            }
        }
        for (field, es) in [("expand.eps", &self.expand.eps), ("weyl.eps", &self.weyl.eps)] {
            if let Some(e) = es.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
                return fail(field, format!("eps {e} outside (0, 1)"));
            }
        }
        if self.weyl.order < 1 || self.weyl.order > J_CAP {
            return fail("weyl.order", format!("must be between 1 and {J_CAP}"));
        }
        if let Err(e) = self.profile.validate() {
            return fail("profile", e.to_string());
        }
        if let Err(e) = self.quad.validate() {
            return fail("quad", e.to_string());
        }
        Ok(())
    }

    pub fn boundary_data(&self) -> Result<BoundaryData, ConfigError> {
        let err = |side: usize, message: String| ConfigError {
            line: None,
            field: format!("data.v{side}"),
            message,
        };
        let v0 = self.v0.trace().map_err(|m| err(0, m))?;
        let v1 = self.v1.trace().map_err(|m| err(1, m))?;
        BoundaryData::new(v0, v1).map_err(|e| err(0, e.to_string()))
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            x_min: self.grid.x_min,
            x_max: self.grid.x_max,
            nx: self.grid.nx,
            y_min: self.grid.y_min,
            y_max: self.grid.y_max,
            ny: self.grid.ny,
            eps_min: self.grid.eps_min,
            level: Level::Mixed,
        }
    }

    /// Canonical text form; `parse(to_text())` reproduces the configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        for (side, spec) in [&self.v0, &self.v1].into_iter().enumerate() {
            kv(&format!("data.v{side}"), spec.to_string());
            if let DataSpec::Expr { alpha: Some(a), .. } = spec {
                kv(&format!("data.v{side}.alpha"), a.to_string());
            }
        }
        let g = &self.grid;
        kv("grid.x_min", g.x_min.to_string());
        kv("grid.x_max", g.x_max.to_string());
        kv("grid.nx", g.nx.to_string());
        kv("grid.y_min", g.y_min.to_string());
        kv("grid.y_max", g.y_max.to_string());
        kv("grid.ny", g.ny.to_string());
        kv("grid.eps_min", g.eps_min.to_string());
        kv("expand.x", join(&self.expand.x));
        kv("expand.order", self.expand.order.to_string());
        kv("expand.eps", join(&self.expand.eps));
        kv("weyl.x", join(&self.weyl.x));
        kv("weyl.eps", join(&self.weyl.eps));
        kv("weyl.order", self.weyl.order.to_string());
        kv("weyl.method", self.weyl.method.to_string());
        kv("profile.c1", self.profile.c1.to_string());
        kv("profile.c2", self.profile.c2.to_string());
        kv("profile.n1", self.profile.n1.to_string());
        kv("profile.n2", self.profile.n2.to_string());
        kv("quad.rel_tol", self.quad.rel_tol.to_string());
        kv("quad.abs_tol", self.quad.abs_tol.to_string());
        kv("quad.max_subdivisions", self.quad.max_subdivisions.to_string());
        kv("quad.base_nodes", self.quad.base_nodes.to_string());
        kv("verify.suite", suite_name(self.verify.suite).into());
        kv(
            "verify.fault",
            match self.verify.fault {
                Some(Fault::C1Sign) => "c1_sign".into(),
                None => "none".into(),
            },
        );
        kv("output.path", self.output.path.clone().unwrap_or_default());
        kv(
            "output.format",
            self.output.format.map(|f| f.to_string()).unwrap_or_default(),
        );
        s
    }
}
