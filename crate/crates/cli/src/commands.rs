//! The four subcommands as pure functions from a configuration to tables.

use darboux::asymptotics::{evaluate_expansion, Expander, ExpansionTable};
use darboux::goursat::{RowStatus, SolutionField, TrianglePoint};
use darboux::verify::{self, VerificationReport, VerifyOptions};
use darboux::weyl::{weyl_direct, WeylComponents, WeylSeries};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig, WeylMethod};
use crate::table::{Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }

    /// Classifies a library error raised while working at `location`.
    pub fn from_core(location: &str, e: darboux::Error) -> Self {
        use darboux::Error as E;
        match e {
            E::InvalidConfig(_) | E::InvalidData(_) | E::InvalidExponent(_) | E::MissingDerivative { .. } => {
                CliError::Usage(format!("{location}: {e}"))
            }
            _ => CliError::Numerical(format!("{location}: {e}")),
        }
    }
}

fn field(cfg: &RunConfig) -> Result<SolutionField, CliError> {
    let data = cfg.boundary_data()?;
    SolutionField::new(data, cfg.quad)
        .and_then(|f| f.with_eps_min(cfg.grid.eps_min))
        .map_err(|e| CliError::from_core("building the solution", e))
}

/// `y = 1 - x - eps`, rejected when it leaves the triangle.
fn diagonal_point(x: f64, eps: f64) -> Result<TrianglePoint, CliError> {
    let y = 1.0 - x - eps;
    if !(y >= 0.0) {
        return Err(CliError::Usage(format!("eps = {eps} puts y below 0 at x = {x}")));
    }
    TrianglePoint::new(x, y).map_err(|e| CliError::from_core(&format!("at (x, y) = ({x}, {y})"), e))
}

pub fn evaluate(cfg: &RunConfig) -> Result<Table, CliError> {
    let field = field(cfg)?;
    let rows = field
        .evaluate_grid(&cfg.grid_spec())
        .map_err(|e| CliError::from_core("grid", e))?;
    let mut t = Table::new(vec!["x", "y", "V", "Vx", "Vy", "Vxy", "notes"]);
    for r in rows {
        let (jet, notes) = match r.status {
            RowStatus::Ok => {
                let jet = r.jet.expect("ok rows carry a jet");
                let notes = if jet.vx.is_none() {
                    "axis: derivatives undefined"
                } else if jet.vxy.is_none() {
                    "axis: Vxy undefined"
                } else {
                    ""
                };
                (Some(jet), notes)
            }
            RowStatus::SkippedDiagonal => (None, "skipped_diagonal"),
            RowStatus::Failed(msg) => {
                return Err(CliError::Numerical(format!("at (x, y) = ({}, {}): {msg}", r.x, r.y)));
            }
        };
        t.push(vec![
            r.x.into(),
            r.y.into(),
            jet.map(|j| j.v).into(),
            jet.and_then(|j| j.vx).into(),
            jet.and_then(|j| j.vy).into(),
            jet.and_then(|j| j.vxy).into(),
            notes.into(),
        ]);
    }
    Ok(t)
}

pub struct Expansion {
    pub coefficients: Table,
    /// Present when `expand.eps` is non-empty.
    pub evaluations: Option<Table>,
}

pub fn expand(cfg: &RunConfig) -> Result<Expansion, CliError> {
    let data = cfg.boundary_data()?;
    let expander = Expander::new(cfg.quad);
    let order = cfg.expand.order;
    let tables: Vec<ExpansionTable> = cfg
        .expand
        .x
        .par_iter()
        .map(|&x| {
            expander
                .expansion(&data, x, order)
                .map_err(|e| CliError::from_core(&format!("expansion at x = {x}"), e))
        })
        .collect::<Result<_, _>>()?;
    let mut coefficients = Table::new(vec!["x", "j", "f_j", "g_j", "g_swapped_j"]);
    for tab in &tables {
        for j in 0..=order {
            coefficients.push(vec![
                tab.x.into(),
                j.into(),
                tab.f[j].into(),
                tab.g[j].into(),
                tab.g_swapped[j].into(),
            ]);
        }
    }
    if cfg.expand.eps.is_empty() {
        return Ok(Expansion {
            coefficients,
            evaluations: None,
        });
    }
    let field = field(cfg)?;
    let jobs: Vec<(&ExpansionTable, f64)> = tables
        .iter()
        .flat_map(|t| cfg.expand.eps.iter().map(move |&e| (t, e)))
        .collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(tab, eps)| {
            let series = evaluate_expansion(tab, eps);
            let p = diagonal_point(tab.x, eps)?;
            let (direct, notes) = if eps < field.eps_min() {
                (None, "direct below eps_min")
            } else {
                let v = field
                    .evaluate(p)
                    .map_err(|e| CliError::from_core(&format!("at (x, y) = ({}, {})", p.x, p.y), e))?;
                (Some(v), "")
            };
            Ok(vec![
                tab.x.into(),
                eps.into(),
                direct.into(),
                series.into(),
                direct.map(|v| v - series).into(),
                notes.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut evaluations = Table::new(vec!["x", "eps", "V", "expansion", "remainder", "notes"]);
    rows.into_iter().for_each(|r| evaluations.push(r));
    Ok(Expansion {
        coefficients,
        evaluations: Some(evaluations),
    })
}

pub fn weyl(cfg: &RunConfig) -> Result<Table, CliError> {
    let data = cfg.boundary_data()?;
    let field = field(cfg)?;
    let profile = cfg.profile;
    let (direct, series) = match cfg.weyl.method {
        WeylMethod::Direct => (true, false),
        WeylMethod::Series => (false, true),
        WeylMethod::Both => (true, true),
    };
    let per_x: Vec<Vec<Vec<Cell>>> = cfg
        .weyl
        .x
        .par_iter()
        .map(|&x| {
            let s = if series {
                Some(
                    WeylSeries::new(&data, x, cfg.weyl.order, &profile, &cfg.quad)
                        .map_err(|e| CliError::from_core(&format!("Weyl series at x = {x}"), e))?,
                )
            } else {
                None
            };
            let mut rows = Vec::new();
            for &eps in &cfg.weyl.eps {
                let p = diagonal_point(x, eps)?;
                let at = format!("at (x, y) = ({}, {})", p.x, p.y);
                let row = |w: Option<WeylComponents>, method: &str, notes: &str| {
                    vec![
                        p.x.into(),
                        p.y.into(),
                        w.map(|w| w.psi0).into(),
                        w.map(|w| w.psi2).into(),
                        w.map(|w| w.psi4).into(),
                        method.into(),
                        notes.into(),
                    ]
                };
                if direct {
                    if eps < field.eps_min() {
                        rows.push(row(None, "direct", "direct below eps_min"));
                    } else {
                        let w = weyl_direct(&field, p, &profile).map_err(|e| CliError::from_core(&at, e))?;
                        rows.push(row(Some(w), "direct", ""));
                    }
                }
                if let Some(s) = &s {
                    let w = s.evaluate(eps).map_err(|e| CliError::from_core(&at, e))?;
                    rows.push(row(Some(w), "series", ""));
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new(vec!["x", "y", "psi0", "psi2", "psi4", "method", "notes"]);
    per_x.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

pub fn verify(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let opts = VerifyOptions {
        cfg: cfg.quad,
        fault: cfg.verify.fault,
    };
    verify::run(cfg.verify.suite, &opts).map_err(|e| CliError::from_core("verification", e))
}

pub fn report_table(report: &VerificationReport) -> Table {
    let mut t = Table::new(vec!["suite", "name", "measured", "min", "max", "pass", "note"]);
    for c in &report.checks {
        t.push(vec![
            c.suite.clone().into(),
            c.name.clone().into(),
            c.measured.into(),
            c.min.into(),
            c.max.into(),
            (if c.pass { "true" } else { "false" }).into(),
            c.note.clone().unwrap_or_default().into(),
        ]);
    }
    t
}
