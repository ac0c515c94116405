//! Library side of the `darboux` command-line tool: configuration parsing,
//! boundary-data specs, and the subcommand pipelines.

// `!(a < b)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod data;
pub mod expr;
pub mod table;

use std::path::{Path, PathBuf};

use commands::CliError;
use config::{Format, RunConfig};
use darboux::verify::{Fault, Suite};
use table::json_text;

/// Environment variable overriding the quadrature relative tolerance.
pub const RTOL_ENV: &str = "DARBOUX_QUAD_RTOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Evaluate,
    Expand,
    Weyl,
    Verify { suite: Option<Suite>, fault: Option<Fault> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub action: Action,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub rtol_override: Option<String>,
}

/// Loads the configuration and applies command-line and environment overrides.
pub fn load_config(inv: &Invocation) -> Result<RunConfig, CliError> {
    let mut cfg = match &inv.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(f) = inv.format {
        cfg.output.format = Some(f);
    }
    if let Some(out) = &inv.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if let Some(r) = &inv.rtol_override {
        cfg.quad.rel_tol = r
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("{RTOL_ENV}='{r}' is not a positive number")))?;
    }
    if let Action::Verify { suite, fault } = inv.action {
        if let Some(s) = suite {
            cfg.verify.suite = s;
        }
        if fault.is_some() {
            cfg.verify.fault = fault;
        }
    }
    Ok(cfg)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// `out.csv` -> `out_eps.csv`.
pub fn companion_path(p: &Path) -> PathBuf {
    let stem = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match p.extension() {
        Some(ext) => format!("{stem}_eps.{}", ext.to_string_lossy()),
        None => format!("{stem}_eps"),
    };
    p.with_file_name(name)
}

/// Runs one subcommand; returns the process exit code (0 or 1).
pub fn execute(inv: &Invocation) -> Result<u8, CliError> {
    let cfg = load_config(inv)?;
    let format = cfg.output.format.unwrap_or(match inv.action {
        Action::Verify { .. } => Format::Json,
        _ => Format::Csv,
    });
    let path = cfg.output.path.as_deref().map(Path::new);
    match inv.action {
        Action::Evaluate => write_output(path, &commands::evaluate(&cfg)?.render(format))?,
        Action::Weyl => write_output(path, &commands::weyl(&cfg)?.render(format))?,
        Action::Expand => {
            let e = commands::expand(&cfg)?;
            match format {
                Format::Json => {
                    let v = serde_json::json!({
                        "coefficients": e.coefficients.to_json(),
                        "evaluations": e.evaluations.as_ref().map(|t| t.to_json()),
                    });
                    write_output(path, &json_text(&v))?;
                }
                Format::Csv => match (path, &e.evaluations) {
                    (Some(p), Some(ev)) => {
                        write_output(Some(p), &e.coefficients.to_csv())?;
                        write_output(Some(&companion_path(p)), &ev.to_csv())?;
                    }
                    (None, Some(ev)) => {
                        write_output(None, &format!("{}\n{}", e.coefficients.to_csv(), ev.to_csv()))?;
                    }
                    (_, None) => write_output(path, &e.coefficients.to_csv())?,
                },
            }
        }
        Action::Verify { .. } => {
            let report = commands::verify(&cfg)?;
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
                    s.push('\n');
                    s
                }
                Format::Csv => commands::report_table(&report).to_csv(),
            };
            write_output(path, &text)?;
            if !report.pass {
                let failed: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                eprintln!("verification failed: {}", failed.join(", "));
                return Ok(1);
            }
        }
    }
    Ok(0)
}
