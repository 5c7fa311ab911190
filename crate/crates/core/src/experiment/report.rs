use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One line of an experiment report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub mesh: String,
    pub subdomains: String,
    pub split: String,
    pub precond: String,
    pub recipe: String,
    pub weighting: String,
    pub dofs: u64,
    pub coarse_size: u64,
    pub iters: Option<usize>,
    pub kappa: Option<f64>,
    pub setup_s: Option<f64>,
    pub solve_s: Option<f64>,
    pub converged: bool,
}

pub const COLUMNS: [&str; 13] = [
    "mesh",
    "subdomains",
    "split",
    "precond",
    "recipe",
    "weighting",
    "dofs",
    "coarse_size",
    "iters",
    "kappa",
    "setup_s",
    "solve_s",
    "converged",
];

fn join_dims(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x")
}

impl ReportRow {
    /// Row with the config echo filled in and no solve results.
    pub fn from_config(config: &ExperimentConfig, dofs: u64, coarse_size: u64) -> Self {
        ReportRow {
            mesh: join_dims(&config.cells),
            subdomains: join_dims(&config.subdomains),
            split: config.split.to_string(),
            precond: config.preconditioner.to_string(),
            recipe: config.recipe.to_string(),
            weighting: config.weighting.to_string(),
            dofs,
            coarse_size,
            iters: None,
            kappa: None,
            setup_s: None,
            solve_s: None,
            converged: true,
        }
    }

    fn cells(&self) -> [String; 13] {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        [
            self.mesh.clone(),
            self.subdomains.clone(),
            self.split.clone(),
            self.precond.clone(),
            self.recipe.clone(),
            self.weighting.clone(),
            self.dofs.to_string(),
            self.coarse_size.to_string(),
            self.iters.map(|i| i.to_string()).unwrap_or_default(),
            opt(self.kappa),
            opt(self.setup_s),
            opt(self.solve_s),
            self.converged.to_string(),
        ]
    }

    fn to_json(&self) -> Value {
        let num = |v: Option<f64>| {
            v.and_then(|x| Number::from_f64(round_sig(x)))
                .map_or(Value::Null, Value::Number)
        };
        let mut m = Map::new();
        let vals = [
            Value::from(self.mesh.clone()),
            Value::from(self.subdomains.clone()),
            Value::from(self.split.clone()),
            Value::from(self.precond.clone()),
            Value::from(self.recipe.clone()),
            Value::from(self.weighting.clone()),
            Value::from(self.dofs),
            Value::from(self.coarse_size),
            self.iters.map_or(Value::Null, Value::from),
            num(self.kappa),
            num(self.setup_s),
            num(self.solve_s),
            Value::from(self.converged),
        ];
        for (k, v) in COLUMNS.iter().zip(vals) {
            m.insert((*k).to_string(), v);
        }
        Value::Object(m)
    }
}

fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// Six significant digits, without trailing exponent noise.
pub fn format_sig(x: f64) -> String {
    round_sig(x).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Config(format!("unknown report format \"{s}\""))),
        }
    }
}

pub fn write_report<W: Write>(rows: &[ReportRow], format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.write_record(r.cells())?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let v = Value::Array(rows.iter().map(ReportRow::to_json).collect());
            serde_json::to_writer_pretty(&mut out, &v)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn emit_report(rows: &[ReportRow], format: ReportFormat, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_report(rows, format, std::io::BufWriter::new(file))
}
