//! Tables, check summaries and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::settings::{Format, Settings};
use crate::CliError;

/// Round-trip formatting: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), Value::String(v.clone())))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": rows }))
            .expect("tables serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: String,
    pub threshold: String,
    pub passed: bool,
}

/// Collects files and checks while a command runs.
pub struct Run {
    dir: PathBuf,
    format: Format,
    plot_script: bool,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
    plots: Vec<String>,
}

impl Run {
    pub fn new(settings: &Settings) -> Result<Self, CliError> {
        let dir = settings.out_dir();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Run {
            dir,
            format: settings.format(),
            plot_script: settings.plot_script,
            outputs: Vec::new(),
            checks: Vec::new(),
            plots: Vec::new(),
        })
    }

    /// Writes `table` as `<stem>.csv` or `<stem>.json`.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        let name = format!("{stem}.{}", self.format.extension());
        let body = match self.format {
            Format::Csv => table.csv(),
            Format::Json => table.json(),
        };
        self.write(&name, &body)
    }

    pub fn json(&mut self, stem: &str, value: &Value) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value).expect("values serialize");
        body.push('\n');
        self.write(&format!("{stem}.json"), &body)
    }

    pub fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Records a check of `observed` against `threshold`.
    pub fn check(&mut self, name: impl Into<String>, observed: f64, threshold: f64, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            observed: num(observed),
            threshold: num(threshold),
            passed,
        });
    }

    /// Registers a plot of columns `x` against `y` from a CSV output.
    pub fn plot(&mut self, file: &str, x: &str, y: &str) {
        self.plots.push(format!("plot({file:?}, {x:?}, {y:?})"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Writes `plot.py` when asked for, if there is CSV output to plot.
    pub fn finish_plots(&mut self) -> Result<(), CliError> {
        if !self.plot_script || self.plots.is_empty() || self.format != Format::Csv {
            return Ok(());
        }
        let mut s = String::from(PLOT_PRELUDE);
        for p in &self.plots {
            let _ = writeln!(s, "{p}");
        }
        s.push_str("plt.show()\n");
        self.write("plot.py", &s)
    }
}

const PLOT_PRELUDE: &str = r#"# Plots the CSV files of this run directory.
import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def plot(name, x, y):
    with open(os.path.join(HERE, name), newline="") as f:
        rows = list(csv.DictReader(f))
    plt.figure()
    plt.plot([float(r[x]) for r in rows], [float(r[y]) for r in rows], ".")
    plt.xlabel(x)
    plt.ylabel(y)
    plt.title(name)


"#;

pub struct ManifestInput<'a> {
    pub command: &'a str,
    pub config_file: Option<&'a Path>,
    pub file: &'a Settings,
    pub flags: &'a Settings,
    pub effective: &'a Settings,
    pub rng_algorithm: Option<&'a str>,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub elapsed_seconds: f64,
    pub error: Option<(&'a str, String)>,
}

/// Writes `manifest.json` next to the outputs of `run`.
pub fn write_manifest(run: &Run, m: ManifestInput<'_>) -> Result<PathBuf, CliError> {
    let value = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": m.command,
        "config": {
            "file": m.config_file.map(|p| p.display().to_string()),
            "file_values": m.file,
            "flags": m.flags,
            "effective": m.effective,
        },
        "rng": {
            "algorithm": m.rng_algorithm,
            "seeds": m.seeds.iter().map(u64::to_string).collect::<Vec<_>>(),
        },
        "wall_clock": {
            "started_unix_seconds": format!("{:.3}", m.started_unix),
            "elapsed_seconds": format!("{:.3}", m.elapsed_seconds),
        },
        "outputs": run.outputs,
        "checks": run.checks,
        "passed": m.error.is_none() && run.passed(),
        "error": m.error.map(|(kind, message)| json!({ "kind": kind, "message": message })),
    });
    let path = run.dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&value).expect("manifest serializes");
    body.push('\n');
    std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        t.push(vec!["x,y".into(), "3".into()]);
        assert_eq!(t.csv(), "a,b\n1,2\n\"x,y\",3\n");
    }
}
