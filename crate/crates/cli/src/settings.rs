//! Run configuration: command-line flags layered over an optional config file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use zeroflow_core::polyflow::Generator;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorName {
    Chebyshev,
    Jacobi,
    ArcsineRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Every tunable of a run. All fields are optional so that the same type
/// describes a config file, the flags of one invocation, and their merge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Initial zero configuration.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorName>,

    /// Initial degree.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Flow time; the derivative order is round(t·n).
    #[arg(long, conflicts_with = "k")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,

    /// Derivative order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    /// Jacobi parameter at x = 1.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    /// Jacobi parameter at x = -1.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,

    /// Seed for arcsine-random; repeat for several runs.
    #[arg(long = "seed")]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,

    /// Grid size for potential evaluations.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,

    /// Ellipse parameter A > 1 (defaults to the optimal 1/sqrt(1-t^2)).
    #[arg(long = "contour-A")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour_a: Option<f64>,

    /// Points ζ in (-1, 1) for the bound check; repeatable.
    #[arg(long = "zeta", allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zetas: Vec<f64>,

    /// Degrees compared by `compare`, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<usize>,

    /// Flow times compared by `compare`, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_list: Vec<f64>,

    /// Also write zeros every `stride` derivative steps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,

    /// Tolerance on the support for `equilibrium`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_support: Option<f64>,

    /// Tolerance off the support for `equilibrium`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_exterior: Option<f64>,

    /// Largest flow time accepted by `equilibrium`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,

    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Emit a matplotlib script that plots the written CSV files.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub plot_script: bool,
}

impl Settings {
    /// `self` (flags) wins over `file`. The flow depth is taken as a unit:
    /// giving either `t` or `k` on the command line replaces both.
    pub fn over(self, file: Settings) -> Settings {
        fn vec_or<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        let (t, k) = if self.t.is_some() || self.k.is_some() {
            (self.t, self.k)
        } else {
            (file.t, file.k)
        };
        Settings {
            generator: self.generator.or(file.generator),
            n: self.n.or(file.n),
            t,
            k,
            alpha: self.alpha.or(file.alpha),
            beta: self.beta.or(file.beta),
            seeds: vec_or(self.seeds, file.seeds),
            grid: self.grid.or(file.grid),
            contour_a: self.contour_a.or(file.contour_a),
            zetas: vec_or(self.zetas, file.zetas),
            n_list: vec_or(self.n_list, file.n_list),
            t_list: vec_or(self.t_list, file.t_list),
            stride: self.stride.or(file.stride),
            tol_support: self.tol_support.or(file.tol_support),
            tol_exterior: self.tol_exterior.or(file.tol_exterior),
            t_max: self.t_max.or(file.t_max),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            plot_script: self.plot_script || file.plot_script,
        }
    }

    /// Reads a TOML config, or the effective config of a previous run's
    /// `manifest.json`.
    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
        if path.extension().is_some_and(|e| e == "json") {
            let mut value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            let effective = value
                .pointer_mut("/config/effective")
                .map(serde_json::Value::take)
                .ok_or_else(|| bad("no config.effective object".into()))?;
            serde_json::from_value(effective).map_err(|e| bad(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| bad(e.to_string()))
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn degree(&self) -> Result<usize, CliError> {
        let n = self
            .n
            .ok_or_else(|| CliError::Config("--n is required".into()))?;
        check_degree(n)?;
        Ok(n)
    }

    /// Resolves `(k, t)` for initial degree `n`.
    pub fn depth(&self, n: usize) -> Result<(usize, f64), CliError> {
        let k = match (self.t, self.k) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give exactly one of --t and --k".into()))
            }
            (None, None) => return Err(CliError::Config("one of --t or --k is required".into())),
            (Some(t), None) => {
                check_time(t)?;
                (t * n as f64).round() as usize
            }
            (None, Some(k)) => k,
        };
        if k >= n {
            return Err(CliError::Config(format!("k = {k} must be below n = {n}")));
        }
        Ok((k, k as f64 / n as f64))
    }

    /// One generator per requested seed; a single one otherwise.
    pub fn generators(&self) -> Result<Vec<Generator>, CliError> {
        let name = self.generator.unwrap_or(GeneratorName::Chebyshev);
        if name != GeneratorName::ArcsineRandom && !self.seeds.is_empty() {
            return Err(CliError::Config(
                "--seed only applies to arcsine-random".into(),
            ));
        }
        if name != GeneratorName::Jacobi && (self.alpha.is_some() || self.beta.is_some()) {
            return Err(CliError::Config(
                "--alpha/--beta only apply to jacobi".into(),
            ));
        }
        Ok(match name {
            GeneratorName::Chebyshev => vec![Generator::Chebyshev],
            GeneratorName::Jacobi => {
                let alpha = self.alpha.unwrap_or(0.0);
                let beta = self.beta.unwrap_or(0.0);
                if !(alpha > -1.0 && beta > -1.0) {
                    return Err(CliError::Config("jacobi needs alpha, beta > -1".into()));
                }
                vec![Generator::Jacobi { alpha, beta }]
            }
            GeneratorName::ArcsineRandom => {
                if self.seeds.is_empty() {
                    return Err(CliError::Config("arcsine-random needs --seed".into()));
                }
                let mut seen = self.seeds.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != self.seeds.len() {
                    return Err(CliError::Config("repeated --seed".into()));
                }
                self.seeds
                    .iter()
                    .map(|&seed| Generator::ArcsineRandom { seed })
                    .collect()
            }
        })
    }

    pub fn positive(&self, name: &str, value: Option<f64>, default: f64) -> Result<f64, CliError> {
        let v = value.unwrap_or(default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Config(format!(
                "{name} must be positive, got {v}"
            )))
        }
    }
}

pub fn check_degree(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Config(format!("n = {n} must be at least 2")));
    }
    Ok(())
}

pub fn check_time(t: f64) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&t) {
        return Err(CliError::Config(format!("t = {t} must lie in [0, 1)")));
    }
    Ok(())
}

/// File-name stem for a generator instance.
pub fn stem(g: &Generator) -> String {
    match g.seed() {
        Some(seed) => format!("{}-seed{seed}", g.label()),
        None => g.label().to_string(),
    }
}
