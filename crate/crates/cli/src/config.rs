use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Normalization, sharp constant and scale invariance.
    Constants,
    /// Volume and area comparison chains of a model.
    Model,
    /// Sobolev quotient and decay checks on a model.
    Verify,
    /// Rigidity constants and the volume sandwich.
    Rigidity,
    /// Escape of the concentration density as the bubble spreads.
    Limits,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Model => "model",
            Command::Verify => "verify",
            Command::Rigidity => "rigidity",
            Command::Limits => "limits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmChoice {
    Value(f64),
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaChoice {
    Value(f64),
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn keyword_or_number<T>(s: &str, keyword: &str, make: fn(f64) -> T, word: T) -> Result<T, String> {
    if s == keyword {
        return Ok(word);
    }
    s.parse::<f64>()
        .map(make)
        .map_err(|_| format!("expected a number or '{keyword}', got '{s}'"))
}

impl FromStr for CmChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        keyword_or_number(s, "estimate", CmChoice::Value, CmChoice::Estimate)
    }
}

impl FromStr for GammaChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        keyword_or_number(s, "empirical", GammaChoice::Value, GammaChoice::Empirical)
    }
}

impl fmt::Display for CmChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmChoice::Value(v) => write!(f, "{v}"),
            CmChoice::Estimate => f.write_str("estimate"),
        }
    }
}

impl fmt::Display for GammaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaChoice::Value(v) => write!(f, "{v}"),
            GammaChoice::Empirical => f.write_str("empirical"),
        }
    }
}

fn parse_lambdas(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad lambda '{x}' in comma-separated list"))
        })
        .collect()
}

/// Validated invocation of the tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Parser)]
#[command(
    name = "sharpsob",
    version,
    about = "Sharp Sobolev constants and volume rigidity on model manifolds"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Dimension.
    #[arg(long)]
    pub m: u32,
    /// Sobolev exponent, 1 < p < m.
    #[arg(long)]
    pub p: f64,
    /// Comma-separated bubble scales.
    #[arg(long = "lambda", value_parser = parse_lambdas, default_value = "1")]
    pub lambda_list: ::std::vec::Vec<f64>,
    /// Model: zero, const:<a>:<t_cut>, rational:<b0>, table:<path> or cone:<c>.
    #[arg(long = "g", default_value = "zero")]
    pub g_spec: String,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Sobolev constant of the model: a number or 'estimate'.
    #[arg(long = "c-m", default_value = "estimate")]
    pub c_m_source: CmChoice,
    /// Volume-ratio floor: a number or 'empirical'.
    #[arg(long = "gamma", default_value = "empirical")]
    pub gamma_source: GammaChoice,
    /// Split radius for the mass-escape experiment.
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_split: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub output: OutputFormat,
    #[arg(long = "out")]
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    /// Arguments (without the program name) that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let lambdas = self
            .lambda_list
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let mut args = vec![
            self.command.name().to_string(),
            "--m".into(),
            self.m.to_string(),
            "--p".into(),
            self.p.to_string(),
            "--lambda".into(),
            lambdas,
            "--g".into(),
            self.g_spec.clone(),
            "--t-max".into(),
            self.t_max.to_string(),
            "--step".into(),
            self.step.to_string(),
            "--tol".into(),
            self.tol.to_string(),
            "--c-m".into(),
            self.c_m_source.to_string(),
            "--gamma".into(),
            self.gamma_source.to_string(),
            "--T".into(),
            self.t_split.to_string(),
            "--output".into(),
            match self.output {
                OutputFormat::Csv => "csv".into(),
                OutputFormat::Json => "json".into(),
            },
        ];
        if let Some(path) = &self.out_path {
            args.push("--out".into());
            args.push(path.display().to_string());
        }
        args
    }

    /// Parses arguments that exclude the program name.
    pub fn from_args<I, S>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let argv = std::iter::once(std::ffi::OsString::from("sharpsob"))
            .chain(args.into_iter().map(Into::into));
        Self::try_parse_from(argv)
    }
}
