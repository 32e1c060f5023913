//! Run configuration: task defaults, a flat `key=value` file, and flag
//! overrides applied in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use spaparse::model::{ConstModelConfig, DepModelConfig, EncoderConfig, TrainConfig};
use spaparse::nn::Directions;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Dep,
    Const,
}

impl Task {
    pub fn kind(self) -> &'static str {
        match self {
            Task::Dep => "dep",
            Task::Const => "const",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dep" => Ok(Task::Dep),
            "const" => Ok(Task::Const),
            _ => Err(format!("unknown task {s:?}, expected dep or const")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F64,
    F32,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::F64 => "f64",
            Precision::F32 => "f32",
        })
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "f64" => Ok(Precision::F64),
            "f32" => Ok(Precision::F32),
            _ => Err(format!("unknown precision {s:?}, expected f64 or f32")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelConfig {
    Dep(DepModelConfig),
    Const(ConstModelConfig),
}

/// Where a setting came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    File,
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::File => "file",
            Source::Flag => "flag",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub head_rules: Option<PathBuf>,
    pub precision: Precision,
    pub model: ModelConfig,
    /// Largest tolerated share of training trees without an oracle
    /// before a warning is printed.
    pub max_skip_rate: f64,
    pub overrides: Vec<(String, String, Source)>,
}

/// Reads `key = value` lines. `#` starts a comment; blank lines are
/// ignored.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::usage(format!("bad value {value:?} for {key}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::usage(format!(
            "bad value {value:?} for {key}: expected true or false"
        ))),
    }
}

fn apply_encoder(e: &mut EncoderConfig, key: &str, value: &str) -> Result<bool, CliError> {
    match key {
        "word_dims" => e.word_dims = parse_value(key, value)?,
        "tag_dims" => e.tag_dims = parse_value(key, value)?,
        "use_tags" => e.use_tags = parse_bool(key, value)?,
        "lstm_units" => e.lstm_units = parse_value(key, value)?,
        "layers" => e.layers = parse_value(key, value)?,
        "directions" => e.directions = parse_value::<Directions>(key, value)?,
        "dropout" => e.dropout = parse_value(key, value)?,
        "word_dropout" => e.word_dropout = parse_value(key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn apply_train(t: &mut TrainConfig, key: &str, value: &str) -> Result<bool, CliError> {
    match key {
        "epochs" => t.epochs = parse_value(key, value)?,
        "batch_size" => t.batch_size = parse_value(key, value)?,
        "rho" => t.rho = parse_value(key, value)?,
        "eps" => t.eps = parse_value(key, value)?,
        "l2" => t.l2 = parse_value(key, value)?,
        "clip_norm" => {
            t.clip_norm = if value == "none" {
                None
            } else {
                Some(parse_value(key, value)?)
            }
        }
        "seed" => t.seed = parse_value(key, value)?,
        "min_form_count" => t.min_form_count = parse_value(key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

impl RunConfig {
    /// Builds the configuration from `entries` in order: file entries
    /// first, then flags. `task` must appear in one of them.
    pub fn resolve(entries: &[(String, String, Source)]) -> Result<Self, CliError> {
        let task = entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == "task")
            .map(|(k, v, _)| parse_value::<Task>(k, v))
            .transpose()?
            .ok_or_else(|| CliError::usage("no task given; use --task dep|const or task= in the config file"))?;
        let mut cfg = RunConfig {
            task,
            train: None,
            dev: None,
            out: None,
            head_rules: None,
            precision: Precision::F64,
            model: match task {
                Task::Dep => ModelConfig::Dep(DepModelConfig::default()),
                Task::Const => ModelConfig::Const(ConstModelConfig::default()),
            },
            max_skip_rate: 0.05,
            overrides: Vec::new(),
        };
        for (k, v, source) in entries {
            cfg.apply(k, v)?;
            // the output location is not a setting of the run
            if k != "task" && k != "out" {
                cfg.overrides.push((k.clone(), v.clone(), *source));
            }
        }
        match &cfg.model {
            ModelConfig::Dep(c) => c.validate(),
            ModelConfig::Const(c) => c.validate(),
        }
        .map_err(|e| CliError::usage(e.to_string()))?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let path = || Some(PathBuf::from(value));
        match key {
            "task" => return Ok(()),
            "train" => self.train = path(),
            "dev" => self.dev = path(),
            "out" => self.out = path(),
            "head_rules" => self.head_rules = path(),
            "precision" => self.precision = parse_value(key, value)?,
            "max_skip_rate" => self.max_skip_rate = parse_value(key, value)?,
            _ => {
                let known = match &mut self.model {
                    ModelConfig::Dep(c) => match key {
                        "hidden" => {
                            c.hidden = parse_value(key, value)?;
                            true
                        }
                        "hierarchical" => {
                            c.hierarchical = parse_bool(key, value)?;
                            true
                        }
                        _ => apply_encoder(&mut c.encoder, key, value)? || apply_train(&mut c.train, key, value)?,
                    },
                    ModelConfig::Const(c) => match key {
                        "hidden" => {
                            c.hidden = parse_value(key, value)?;
                            true
                        }
                        "hierarchical" => {
                            c.hierarchical = parse_bool(key, value)?;
                            true
                        }
                        "nonterminal_dims" => {
                            c.nonterminal_dims = parse_value(key, value)?;
                            true
                        }
                        "promote_cap" => {
                            c.promote_cap = parse_value(key, value)?;
                            true
                        }
                        _ => apply_encoder(&mut c.encoder, key, value)? || apply_train(&mut c.train, key, value)?,
                    },
                };
                if !known {
                    return Err(CliError::usage(format!(
                        "unknown setting {key:?} for task {}",
                        self.task
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every resolved setting, in a fixed order.
    pub fn settings(&self) -> Vec<(&'static str, String)> {
        fn encoder(e: &EncoderConfig, out: &mut Vec<(&'static str, String)>) {
            out.push(("word_dims", e.word_dims.to_string()));
            out.push(("tag_dims", e.tag_dims.to_string()));
            out.push(("use_tags", e.use_tags.to_string()));
            out.push(("lstm_units", e.lstm_units.to_string()));
            out.push(("layers", e.layers.to_string()));
            out.push(("directions", e.directions.to_string()));
            out.push(("dropout", e.dropout.to_string()));
            out.push(("word_dropout", e.word_dropout.to_string()));
        }
        fn train(t: &TrainConfig, out: &mut Vec<(&'static str, String)>) {
            out.push(("epochs", t.epochs.to_string()));
            out.push(("batch_size", t.batch_size.to_string()));
            out.push(("rho", t.rho.to_string()));
            out.push(("eps", format!("{:e}", t.eps)));
            out.push(("l2", format!("{:e}", t.l2)));
            out.push(("clip_norm", t.clip_norm.map_or("none".to_string(), |c| c.to_string())));
            out.push(("seed", t.seed.to_string()));
            out.push(("min_form_count", t.min_form_count.to_string()));
        }
        let mut out = vec![
            ("task", self.task.to_string()),
            ("precision", self.precision.to_string()),
        ];
        match &self.model {
            ModelConfig::Dep(c) => {
                encoder(&c.encoder, &mut out);
                out.push(("hidden", c.hidden.to_string()));
                out.push(("hierarchical", c.hierarchical.to_string()));
                train(&c.train, &mut out);
            }
            ModelConfig::Const(c) => {
                encoder(&c.encoder, &mut out);
                out.push(("nonterminal_dims", c.nonterminal_dims.to_string()));
                out.push(("hidden", c.hidden.to_string()));
                out.push(("hierarchical", c.hierarchical.to_string()));
                out.push(("promote_cap", c.promote_cap.to_string()));
                train(&c.train, &mut out);
            }
        }
        out
    }

    /// Log lines echoing the resolved settings and every override.
    pub fn log_lines(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "config {}",
            self.settings()
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        )];
        for (k, v, source) in &self.overrides {
            lines.push(format!("override {k}={v} source={source}"));
        }
        lines
    }
}
