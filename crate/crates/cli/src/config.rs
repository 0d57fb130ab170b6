//! Run settings: command-line flags over `--config` JSON over the corpus
//! `meta.json` next to the formula files, over built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use stl_distance::aos::{AosConfig, TimeWindow, DEFAULT_RESOLUTION_BUDGET};
use stl_distance::ingest::{read_meta, CorpusMeta};
use stl_distance::milp::{Encoding, SolverConfig};
use stl_distance::ph::PhConfig;
use stl_distance::sd::Normalizer;
use stl_distance::{Domain, Error, Rational, Result, Scalar};

/// A JSON number kept as its decimal text, or a string holding one.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Number(serde_json::Number),
    Text(String),
}

impl Num {
    fn value(&self, what: &str) -> Result<Rational> {
        let text = match self {
            Num::Number(n) => n.to_string(),
            Num::Text(s) => s.clone(),
        };
        Rational::parse_decimal(&text).ok_or_else(|| Error::InvalidConfig(format!("{what}: bad number '{text}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
pub enum Format {
    #[serde(rename = "human")]
    Human,
    #[serde(rename = "json")]
    Json,
    #[serde(rename = "csv")]
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
pub enum NormalizerArg {
    #[serde(rename = "T")]
    #[value(name = "T")]
    Horizon,
    #[serde(rename = "T+1")]
    #[value(name = "T+1")]
    HorizonPlusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WindowArg {
    Literal,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncodingArg {
    Implication,
    Full,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<Vec<[Num; 2]>>,
    #[serde(rename = "T")]
    pub horizon: Option<usize>,
    pub delta: Option<Num>,
    pub x_max: Option<Vec<Num>>,
    pub normalizer: Option<NormalizerArg>,
    pub window: Option<WindowArg>,
    pub encoding: Option<EncodingArg>,
    pub max_nodes: Option<usize>,
    pub max_pivots: Option<usize>,
    pub split_limit: Option<usize>,
    pub resolution_budget: Option<usize>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::File { path: path.into(), message: e.to_string() })?;
        serde_json::from_str(&text).map_err(|e| Error::File { path: path.into(), message: e.to_string() })
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            domain: over.domain.or(self.domain),
            horizon: over.horizon.or(self.horizon),
            delta: over.delta.or(self.delta),
            x_max: over.x_max.or(self.x_max),
            normalizer: over.normalizer.or(self.normalizer),
            window: over.window.or(self.window),
            encoding: over.encoding.or(self.encoding),
            max_nodes: over.max_nodes.or(self.max_nodes),
            max_pivots: over.max_pivots.or(self.max_pivots),
            split_limit: over.split_limit.or(self.split_limit),
            resolution_budget: over.resolution_budget.or(self.resolution_budget),
            format: over.format.or(self.format),
        }
    }
}

/// Resolved settings for one command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub domain: Domain<Rational>,
    pub x_max: Vec<Rational>,
    pub horizon: usize,
    pub delta: Rational,
    pub normalizer: Normalizer,
    pub window: TimeWindow,
    pub ph: PhConfig,
    pub resolution_budget: usize,
    pub format: Format,
}

impl Settings {
    pub fn dims(&self) -> usize {
        self.domain.dims()
    }

    pub fn aos(&self) -> AosConfig<Rational> {
        let mut cfg = AosConfig::new(self.x_max.clone(), self.delta.clone(), Rational::from_integer(self.horizon as i64));
        cfg.window = self.window;
        cfg.resolution_budget = self.resolution_budget;
        cfg
    }

    pub fn horizon_value(&self) -> Rational {
        Rational::from_integer(self.horizon as i64)
    }
}

/// `meta.json` of the corpus holding `file` (`corpus/formulas/x.stl` or
/// `corpus/traces/x.csv`), or of `dir` itself.
pub fn find_meta(path: &Path) -> Option<PathBuf> {
    let mut candidates = vec![path.join("meta.json")];
    if let Some(parent) = path.parent() {
        candidates.push(parent.join("meta.json"));
        if let Some(grand) = parent.parent() {
            candidates.push(grand.join("meta.json"));
        }
    }
    candidates.into_iter().find(|p| p.is_file())
}

fn meta_as_config(meta: &CorpusMeta<Rational>) -> RunConfig {
    let num = |q: &Rational| Num::Text(q.to_decimal_string());
    RunConfig {
        domain: Some(meta.domain.bounds().iter().map(|(l, h)| [num(l), num(h)]).collect()),
        horizon: Some(meta.horizon),
        x_max: Some(meta.x_max.iter().map(num).collect()),
        ..RunConfig::default()
    }
}

/// Merges the layers. `dims` and `horizon` are fallbacks inferred from the
/// formulae when no layer sets them.
pub fn resolve(layers: Vec<RunConfig>, meta_from: Option<&Path>, dims: usize, horizon: usize) -> Result<Settings> {
    let mut merged = RunConfig::default();
    if let Some(meta) = meta_from.and_then(find_meta) {
        merged = merged.overlay(meta_as_config(&read_meta(&meta)?));
    }
    for layer in layers {
        merged = merged.overlay(layer);
    }
    let domain = match &merged.domain {
        Some(bounds) => Domain::new(
            bounds
                .iter()
                .enumerate()
                .map(|(j, [lo, hi])| {
                    let what = format!("domain of x{}", j + 1);
                    Ok((lo.value(&what)?, hi.value(&what)?))
                })
                .collect::<Result<Vec<_>>>()?,
        )?,
        None => Domain::unit(dims),
    };
    let x_max = match &merged.x_max {
        Some(list) => list.iter().map(|x| x.value("x_max")).collect::<Result<Vec<_>>>()?,
        None => (0..domain.dims()).map(|j| domain.hi(j).clone()).collect(),
    };
    if x_max.len() != domain.dims() {
        return Err(Error::DimensionMismatch(format!(
            "x_max has {} entries for a {}-dimensional domain",
            x_max.len(),
            domain.dims()
        )));
    }
    let mut ph = PhConfig::default();
    ph.encoding = match merged.encoding.unwrap_or(EncodingArg::Implication) {
        EncodingArg::Implication => Encoding::Implication,
        EncodingArg::Full => Encoding::Full,
    };
    let defaults = SolverConfig::default();
    ph.solver.max_nodes = merged.max_nodes.unwrap_or(defaults.max_nodes);
    ph.solver.max_pivots = merged.max_pivots.unwrap_or(defaults.max_pivots);
    ph.split_limit = merged.split_limit.unwrap_or(ph.split_limit).max(1);
    Ok(Settings {
        domain,
        x_max,
        horizon: merged.horizon.unwrap_or(horizon),
        delta: match &merged.delta {
            Some(d) => d.value("delta")?,
            None => Rational::from_integer(1),
        },
        normalizer: match merged.normalizer.unwrap_or(NormalizerArg::Horizon) {
            NormalizerArg::Horizon => Normalizer::Horizon,
            NormalizerArg::HorizonPlusOne => Normalizer::HorizonPlusOne,
        },
        window: match merged.window.unwrap_or(WindowArg::Literal) {
            WindowArg::Literal => TimeWindow::Literal,
            WindowArg::Extended => TimeWindow::Extended,
        },
        ph,
        resolution_budget: merged.resolution_budget.unwrap_or(DEFAULT_RESOLUTION_BUDGET),
        format: merged.format.unwrap_or(Format::Human),
    })
}
