//! Experiment configuration: one TOML document with a section per stage. Command-line flags
//! override individual fields after loading.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mcsel::policies::{AggregationId, CriterionWeights, PolicyId};
use mcsel::stats::{Pairing, DEFAULT_ALPHA};
use mcsel::synth::{SimulationSpec, TeacherSpec};
use mcsel::trainer::{ArchitectureGrid, TrainConfig};
use mcsel::Activation;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    pub datasets: Vec<DatasetSpec>,
    pub split: SplitConfig,
    pub grid: GridConfig,
    pub train: TrainConfig,
    pub select: SelectConfig,
    pub compare: CompareConfig,
    pub simulate: Option<SimulationSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            out: PathBuf::from("out"),
            jobs: 1,
            datasets: Vec::new(),
            split: SplitConfig::default(),
            grid: GridConfig::default(),
            train: TrainConfig::default(),
            select: SelectConfig::default(),
            compare: CompareConfig::default(),
            simulate: None,
        }
    }
}

/// A dataset is either a CSV file (features then an integer label) or a synthetic draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthDataset>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthDataset {
    pub teacher: TeacherSpec,
    pub n: usize,
    #[serde(default)]
    pub label_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub k: usize,
    pub repeats: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { k: 10, repeats: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub neuron_min: u32,
    pub neuron_max: u32,
    pub activations: Vec<Activation>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            neuron_min: 1,
            neuron_max: 20,
            activations: vec![Activation::Relu, Activation::Tanh, Activation::Sigmoid],
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> ArchitectureGrid {
        ArchitectureGrid::new(self.neuron_min..=self.neuron_max, &self.activations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub policies: Vec<PolicyId>,
    pub aggregations: Vec<AggregationId>,
    /// TOPSIS weight per criterion name (`train`, `validation`, `holdout`, `test`, `neurons`,
    /// `epochs`); missing names weigh 1.
    pub weights: BTreeMap<String, f64>,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            policies: PolicyId::ALL.to_vec(),
            aggregations: AggregationId::ALL.to_vec(),
            weights: BTreeMap::new(),
        }
    }
}

impl SelectConfig {
    pub fn criterion_weights(&self) -> CriterionWeights {
        CriterionWeights(self.weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub alpha: f64,
    pub pairing: Pairing,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            alpha: DEFAULT_ALPHA,
            pairing: Pairing::PerRun,
        }
    }
}

/// Flag values that replace config fields when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub policies: Option<String>,
    pub aggregations: Option<String>,
    pub alpha: Option<f64>,
    pub jobs: Option<usize>,
}

fn parse_list<T: std::str::FromStr<Err = mcsel::Error>>(list: &str) -> Result<Vec<T>, CliError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::Config(e.to_string())))
        .collect()
}

impl ExperimentConfig {
    /// Reads a TOML file. Relative dataset paths resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            if let Some(p) = &d.path {
                if p.is_relative() {
                    d.path = Some(base.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        if let Some(l) = &o.policies {
            self.select.policies = parse_list(l)?;
        }
        if let Some(l) = &o.aggregations {
            self.select.aggregations = parse_list(l)?;
        }
        if let Some(a) = o.alpha {
            self.compare.alpha = a;
        }
        if let Some(j) = o.jobs {
            self.jobs = j;
        }
        Ok(())
    }

    /// Checks everything that does not need the data itself.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.jobs == 0 {
            return bad("jobs must be >= 1".into());
        }
        if self.select.policies.is_empty() {
            return bad("policy list is empty".into());
        }
        if self.select.aggregations.is_empty() {
            return bad("aggregation list is empty".into());
        }
        if !(self.compare.alpha > 0.0 && self.compare.alpha < 1.0) {
            return bad(format!("alpha must lie in (0,1), got {}", self.compare.alpha));
        }
        for (name, w) in &self.select.weights {
            if !(w.is_finite() && *w > 0.0) {
                return bad(format!("weight for {name} must be positive, got {w}"));
            }
        }
        if self.grid.activations.is_empty() || self.grid.neuron_min == 0 || self.grid.neuron_min > self.grid.neuron_max {
            return bad(format!(
                "architecture grid is empty or invalid: neurons {}..={}, {} activations",
                self.grid.neuron_min,
                self.grid.neuron_max,
                self.grid.activations.len()
            ));
        }
        self.train.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let mut ids = std::collections::BTreeSet::new();
        for d in &self.datasets {
            if d.id.is_empty() || d.id.contains(['/', '\\', ',']) {
                return bad(format!("dataset id {:?} must be non-empty without '/', '\\' or ','", d.id));
            }
            if !ids.insert(d.id.as_str()) {
                return bad(format!("dataset id {} appears twice", d.id));
            }
            match (&d.path, &d.synth) {
                (Some(p), None) => {
                    if !p.is_file() {
                        return bad(format!("dataset {}: file {} does not exist", d.id, p.display()));
                    }
                }
                (None, Some(s)) => {
                    if s.n == 0 || !(0.0..1.0).contains(&s.label_noise) {
                        return bad(format!("dataset {}: need n >= 1 and label_noise in [0,1)", d.id));
                    }
                }
                _ => return bad(format!("dataset {} needs exactly one of path or synth", d.id)),
            }
        }
        Ok(())
    }

    pub fn require_datasets(&self) -> Result<(), CliError> {
        if self.datasets.is_empty() {
            Err(CliError::Config("no datasets configured".into()))
        } else {
            Ok(())
        }
    }
}
