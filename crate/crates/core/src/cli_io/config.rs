use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::linesearch::{SearchConfig, Selection, DEFAULT_MERGE_EPS, DEFAULT_UNBOUNDED_OFFSET};
use crate::metrics::{Metric, Scalarizer};

use super::format::FeatureIndex;
use super::CliError;

pub const DEFAULT_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SelectionId {
    #[default]
    Midpoint,
}

/// Direction strategy for `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Directions {
    #[default]
    Axes,
    List(Vec<BTreeMap<String, f64>>),
}

/// Run settings. Read from a JSON file; command-line flags override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub weights: BTreeMap<String, f64>,
    pub direction: Option<BTreeMap<String, f64>>,
    pub metric: Metric,
    /// Defaults to the metric's natural loss.
    pub scalarizer: Option<Scalarizer>,
    pub merge_eps: f64,
    pub offset: f64,
    pub selection: SelectionId,
    pub iterations: usize,
    pub directions: Directions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            weights: BTreeMap::new(),
            direction: None,
            metric: Metric::Bleu,
            scalarizer: None,
            merge_eps: DEFAULT_MERGE_EPS,
            offset: DEFAULT_UNBOUNDED_OFFSET,
            selection: SelectionId::Midpoint,
            iterations: DEFAULT_ITERATIONS,
            directions: Directions::Axes,
        }
    }
}

/// Parses `name=value,name=value`. An empty string is the empty map.
pub fn parse_sparse(s: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected name=value, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad value for feature {:?}: {value:?}", name.trim())))?;
        if !value.is_finite() {
            return Err(CliError::usage(format!("non-finite value for feature {:?}", name.trim())));
        }
        if out.insert(name.trim().to_string(), value).is_some() {
            return Err(CliError::usage(format!("feature {:?} given twice", name.trim())));
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn scalarizer(&self) -> Scalarizer {
        self.scalarizer.unwrap_or_else(|| self.metric.default_scalarizer())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !self.scalarizer().compatible_with(self.metric) {
            return Err(CliError::usage(format!(
                "scalarizer {:?} needs BLEU statistics, metric is {}",
                self.scalarizer(),
                self.metric
            )));
        }
        if !(self.merge_eps.is_finite() && self.merge_eps >= 0.0) {
            return Err(CliError::usage("merge-eps must be a finite non-negative number"));
        }
        if !(self.offset.is_finite() && self.offset > 0.0) {
            return Err(CliError::usage("offset must be a finite positive number"));
        }
        let all_maps = self
            .direction
            .iter()
            .chain(match &self.directions {
                Directions::Axes => [].iter(),
                Directions::List(l) => l.iter(),
            })
            .chain(std::iter::once(&self.weights));
        for map in all_maps {
            if let Some((k, _)) = map.iter().find(|(_, v)| !v.is_finite()) {
                return Err(CliError::usage(format!("non-finite value for feature {k:?}")));
            }
        }
        Ok(())
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            merge_eps: self.merge_eps,
            unbounded_offset: self.offset,
            selection: match self.selection {
                SelectionId::Midpoint => Selection::Midpoint,
            },
        }
    }

    /// Every feature name the configuration mentions.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.weights.keys().cloned().collect();
        if let Some(d) = &self.direction {
            names.extend(d.keys().cloned());
        }
        if let Directions::List(list) = &self.directions {
            names.extend(list.iter().flat_map(|m| m.keys().cloned()));
        }
        names
    }
}

/// Densifies a sparse vector; absent features become 0.0 and produce one
/// warning naming all of them.
pub fn densify_with_warning(
    index: &FeatureIndex,
    sparse: &BTreeMap<String, f64>,
    what: &str,
    warnings: &mut Vec<String>,
) -> Vec<f64> {
    let (dense, missing) = index.densify(sparse);
    if !missing.is_empty() {
        warnings.push(format!(
            "{what}: {} feature(s) not set, using 0.0: {}",
            missing.len(),
            missing.join(", ")
        ));
    }
    dense
}
