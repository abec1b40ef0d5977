//! Line-delimited forest files.
//!
//! Each non-blank line is one JSON document describing one sentence:
//!
//! ```json
//! {"features":["lm","tm"],"nodes":["NP","S"],"goal":1,
//!  "edges":[{"head":0,"tails":[],"features":{"lm":-1.5},"yield":"the cat"},
//!           {"head":1,"tails":[0],"features":{"tm":2.0},"yield":"$0 sleeps"}],
//!  "reference":"the cat sleeps"}
//! ```
//!
//! `features` declares the sentence's feature names; its length is the
//! feature dimension. Yields are whitespace-separated; a token `$k` is
//! replaced by the yield of the edge's `k`-th tail.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::forest::{Edge, Hypergraph, YieldToken};
use crate::linesearch::Sentence;
use crate::metrics::tokenize;

use super::{json, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub head: usize,
    #[serde(default)]
    pub tails: Vec<usize>,
    #[serde(default)]
    pub features: BTreeMap<String, f64>,
    #[serde(rename = "yield")]
    pub yield_template: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestDoc {
    pub features: Vec<String>,
    pub nodes: Vec<String>,
    pub goal: usize,
    pub edges: Vec<EdgeDoc>,
    pub reference: String,
}

fn parse_template(s: &str) -> Vec<YieldToken> {
    s.split_whitespace()
        .map(|tok| match tok.strip_prefix('$').and_then(|d| d.parse::<usize>().ok()) {
            Some(k) if tok[1..].bytes().all(|b| b.is_ascii_digit()) => YieldToken::Slot(k),
            _ => YieldToken::Word(tok.to_string()),
        })
        .collect()
}

fn render_template(template: &[YieldToken]) -> String {
    template
        .iter()
        .map(|t| match t {
            YieldToken::Word(w) => w.clone(),
            YieldToken::Slot(k) => format!("${k}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Stable global feature index: names sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureIndex {
    names: Vec<String>,
}

impl FeatureIndex {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Self {
            names: set.into_iter().collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// Dense vector from a sparse map. Returns the names that were absent.
    pub fn densify(&self, sparse: &BTreeMap<String, f64>) -> (Vec<f64>, Vec<String>) {
        let mut missing = Vec::new();
        let dense = self
            .names
            .iter()
            .map(|n| match sparse.get(n) {
                Some(v) => *v,
                None => {
                    missing.push(n.clone());
                    0.0
                }
            })
            .collect();
        (dense, missing)
    }

    pub fn sparsify(&self, dense: &[f64]) -> BTreeMap<String, f64> {
        self.names.iter().cloned().zip(dense.iter().copied()).collect()
    }
}

impl ForestDoc {
    pub fn parse(line: &str) -> Result<Self, String> {
        serde_json::from_str(line).map_err(|e| e.to_string())
    }

    /// Canonical single-line form.
    pub fn to_line(&self) -> String {
        json::to_line(self)
    }

    /// Builds the forest over `index`, which must contain every declared name.
    pub fn to_sentence(&self, index: &FeatureIndex) -> crate::error::Result<Sentence<f64>> {
        let declared: BTreeSet<&str> = self.features.iter().map(String::as_str).collect();
        if declared.len() != self.features.len() {
            return Err(Error::MalformedForest("duplicate feature name in declaration".into()));
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, ed)| {
                let features = ed
                    .features
                    .iter()
                    .map(|(name, v)| {
                        if !declared.contains(name.as_str()) {
                            return Err(Error::MalformedForest(format!("edge {e} uses undeclared feature {name:?}")));
                        }
                        let id = index
                            .id(name)
                            .ok_or_else(|| Error::Invariant(format!("feature {name:?} missing from the index")))?;
                        Ok((id, *v))
                    })
                    .collect::<crate::error::Result<Vec<_>>>()?;
                Ok(Edge::new(ed.head, ed.tails.clone(), features, parse_template(&ed.yield_template)))
            })
            .collect::<crate::error::Result<Vec<_>>>()?;
        Ok(Sentence {
            forest: Hypergraph::new(index.len(), self.nodes.clone(), self.goal, edges)?,
            reference: tokenize(&self.reference),
        })
    }

    /// Inverse of [`to_sentence`](Self::to_sentence). The declared feature
    /// list is the set of features with a nonzero value on some edge.
    pub fn from_sentence(s: &Sentence<f64>, index: &FeatureIndex) -> Self {
        let g = &s.forest;
        let mut used = BTreeSet::new();
        let edges = g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                head: e.head,
                tails: e.tails.clone(),
                features: e
                    .features
                    .iter()
                    .filter(|(_, v)| *v != 0.0)
                    .map(|(id, v)| {
                        used.insert(index.names()[*id].clone());
                        (index.names()[*id].clone(), *v)
                    })
                    .collect(),
                yield_template: render_template(&e.yield_template),
            })
            .collect();
        ForestDoc {
            features: used.into_iter().collect(),
            nodes: g.labels().to_vec(),
            goal: g.goal(),
            edges,
            reference: s.reference.join(" "),
        }
    }
}

/// Where a sentence came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin {
    pub path: PathBuf,
    pub line: usize,
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.path.display(), self.line)
    }
}

/// Parsed documents of one or more files, in input order.
#[derive(Debug, Clone)]
pub struct CorpusFile {
    pub docs: Vec<(Origin, ForestDoc)>,
}

impl CorpusFile {
    pub fn read(paths: &[impl AsRef<Path>]) -> Result<Self, CliError> {
        let mut lines = Vec::new();
        for path in paths {
            let path = path.as_ref();
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                if !line.trim().is_empty() {
                    lines.push((
                        Origin {
                            path: path.to_path_buf(),
                            line: i + 1,
                        },
                        line.to_string(),
                    ));
                }
            }
        }
        let docs = lines
            .into_par_iter()
            .map(|(origin, line)| match ForestDoc::parse(&line) {
                Ok(doc) => Ok((origin, doc)),
                Err(e) => Err(CliError::data(format!("{origin}: {e}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { docs })
    }

    pub fn feature_names(&self) -> BTreeSet<String> {
        self.docs
            .iter()
            .flat_map(|(_, d)| d.features.iter().cloned())
            .collect()
    }

    /// Builds every sentence over `index`. Errors name the sentence.
    pub fn sentences(&self, index: &FeatureIndex) -> Result<Vec<Sentence<f64>>, CliError> {
        self.docs
            .par_iter()
            .enumerate()
            .map(|(i, (origin, doc))| {
                doc.to_sentence(index)
                    .map_err(|e| CliError::from(e).context(format!("sentence {i} ({origin})")))
            })
            .collect()
    }
}
