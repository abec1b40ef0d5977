use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::linesearch::{self, DirectionStrategy, LineSearchOutcome, SearchSpec, Sentence};
use crate::metrics::{Metric, Scalarizer};

use super::config::{densify_with_warning, Directions, RunConfig};
use super::format::{CorpusFile, FeatureIndex, Origin};
use super::verify::{self, VerifyOptions};
use super::{json, CliError};

/// Command output: text for stdout and warnings for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
}

/// A corpus read from disk with its global feature index.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub index: FeatureIndex,
    pub origins: Vec<Origin>,
    pub sentences: Vec<Sentence<f64>>,
}

impl Loaded {
    /// Reads `paths`; the feature index covers the corpus and every name in
    /// `config`. Names only the configuration knows are reported.
    pub fn read(paths: &[PathBuf], config: &RunConfig, warnings: &mut Vec<String>) -> Result<Self, CliError> {
        if paths.is_empty() {
            return Err(CliError::usage("no forest files given"));
        }
        let file = CorpusFile::read(paths)?;
        if file.docs.is_empty() {
            return Err(CliError::usage("empty corpus: the input files contain no sentences"));
        }
        let corpus_names = file.feature_names();
        let mut unknown: Vec<String> = config
            .feature_names()
            .into_iter()
            .filter(|n| !corpus_names.contains(n))
            .collect();
        unknown.sort();
        unknown.dedup();
        if !unknown.is_empty() {
            warnings.push(format!("configuration names features absent from the corpus: {}", unknown.join(", ")));
        }
        let index = FeatureIndex::new(corpus_names.into_iter().chain(config.feature_names()));
        let sentences = file.sentences(&index)?;
        Ok(Self {
            index,
            origins: file.docs.into_iter().map(|(o, _)| o).collect(),
            sentences,
        })
    }

    fn spec(&self, config: &RunConfig, warnings: &mut Vec<String>) -> Result<SearchSpec<f64>, CliError> {
        let direction = config
            .direction
            .as_ref()
            .ok_or_else(|| CliError::usage("a search direction is required (--direction)"))?;
        let w0 = densify_with_warning(&self.index, &config.weights, "weights", warnings);
        let v = densify_with_warning(&self.index, direction, "direction", warnings);
        Ok(SearchSpec::new(w0, v)?)
    }

    fn line_search(&self, config: &RunConfig, warnings: &mut Vec<String>) -> Result<LineSearchOutcome<f64>, CliError> {
        let spec = self.spec(config, warnings)?;
        let out = linesearch::line_search(
            &self.sentences,
            &spec,
            config.metric,
            config.scalarizer(),
            &config.search_config(),
        )
        .map_err(CliError::from)?;
        warnings.extend(out.warnings.iter().cloned());
        Ok(out)
    }
}

fn prepare(paths: &[PathBuf], config: &RunConfig) -> Result<(Loaded, Vec<String>), CliError> {
    config.validate()?;
    let mut warnings = Vec::new();
    let loaded = Loaded::read(paths, config, &mut warnings)?;
    Ok((loaded, warnings))
}

/// One line per sentence: origin, node and edge counts, derivation count.
pub fn cmd_validate(paths: &[PathBuf], config: &RunConfig) -> Result<Output, CliError> {
    let (loaded, mut warnings) = prepare(paths, config)?;
    if !config.weights.is_empty() {
        densify_with_warning(&loaded.index, &config.weights, "weights", &mut warnings);
    }
    let mut stdout = String::new();
    for (i, (origin, s)) in loaded.origins.iter().zip(&loaded.sentences).enumerate() {
        let g = &s.forest;
        let count = g
            .derivation_count()
            .map_or_else(|| "overflow".to_string(), |c| c.to_string());
        writeln!(
            stdout,
            "{i}\t{origin}\tnodes={}\tedges={}\tderivations={count}",
            g.num_nodes(),
            g.num_edges()
        )
        .unwrap();
        for w in &g.validation().warnings {
            warnings.push(format!("sentence {i} ({origin}): {w:?}"));
        }
    }
    Ok(Output { stdout, warnings })
}

#[derive(Serialize)]
struct SegmentReport {
    lower: Option<f64>,
    upper: Option<f64>,
    #[serde(rename = "yield")]
    yield_string: String,
    slope: f64,
    intercept: f64,
}

#[derive(Serialize)]
struct SentenceReport {
    index: usize,
    segments: Vec<SegmentReport>,
}

#[derive(Serialize)]
struct SurfaceReport {
    boundaries: Vec<f64>,
    counts: Vec<Vec<f64>>,
    losses: Vec<f64>,
}

#[derive(Serialize)]
struct LineSearchReport {
    features: Vec<String>,
    metric: Metric,
    scalarizer: Scalarizer,
    merge_eps: f64,
    offset: f64,
    initial_weights: BTreeMap<String, f64>,
    direction: BTreeMap<String, f64>,
    sentences: Vec<SentenceReport>,
    corpus_surface: SurfaceReport,
    eta: f64,
    loss: f64,
    loss_at_zero: f64,
    weights: BTreeMap<String, f64>,
}

/// Exact line search; the report is indented JSON.
pub fn cmd_linesearch(paths: &[PathBuf], config: &RunConfig) -> Result<Output, CliError> {
    let (loaded, mut warnings) = prepare(paths, config)?;
    let out = loaded.line_search(config, &mut warnings)?;
    let spec = loaded.spec(config, &mut Vec::new())?;
    let index = &loaded.index;
    let report = LineSearchReport {
        features: index.names().to_vec(),
        metric: config.metric,
        scalarizer: config.scalarizer(),
        merge_eps: config.merge_eps,
        offset: config.offset,
        initial_weights: index.sparsify(&spec.w0),
        direction: index.sparsify(&spec.v),
        sentences: out
            .envelopes
            .iter()
            .enumerate()
            .map(|(i, env)| SentenceReport {
                index: i,
                segments: env
                    .segments
                    .iter()
                    .map(|s| SegmentReport {
                        lower: s.lower,
                        upper: s.upper,
                        yield_string: s.derivation.yield_string(),
                        slope: s.slope,
                        intercept: s.intercept,
                    })
                    .collect(),
            })
            .collect(),
        corpus_surface: SurfaceReport {
            boundaries: out.corpus_surface.boundaries.clone(),
            counts: out.corpus_surface.counts.iter().map(|c| c.0.clone()).collect(),
            losses: out.corpus_surface.losses(config.scalarizer()),
        },
        eta: out.eta,
        loss: out.loss,
        loss_at_zero: out.loss_at_zero,
        weights: index.sparsify(&out.weights),
    };
    Ok(Output {
        stdout: json::to_pretty(&report),
        warnings,
    })
}

/// Parses `lo:hi` (or `lo,hi`) with finite `lo <= hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .or_else(|| s.split_once(','))
        .ok_or_else(|| CliError::usage(format!("range must look like lo:hi, got {s:?}")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::usage(format!("invalid range bound {t:?}")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(CliError::usage(format!("invalid range: {lo} > {hi}")));
    }
    Ok((lo, hi))
}

/// Corpus loss at `steps` evenly spaced η in `range`, read off the exact
/// surface. Tab-separated with a header row.
pub fn cmd_sweep(paths: &[PathBuf], config: &RunConfig, range: (f64, f64), steps: usize) -> Result<Output, CliError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CliError::usage(format!("invalid range {lo}:{hi}")));
    }
    if steps == 0 {
        return Err(CliError::usage("steps must be at least 1"));
    }
    let (loaded, mut warnings) = prepare(paths, config)?;
    let out = loaded.line_search(config, &mut warnings)?;
    let scalarizer = config.scalarizer();
    let mut stdout = String::from("eta\tloss\n");
    for k in 0..steps {
        let eta = if steps == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (steps - 1) as f64
        };
        let loss = scalarizer.loss(out.corpus_surface.count_at(&eta));
        writeln!(stdout, "{}\t{}", json::format_f64(eta), json::format_f64(loss)).unwrap();
    }
    Ok(Output { stdout, warnings })
}

#[derive(Serialize)]
struct StepReport {
    sweep: usize,
    direction: usize,
    eta: f64,
    loss: f64,
}

#[derive(Serialize)]
struct OptimizeReport {
    features: Vec<String>,
    metric: Metric,
    scalarizer: Scalarizer,
    iterations: usize,
    directions: Vec<BTreeMap<String, f64>>,
    initial_weights: BTreeMap<String, f64>,
    weights: BTreeMap<String, f64>,
    trace: Vec<f64>,
    sweeps: usize,
    steps: Vec<StepReport>,
}

/// Coordinate-style MERT; reports final weights and the loss trace.
pub fn cmd_optimize(paths: &[PathBuf], config: &RunConfig) -> Result<Output, CliError> {
    let (loaded, mut warnings) = prepare(paths, config)?;
    let index = &loaded.index;
    let w0 = densify_with_warning(index, &config.weights, "weights", &mut warnings);
    let (strategy, directions) = match &config.directions {
        Directions::Axes => {
            let axes: Vec<Vec<f64>> = (0..index.len())
                .map(|i| {
                    let mut v = vec![0.0; index.len()];
                    v[i] = 1.0;
                    v
                })
                .collect();
            (DirectionStrategy::Axes, axes)
        }
        Directions::List(list) => {
            let dense: Vec<Vec<f64>> = list
                .iter()
                .enumerate()
                .map(|(k, m)| densify_with_warning(index, m, &format!("direction {k}"), &mut warnings))
                .collect();
            (DirectionStrategy::List(dense.clone()), dense)
        }
    };
    let out = linesearch::optimize(
        &loaded.sentences,
        &w0,
        &strategy,
        config.iterations,
        config.metric,
        config.scalarizer(),
        &config.search_config(),
    )?;
    let report = OptimizeReport {
        features: index.names().to_vec(),
        metric: config.metric,
        scalarizer: config.scalarizer(),
        iterations: config.iterations,
        directions: directions.iter().map(|v| index.sparsify(v)).collect(),
        initial_weights: index.sparsify(&w0),
        weights: index.sparsify(&out.weights),
        trace: out.trace,
        sweeps: out.sweeps,
        steps: out
            .steps
            .iter()
            .map(|s| StepReport {
                sweep: s.sweep,
                direction: s.direction,
                eta: s.eta,
                loss: s.loss,
            })
            .collect(),
    };
    Ok(Output {
        stdout: json::to_pretty(&report),
        warnings,
    })
}

/// Oracle checks on the given files and on seeded random instances. Any
/// failed check is an invariant error carrying the full report.
pub fn cmd_verify(paths: &[PathBuf], config: &RunConfig, options: &VerifyOptions) -> Result<Output, CliError> {
    let mut warnings = Vec::new();
    let mut results = Vec::new();
    if !paths.is_empty() {
        config.validate()?;
        let loaded = Loaded::read(paths, config, &mut warnings)?;
        let w0 = densify_with_warning(&loaded.index, &config.weights, "weights", &mut warnings);
        let v = match &config.direction {
            Some(d) => densify_with_warning(&loaded.index, d, "direction", &mut warnings),
            None => vec![1.0; loaded.index.len()],
        };
        let spec = SearchSpec::new(w0, v)?;
        results.extend(verify::check_corpus(&loaded.sentences, &spec, options));
    }
    results.extend(verify::check_random(options));
    let stdout: String = results.iter().map(|r| format!("{r}\n")).collect();
    if results.iter().any(|r| !r.passed()) {
        return Err(CliError::invariant(format!("oracle checks failed\n{}", stdout.trim_end())));
    }
    Ok(Output { stdout, warnings })
}
