//! Exact line search along `w = η·v + w0`.
//!
//! Each sentence's goal hull yields the upper envelope of its derivations'
//! score lines; evaluating the metric once per envelope segment gives a
//! piecewise-constant error surface. Sentence surfaces are merged into a
//! corpus surface and the best interval is chosen.

mod optimize;
mod surface;

pub use optimize::{optimize, DirectionStrategy, OptimizeOutcome, OptimizeStep};
pub use surface::{corpus_surface, pick_eta, sentence_surface, ErrorSurface};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forest::{Derivation, Hypergraph};
use crate::geometry::{self, ConvexChain, Point2};
use crate::hull_semiring::{DualPointSet, Provenance, Semiring, Trace};
use crate::metrics::{Metric, Scalarizer, VectorErrorCount};
use crate::scalar::Scalar;

/// Default coalescing tolerance for boundaries of different sentences.
pub const DEFAULT_MERGE_EPS: f64 = 1e-9;
/// Default distance from the last boundary when the best interval is unbounded.
pub const DEFAULT_UNBOUNDED_OFFSET: f64 = 0.1;

/// Starting weights and search direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec<T> {
    pub w0: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> SearchSpec<T> {
    pub fn new(w0: Vec<T>, v: Vec<T>) -> Result<Self> {
        if w0.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: w0.len(),
                actual: v.len(),
            });
        }
        Ok(Self { w0, v })
    }

    pub fn dim(&self) -> usize {
        self.w0.len()
    }

    /// A zero direction makes every line flat: nothing to search.
    pub fn is_degenerate(&self) -> bool {
        self.v.iter().all(|x| x.is_zero())
    }

    /// `w0 + η·v`.
    pub fn weights_at(&self, eta: &T) -> Vec<T> {
        self.w0
            .iter()
            .zip(&self.v)
            .map(|(a, b)| a.clone() + eta.clone() * b.clone())
            .collect()
    }
}

/// How a point is chosen inside the best interval. Only the midpoint rule
/// is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub merge_eps: f64,
    pub unbounded_offset: f64,
    pub selection: Selection,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            merge_eps: DEFAULT_MERGE_EPS,
            unbounded_offset: DEFAULT_UNBOUNDED_OFFSET,
            selection: Selection::Midpoint,
        }
    }
}

/// One piece of the upper envelope. `lower`/`upper` of `None` mean ∓∞.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
    pub slope: T,
    pub intercept: T,
    pub derivation: Derivation<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn score_at(&self, eta: &T) -> T {
        self.slope.clone() * eta.clone() + self.intercept.clone()
    }
}

/// Upper envelope: segments ordered left to right with strictly
/// increasing slopes; their intervals partition the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub segments: Vec<Segment<T>>,
}

impl<T: Scalar> Envelope<T> {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn boundaries(&self) -> Vec<T> {
        self.segments.iter().filter_map(|s| s.upper.clone()).collect()
    }

    /// Index of the segment whose interval contains `eta`; a boundary
    /// belongs to the segment on its left.
    pub fn segment_index_at(&self, eta: &T) -> usize {
        self.segments
            .iter()
            .position(|s| s.upper.as_ref().is_none_or(|u| eta <= u))
            .expect("last segment is unbounded")
    }

    pub fn segment_at(&self, eta: &T) -> &Segment<T> {
        &self.segments[self.segment_index_at(eta)]
    }
}

fn build_envelope<T, F>(hull: &DualPointSet<T>, mut derivation_of: F) -> Result<Envelope<T>>
where
    T: Scalar,
    F: FnMut(&Provenance) -> Result<Derivation<T>>,
{
    if hull.is_zero() {
        return Err(Error::NoHypotheses("the forest derives nothing".into()));
    }
    let chain = hull.lower_chain();
    let points: Vec<Point2<T>> = chain.iter().map(|(p, _)| p.clone()).collect();
    let etas = geometry::envelope_boundaries(&ConvexChain::from_points_unchecked(points))?;
    let segments = chain
        .iter()
        .enumerate()
        .map(|(i, (p, prov))| {
            Ok(Segment {
                lower: if i == 0 { None } else { Some(etas[i - 1].clone()) },
                upper: etas.get(i).cloned(),
                slope: p.slope(),
                intercept: p.intercept(),
                derivation: derivation_of(prov)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Envelope { segments })
}

/// Envelope of all derivations of `g` along `spec`, computed by inside in
/// the convex hull semiring. Lines that never attain the maximum are absent.
pub fn envelope<T: Scalar>(g: &Hypergraph<T>, spec: &SearchSpec<T>) -> Result<Envelope<T>> {
    let hull = g.hull_inside(&spec.w0, &spec.v)?;
    build_envelope(&hull, |prov| g.reconstruct(prov))
}

/// Envelope of an explicit hypothesis list (the n-best formulation).
/// Coincident lines keep the earliest hypothesis.
pub fn envelope_from_derivations<T: Scalar>(
    derivations: &[Derivation<T>],
    spec: &SearchSpec<T>,
) -> Result<Envelope<T>> {
    let singletons = derivations
        .iter()
        .enumerate()
        .map(|(i, d)| Ok(DualPointSet::leaf(d.dual_point(&spec.w0, &spec.v)?, i)))
        .collect::<Result<Vec<_>>>()?;
    let hull = DualPointSet::sum(singletons.iter());
    build_envelope(&hull, |prov| match prov.as_deref() {
        Some(Trace::Leaf(i)) => Ok(derivations[*i].clone()),
        _ => Err(Error::Invariant("n-best hull point without a leaf trace".into())),
    })
}

/// A development sentence: its forest and reference tokens.
#[derive(Debug, Clone)]
pub struct Sentence<T> {
    pub forest: Hypergraph<T>,
    pub reference: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LineSearchOutcome<T> {
    pub eta: T,
    pub loss: f64,
    pub loss_at_zero: f64,
    pub weights: Vec<T>,
    pub envelopes: Vec<Envelope<T>>,
    pub sentence_surfaces: Vec<ErrorSurface<T>>,
    pub corpus_surface: ErrorSurface<T>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> LineSearchOutcome<T> {
    pub fn envelope_sizes(&self) -> Vec<usize> {
        self.envelopes.iter().map(Envelope::len).collect()
    }
}

/// Exact corpus-level line search. Sentences are processed in parallel on
/// the current rayon pool; results are reduced in sentence order.
pub fn line_search<T: Scalar>(
    corpus: &[Sentence<T>],
    spec: &SearchSpec<T>,
    metric: Metric,
    scalarizer: Scalarizer,
    config: &SearchConfig,
) -> Result<LineSearchOutcome<T>> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    let mut warnings = Vec::new();
    if spec.is_degenerate() {
        warnings.push("search direction is zero; weights are left unchanged".to_string());
    }
    let per_sentence: Vec<(Envelope<T>, ErrorSurface<T>)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            if s.forest.dim() != spec.dim() {
                return Err(Error::DimensionMismatch {
                    expected: spec.dim(),
                    actual: s.forest.dim(),
                });
            }
            let env = envelope(&s.forest, spec).map_err(|e| match e {
                Error::NoHypotheses(msg) => Error::NoHypotheses(format!("sentence {i}: {msg}")),
                other => other,
            })?;
            let surf = sentence_surface(&env, &s.reference, metric);
            Ok((env, surf))
        })
        .collect::<Result<Vec<_>>>()?;
    let (envelopes, sentence_surfaces): (Vec<_>, Vec<_>) = per_sentence.into_iter().unzip();
    let corpus_surface = corpus_surface(&sentence_surfaces, config.merge_eps)?;
    let (eta, loss) = pick_eta(&corpus_surface, scalarizer, config);
    let loss_at_zero = scalarizer.loss(corpus_surface.count_at(&T::zero()));
    Ok(LineSearchOutcome {
        weights: spec.weights_at(&eta),
        eta,
        loss,
        loss_at_zero,
        envelopes,
        sentence_surfaces,
        corpus_surface,
        warnings,
    })
}

/// Corpus error count of the decoder output at weights `w`, by direct
/// Viterbi decoding of each sentence's envelope at a flat direction.
pub fn corpus_count_at<T: Scalar>(corpus: &[Sentence<T>], w: &[T], metric: Metric) -> Result<VectorErrorCount> {
    let flat = SearchSpec::new(w.to_vec(), vec![T::zero(); w.len()])?;
    let mut total = VectorErrorCount::zeros(metric.dim());
    for s in corpus {
        let env = envelope(&s.forest, &flat)?;
        total += &metric.delta(&env.segments[0].derivation.tokens, &s.reference);
    }
    Ok(total)
}
