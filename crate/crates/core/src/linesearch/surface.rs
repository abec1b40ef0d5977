use crate::error::{Error, Result};
use crate::metrics::{Metric, Scalarizer, VectorErrorCount};
use crate::scalar::Scalar;

use super::{Envelope, SearchConfig, Selection};

/// Piecewise-constant error counts over η. Interval `k` spans
/// `(boundaries[k-1], boundaries[k]]`, with the outer ends unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurface<T> {
    pub boundaries: Vec<T>,
    pub counts: Vec<VectorErrorCount>,
}

impl<T: Scalar> ErrorSurface<T> {
    pub fn dim(&self) -> usize {
        self.counts[0].dim()
    }

    pub fn num_intervals(&self) -> usize {
        self.counts.len()
    }

    /// Interval index containing `eta`; a boundary belongs to the interval on its left.
    pub fn interval_at(&self, eta: &T) -> usize {
        self.boundaries.partition_point(|b| b < eta)
    }

    pub fn count_at(&self, eta: &T) -> &VectorErrorCount {
        &self.counts[self.interval_at(eta)]
    }

    pub fn losses(&self, scalarizer: Scalarizer) -> Vec<f64> {
        self.counts.iter().map(|c| scalarizer.loss(c)).collect()
    }
}

/// Evaluates the metric once per envelope segment. Adjacent segments with
/// equal counts keep their boundary.
pub fn sentence_surface<T: Scalar>(env: &Envelope<T>, reference: &[String], metric: Metric) -> ErrorSurface<T> {
    ErrorSurface {
        boundaries: env.boundaries(),
        counts: env
            .segments
            .iter()
            .map(|s| metric.delta(&s.derivation.tokens, reference))
            .collect(),
    }
}

/// Sums sentence surfaces over the common refinement of their intervals.
/// Boundaries within `merge_eps` of the previous kept boundary are
/// coalesced into it.
pub fn corpus_surface<T: Scalar>(surfaces: &[ErrorSurface<T>], merge_eps: f64) -> Result<ErrorSurface<T>> {
    let first = surfaces
        .first()
        .ok_or_else(|| Error::InvalidArgument("no error surfaces to merge".into()))?;
    let m = first.dim();
    if let Some(bad) = surfaces.iter().find(|s| s.dim() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: bad.dim(),
        });
    }
    let eps = T::from_f64(merge_eps).ok_or_else(|| Error::InvalidArgument("merge tolerance".into()))?;

    let mut events: Vec<(T, usize, usize)> = surfaces
        .iter()
        .enumerate()
        .flat_map(|(s, surf)| {
            surf.boundaries
                .iter()
                .enumerate()
                .map(move |(j, b)| (b.clone(), s, j))
        })
        .collect();
    events.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("boundaries are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut running = VectorErrorCount::zeros(m);
    for s in surfaces {
        running += &s.counts[0];
    }
    let mut boundaries = Vec::new();
    let mut counts = vec![running.clone()];
    let mut i = 0;
    while i < events.len() {
        let start = events[i].0.clone();
        while i < events.len() && events[i].0.clone() - start.clone() <= eps {
            let (_, s, j) = events[i];
            let c = &surfaces[s].counts;
            for ((acc, next), prev) in running.0.iter_mut().zip(&c[j + 1].0).zip(&c[j].0) {
                *acc += next - prev;
            }
            i += 1;
        }
        boundaries.push(start);
        counts.push(running.clone());
    }
    Ok(ErrorSurface { boundaries, counts })
}

/// Chooses η in the interval with the lowest loss. Ties prefer the interval
/// containing η = 0, then the leftmost. Bounded intervals use their
/// midpoint; unbounded ones sit `unbounded_offset` beyond their only
/// boundary. A surface with a single interval returns η = 0.
pub fn pick_eta<T: Scalar>(surface: &ErrorSurface<T>, scalarizer: Scalarizer, config: &SearchConfig) -> (T, f64) {
    let losses = surface.losses(scalarizer);
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let at_zero = surface.interval_at(&T::zero());
    let chosen = if losses[at_zero] == best {
        at_zero
    } else {
        losses.iter().position(|&l| l == best).expect("non-empty surface")
    };
    let b = &surface.boundaries;
    let offset = T::from_f64(config.unbounded_offset).expect("finite offset");
    let eta = match config.selection {
        Selection::Midpoint => {
            if b.is_empty() {
                T::zero()
            } else if chosen == 0 {
                b[0].clone() - offset
            } else if chosen == b.len() {
                b[b.len() - 1].clone() + offset
            } else {
                (b[chosen - 1].clone() + b[chosen].clone()) / T::two()
            }
        }
    };
    (eta, losses[chosen])
}
