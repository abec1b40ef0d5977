//! Brute-force reference implementations. Nothing here is used on the fast
//! path; these exist to check it.

use crate::error::{Error, Result};
use crate::forest::Derivation;
use crate::geometry::{self, ConvexChain, Point2};
use crate::hull_semiring::TropicalValue;
use crate::linesearch::{SearchSpec, Sentence};
use crate::metrics::{Metric, Scalarizer, VectorErrorCount};
use crate::scalar::Scalar;

pub const DEFAULT_PAIR_CAP: usize = 10_000;
pub const DEFAULT_DERIVATION_CAP: usize = 10_000;

/// Evenly spaced η values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lo: -10.0,
            hi: 10.0,
            points: 2001,
        }
    }
}

impl Grid {
    pub fn step(&self) -> f64 {
        if self.points > 1 {
            (self.hi - self.lo) / (self.points - 1) as f64
        } else {
            0.0
        }
    }

    pub fn etas(&self) -> Vec<f64> {
        (0..self.points)
            .map(|k| self.lo + self.step() * k as f64)
            .collect()
    }
}

/// Hull of all `|a|·|b|` pairwise sums.
pub fn naive_minkowski<T: Scalar>(a: &[Point2<T>], b: &[Point2<T>], cap: usize) -> Result<ConvexChain<T>> {
    let needed = a.len().saturating_mul(b.len());
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let sums: Vec<Point2<T>> = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| p.add(q)))
        .collect();
    geometry::full_hull(&sums)
}

/// Hull of the dual points of explicitly listed derivations.
pub fn hull_of_derivations<T: Scalar>(derivations: &[Derivation<T>], w0: &[T], v: &[T]) -> Result<ConvexChain<T>> {
    let points = derivations
        .iter()
        .map(|d| d.dual_point(w0, v))
        .collect::<Result<Vec<_>>>()?;
    geometry::full_hull(&points)
}

/// Index of the first line attaining the maximum at `eta`.
pub fn argmax_line<T: Scalar>(lines: &[(T, T)], eta: &T) -> usize {
    let mut best = 0;
    let mut best_val: Option<T> = None;
    for (i, (m, b)) in lines.iter().enumerate() {
        let val = m.clone() * eta.clone() + b.clone();
        if best_val.as_ref().is_none_or(|bv| val > *bv) {
            best = i;
            best_val = Some(val);
        }
    }
    best
}

/// Argmax line index at each η of `grid`, for lines `(slope, intercept)`.
pub fn naive_envelope(lines: &[(f64, f64)], grid: &Grid) -> Result<Vec<(f64, usize)>> {
    if lines.is_empty() {
        return Err(Error::NoHypotheses("no lines to sample".into()));
    }
    Ok(grid
        .etas()
        .into_iter()
        .map(|eta| (eta, argmax_line(lines, &eta)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub etas: Vec<f64>,
    pub losses: Vec<f64>,
}

impl GridSearch {
    /// Lowest grid loss and the first η attaining it.
    pub fn best(&self) -> (f64, f64) {
        let mut best = (self.etas[0], self.losses[0]);
        for (e, l) in self.etas.iter().zip(&self.losses) {
            if *l < best.1 {
                best = (*e, *l);
            }
        }
        best
    }
}

/// Decodes every sentence at every grid η by scoring its full derivation
/// list, and reports the corpus loss. The decoded score is cross-checked
/// against tropical inside.
pub fn grid_line_search(
    corpus: &[Sentence<f64>],
    spec: &SearchSpec<f64>,
    metric: Metric,
    scalarizer: Scalarizer,
    grid: &Grid,
    cap: usize,
) -> Result<GridSearch> {
    let lists = corpus
        .iter()
        .map(|s| s.forest.enumerate(cap))
        .collect::<Result<Vec<_>>>()?;
    let etas = grid.etas();
    let mut losses = Vec::with_capacity(etas.len());
    for eta in &etas {
        let w = spec.weights_at(eta);
        let mut total = VectorErrorCount::zeros(metric.dim());
        for (s, list) in corpus.iter().zip(&lists) {
            let scores: Vec<(f64, f64)> = list.iter().map(|d| (0.0, d.score(&w))).collect();
            let winner = argmax_line(&scores, &0.0);
            let viterbi = s.forest.tropical_inside(&spec.w0, &spec.v, eta)?;
            let best = scores[winner].1;
            if !matches!(viterbi, TropicalValue(Some(t)) if (t - best).abs() <= 1e-9 * best.abs().max(1.0)) {
                return Err(Error::Invariant(format!(
                    "tropical inside {viterbi:?} disagrees with enumerated maximum {best} at η={eta}"
                )));
            }
            total += &metric.delta(&list[winner].tokens, &s.reference);
        }
        losses.push(scalarizer.loss(&total));
    }
    Ok(GridSearch { etas, losses })
}
