use crate::error::{Error, Result};
use crate::metrics::{Metric, Scalarizer};
use crate::scalar::Scalar;

use super::{line_search, SearchConfig, SearchSpec, Sentence};

/// Search directions tried in each sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionStrategy<T> {
    /// Unit vectors along each feature axis, in feature order.
    Axes,
    List(Vec<Vec<T>>),
}

impl<T: Scalar> DirectionStrategy<T> {
    fn directions(&self, dim: usize) -> Result<Vec<Vec<T>>> {
        match self {
            DirectionStrategy::Axes => Ok((0..dim)
                .map(|i| {
                    let mut v = vec![T::zero(); dim];
                    v[i] = T::one();
                    v
                })
                .collect()),
            DirectionStrategy::List(list) => {
                if let Some(bad) = list.iter().find(|v| v.len() != dim) {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        actual: bad.len(),
                    });
                }
                Ok(list.clone())
            }
        }
    }
}

/// An accepted line-search update.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeStep<T> {
    pub sweep: usize,
    pub direction: usize,
    pub eta: T,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome<T> {
    pub weights: Vec<T>,
    /// Loss before the first sweep followed by the loss after each sweep.
    pub trace: Vec<f64>,
    pub steps: Vec<OptimizeStep<T>>,
    pub sweeps: usize,
}

/// Coordinate-style MERT: line searches along each direction in turn,
/// keeping only updates that strictly reduce the corpus loss. Stops after
/// `max_sweeps` sweeps or after a sweep with no accepted update.
pub fn optimize<T: Scalar>(
    corpus: &[Sentence<T>],
    w0: &[T],
    strategy: &DirectionStrategy<T>,
    max_sweeps: usize,
    metric: Metric,
    scalarizer: Scalarizer,
    config: &SearchConfig,
) -> Result<OptimizeOutcome<T>> {
    let directions = strategy.directions(w0.len())?;
    let mut weights = w0.to_vec();
    let mut outcome = OptimizeOutcome {
        weights: weights.clone(),
        trace: Vec::new(),
        steps: Vec::new(),
        sweeps: 0,
    };
    if max_sweeps == 0 || directions.is_empty() {
        return Ok(outcome);
    }
    let mut current: Option<f64> = None;
    for sweep in 0..max_sweeps {
        let mut improved = false;
        for (d, v) in directions.iter().enumerate() {
            let spec = SearchSpec::new(weights.clone(), v.clone())?;
            let res = line_search(corpus, &spec, metric, scalarizer, config)?;
            let before = *current.get_or_insert(res.loss_at_zero);
            if outcome.trace.is_empty() {
                outcome.trace.push(before);
            }
            if res.loss < before {
                weights = res.weights;
                current = Some(res.loss);
                improved = true;
                outcome.steps.push(OptimizeStep {
                    sweep,
                    direction: d,
                    eta: res.eta,
                    loss: res.loss,
                });
            }
        }
        outcome.sweeps = sweep + 1;
        outcome.trace.push(current.expect("at least one direction searched"));
        if !improved {
            break;
        }
    }
    outcome.weights = weights;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Edge, Hypergraph};
    use crate::metrics::tokenize;

    fn choice_forest(options: &[(&[(usize, f64)], &str)]) -> Hypergraph<f64> {
        let edges = options
            .iter()
            .map(|(f, y)| Edge::simple(0, vec![], f.to_vec(), y))
            .collect();
        Hypergraph::new(2, vec!["s".into()], 0, edges).unwrap()
    }

    fn toy_corpus() -> Vec<Sentence<f64>> {
        // gold needs feature 0 positive in sentence 1 and feature 1 positive in sentence 2
        vec![
            Sentence {
                forest: choice_forest(&[(&[(0, 1.0)], "good"), (&[(1, 1.0)], "bad")]),
                reference: tokenize("good"),
            },
            Sentence {
                forest: choice_forest(&[(&[(0, 2.0)], "wrong"), (&[(0, 1.0), (1, 3.0)], "right")]),
                reference: tokenize("right"),
            },
        ]
    }

    #[test]
    fn zero_sweeps_returns_start() {
        let out = optimize(
            &toy_corpus(),
            &[0.3, 0.7],
            &DirectionStrategy::Axes,
            0,
            Metric::Exact,
            Scalarizer::Sum,
            &SearchConfig::default(),
        )
        .unwrap();
        assert_eq!(out.weights, vec![0.3, 0.7]);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn reaches_zero_loss_and_stops() {
        let out = optimize(
            &toy_corpus(),
            &[1.0, -1.0],
            &DirectionStrategy::Axes,
            10,
            Metric::Exact,
            Scalarizer::Sum,
            &SearchConfig::default(),
        )
        .unwrap();
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", out.trace);
        assert!(out.trace[0] > 0.0);
        assert_eq!(*out.trace.last().unwrap(), 0.0);
        assert!(!out.steps.is_empty());
        // the last sweep accepted nothing
        assert_eq!(out.steps.last().unwrap().sweep + 2, out.sweeps);
    }

    #[test]
    fn optimal_start_is_kept_after_one_sweep() {
        let out = optimize(
            &toy_corpus(),
            &[2.0, 1.0],
            &DirectionStrategy::Axes,
            10,
            Metric::Exact,
            Scalarizer::Sum,
            &SearchConfig::default(),
        )
        .unwrap();
        assert_eq!(out.weights, vec![2.0, 1.0]);
        assert_eq!(out.sweeps, 1);
        assert_eq!(out.trace, vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_wrong_direction_dimension() {
        let err = optimize(
            &toy_corpus(),
            &[1.0, 1.0],
            &DirectionStrategy::List(vec![vec![1.0]]),
            1,
            Metric::Exact,
            Scalarizer::Sum,
            &SearchConfig::default(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
