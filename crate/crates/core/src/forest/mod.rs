//! Packed forests (hypergraphs) and semiring-weighted inside computation.
//!
//! Features live on edges and add up along a derivation, so the model score
//! of every derivation under `w = η·v + w0` is a line in η. Lattices are the
//! special case where every edge has at most one tail; they go through the
//! same code path.

mod derivation;

pub use derivation::Derivation;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::hull_semiring::{DualPointSet, Semiring, TropicalValue};
use crate::scalar::Scalar;

/// One item of an edge's yield template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum YieldToken {
    Word(String),
    /// Substitution point for the yield of the tail at this position.
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub head: usize,
    pub tails: Vec<usize>,
    /// Sparse feature vector, sorted by feature id, ids unique.
    pub features: Vec<(usize, T)>,
    pub yield_template: Vec<YieldToken>,
}

impl<T: Scalar> Edge<T> {
    pub fn new(
        head: usize,
        tails: Vec<usize>,
        features: Vec<(usize, T)>,
        yield_template: Vec<YieldToken>,
    ) -> Self {
        let mut features = features;
        features.sort_by_key(|(id, _)| *id);
        Self {
            head,
            tails,
            features,
            yield_template,
        }
    }

    /// Edge with a plain word yield followed by one slot per tail.
    pub fn simple(head: usize, tails: Vec<usize>, features: Vec<(usize, T)>, words: &str) -> Self {
        let mut template: Vec<YieldToken> = (0..tails.len()).map(YieldToken::Slot).collect();
        template.extend(words.split_whitespace().map(|w| YieldToken::Word(w.to_string())));
        Self::new(head, tails, features, template)
    }

    pub fn dot(&self, weights: &[T]) -> T {
        self.features
            .iter()
            .fold(T::zero(), |acc, (id, v)| acc + weights[*id].clone() * v.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationWarning {
    /// No derivation reaches the goal.
    EmptyLanguage,
    /// Node lies on no complete derivation of the goal.
    Unreachable { node: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub topological_order: Vec<usize>,
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn empty_language(&self) -> bool {
        self.warnings.contains(&ValidationWarning::EmptyLanguage)
    }
}

/// A validated, acyclic packed forest with one goal node.
#[derive(Debug, Clone)]
pub struct Hypergraph<T> {
    dim: usize,
    labels: Vec<String>,
    goal: usize,
    edges: Vec<Edge<T>>,
    incoming: Vec<Vec<usize>>,
    report: ValidationReport,
}

impl<T: Scalar> Hypergraph<T> {
    /// Validates and builds a forest. Fails on out-of-range ids, non-finite
    /// features, or cycles; unreachable nodes and an empty language are
    /// reported as warnings in [`Hypergraph::validation`].
    pub fn new(dim: usize, labels: Vec<String>, goal: usize, edges: Vec<Edge<T>>) -> Result<Self> {
        let n = labels.len();
        if dim == 0 {
            return Err(Error::MalformedForest("feature dimension must be positive".into()));
        }
        if goal >= n {
            return Err(Error::MalformedForest(format!("goal {goal} out of range ({n} nodes)")));
        }
        let mut incoming = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            if edge.head >= n || edge.tails.iter().any(|&t| t >= n) {
                return Err(Error::MalformedForest(format!("edge {e} references a missing node")));
            }
            for w in edge.features.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::MalformedForest(format!("edge {e} repeats feature {}", w[0].0)));
                }
            }
            for (id, v) in &edge.features {
                if *id >= dim {
                    return Err(Error::MalformedForest(format!(
                        "edge {e} feature id {id} not below dimension {dim}"
                    )));
                }
                if !v.is_finite_value() {
                    return Err(Error::MalformedForest(format!("edge {e} has a non-finite feature")));
                }
            }
            for tok in &edge.yield_template {
                if let YieldToken::Slot(k) = tok {
                    if *k >= edge.tails.len() {
                        return Err(Error::MalformedForest(format!(
                            "edge {e} yield slot ${k} has no matching tail"
                        )));
                    }
                }
            }
            incoming[edge.head].push(e);
        }
        let order = topological_order(&labels, &edges, &incoming)?;
        let warnings = reachability_warnings(n, goal, &edges, &incoming, &order);
        Ok(Self {
            dim,
            labels,
            goal,
            edges,
            incoming,
            report: ValidationReport {
                topological_order: order,
                warnings,
            },
        })
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.report
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn goal(&self) -> usize {
        self.goal
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge<T> {
        &self.edges[e]
    }

    pub fn incoming(&self, node: usize) -> &[usize] {
        &self.incoming[node]
    }

    /// Whether every edge has at most one tail.
    pub fn is_lattice(&self) -> bool {
        self.edges.iter().all(|e| e.tails.len() <= 1)
    }

    /// Inside values of every node. A node's value is the `⊕` over its
    /// incoming edges of `leaf(edge) ⊗ value(tail_1) ⊗ … ⊗ value(tail_k)`;
    /// nodes without incoming edges get `0̄`.
    pub fn inside_all<K, F>(&self, mut leaf: F) -> Vec<K>
    where
        K: Semiring,
        F: FnMut(usize, &Edge<T>) -> K,
    {
        let mut values: Vec<K> = vec![K::zero(); self.labels.len()];
        for &node in &self.report.topological_order {
            let edge_values: Vec<K> = self.incoming[node]
                .iter()
                .map(|&e| {
                    let edge = &self.edges[e];
                    edge.tails
                        .iter()
                        .fold(leaf(e, edge), |acc, &t| acc.times(&values[t]))
                })
                .collect();
            values[node] = K::sum(edge_values.iter());
        }
        values
    }

    /// Inside value of the goal node.
    pub fn inside<K, F>(&self, leaf: F) -> K
    where
        K: Semiring,
        F: FnMut(usize, &Edge<T>) -> K,
    {
        let mut values = self.inside_all(leaf);
        values.swap_remove(self.goal)
    }

    fn check_dims(&self, w0: &[T], v: &[T]) -> Result<()> {
        for len in [w0.len(), v.len()] {
            if len != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: len,
                });
            }
        }
        Ok(())
    }

    /// Dual point `(v·H_e, -w0·H_e)` of edge `e` with leaf provenance.
    pub fn project_edge(&self, e: usize, w0: &[T], v: &[T]) -> Result<DualPointSet<T>> {
        self.check_dims(w0, v)?;
        let edge = &self.edges[e];
        Ok(DualPointSet::leaf(Point2::new(edge.dot(v), -edge.dot(w0))?, e))
    }

    /// Goal hull in the convex hull semiring for the line `w = η·v + w0`.
    pub fn hull_inside(&self, w0: &[T], v: &[T]) -> Result<DualPointSet<T>> {
        self.check_dims(w0, v)?;
        let leaves = (0..self.edges.len())
            .map(|e| self.project_edge(e, w0, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.inside(|e, _| leaves[e].clone()))
    }

    /// Viterbi score of the goal under weights `η·v + w0`.
    pub fn tropical_inside(&self, w0: &[T], v: &[T], eta: &T) -> Result<TropicalValue<T>> {
        self.check_dims(w0, v)?;
        let weights: Vec<T> = w0
            .iter()
            .zip(v)
            .map(|(a, b)| eta.clone() * b.clone() + a.clone())
            .collect();
        Ok(self.inside(|_, edge| TropicalValue::new(edge.dot(&weights))))
    }

    /// Number of derivations of the goal, or `None` if it exceeds `u64`.
    pub fn derivation_count(&self) -> Option<u64> {
        let counts = self.derivation_counts();
        counts[self.goal]
    }

    pub(crate) fn derivation_counts(&self) -> Vec<Option<u64>> {
        let mut counts: Vec<Option<u64>> = vec![Some(0); self.labels.len()];
        for &node in &self.report.topological_order {
            let mut total = Some(0u64);
            for &e in &self.incoming[node] {
                let tails = &self.edges[e].tails;
                let prod = if tails.iter().any(|&t| counts[t] == Some(0)) {
                    Ok(0)
                } else {
                    tails.iter().try_fold(1u64, |acc, &t| {
                        counts[t].and_then(|c| acc.checked_mul(c)).ok_or(())
                    })
                };
                total = match (total, prod) {
                    (Some(t), Ok(p)) => t.checked_add(p),
                    _ => None,
                };
            }
            counts[node] = total;
        }
        counts
    }
}

fn topological_order<T>(labels: &[String], edges: &[Edge<T>], incoming: &[Vec<usize>]) -> Result<Vec<usize>> {
    let n = labels.len();
    // in-degree counts tail occurrences, so an edge with a repeated tail waits for it once per slot
    let mut pending = vec![0usize; n];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for edge in edges {
        for &t in &edge.tails {
            pending[edge.head] += 1;
            dependents[t].push(edge.head);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| pending[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &h in &dependents[v] {
            pending[h] -= 1;
            if pending[h] == 0 {
                queue.push_back(h);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // walk backwards through unfinished tails until a node repeats
    let mut node = (0..n).find(|&v| pending[v] > 0).expect("some node unfinished");
    let mut seen = vec![false; n];
    while !seen[node] {
        seen[node] = true;
        node = incoming[node]
            .iter()
            .flat_map(|&e| edges[e].tails.iter().copied())
            .find(|&t| pending[t] > 0)
            .expect("unfinished node has an unfinished tail");
    }
    Err(Error::CyclicForest {
        node,
        label: labels[node].clone(),
    })
}

fn reachability_warnings<T>(
    n: usize,
    goal: usize,
    edges: &[Edge<T>],
    incoming: &[Vec<usize>],
    order: &[usize],
) -> Vec<ValidationWarning> {
    let mut derivable = vec![false; n];
    for &v in order {
        derivable[v] = incoming[v]
            .iter()
            .any(|&e| edges[e].tails.iter().all(|&t| derivable[t]));
    }
    let mut useful = vec![false; n];
    let mut warnings = Vec::new();
    if derivable[goal] {
        useful[goal] = true;
        for &v in order.iter().rev() {
            if !useful[v] {
                continue;
            }
            for &e in &incoming[v] {
                if edges[e].tails.iter().all(|&t| derivable[t]) {
                    for &t in &edges[e].tails {
                        useful[t] = true;
                    }
                }
            }
        }
    } else {
        warnings.push(ValidationWarning::EmptyLanguage);
    }
    warnings.extend(
        (0..n)
            .filter(|&v| !useful[v])
            .map(|node| ValidationWarning::Unreachable { node }),
    );
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull_semiring::Semiring;

    type G = Hypergraph<f64>;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn single_nullary_edge_is_valid() {
        let g = G::new(1, labels(1), 0, vec![Edge::simple(0, vec![], vec![], "a")]).unwrap();
        assert_eq!(g.validation().topological_order, vec![0]);
        assert!(g.validation().warnings.is_empty());
        assert!(g.is_lattice());
    }

    #[test]
    fn self_loop_is_cyclic() {
        let edges = vec![
            Edge::simple(0, vec![], vec![], "a"),
            Edge::simple(1, vec![1], vec![], "b"),
        ];
        let err = G::new(1, labels(2), 1, edges).unwrap_err();
        assert_eq!(err, Error::CyclicForest { node: 1, label: "n1".into() });
    }

    #[test]
    fn longer_cycle_names_a_cycle_node() {
        let edges = vec![
            Edge::simple(0, vec![], vec![], "a"),
            Edge::simple(1, vec![0, 3], vec![], "b"),
            Edge::simple(2, vec![1], vec![], "c"),
            Edge::simple(3, vec![2], vec![], "d"),
            Edge::simple(4, vec![3], vec![], "e"),
        ];
        match G::new(1, labels(5), 4, edges).unwrap_err() {
            Error::CyclicForest { node, .. } => assert!([1, 2, 3].contains(&node)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn goal_without_incoming_edges_is_empty_language() {
        let g = G::new(1, labels(2), 1, vec![Edge::simple(0, vec![], vec![], "a")]).unwrap();
        assert!(g.validation().empty_language());
        assert_eq!(g.derivation_count(), Some(0));
    }

    #[test]
    fn flags_unreachable_nodes() {
        let edges = vec![
            Edge::simple(0, vec![], vec![], "a"),
            Edge::simple(1, vec![], vec![], "b"),
            Edge::simple(2, vec![0], vec![], "c"),
        ];
        let g = G::new(1, labels(3), 2, edges).unwrap();
        assert_eq!(
            g.validation().warnings,
            vec![ValidationWarning::Unreachable { node: 1 }]
        );
    }

    #[test]
    fn rejects_bad_ids() {
        let e = Edge::simple(0, vec![], vec![(3, 1.0)], "a");
        assert!(matches!(G::new(2, labels(1), 0, vec![e]), Err(Error::MalformedForest(_))));
        let e = Edge::new(0, vec![], vec![], vec![YieldToken::Slot(0)]);
        assert!(matches!(G::new(2, labels(1), 0, vec![e]), Err(Error::MalformedForest(_))));
        let e = Edge::simple(0, vec![5], vec![], "a");
        assert!(matches!(G::new(2, labels(1), 0, vec![e]), Err(Error::MalformedForest(_))));
    }

    #[test]
    fn inside_examples_tropical() {
        let k = |x: f64| TropicalValue::new(x);
        let g = G::new(1, labels(1), 0, vec![Edge::simple(0, vec![], vec![], "a")]).unwrap();
        assert_eq!(g.inside(|_, _| k(3.0)), k(3.0));

        let edges = vec![
            Edge::simple(0, vec![], vec![], "a"),
            Edge::simple(0, vec![], vec![], "b"),
        ];
        let g = G::new(1, labels(1), 0, edges).unwrap();
        let vals = [k(1.0), k(4.0)];
        assert_eq!(g.inside(|e, _| vals[e].clone()), vals[0].plus(&vals[1]));

        let edges = vec![
            Edge::simple(0, vec![], vec![], "a"),
            Edge::simple(1, vec![0], vec![], "b"),
        ];
        let g = G::new(1, labels(2), 1, edges).unwrap();
        let vals = [k(2.0), k(5.0)];
        assert_eq!(g.inside(|e, _| vals[e].clone()), k(7.0));
    }

    #[test]
    fn inside_chain_in_hull_semiring() {
        let edges = vec![
            Edge::simple(0, vec![], vec![(0, 1.0)], "a"),
            Edge::simple(1, vec![0], vec![(1, 2.0)], "b"),
        ];
        let g = G::new(2, labels(2), 1, edges).unwrap();
        let e1 = g.project_edge(0, &[1.0, 1.0], &[1.0, 0.0]).unwrap();
        let e2 = g.project_edge(1, &[1.0, 1.0], &[1.0, 0.0]).unwrap();
        let goal = g.hull_inside(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(goal, e2.times(&e1));
        assert_eq!(goal.points(), &[Point2::int(1, -3)]);
    }

    #[test]
    fn dead_end_tail_annihilates() {
        let edges = vec![
            Edge::simple(0, vec![], vec![(0, 1.0)], "a"),
            Edge::simple(2, vec![0, 1], vec![], "x"),
            Edge::simple(2, vec![0], vec![], "y"),
        ];
        let g = G::new(1, labels(3), 2, edges).unwrap();
        let goal = g.hull_inside(&[0.0], &[1.0]).unwrap();
        assert_eq!(goal.points(), &[Point2::int(1, 0)]);
        assert_eq!(g.derivation_count(), Some(1));
    }

    #[test]
    fn project_edge_examples() {
        let edges = vec![
            Edge::simple(0, vec![], vec![], "z"),
            Edge::simple(0, vec![], vec![(0, 3.0), (1, 5.0)], "a"),
        ];
        let g = G::new(2, labels(1), 0, edges).unwrap();
        assert_eq!(g.project_edge(0, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), DualPointSet::one());
        assert_eq!(
            g.project_edge(1, &[1.0, 0.0], &[0.0, 1.0]).unwrap().points(),
            &[Point2::int(5, -3)]
        );
        assert!(matches!(
            g.project_edge(1, &[1.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn line_projection_matches_duality() {
        // slope 2, intercept 3: features (1) with v = 2, w0 = 3
        let g = G::new(1, labels(1), 0, vec![Edge::simple(0, vec![], vec![(0, 1.0)], "a")]).unwrap();
        let h = g.project_edge(0, &[3.0], &[2.0]).unwrap();
        assert_eq!(h.points(), &[Point2::int(2, -3)]);
    }

    #[test]
    fn repeated_tail_is_counted_per_slot() {
        let edges = vec![
            Edge::simple(0, vec![], vec![(0, 1.0)], "a"),
            Edge::simple(0, vec![], vec![(0, 2.0)], "b"),
            Edge::simple(1, vec![0, 0], vec![], ""),
        ];
        let g = G::new(1, labels(2), 1, edges).unwrap();
        assert_eq!(g.derivation_count(), Some(4));
        let goal = g.hull_inside(&[0.0], &[1.0]).unwrap();
        assert_eq!(goal.points(), &[Point2::int(2, 0), Point2::int(4, 0)]);
    }
}
