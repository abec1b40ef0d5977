//! Seeded random instances for property checks and the `verify` command.

use rand::Rng;

use crate::forest::{Edge, Hypergraph, YieldToken};
use crate::geometry::Point2;
use crate::scalar::Scalar;

/// Shape of a random packed forest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestShape {
    pub max_edges: usize,
    pub dim: usize,
    /// Features are drawn from `-feature_range..=feature_range`.
    pub feature_range: i64,
    pub max_tails: usize,
    /// Upper bound on the number of goal derivations; larger draws are retried.
    pub max_derivations: u64,
    /// Draw real-valued rather than integer features.
    pub real_features: bool,
    /// Forbid an edge from using the same tail node twice, as in
    /// span-indexed parse forests.
    pub distinct_tails: bool,
}

impl Default for ForestShape {
    fn default() -> Self {
        Self {
            max_edges: 50,
            dim: 3,
            feature_range: 4,
            max_tails: 2,
            max_derivations: 1000,
            real_features: false,
            distinct_tails: true,
        }
    }
}

fn random_features<T: Scalar, R: Rng>(rng: &mut R, shape: &ForestShape) -> Vec<(usize, T)> {
    let mut out = Vec::new();
    for id in 0..shape.dim {
        if !rng.gen_bool(0.7) {
            continue;
        }
        let v = if shape.real_features {
            T::from_f64(rng.gen_range(-(shape.feature_range as f64)..=shape.feature_range as f64))
        } else {
            T::from_i64(rng.gen_range(-shape.feature_range..=shape.feature_range))
        };
        out.push((id, v.expect("representable feature")));
    }
    out
}

fn draw_forest<T: Scalar, R: Rng>(rng: &mut R, shape: &ForestShape) -> Hypergraph<T> {
    let max_edges = shape.max_edges.max(1);
    let nodes = rng.gen_range(1..=(max_edges / 2).max(1));
    let leaves = rng.gen_range(1..=nodes.min(3));
    let mut edges = Vec::new();
    for head in 0..nodes {
        let incoming = rng.gen_range(1..=3);
        for _ in 0..incoming {
            if edges.len() >= max_edges {
                break;
            }
            let mut arity = if head < leaves { 0 } else { rng.gen_range(1..=shape.max_tails.max(1)) };
            if shape.distinct_tails {
                arity = arity.min(head);
            }
            let tails: Vec<usize> = if shape.distinct_tails {
                rand::seq::index::sample(rng, head, arity).into_vec()
            } else {
                (0..arity).map(|_| rng.gen_range(0..head)).collect()
            };
            let mut template: Vec<YieldToken> = vec![YieldToken::Word(format!("w{}", edges.len()))];
            template.extend((0..arity).map(YieldToken::Slot));
            if arity == 2 && rng.gen_bool(0.5) {
                template.swap(1, 2);
            }
            edges.push(Edge::new(head, tails, random_features(rng, shape), template));
        }
    }
    let labels = (0..nodes).map(|i| format!("n{i}")).collect();
    Hypergraph::new(shape.dim, labels, nodes - 1, edges).expect("generated forests are acyclic")
}

/// Random acyclic forest with a non-empty language and at most
/// `shape.max_derivations` derivations. Nodes are created in topological
/// order, so every tail precedes its head.
pub fn random_forest<T: Scalar, R: Rng>(rng: &mut R, shape: &ForestShape) -> Hypergraph<T> {
    loop {
        let g = draw_forest(rng, shape);
        match g.derivation_count() {
            Some(c) if c >= 1 && c <= shape.max_derivations => return g,
            _ => continue,
        }
    }
}

/// Shape of a random word lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeShape {
    pub edges: usize,
    pub dim: usize,
    pub feature_range: i64,
    /// Chance that a non-first arc into a state starts two or three states back.
    pub skip_prob: f64,
}

impl LatticeShape {
    pub fn new(edges: usize) -> Self {
        Self {
            edges,
            dim: 3,
            feature_range: 5,
            skip_prob: 0.2,
        }
    }
}

/// Random word lattice: a chain of states, each entered by one to three
/// arcs from its predecessor or, with `skip_prob`, from further back.
pub fn random_lattice<T: Scalar, R: Rng>(rng: &mut R, lattice: &LatticeShape) -> Hypergraph<T> {
    let shape = ForestShape {
        dim: lattice.dim,
        feature_range: lattice.feature_range,
        ..ForestShape::default()
    };
    let edges = lattice.edges.max(1);
    let mut arcs = vec![Edge::new(0, vec![], random_features(rng, &shape), vec![YieldToken::Word("<s>".into())])];
    let mut state = 0;
    while arcs.len() < edges {
        state += 1;
        let parallel = rng.gen_range(1..=3).min(edges - arcs.len());
        for k in 0..parallel {
            let skip = k > 0 && state >= 3 && rng.gen_bool(lattice.skip_prob);
            let from = if skip { state - rng.gen_range(2..=3) } else { state - 1 };
            arcs.push(Edge::new(
                state,
                vec![from],
                random_features(rng, &shape),
                vec![YieldToken::Slot(0), YieldToken::Word(format!("t{state}.{k}"))],
            ));
        }
    }
    let labels = (0..=state).map(|i| format!("q{i}")).collect();
    Hypergraph::new(lattice.dim, labels, state, arcs).expect("lattice is acyclic")
}

/// Random integer points in `[-range, range]²`.
pub fn random_points<T: Scalar, R: Rng>(rng: &mut R, n: usize, range: i64) -> Vec<Point2<T>> {
    (0..n)
        .map(|_| Point2::int(rng.gen_range(-range..=range), rng.gen_range(-range..=range)))
        .collect()
}

/// Random vector with integer entries in `[-range, range]`.
pub fn random_int_vector<T: Scalar, R: Rng>(rng: &mut R, dim: usize, range: i64) -> Vec<T> {
    (0..dim)
        .map(|_| T::from_i64(rng.gen_range(-range..=range)).expect("representable"))
        .collect()
}

/// Random real vector with entries in `[-range, range)`.
pub fn random_real_vector<R: Rng>(rng: &mut R, dim: usize, range: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-range..range)).collect()
}
