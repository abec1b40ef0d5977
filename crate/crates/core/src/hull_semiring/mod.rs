//! Semiring abstraction and the convex hull semiring.
//!
//! A [`DualPointSet`] holds the extreme points of a convex hull in the dual
//! plane. Addition is the hull of the union, multiplication the hull of the
//! Minkowski sum, `0̄ = ∅` and `1̄ = {(0,0)}`. Every point carries a
//! [`Trace`] recording which leaf edges were summed to produce it, so the
//! winning derivations can be recovered once the goal hull is known.

mod axioms;
mod tropical;

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

pub use axioms::{check_axioms, AxiomReport, Law, LawFailure};
pub use tropical::TropicalValue;

use crate::error::Result;
use crate::geometry::{self, ConvexChain, Point2};
use crate::scalar::Scalar;

/// Operations shared by every semiring the inside algorithm can run over.
pub trait Semiring: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;

    /// `⊕` over many values. Implementations may override with a single
    /// n-ary pass as long as the result equals the left fold.
    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        Self: 'a,
    {
        items.into_iter().fold(Self::zero(), |acc, x| acc.plus(x))
    }
}

/// Derivation record attached to one hull point. `1̄` has no trace; plus
/// keeps the surviving operand point's trace unchanged.
#[derive(Debug, PartialEq, Eq)]
pub enum Trace {
    /// Projection of a single edge.
    Leaf(usize),
    /// Sum of a point from the left operand and a point from the right.
    Times(Arc<Trace>, Arc<Trace>),
}

impl Trace {
    /// Leaf edge ids in left-to-right order, with multiplicity.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Trace::Leaf(e) => out.push(*e),
                Trace::Times(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

pub type Provenance = Option<Arc<Trace>>;

fn combine(a: &Provenance, b: &Provenance) -> Provenance {
    match (a, b) {
        (None, t) | (t, None) => t.clone(),
        (Some(l), Some(r)) => Some(Arc::new(Trace::Times(l.clone(), r.clone()))),
    }
}

static PLUS_CALLS: AtomicU64 = AtomicU64::new(0);
static TIMES_CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of `(⊕, ⊗)` operations performed on [`DualPointSet`] values by
/// this process. Each call checks the size bound `|result| ≤ |a| + |b|`
/// in debug builds.
pub fn hull_op_counts() -> (u64, u64) {
    (
        PLUS_CALLS.load(AtomicOrdering::Relaxed),
        TIMES_CALLS.load(AtomicOrdering::Relaxed),
    )
}

/// A convex-hull semiring value: extreme points in counterclockwise order
/// starting from the lexicographically smallest, each with its provenance.
#[derive(Debug, Clone)]
pub struct DualPointSet<T> {
    points: Vec<Point2<T>>,
    traces: Vec<Provenance>,
}

impl<T: Scalar> DualPointSet<T> {
    /// Hull of arbitrary points, all with trivial provenance.
    pub fn hull_of(points: &[Point2<T>]) -> Result<Self> {
        let idx = geometry::full_hull_indices(points)?;
        Ok(Self {
            points: idx.iter().map(|&i| points[i].clone()).collect(),
            traces: vec![None; idx.len()],
        })
    }

    /// Hull of points with explicit provenance; coincident points keep the
    /// first occurrence.
    pub fn hull_with_provenance(candidates: Vec<(Point2<T>, Provenance)>) -> Result<Self> {
        let (points, traces): (Vec<_>, Vec<_>) = candidates.into_iter().unzip();
        let idx = geometry::full_hull_indices(&points)?;
        Ok(Self {
            points: idx.iter().map(|&i| points[i].clone()).collect(),
            traces: idx.iter().map(|&i| traces[i].clone()).collect(),
        })
    }

    /// Singleton produced by projecting edge `edge`.
    pub fn leaf(point: Point2<T>, edge: usize) -> Self {
        Self {
            points: vec![point],
            traces: vec![Some(Arc::new(Trace::Leaf(edge)))],
        }
    }

    /// Stores `points` verbatim, skipping canonicalization. Only for
    /// negative-control tests; semiring laws are not expected to hold.
    pub fn from_raw_unchecked(points: Vec<Point2<T>>) -> Self {
        let n = points.len();
        Self {
            points,
            traces: vec![None; n],
        }
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn provenance(&self, i: usize) -> &Provenance {
        &self.traces[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point2<T>, &Provenance)> {
        self.points.iter().zip(self.traces.iter())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_chain(&self) -> ConvexChain<T> {
        ConvexChain::from_points_unchecked(self.points.clone())
    }

    /// Lower chain of the hull with its provenance, ordered by increasing
    /// slope. These are exactly the lines on the primal upper envelope.
    pub fn lower_chain(&self) -> Vec<(Point2<T>, Provenance)> {
        let idx = geometry::lower_hull_indices(&self.points)
            .expect("hull points are finite by construction");
        idx.into_iter()
            .map(|i| (self.points[i].clone(), self.traces[i].clone()))
            .collect()
    }

    /// Maximum over the primal lines at `eta`, or `None` for `0̄`.
    pub fn max_primal_at(&self, eta: &T) -> Option<T> {
        self.points
            .iter()
            .map(|p| p.primal_at(eta))
            .fold(None, |best, v| match best {
                Some(b) if b >= v => Some(b),
                _ => Some(v),
            })
    }
}

impl<T: Scalar> PartialEq for DualPointSet<T> {
    /// Compares point sets only; provenance is not part of the value.
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl<T: Scalar> Semiring for DualPointSet<T> {
    fn zero() -> Self {
        Self {
            points: Vec::new(),
            traces: Vec::new(),
        }
    }

    fn one() -> Self {
        Self {
            points: vec![Point2::origin()],
            traces: vec![None],
        }
    }

    fn plus(&self, rhs: &Self) -> Self {
        PLUS_CALLS.fetch_add(1, AtomicOrdering::Relaxed);
        let candidates = self
            .iter()
            .chain(rhs.iter())
            .map(|(p, t)| (p.clone(), t.clone()))
            .collect();
        let out = Self::hull_with_provenance(candidates).expect("operands are finite");
        debug_assert!(
            out.len() <= self.len() + rhs.len(),
            "|A ⊕ B| = {} exceeds |A| + |B| = {}",
            out.len(),
            self.len() + rhs.len()
        );
        out
    }

    fn times(&self, rhs: &Self) -> Self {
        TIMES_CALLS.fetch_add(1, AtomicOrdering::Relaxed);
        let pairs = geometry::minkowski_sum_indices(&self.points, &rhs.points);
        let out = Self {
            points: pairs
                .iter()
                .map(|&(i, j)| self.points[i].add(&rhs.points[j]))
                .collect(),
            traces: pairs
                .iter()
                .map(|&(i, j)| combine(&self.traces[i], &rhs.traces[j]))
                .collect(),
        };
        debug_assert!(
            out.len() <= self.len() + rhs.len(),
            "|A ⊗ B| = {} exceeds |A| + |B| = {}",
            out.len(),
            self.len() + rhs.len()
        );
        out
    }

    fn is_zero(&self) -> bool {
        self.points.is_empty()
    }

    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        Self: 'a,
    {
        let mut total = 0;
        let mut candidates = Vec::new();
        for item in items {
            total += item.len();
            candidates.extend(item.iter().map(|(p, t)| (p.clone(), t.clone())));
        }
        let out = Self::hull_with_provenance(candidates).expect("operands are finite");
        debug_assert!(out.len() <= total);
        out
    }
}

/// Whether `conv[A + B] = conv[conv A + conv B]` for raw point sets, with
/// the left side computed from all pairwise sums and the right side by the
/// linear-time merge of the two hulls.
pub fn convexify_equivalence<T: Scalar>(a: &[Point2<T>], b: &[Point2<T>]) -> Result<bool> {
    let sums: Vec<Point2<T>> = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| p.add(q)))
        .collect();
    let direct = geometry::full_hull(&sums)?;
    let via_hulls = geometry::minkowski_sum(&geometry::full_hull(a)?, &geometry::full_hull(b)?);
    Ok(direct == via_hulls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type H = DualPointSet<Rational64>;

    fn hull(v: &[(i64, i64)]) -> H {
        let pts: Vec<_> = v.iter().map(|&(x, y)| Point2::int(x, y)).collect();
        H::hull_of(&pts).unwrap()
    }

    #[test]
    fn plus_examples() {
        let a = hull(&[(0, 0), (2, 0)]);
        assert_eq!(a.plus(&H::zero()), a);
        assert_eq!(H::zero().plus(&a), a);
        assert_eq!(a.plus(&a), a);
        assert_eq!(a.plus(&hull(&[(1, 2)])), hull(&[(0, 0), (2, 0), (1, 2)]));
        assert_eq!(a.plus(&hull(&[(1, 2)])).len(), 3);
    }

    #[test]
    fn times_examples() {
        let b = hull(&[(0, 0), (3, 1), (1, 2)]);
        assert_eq!(H::one().times(&b), b);
        assert_eq!(b.times(&H::one()), b);
        assert!(H::zero().times(&b).is_zero());
        assert!(b.times(&H::zero()).is_zero());
        let a = hull(&[(0, 0), (1, 0)]);
        let c = hull(&[(0, 0), (0, 1)]);
        assert_eq!(a.times(&c).points(), hull(&[(0, 0), (1, 0), (1, 1), (0, 1)]).points());
    }

    #[test]
    fn sum_matches_fold() {
        let items = [hull(&[(0, 0), (4, 1)]), hull(&[(2, -3)]), hull(&[(1, 5), (0, 0)])];
        let folded = items.iter().fold(H::zero(), |acc, x| acc.plus(x));
        assert_eq!(H::sum(items.iter()), folded);
    }

    #[test]
    fn coincident_points_keep_left_operand() {
        let a = DualPointSet::<f64>::leaf(Point2::int(1, 1), 7);
        let b = DualPointSet::<f64>::leaf(Point2::int(1, 1), 9);
        let s = a.plus(&b);
        assert_eq!(s.provenance(0).as_ref().unwrap().leaves(), vec![7]);
        let s = b.plus(&a);
        assert_eq!(s.provenance(0).as_ref().unwrap().leaves(), vec![9]);
    }

    #[test]
    fn times_provenance_sums_leaves() {
        let a = DualPointSet::<f64>::leaf(Point2::int(1, 2), 0)
            .plus(&DualPointSet::leaf(Point2::int(3, -1), 1));
        let b = DualPointSet::<f64>::leaf(Point2::int(0, 4), 2)
            .plus(&DualPointSet::leaf(Point2::int(2, 2), 3));
        let prod = a.times(&b);
        let coords = [(1, 2), (3, -1), (0, 4), (2, 2)];
        for (p, t) in prod.iter() {
            let leaves = t.as_ref().unwrap().leaves();
            assert_eq!(leaves.len(), 2);
            let (sx, sy) = leaves
                .iter()
                .fold((0, 0), |(x, y), &e| (x + coords[e].0, y + coords[e].1));
            assert_eq!((*p.x(), *p.y()), (sx as f64, sy as f64));
        }
    }

    #[test]
    fn convexify_examples() {
        let a = vec![Point2::<f64>::int(3, 4)];
        let b = vec![Point2::<f64>::int(-1, 2)];
        assert!(convexify_equivalence(&a, &b).unwrap());
        let a: Vec<Point2<f64>> = [(0, 0), (4, 0), (0, 4), (1, 1), (2, 1)]
            .iter()
            .map(|&(x, y)| Point2::int(x, y))
            .collect();
        let b: Vec<Point2<f64>> = [(0, 0), (1, 3), (-2, 1)]
            .iter()
            .map(|&(x, y)| Point2::int(x, y))
            .collect();
        assert!(convexify_equivalence(&a, &b).unwrap());
    }

    #[test]
    fn max_primal_of_zero_is_none() {
        assert_eq!(DualPointSet::<f64>::zero().max_primal_at(&1.0), None);
        let h = DualPointSet::<f64>::hull_of(&[
            Point2::from_line(0.0, 0.0).unwrap(),
            Point2::from_line(1.0, 2.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(h.max_primal_at(&-3.0), Some(0.0));
        assert_eq!(h.max_primal_at(&0.0), Some(2.0));
    }
}
