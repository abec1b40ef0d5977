//! Planar primitives over dual points: monotone-chain hulls, the linear-time
//! Minkowski sum of convex polygons, and point–line duality.
//!
//! A primal line `s(η) = m·η + b` is represented by the dual point `(m, -b)`.
//! The upper envelope of a set of lines corresponds to the lower convex hull
//! of their dual points, and the η values where the envelope changes are the
//! slopes of the lower hull's edges.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite point in the dual plane: `x` is a line's slope, `y` its negated intercept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd)]
pub struct Point2<T> {
    x: T,
    y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if !x.is_finite_value() || !y.is_finite_value() {
            return Err(Error::InvalidGeometry(format!(
                "non-finite coordinate ({x:?}, {y:?})"
            )));
        }
        Ok(Self { x, y })
    }

    /// Integer-coordinate constructor; always finite.
    pub fn int(x: i64, y: i64) -> Self {
        Self {
            x: T::from_i64(x).expect("integer coordinate representable"),
            y: T::from_i64(y).expect("integer coordinate representable"),
        }
    }

    pub fn origin() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
        }
    }

    /// Dual point of the primal line `s(η) = slope·η + intercept`.
    pub fn from_line(slope: T, intercept: T) -> Result<Self> {
        Self::new(slope, -intercept)
    }

    pub fn x(&self) -> &T {
        &self.x
    }

    pub fn y(&self) -> &T {
        &self.y
    }

    /// Slope of the primal line.
    pub fn slope(&self) -> T {
        self.x.clone()
    }

    /// Intercept of the primal line.
    pub fn intercept(&self) -> T {
        -self.y.clone()
    }

    /// Value of the primal line at `eta`.
    pub fn primal_at(&self, eta: &T) -> T {
        eta.clone() * self.x.clone() - self.y.clone()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x.clone() + other.x.clone(),
            y: self.y.clone() + other.y.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: self.x.clone() - other.x.clone(),
            y: self.y.clone() - other.y.clone(),
        }
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.y.partial_cmp(&other.y).unwrap_or(Ordering::Equal))
    }

    fn norm_inf(&self) -> T {
        T::max_of(self.x.abs(), self.y.abs())
    }
}

/// An ordered, strictly convex sequence of points: either a lower chain
/// (strictly increasing x) or a counterclockwise full hull starting at the
/// lexicographically smallest vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexChain<T> {
    points: Vec<Point2<T>>,
}

impl<T: Scalar> ConvexChain<T> {
    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    /// Wraps points without checking convexity. Callers own the invariant.
    pub fn from_points_unchecked(points: Vec<Point2<T>>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point2<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Sign of the turn `a -> b -> c`, with the cross product compared against
/// `geom_eps` times the scale of the two edge vectors.
pub fn turn<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> Ordering {
    let u = b.sub(a);
    let v = c.sub(b);
    let cross = u.x.clone() * v.y.clone() - u.y.clone() * v.x.clone();
    let tol = T::geom_eps() * u.norm_inf() * v.norm_inf();
    if cross > tol {
        Ordering::Greater
    } else if cross < -tol {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

fn check_finite<T: Scalar>(points: &[Point2<T>]) -> Result<()> {
    match points
        .iter()
        .find(|p| !p.x.is_finite_value() || !p.y.is_finite_value())
    {
        Some(p) => Err(Error::InvalidGeometry(format!(
            "non-finite coordinate ({:?}, {:?})",
            p.x, p.y
        ))),
        None => Ok(()),
    }
}

/// Indices sorted by (x, y); among identical points only the first index survives.
fn sorted_unique<T: Scalar>(points: &[Point2<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].lex_cmp(&points[j]));
    order.dedup_by(|j, i| points[*i] == points[*j]);
    order
}

fn chain_pass<T: Scalar>(points: &[Point2<T>], order: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut stack: Vec<usize> = Vec::new();
    for k in order {
        while stack.len() >= 2
            && turn(
                &points[stack[stack.len() - 2]],
                &points[stack[stack.len() - 1]],
                &points[k],
            ) != Ordering::Greater
        {
            stack.pop();
        }
        stack.push(k);
    }
    stack
}

/// Indices of the strictly convex lower chain, ordered by increasing x.
pub fn lower_hull_indices<T: Scalar>(points: &[Point2<T>]) -> Result<Vec<usize>> {
    check_finite(points)?;
    let mut order = sorted_unique(points);
    // equal slopes: only the minimum y (dominating line) survives
    order.dedup_by(|j, i| points[*i].x == points[*j].x);
    Ok(chain_pass(points, order.into_iter()))
}

pub fn lower_hull<T: Scalar>(points: &[Point2<T>]) -> Result<ConvexChain<T>> {
    let idx = lower_hull_indices(points)?;
    Ok(ConvexChain {
        points: idx.into_iter().map(|i| points[i].clone()).collect(),
    })
}

/// Indices of the extreme points of the convex hull, counterclockwise from
/// the lexicographically smallest point. Collinear and interior points are
/// dropped; coincident points keep their first occurrence.
pub fn full_hull_indices<T: Scalar>(points: &[Point2<T>]) -> Result<Vec<usize>> {
    check_finite(points)?;
    let order = sorted_unique(points);
    if order.len() <= 1 {
        return Ok(order);
    }
    let mut lower = chain_pass(points, order.iter().copied());
    let mut upper = chain_pass(points, order.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

pub fn full_hull<T: Scalar>(points: &[Point2<T>]) -> Result<ConvexChain<T>> {
    let idx = full_hull_indices(points)?;
    Ok(ConvexChain {
        points: idx.into_iter().map(|i| points[i].clone()).collect(),
    })
}

/// Angular order of edge vectors, measured counterclockwise from the
/// downward direction `(0, -1)`; that is the order in which edges leave the
/// lexicographically smallest vertex of a counterclockwise polygon.
fn edge_angle_cmp<T: Scalar>(u: &Point2<T>, v: &Point2<T>) -> Ordering {
    // rotate by +90 degrees so the reference direction becomes (1, 0)
    let half = |p: &Point2<T>| {
        let (rx, ry) = (-p.y.clone(), p.x.clone());
        if ry > T::zero() || (ry.is_zero() && rx < T::zero()) {
            0u8
        } else {
            1u8
        }
    };
    match half(u).cmp(&half(v)) {
        Ordering::Equal => {}
        other => return other,
    }
    let cross = u.x.clone() * v.y.clone() - u.y.clone() * v.x.clone();
    let tol = T::geom_eps() * u.norm_inf() * v.norm_inf();
    if cross > tol {
        Ordering::Less
    } else if cross < -tol {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

fn polygon_edges<T: Scalar>(poly: &[Point2<T>]) -> Vec<Point2<T>> {
    if poly.len() < 2 {
        return Vec::new();
    }
    (0..poly.len())
        .map(|i| poly[(i + 1) % poly.len()].sub(&poly[i]))
        .collect()
}

/// Merges the edge sequences of two counterclockwise strictly convex
/// polygons (each starting at its lexicographically smallest vertex) and
/// returns, for every vertex of the Minkowski sum, the pair of operand
/// vertex indices whose sum it is. Runs in `O(|a| + |b|)`.
pub fn minkowski_sum_indices<T: Scalar>(a: &[Point2<T>], b: &[Point2<T>]) -> Vec<(usize, usize)> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let ea = polygon_edges(a);
    let eb = polygon_edges(b);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut out = vec![(0usize, 0usize)];
    while i < ea.len() || j < eb.len() {
        let step = if i == ea.len() {
            Ordering::Greater
        } else if j == eb.len() {
            Ordering::Less
        } else {
            edge_angle_cmp(&ea[i], &eb[j])
        };
        match step {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
        out.push((i % na, j % nb));
    }
    // the walk closes on the starting vertex
    if out.len() > 1 {
        out.pop();
    }
    out
}

/// Minkowski sum of two convex hulls produced by [`full_hull`].
pub fn minkowski_sum<T: Scalar>(a: &ConvexChain<T>, b: &ConvexChain<T>) -> ConvexChain<T> {
    let pairs = minkowski_sum_indices(&a.points, &b.points);
    ConvexChain {
        points: pairs
            .into_iter()
            .map(|(i, j)| a.points[i].add(&b.points[j]))
            .collect(),
    }
}

/// η values at which consecutive lines of a lower chain swap places on the
/// upper envelope: the slopes of the chain's edges. Point `i` is the primal
/// argmax on `(η[i-1], η[i])`.
pub fn envelope_boundaries<T: Scalar>(chain: &ConvexChain<T>) -> Result<Vec<T>> {
    if chain.is_empty() {
        return Err(Error::NoHypotheses(
            "envelope of an empty chain".to_string(),
        ));
    }
    Ok(chain
        .points
        .windows(2)
        .map(|w| (w[1].y.clone() - w[0].y.clone()) / (w[1].x.clone() - w[0].x.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    fn pts(v: &[(i64, i64)]) -> Vec<P> {
        v.iter().map(|&(x, y)| P::int(x, y)).collect()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(P::new(f64::NAN, 0.0).is_err());
        let bad = vec![P::int(0, 0), P { x: 1.0, y: f64::INFINITY }];
        assert!(matches!(full_hull(&bad), Err(Error::InvalidGeometry(_))));
        assert!(matches!(lower_hull(&bad), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn lower_hull_examples() {
        assert_eq!(lower_hull(&pts(&[(0, 0)])).unwrap().points(), &pts(&[(0, 0)])[..]);
        assert_eq!(
            lower_hull(&pts(&[(0, 0), (1, 1), (2, 0)])).unwrap().points(),
            &pts(&[(0, 0), (2, 0)])[..]
        );
        assert_eq!(
            lower_hull(&pts(&[(0, 0), (1, -1), (2, 0)])).unwrap().points(),
            &pts(&[(0, 0), (1, -1), (2, 0)])[..]
        );
        assert!(lower_hull::<f64>(&[]).unwrap().is_empty());
    }

    #[test]
    fn lower_hull_equal_x_keeps_min_y() {
        let h = lower_hull(&pts(&[(0, 3), (0, 1), (2, 5), (2, 2)])).unwrap();
        assert_eq!(h.points(), &pts(&[(0, 1), (2, 2)])[..]);
    }

    #[test]
    fn lower_hull_drops_collinear() {
        let h = lower_hull(&pts(&[(0, 0), (1, 1), (2, 2), (3, 3)])).unwrap();
        assert_eq!(h.points(), &pts(&[(0, 0), (3, 3)])[..]);
    }

    #[test]
    fn full_hull_examples() {
        assert!(full_hull::<f64>(&[]).unwrap().is_empty());
        let tri = vec![P::int(0, 0), P::int(2, 0), P::int(1, 1), P::new(1.0, 0.5).unwrap()];
        assert_eq!(full_hull(&tri).unwrap().points(), &pts(&[(0, 0), (2, 0), (1, 1)])[..]);
        let sq = full_hull(&pts(&[(0, 0), (1, 0), (0, 1), (1, 1)])).unwrap();
        assert_eq!(sq.points(), &pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])[..]);
    }

    #[test]
    fn full_hull_degenerate_inputs() {
        let seg = full_hull(&pts(&[(2, 2), (0, 0), (1, 1), (0, 0)])).unwrap();
        assert_eq!(seg.points(), &pts(&[(0, 0), (2, 2)])[..]);
        let dup = full_hull(&pts(&[(3, 4), (3, 4)])).unwrap();
        assert_eq!(dup.points(), &pts(&[(3, 4)])[..]);
    }

    #[test]
    fn coincident_points_keep_first_index() {
        let p = pts(&[(1, 1), (0, 0), (1, 1), (2, 0)]);
        let idx = full_hull_indices(&p).unwrap();
        assert_eq!(idx, vec![1, 3, 0]);
    }

    #[test]
    fn minkowski_examples() {
        let b = full_hull(&pts(&[(0, 0), (3, 1), (1, 2)])).unwrap();
        let one = full_hull(&pts(&[(0, 0)])).unwrap();
        assert_eq!(minkowski_sum(&one, &b), b);

        let a = full_hull(&pts(&[(0, 0), (1, 0)])).unwrap();
        let b = full_hull(&pts(&[(0, 0), (0, 1)])).unwrap();
        assert_eq!(
            minkowski_sum(&a, &b).points(),
            &pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])[..]
        );

        let a = full_hull(&pts(&[(0, 0), (2, 0)])).unwrap();
        let b = full_hull(&pts(&[(0, 0), (1, -1)])).unwrap();
        assert_eq!(
            minkowski_sum(&a, &b).points(),
            &pts(&[(0, 0), (1, -1), (3, -1), (2, 0)])[..]
        );
    }

    #[test]
    fn minkowski_empty_is_empty() {
        let a = full_hull(&pts(&[(0, 0), (2, 0)])).unwrap();
        assert!(minkowski_sum(&a, &ConvexChain::empty()).is_empty());
        assert!(minkowski_sum(&ConvexChain::empty(), &a).is_empty());
    }

    #[test]
    fn minkowski_parallel_edges_merge() {
        let a = full_hull(&pts(&[(0, 0), (2, 0), (2, 2), (0, 2)])).unwrap();
        let b = full_hull(&pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        assert_eq!(
            minkowski_sum(&a, &b).points(),
            &pts(&[(0, 0), (3, 0), (3, 3), (0, 3)])[..]
        );
    }

    #[test]
    fn minkowski_with_vertical_edges() {
        let a = full_hull(&pts(&[(0, 0), (0, 2)])).unwrap();
        let b = full_hull(&pts(&[(0, 0), (1, -1), (1, 3)])).unwrap();
        assert_eq!(
            minkowski_sum(&a, &b).points(),
            &pts(&[(0, 0), (1, -1), (1, 5), (0, 2)])[..]
        );
    }

    #[test]
    fn boundary_examples() {
        let single = lower_hull(&[P::from_line(2.0, 3.0).unwrap()]).unwrap();
        assert!(envelope_boundaries(&single).unwrap().is_empty());
        let two = lower_hull(&pts(&[(0, 0), (1, -2)])).unwrap();
        assert_eq!(envelope_boundaries(&two).unwrap(), vec![-2.0]);
        let three = lower_hull(&pts(&[(0, 0), (1, -2), (3, -2)])).unwrap();
        assert_eq!(envelope_boundaries(&three).unwrap(), vec![-2.0, 0.0]);
        assert!(matches!(
            envelope_boundaries(&ConvexChain::<f64>::empty()),
            Err(Error::NoHypotheses(_))
        ));
    }

    #[test]
    fn duality_round_trip() {
        let p = P::from_line(2.0, 3.0).unwrap();
        assert_eq!((p.x, p.y), (2.0, -3.0));
        assert_eq!((p.slope(), p.intercept()), (2.0, 3.0));
        assert_eq!(p.primal_at(&1.5), 6.0);
    }
}
