use std::cmp::Ordering;

use hullmert::geometry::{envelope_boundaries, full_hull, lower_hull, minkowski_sum, turn};
use hullmert::hull_semiring::Semiring;
use hullmert::oracle::naive_minkowski;
use hullmert::{ExactHull, ExactPoint, Point2, Rational64};
use proptest::prelude::*;

fn pts(max: usize) -> impl Strategy<Value = Vec<ExactPoint>> {
    prop::collection::vec((-20i64..=20, -20i64..=20), 1..=max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::int(x, y)).collect())
}

fn on_or_left(a: &ExactPoint, b: &ExactPoint, p: &ExactPoint) -> bool {
    turn(a, b, p) != Ordering::Less
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lower_hull_is_strict_and_supporting(points in pts(30)) {
        let chain = lower_hull(&points).unwrap();
        let c = chain.points();
        prop_assert!(!c.is_empty());
        for w in c.windows(2) {
            prop_assert!(w[0].x() < w[1].x());
        }
        for w in c.windows(3) {
            prop_assert_eq!(turn(&w[0], &w[1], &w[2]), Ordering::Greater);
        }
        // every input point lies on or above each chain edge's supporting line
        for w in c.windows(2) {
            for p in &points {
                if p.x() >= w[0].x() && p.x() <= w[1].x() {
                    prop_assert!(on_or_left(&w[0], &w[1], p));
                }
            }
        }
    }

    #[test]
    fn full_hull_contains_everything(points in pts(30)) {
        let chain = full_hull(&points).unwrap();
        let c = chain.points();
        let first = c.iter().min_by(|a, b| a.x().cmp(b.x()).then(a.y().cmp(b.y()))).unwrap();
        prop_assert_eq!(&c[0], first);
        if c.len() >= 3 {
            for i in 0..c.len() {
                let (a, b, d) = (&c[i], &c[(i + 1) % c.len()], &c[(i + 2) % c.len()]);
                prop_assert_eq!(turn(a, b, d), Ordering::Greater);
                for p in &points {
                    prop_assert!(on_or_left(a, b, p));
                }
            }
        }
        // idempotent
        let again = full_hull(c).unwrap();
        prop_assert_eq!(again.points(), c);
    }

    #[test]
    fn linear_minkowski_matches_pairwise(a in pts(12), b in pts(12)) {
        let (ha, hb) = (full_hull(&a).unwrap(), full_hull(&b).unwrap());
        let fast = minkowski_sum(&ha, &hb);
        let naive = naive_minkowski(ha.points(), hb.points(), 10_000).unwrap();
        prop_assert_eq!(fast.points(), naive.points());
        prop_assert!(fast.len() <= ha.len() + hb.len());
    }

    #[test]
    fn duality_round_trip(m in -1000i64..1000, b in -1000i64..1000, eta in -50i64..50) {
        let (m, b, eta) = (Rational64::from(m), Rational64::from(b), Rational64::from(eta));
        let p = Point2::from_line(m, b).unwrap();
        prop_assert_eq!(p.slope(), m);
        prop_assert_eq!(p.intercept(), b);
        prop_assert_eq!(*p.y(), -b);
        prop_assert_eq!(p.primal_at(&eta), m * eta + b);
    }

    #[test]
    fn envelope_boundaries_increase_and_separate_winners(points in pts(20)) {
        let chain = lower_hull(&points).unwrap();
        let etas = envelope_boundaries(&chain).unwrap();
        for w in etas.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        // between boundaries the chain point is the best line among all inputs
        let c = chain.points();
        for (i, p) in c.iter().enumerate() {
            let probe = match (i.checked_sub(1).map(|k| etas[k]), etas.get(i)) {
                (None, None) => Rational64::from(0),
                (None, Some(u)) => *u - Rational64::from(1),
                (Some(l), None) => l + Rational64::from(1),
                (Some(l), Some(u)) => (l + *u) / Rational64::from(2),
            };
            let best = points.iter().map(|q| q.primal_at(&probe)).max().unwrap();
            prop_assert_eq!(p.primal_at(&probe), best);
        }
    }

    #[test]
    fn hull_operations_are_commutative(a in pts(8), b in pts(8)) {
        let (ha, hb) = (ExactHull::hull_of(&a).unwrap(), ExactHull::hull_of(&b).unwrap());
        prop_assert_eq!(ha.plus(&hb), hb.plus(&ha));
        prop_assert_eq!(ha.times(&hb), hb.times(&ha));
        prop_assert!(ha.plus(&hb).len() <= ha.len() + hb.len());
        prop_assert!(ha.times(&hb).len() <= ha.len() + hb.len());
    }
}
