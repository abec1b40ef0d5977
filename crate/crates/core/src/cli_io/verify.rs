//! Oracle checks behind the `verify` command.

use std::fmt;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::forest::Hypergraph;
use crate::geometry::Point2;
use crate::hull_semiring::{check_axioms, convexify_equivalence, DualPointSet};
use crate::linesearch::{envelope, envelope_from_derivations, SearchSpec, Sentence};
use crate::oracle::{self, Grid, DEFAULT_DERIVATION_CAP};
use crate::random::{random_forest, random_int_vector, random_points, random_real_vector, ForestShape};

const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random instances per check; 0 disables the random suite.
    pub random: usize,
    pub seed: u64,
    /// Forests with more derivations than this are skipped.
    pub derivation_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            random: 100,
            seed: 0,
            derivation_cap: DEFAULT_DERIVATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            instances: 0,
            skipped: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, label: impl fmt::Display, outcome: Outcome) {
        self.instances += 1;
        match outcome {
            Outcome::Pass => {}
            Outcome::Skip => self.skipped += 1,
            Outcome::Fail(msg) => self.failures.push(format!("{label}: {msg}")),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status}\t{}\tinstances={}\tskipped={}", self.name, self.instances, self.skipped)?;
        if let Some(first) = self.failures.first() {
            write!(f, "\tfailures={}\tfirst: {first}", self.failures.len())?;
        }
        Ok(())
    }
}

enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

impl From<Result<bool, String>> for Outcome {
    fn from(r: Result<bool, String>) -> Self {
        match r {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Skip,
            Err(msg) => Outcome::Fail(msg),
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn points_close(a: &[Point2<f64>], b: &[Point2<f64>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| close(*p.x(), *q.x()) && close(*p.y(), *q.y()))
}

fn err(e: Error) -> String {
    e.to_string()
}

/// `Ok(false)` when the forest is too large to enumerate.
fn inside_vs_enumeration(g: &Hypergraph<f64>, spec: &SearchSpec<f64>, cap: usize) -> Result<bool, String> {
    let derivations = match g.enumerate(cap) {
        Ok(d) => d,
        Err(Error::EnumerationOverflow { .. }) => return Ok(false),
        Err(e) => return Err(err(e)),
    };
    let naive = oracle::hull_of_derivations(&derivations, &spec.w0, &spec.v).map_err(err)?;
    let fast = g.hull_inside(&spec.w0, &spec.v).map_err(err)?;
    if points_close(naive.points(), fast.points()) {
        Ok(true)
    } else {
        Err(format!("inside hull {:?} != enumerated hull {:?}", fast.points(), naive.points()))
    }
}

fn tropical_vs_hull(g: &Hypergraph<f64>, spec: &SearchSpec<f64>, etas: &[f64]) -> Result<bool, String> {
    let hull = g.hull_inside(&spec.w0, &spec.v).map_err(err)?;
    for eta in etas {
        let from_hull = hull.max_primal_at(eta);
        let tropical = g.tropical_inside(&spec.w0, &spec.v, eta).map_err(err)?.0;
        let agree = match (from_hull, tropical) {
            (Some(a), Some(b)) => close(a, b),
            (None, None) => true,
            _ => false,
        };
        if !agree {
            return Err(format!("at η={eta}: hull {from_hull:?} vs tropical {tropical:?}"));
        }
    }
    Ok(true)
}

fn envelope_vs_naive(g: &Hypergraph<f64>, spec: &SearchSpec<f64>, cap: usize, samples: usize) -> Result<bool, String> {
    let derivations = match g.enumerate(cap) {
        Ok(d) => d,
        Err(Error::EnumerationOverflow { .. }) => return Ok(false),
        Err(e) => return Err(err(e)),
    };
    let lines = derivations
        .iter()
        .map(|d| d.dual_point(&spec.w0, &spec.v).map(|p| (p.slope(), p.intercept())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let env = envelope(g, spec).map_err(err)?;
    let bounds = env.boundaries();
    let (lo, hi) = match (bounds.first(), bounds.last()) {
        (Some(a), Some(b)) => (a - 1.0 - (b - a) * 0.1, b + 1.0 + (b - a) * 0.1),
        _ => (-10.0, 10.0),
    };
    let grid = Grid { lo, hi, points: samples };
    let profile = oracle::naive_envelope(&lines, &grid).map_err(err)?;
    let guard = 1e-6 * (hi - lo).max(1.0);
    for (eta, winner) in profile {
        if bounds.iter().any(|b| (eta - b).abs() <= guard) {
            continue;
        }
        let seg = env.segment_at(&eta);
        let (m, b) = lines[winner];
        if !(close(seg.slope, m) && close(seg.intercept, b)) {
            return Err(format!(
                "at η={eta}: envelope line ({}, {}) but the maximum is ({m}, {b})",
                seg.slope, seg.intercept
            ));
        }
    }
    Ok(true)
}

fn nbest_vs_dp(g: &Hypergraph<f64>, spec: &SearchSpec<f64>, cap: usize, merge_eps: f64) -> Result<bool, String> {
    let derivations = match g.enumerate(cap) {
        Ok(d) => d,
        Err(Error::EnumerationOverflow { .. }) => return Ok(false),
        Err(e) => return Err(err(e)),
    };
    let dp = envelope(g, spec).map_err(err)?;
    let nbest = envelope_from_derivations(&derivations, spec).map_err(err)?;
    if dp.len() != nbest.len() {
        return Err(format!("{} DP segments vs {} n-best segments", dp.len(), nbest.len()));
    }
    for (a, b) in dp.boundaries().iter().zip(nbest.boundaries()) {
        if (a - b).abs() > merge_eps.max(REL_TOL * a.abs().max(1.0)) {
            return Err(format!("boundary {a} vs {b}"));
        }
    }
    for (a, b) in dp.segments.iter().zip(&nbest.segments) {
        // identical lines may carry different yields; compare only when the line is unique
        let dups = derivations
            .iter()
            .filter(|d| {
                d.dual_point(&spec.w0, &spec.v)
                    .map(|p| close(p.slope(), a.slope) && close(p.intercept(), a.intercept))
                    .unwrap_or(false)
            })
            .count();
        if dups == 1 && a.derivation.yield_string() != b.derivation.yield_string() {
            return Err(format!(
                "yield {:?} vs {:?}",
                a.derivation.yield_string(),
                b.derivation.yield_string()
            ));
        }
    }
    Ok(true)
}

fn random_etas(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

/// Checks on user-supplied sentences along `spec`.
pub fn check_corpus(sentences: &[Sentence<f64>], spec: &SearchSpec<f64>, options: &VerifyOptions) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let cap = options.derivation_cap;
    let mut inside = CheckResult::new("file/inside-vs-enumeration");
    let mut tropical = CheckResult::new("file/tropical-vs-hull");
    let mut env = CheckResult::new("file/envelope-vs-naive");
    let mut nbest = CheckResult::new("file/nbest-vs-dp");
    for (i, s) in sentences.iter().enumerate() {
        let label = format!("sentence {i}");
        let g = &s.forest;
        inside.record(&label, inside_vs_enumeration(g, spec, cap).into());
        let etas = random_etas(&mut rng, 100);
        tropical.record(&label, tropical_vs_hull(g, spec, &etas).into());
        env.record(&label, envelope_vs_naive(g, spec, cap, 1000).into());
        nbest.record(&label, nbest_vs_dp(g, spec, cap, crate::linesearch::DEFAULT_MERGE_EPS).into());
    }
    vec![inside, tropical, env, nbest]
}

/// Seeded random suite: algebraic laws and hull identities with exact
/// arithmetic, oracle agreement on random forests.
pub fn check_random(options: &VerifyOptions) -> Vec<CheckResult> {
    let n = options.random;
    if n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let cap = options.derivation_cap;
    let mut results = Vec::new();

    let mut axioms = CheckResult::new("random/semiring-axioms");
    let hulls = ((n as f64).cbrt().ceil() as usize).max(8);
    let sample: Vec<DualPointSet<Rational64>> = (0..hulls)
        .map(|i| {
            let k = if i == 0 { 0 } else { rng.gen_range(1..=6) };
            DualPointSet::hull_of(&random_points(&mut rng, k, 5)).expect("integer points are finite")
        })
        .collect();
    let report = check_axioms(&sample);
    axioms.instances = report.triples_checked;
    axioms.failures = report.failures.iter().map(|f| format!("{}: {:?}", f.law, f.indices)).collect();
    results.push(axioms);

    let mut convexify = CheckResult::new("random/convexify-identity");
    for i in 0..n {
        let (ka, kb) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let a = random_points::<Rational64, _>(&mut rng, ka, 6);
        let b = random_points::<Rational64, _>(&mut rng, kb, 6);
        let outcome = match convexify_equivalence(&a, &b) {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Fail(format!("{a:?} / {b:?}")),
            Err(e) => Outcome::Fail(err(e)),
        };
        convexify.record(format!("pair {i}"), outcome);
    }
    results.push(convexify);

    let shape = ForestShape::default();
    let mut bound = CheckResult::new("random/goal-hull-size");
    let mut exact = CheckResult::new("random/inside-vs-enumeration-exact");
    for i in 0..n {
        let g: Hypergraph<Rational64> = random_forest(&mut rng, &shape);
        let w0 = random_int_vector(&mut rng, shape.dim, 3);
        let v = random_int_vector(&mut rng, shape.dim, 3);
        let label = format!("forest {i}");
        let outcome = match g.hull_inside(&w0, &v) {
            Ok(h) if h.len() <= g.num_edges() => Outcome::Pass,
            Ok(h) => Outcome::Fail(format!("{} hull points > {} edges", h.len(), g.num_edges())),
            Err(e) => Outcome::Fail(err(e)),
        };
        bound.record(&label, outcome);
        let outcome = (|| -> Result<bool, String> {
            let derivations = match g.enumerate(cap) {
                Ok(d) => d,
                Err(Error::EnumerationOverflow { .. }) => return Ok(false),
                Err(e) => return Err(err(e)),
            };
            let naive = oracle::hull_of_derivations(&derivations, &w0, &v).map_err(err)?;
            let fast = g.hull_inside(&w0, &v).map_err(err)?;
            if naive.points() == fast.points() {
                Ok(true)
            } else {
                Err(format!("{:?} != {:?}", fast.points(), naive.points()))
            }
        })();
        exact.record(&label, outcome.into());
    }
    results.push(bound);
    results.push(exact);

    let real_shape = ForestShape {
        real_features: true,
        ..shape
    };
    let mut tropical = CheckResult::new("random/tropical-vs-hull");
    let mut env = CheckResult::new("random/envelope-vs-naive");
    let mut nbest = CheckResult::new("random/nbest-vs-dp");
    for i in 0..n {
        let g: Hypergraph<f64> = random_forest(&mut rng, &real_shape);
        let spec = SearchSpec::new(
            random_real_vector(&mut rng, shape.dim, 2.0),
            random_real_vector(&mut rng, shape.dim, 2.0),
        )
        .expect("equal dimensions");
        let label = format!("forest {i}");
        let etas = random_etas(&mut rng, 100);
        tropical.record(&label, tropical_vs_hull(&g, &spec, &etas).into());
        env.record(&label, envelope_vs_naive(&g, &spec, cap, 1000).into());
        nbest.record(&label, nbest_vs_dp(&g, &spec, cap, crate::linesearch::DEFAULT_MERGE_EPS).into());
    }
    results.push(tropical);
    results.push(env);
    results.push(nbest);
    results
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_suite_passes() {
        let results = check_random(&VerifyOptions {
            random: 20,
            seed: 11,
            ..VerifyOptions::default()
        });
        assert_eq!(results.len(), 7);
        for r in &results {
            assert!(r.passed(), "{r}");
        }
        assert!(results[0].instances >= 512);
    }

    #[test]
    fn display_format() {
        let mut r = CheckResult::new("x");
        r.record("a", Outcome::Pass);
        r.record("b", Outcome::Skip);
        assert_eq!(r.to_string(), "PASS\tx\tinstances=2\tskipped=1");
        r.record("c", Outcome::Fail("boom".into()));
        assert_eq!(r.to_string(), "FAIL\tx\tinstances=3\tskipped=1\tfailures=1\tfirst: c: boom");
    }
}
