//! Convex hull semiring and exact MERT line search over packed forests.
//!
//! The model score of every derivation along `w = η·v + w0` is a line in
//! η. Running inside over a forest in the convex hull semiring yields the
//! extreme points of all derivations' dual points at once; its lower chain
//! is the upper envelope of the score lines, from which the error surface
//! and the optimal step follow.
//!
//! The core is generic over [`Scalar`]: `f64` and `f32` with a relative
//! orientation tolerance, and `Rational64` / `BigRational` with exact
//! predicates. Aliases for the common instantiations are defined below.
//!
//! ```
//! use hullmert::linesearch::{line_search, SearchConfig};
//! use hullmert::{Edge, Forest, Metric, SearchSpec, Sentence};
//!
//! # fn main() -> hullmert::Result<()> {
//! // one node, two competing derivations; features [a, b]
//! let g = Forest::new(2, vec!["s".into()], 0, vec![
//!     Edge::simple(0, vec![], vec![(0, 1.0), (1, 2.0)], "steep"),
//!     Edge::simple(0, vec![], vec![], "flat"),
//! ])?;
//! let corpus = [Sentence { forest: g, reference: vec!["flat".into()] }];
//! let spec = SearchSpec::new(vec![0.0, 1.0], vec![1.0, 0.0])?;
//! let out = line_search(&corpus, &spec, Metric::Exact, Metric::Exact.default_scalarizer(), &SearchConfig::default())?;
//! // lines 0 and η + 2 cross at η = -2; "flat" wins to the left
//! assert_eq!(out.corpus_surface.boundaries, vec![-2.0]);
//! assert_eq!(out.loss, 0.0);
//! # Ok(())
//! # }
//! ```

pub mod cli_io;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod hull_semiring;
pub mod linesearch;
pub mod metrics;
pub mod oracle;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use forest::{Derivation, Edge, Hypergraph, YieldToken};
pub use geometry::{ConvexChain, Point2};
pub use hull_semiring::{DualPointSet, Semiring, TropicalValue};
pub use linesearch::{Envelope, ErrorSurface, SearchConfig, SearchSpec, Sentence};
pub use metrics::{Metric, Scalarizer, VectorErrorCount};
pub use scalar::Scalar;

pub use num_rational::{BigRational, Rational64};

pub type Point = Point2<f64>;
pub type Hull = DualPointSet<f64>;
pub type Forest = Hypergraph<f64>;
pub type Tropical = TropicalValue<f64>;

pub type ExactPoint = Point2<Rational64>;
pub type ExactHull = DualPointSet<Rational64>;
pub type ExactForest = Hypergraph<Rational64>;
