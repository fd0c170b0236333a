//! Exact volume and lattice-point counting for regions given by polyhedra
//! circuits (unions and intersections of rational half-spaces), plus greedy
//! maximum-coverage and partial set-cover solvers over such regions.
//!
//! The geometry is generic over an exact [`Field`]; the aliases below fix it
//! to arbitrary-precision rationals.

pub mod arrangement;
pub mod circuit;
pub mod cli;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod oracles;
pub mod render;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Field;

pub type Scalar = num_rational::BigRational;
pub type Point = geometry::Point<Scalar>;
pub type AtomicCell = arrangement::AtomicCell<Scalar>;
pub type OracleSuite = oracles::OracleSuite<Scalar>;
pub type Measurer = measure::Measurer<Scalar>;
pub type MeasureReport = measure::MeasureReport<Scalar>;
pub type GreedyTrace = coverage::GreedyTrace<Scalar>;
pub type CoverParams = coverage::CoverParams<Scalar>;
pub type Solver = coverage::Solver<Scalar>;

pub use arrangement::{Arrangement, SignVector};
pub use circuit::{parse_circuit, union_circuit, PolyhedraCircuit};
pub use coverage::{reduce_classical, CoverageInstance, Mode};
pub use geometry::{HPolyhedron, LinearInequality};
