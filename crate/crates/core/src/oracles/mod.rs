//! Single-polyhedron oracles: volume, lattice-point count and integer
//! feasibility. Each is a trait with one operation so that a different
//! backend (for example an external process) can be swapped in; the defaults
//! are exact and exponential in the dimension.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};

use crate::error::Result;
use crate::geometry::{HPolyhedron, Point};
use crate::scalar::Field;

mod ilp;
mod lattice;
pub mod plugin;
mod volume;

pub use ilp::BranchAndBound;
pub use lattice::EnumerationCount;
pub use plugin::ProcessOracle;
pub use volume::TriangulationVolume;

pub trait VolumeOracle<F>: Send + Sync {
    /// Exact volume of a bounded closed polyhedron; zero when it is lower-dimensional.
    fn volume(&self, poly: &HPolyhedron) -> Result<F>;
}

pub trait LatticeOracle: Send + Sync {
    /// Exact `|P ∩ ℤ^d|` of a bounded closed polyhedron.
    fn lattice_count(&self, poly: &HPolyhedron) -> Result<BigUint>;
}

pub trait IlpOracle: Send + Sync {
    /// Some integer point of the closed polyhedron, or `None` when it has none.
    fn feasible_point(&self, poly: &HPolyhedron) -> Result<Option<Vec<BigInt>>>;
}

#[derive(Debug, Default)]
pub struct OracleCounters {
    volume: AtomicU64,
    lattice: AtomicU64,
    ilp: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleCallCounts {
    pub volume: u64,
    pub lattice: u64,
    pub ilp: u64,
}

impl std::ops::Sub for OracleCallCounts {
    type Output = OracleCallCounts;

    fn sub(self, rhs: Self) -> Self {
        OracleCallCounts {
            volume: self.volume - rhs.volume,
            lattice: self.lattice - rhs.lattice,
            ilp: self.ilp - rhs.ilp,
        }
    }
}

impl fmt::Display for OracleCallCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "volume={} lattice={} ilp={}", self.volume, self.lattice, self.ilp)
    }
}

/// The three oracle backends plus shared call counters.
#[derive(Clone)]
pub struct OracleSuite<F> {
    volume: Arc<dyn VolumeOracle<F>>,
    lattice: Arc<dyn LatticeOracle>,
    ilp: Arc<dyn IlpOracle>,
    counters: Arc<OracleCounters>,
}

impl<F: Field> Default for OracleSuite<F> {
    fn default() -> Self {
        OracleSuite::new(
            Arc::new(TriangulationVolume),
            Arc::new(EnumerationCount),
            Arc::new(BranchAndBound::default()),
        )
    }
}

impl<F: Field> OracleSuite<F> {
    pub fn new(
        volume: Arc<dyn VolumeOracle<F>>,
        lattice: Arc<dyn LatticeOracle>,
        ilp: Arc<dyn IlpOracle>,
    ) -> Self {
        OracleSuite { volume, lattice, ilp, counters: Arc::default() }
    }

    pub fn with_volume(mut self, backend: Arc<dyn VolumeOracle<F>>) -> Self {
        self.volume = backend;
        self
    }

    pub fn with_lattice(mut self, backend: Arc<dyn LatticeOracle>) -> Self {
        self.lattice = backend;
        self
    }

    pub fn with_ilp(mut self, backend: Arc<dyn IlpOracle>) -> Self {
        self.ilp = backend;
        self
    }

    pub fn volume(&self, poly: &HPolyhedron) -> Result<F> {
        self.counters.volume.fetch_add(1, Ordering::Relaxed);
        self.volume.volume(poly)
    }

    pub fn lattice_count(&self, poly: &HPolyhedron) -> Result<BigUint> {
        self.counters.lattice.fetch_add(1, Ordering::Relaxed);
        self.lattice.lattice_count(poly)
    }

    pub fn feasible_point(&self, poly: &HPolyhedron) -> Result<Option<Point<F>>> {
        self.counters.ilp.fetch_add(1, Ordering::Relaxed);
        Ok(self
            .ilp
            .feasible_point(poly)?
            .map(|z| Point::new(z.iter().map(F::from_bigint).collect())))
    }

    pub fn calls(&self) -> OracleCallCounts {
        OracleCallCounts {
            volume: self.counters.volume.load(Ordering::Relaxed),
            lattice: self.counters.lattice.load(Ordering::Relaxed),
            ilp: self.counters.ilp.load(Ordering::Relaxed),
        }
    }
}

/// Volume with the default triangulation backend.
pub fn polytope_volume<F: Field>(poly: &HPolyhedron) -> Result<F> {
    VolumeOracle::<F>::volume(&TriangulationVolume, poly)
}

/// Lattice-point count with the default enumeration backend.
pub fn polytope_lattice_count(poly: &HPolyhedron) -> Result<BigUint> {
    EnumerationCount.lattice_count(poly)
}

/// Integer point with the default branch-and-bound backend.
pub fn ilp_feasible_point<F: Field>(poly: &HPolyhedron) -> Result<Option<Point<F>>> {
    Ok(BranchAndBound::default()
        .feasible_point(poly)?
        .map(|z| Point::new(z.iter().map(F::from_bigint).collect())))
}

/// Splits integer rows into nonzero rows and a constant-feasibility verdict.
/// Returns `None` when some constant row `0 ≤ b` fails.
pub(crate) fn split_constant_rows(rows: Vec<(Vec<BigInt>, BigInt)>) -> Option<Vec<(Vec<BigInt>, BigInt)>> {
    use num_traits::{Signed, Zero};
    let mut kept = Vec::with_capacity(rows.len());
    for (a, b) in rows {
        if a.iter().all(Zero::is_zero) {
            if b.is_negative() {
                return None;
            }
        } else {
            kept.push((a, b));
        }
    }
    Some(kept)
}

/// Substitutes `x_k = t` and drops coordinate `k`.
pub(crate) fn fix_coordinate(rows: &[(Vec<BigInt>, BigInt)], k: usize, t: &BigInt) -> Vec<(Vec<BigInt>, BigInt)> {
    rows.iter()
        .map(|(a, b)| {
            let mut a2 = a.clone();
            let ak = a2.remove(k);
            (a2, b - ak * t)
        })
        .collect()
}

/// Integer interval `[lo, hi]` cut out by one-variable rows `a x ≤ b`; `None` bounds are infinite.
pub(crate) fn interval_1d(rows: &[(Vec<BigInt>, BigInt)]) -> (Option<BigInt>, Option<BigInt>) {
    use num_integer::Integer;
    use num_traits::Signed;
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for (a, b) in rows {
        let a0 = &a[0];
        if a0.is_positive() {
            let v = b.div_floor(a0);
            hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
        } else {
            // a0 x ≤ b with a0 < 0  ⇔  x ≥ ceil(b / a0)
            let v = -(b.div_floor(&-a0));
            lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
        }
    }
    (lo, hi)
}

pub(crate) fn to_rows(poly: &HPolyhedron) -> Vec<(Vec<BigInt>, BigInt)> {
    poly.rows().iter().map(|r| (r.coeffs().to_vec(), r.bound().clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: &[i64], b: i64) -> (Vec<BigInt>, BigInt) {
        (a.iter().map(|&v| v.into()).collect(), b.into())
    }

    #[test]
    fn interval_rounding() {
        // 3x ≤ 7 → x ≤ 2 ; -2x ≤ 3 → x ≥ -1 ; -3x ≤ -4 → x ≥ 2
        assert_eq!(interval_1d(&[r(&[3], 7), r(&[-2], 3)]), (Some((-1).into()), Some(2.into())));
        assert_eq!(interval_1d(&[r(&[-3], -4)]), (Some(2.into()), None));
        assert_eq!(interval_1d(&[r(&[-3], 4)]), (Some((-1).into()), None));
        assert_eq!(interval_1d(&[r(&[3], -4)]), (None, Some((-2).into())));
    }
}
