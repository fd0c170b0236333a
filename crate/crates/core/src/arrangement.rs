//! Cells of a hyperplane arrangement.
//!
//! Every input row contributes its normalized hyperplane; a cell is the
//! intersection of one side per hyperplane, the closed side `a·x ≤ b` (`L`) or
//! the open side `a·x > b` (`G`). Because every key's leading coefficient is
//! positive, each nonempty cell contains points strictly inside all of its
//! sides, so the interior decomposition already lists every nonempty cell.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::lp::interior_point_unchecked;
use crate::geometry::{normalize_hyperplane, HPolyhedron, HyperplaneKey, LinearInequality, Point, Side};
use crate::oracles::{OracleCallCounts, OracleSuite};
use crate::scalar::{dot, Field};

pub const DEFAULT_CELL_CAP: usize = 1_000_000;

/// Cell cap from `POLYCIRC_CELL_CAP`, else the default.
pub fn cell_cap_from_env() -> usize {
    std::env::var("POLYCIRC_CELL_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CELL_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(pub Vec<Side>);

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.letter()))
    }
}

#[derive(Clone, Debug)]
pub struct AtomicCell<F> {
    pub signs: SignVector,
    /// Closure of the cell in interior mode; the lattice-shifted cell in integer mode.
    pub closed_rep: HPolyhedron,
    pub interior_witness: Point<F>,
    pub integer_witness: Option<Point<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementStats {
    pub n: usize,
    pub d: usize,
    pub cell_count: usize,
    pub lemma3_lower: BigRational,
    pub lemma3_upper: BigRational,
    pub oracle_calls: OracleCallCounts,
}

impl fmt::Display for ArrangementStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hyperplanes {}", self.n)?;
        writeln!(f, "dim {}", self.d)?;
        writeln!(f, "cells {}", self.cell_count)?;
        writeln!(f, "region_bounds {} {}", self.lemma3_lower, self.lemma3_upper)?;
        write!(f, "oracle_calls {}", self.oracle_calls)
    }
}

/// `(⌊n/d⌋^d, n^d/d! + (n+1)^(d-1))`, the bounds on the maximal number of
/// regions cut out by `n` hyperplanes in general position in `ℝ^d`.
pub fn region_bounds<F: Field>(n: usize, d: usize) -> (F, F) {
    assert!(d >= 1, "dimension must be positive");
    let pow = |base: usize, e: usize| F::from_bigint(&BigInt::from(base).pow(e as u32));
    let lower = pow(n / d, d);
    let factorial = (1..=d).fold(F::one(), |acc, k| acc * F::from_i64(k as i64));
    let upper = pow(n, d) / factorial + pow(n + 1, d - 1);
    (lower, upper)
}

/// The distinct normalized hyperplanes of a list of rows, in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    dim: usize,
    keys: Vec<HyperplaneKey>,
}

impl Arrangement {
    pub fn new(dim: usize, ineqs: &[LinearInequality]) -> Result<Self> {
        let keys = ineqs
            .iter()
            .map(|r| {
                if r.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: r.dim() });
                }
                Ok(normalize_hyperplane(r)?.key)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Arrangement::from_keys(dim, keys))
    }

    /// Keys must already be normalized; repeats after the first are dropped.
    pub(crate) fn from_keys(dim: usize, keys: Vec<HyperplaneKey>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let keys = keys.into_iter().filter(|k| seen.insert(k.clone())).collect();
        Arrangement { dim, keys }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn keys(&self) -> &[HyperplaneKey] {
        &self.keys
    }

    /// Sign vector of the cell containing `p`; boundary points take the `L` side.
    pub fn locate<F: Field>(&self, p: &Point<F>) -> Result<SignVector> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        Ok(SignVector(self.keys.iter().map(|k| k.side_of(p)).collect()))
    }

    /// Closed rows of the cell's closure.
    pub fn closure_rows(&self, signs: &[Side]) -> Vec<LinearInequality> {
        self.keys
            .iter()
            .zip(signs)
            .map(|(k, s)| match s {
                Side::Le => k.le_row(),
                Side::Gt => k.ge_row(),
            })
            .collect()
    }

    /// Closed rows with the same integer points as the cell.
    pub fn lattice_rows(&self, signs: &[Side]) -> Vec<LinearInequality> {
        self.keys
            .iter()
            .zip(signs)
            .map(|(k, s)| match s {
                Side::Le => k.le_row(),
                Side::Gt => k.gt_lattice_row(),
            })
            .collect()
    }

    fn stats(&self, cell_count: usize, oracle_calls: OracleCallCounts) -> ArrangementStats {
        let (lemma3_lower, lemma3_upper) = region_bounds(self.keys.len(), self.dim.max(1));
        ArrangementStats { n: self.keys.len(), d: self.dim, cell_count, lemma3_lower, lemma3_upper, oracle_calls }
    }

    /// Nonempty cells with a strict interior witness each, by incremental
    /// insertion of the hyperplanes. Sorted by sign vector.
    pub fn decompose_interior<F: Field>(&self, cell_cap: usize) -> Result<(Vec<AtomicCell<F>>, ArrangementStats)> {
        let mut cells: Vec<(Vec<Side>, Point<F>)> = vec![(Vec::new(), Point::origin(self.dim))];
        for (i, key) in self.keys.iter().enumerate() {
            let split: Vec<Vec<(Vec<Side>, Point<F>)>> = cells
                .into_par_iter()
                .map(|(signs, w)| self.split(&signs, w, key, i))
                .collect();
            cells = split.into_iter().flatten().collect();
            if cells.len() > cell_cap {
                return Err(Error::CellCapExceeded { cap: cell_cap });
            }
        }
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        let out: Vec<AtomicCell<F>> = cells
            .into_iter()
            .map(|(signs, w)| AtomicCell {
                closed_rep: HPolyhedron::new(self.dim, self.closure_rows(&signs)).expect("dims checked"),
                signs: SignVector(signs),
                interior_witness: w,
                integer_witness: None,
            })
            .collect();
        let stats = self.stats(out.len(), OracleCallCounts::default());
        Ok((out, stats))
    }

    fn split<F: Field>(
        &self,
        signs: &[Side],
        w: Point<F>,
        key: &HyperplaneKey,
        i: usize,
    ) -> Vec<(Vec<Side>, Point<F>)> {
        let s = dot(&key.a, &w.coords) - F::from_bigint(&key.b);
        let rows = self.closure_rows(signs);
        let probe = |side: Side| {
            let mut r = rows.clone();
            r.push(match side {
                Side::Le => key.le_row(),
                Side::Gt => key.ge_row(),
            });
            interior_point_unchecked::<F>(self.dim, &r)
        };
        let (le, gt) = if s.is_negative() {
            (Some(w), probe(Side::Gt))
        } else if s.is_positive() {
            (probe(Side::Le), Some(w))
        } else {
            (probe(Side::Le), probe(Side::Gt))
        };
        let mut out = Vec::with_capacity(2);
        for (side, witness) in [(Side::Le, le), (Side::Gt, gt)] {
            if let Some(p) = witness {
                let mut sv = Vec::with_capacity(i + 1);
                sv.extend_from_slice(signs);
                sv.push(side);
                out.push((sv, p));
            }
        }
        out
    }

    /// Every cell with its lattice-shifted representative and an integer
    /// witness from the ILP oracle (`None` when it has no integer point).
    pub fn decompose_integer<F: Field>(
        &self,
        suite: &OracleSuite<F>,
        cell_cap: usize,
    ) -> Result<(Vec<AtomicCell<F>>, ArrangementStats)> {
        let before = suite.calls();
        let (cells, _) = self.decompose_interior::<F>(cell_cap)?;
        let cells = cells
            .into_par_iter()
            .map(|cell| {
                let rep = HPolyhedron::new(self.dim, self.lattice_rows(&cell.signs.0)).expect("dims checked");
                let z = suite.feasible_point(&rep)?;
                Ok(AtomicCell { closed_rep: rep, integer_witness: z, ..cell })
            })
            .collect::<Result<Vec<_>>>()?;
        let stats = self.stats(cells.len(), suite.calls() - before);
        Ok((cells, stats))
    }
}

fn arrangement_of(ineqs: &[LinearInequality]) -> Result<Arrangement> {
    let first = ineqs.first().ok_or(Error::EmptyList)?;
    Arrangement::new(first.dim(), ineqs)
}

/// Interior decomposition of the arrangement of `ineqs` with the cap from the environment.
pub fn decompose_interior<F: Field>(ineqs: &[LinearInequality]) -> Result<(Vec<AtomicCell<F>>, ArrangementStats)> {
    arrangement_of(ineqs)?.decompose_interior(cell_cap_from_env())
}

/// Integer decomposition with the default oracles.
pub fn decompose_integer<F: Field>(ineqs: &[LinearInequality]) -> Result<(Vec<AtomicCell<F>>, ArrangementStats)> {
    arrangement_of(ineqs)?.decompose_integer(&OracleSuite::default(), cell_cap_from_env())
}

pub fn locate<F: Field>(ineqs: &[LinearInequality], p: &Point<F>) -> Result<SignVector> {
    arrangement_of(ineqs)?.locate(p)
}

/// True when `p` lies in the cell `signs` (with `G` sides open).
pub fn cell_contains<F: Field>(arr: &Arrangement, signs: &SignVector, p: &Point<F>) -> bool {
    arr.keys.iter().zip(&signs.0).all(|(k, s)| k.side_of(p) == *s)
}

/// `1 + n + C(n,2) + … + C(n,d)`: the cell count of `n` hyperplanes in general position.
pub fn general_position_cells(n: usize, d: usize) -> BigInt {
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for i in 0..=d.min(n) {
        total += &binom;
        binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    total
}
