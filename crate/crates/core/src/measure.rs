//! Exact volume and lattice-point count of a circuit region.
//!
//! The region is a disjoint union of arrangement cells, and every gate is
//! constant on each cell, so one membership test per cell witness decides
//! which cells to measure.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;

use crate::arrangement::{cell_cap_from_env, Arrangement};
use crate::circuit::{union_circuit, PolyhedraCircuit};
use crate::error::{Error, Result};
use crate::geometry::{normalize_hyperplane, HPolyhedron, HyperplaneKey, LinearInequality, Side};
use crate::oracles::{OracleCallCounts, OracleSuite};
use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureReport<V> {
    pub value: V,
    pub cells_total: usize,
    pub cells_selected: usize,
    pub oracle_calls: OracleCallCounts,
}

/// Runs the measurements against one oracle suite and cell cap.
#[derive(Clone)]
pub struct Measurer<F> {
    suite: OracleSuite<F>,
    cell_cap: usize,
}

impl<F: Field> Default for Measurer<F> {
    fn default() -> Self {
        Measurer::new(OracleSuite::default(), cell_cap_from_env())
    }
}

impl<F: Field> Measurer<F> {
    pub fn new(suite: OracleSuite<F>, cell_cap: usize) -> Self {
        Measurer { suite, cell_cap }
    }

    pub fn suite(&self) -> &OracleSuite<F> {
        &self.suite
    }

    pub fn cell_cap(&self) -> usize {
        self.cell_cap
    }

    pub fn circuit_volume(&self, c: &PolyhedraCircuit) -> Result<MeasureReport<F>> {
        let before = self.suite.calls();
        let c = c.canonicalize_for_volume();
        let keys = c.leaves().map(|l| Ok(normalize_hyperplane(l)?.key)).collect::<Result<Vec<_>>>()?;
        let arr = Arrangement::from_keys(c.dim(), keys);
        let (cells, _) = arr.decompose_interior::<F>(self.cell_cap)?;
        let selected = cells
            .iter()
            .filter_map(|cell| match c.contains(&cell.interior_witness) {
                Ok(true) => Some(Ok(cell)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<Vec<_>>>()?;
        let volumes = selected
            .par_iter()
            .map(|cell| self.suite.volume(&cell.closed_rep).map_err(unbounded_region))
            .collect::<Result<Vec<F>>>()?;
        let value = volumes.into_iter().fold(F::zero(), |acc, v| acc + v);
        Ok(MeasureReport {
            value,
            cells_total: cells.len(),
            cells_selected: selected.len(),
            oracle_calls: self.suite.calls() - before,
        })
    }

    pub fn circuit_lattice_count(&self, c: &PolyhedraCircuit) -> Result<MeasureReport<BigUint>> {
        let before = self.suite.calls();
        let c = c.canonicalize_for_lattice();
        let keys = c.leaves().map(lattice_key).collect::<Result<Vec<_>>>()?;
        let arr = Arrangement::from_keys(c.dim(), keys);
        let (cells, _) = arr.decompose_integer(&self.suite, self.cell_cap)?;
        let mut selected = Vec::new();
        for cell in &cells {
            if let Some(z) = &cell.integer_witness {
                if c.contains(z)? {
                    selected.push(cell);
                }
            }
        }
        let counts = selected
            .par_iter()
            .map(|cell| self.suite.lattice_count(&cell.closed_rep).map_err(unbounded_region))
            .collect::<Result<Vec<BigUint>>>()?;
        let value = counts.into_iter().fold(BigUint::zero(), |acc, v| acc + v);
        Ok(MeasureReport {
            value,
            cells_total: cells.len(),
            cells_selected: selected.len(),
            oracle_calls: self.suite.calls() - before,
        })
    }

    pub fn union_volume(&self, polys: &[HPolyhedron]) -> Result<MeasureReport<F>> {
        self.circuit_volume(&union_circuit(polys)?)
    }

    pub fn union_lattice_count(&self, polys: &[HPolyhedron]) -> Result<MeasureReport<BigUint>> {
        self.circuit_lattice_count(&union_circuit(polys)?)
    }
}

fn unbounded_region(e: Error) -> Error {
    match e {
        Error::UnboundedPolytope => Error::UnboundedRegion,
        other => other,
    }
}

/// Hyperplane for a closed leaf such that, on integer points, the leaf is
/// exactly one side of it. A leaf `a·x ≥ b` agrees with `a·x > b - 1` on `ℤ^d`,
/// so its hyperplane moves to `b - 1`, where it becomes the open side.
fn lattice_key(leaf: &LinearInequality) -> Result<HyperplaneKey> {
    let n = normalize_hyperplane(leaf)?;
    if n.side == Side::Le {
        return Ok(n.key);
    }
    let shifted = LinearInequality::new(n.key.a, n.key.b - BigInt::from(1), false)?;
    Ok(normalize_hyperplane(&shifted)?.key)
}

pub fn circuit_volume<F: Field>(c: &PolyhedraCircuit) -> Result<MeasureReport<F>> {
    Measurer::default().circuit_volume(c)
}

pub fn circuit_lattice_count(c: &PolyhedraCircuit) -> Result<MeasureReport<BigUint>> {
    Measurer::<num_rational::BigRational>::default().circuit_lattice_count(c)
}

pub fn union_volume<F: Field>(polys: &[HPolyhedron]) -> Result<MeasureReport<F>> {
    Measurer::default().union_volume(polys)
}

pub fn union_lattice_count(polys: &[HPolyhedron]) -> Result<MeasureReport<BigUint>> {
    Measurer::<num_rational::BigRational>::default().union_lattice_count(polys)
}
