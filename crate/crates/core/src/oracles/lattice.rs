use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{fix_coordinate, interval_1d, split_constant_rows, to_rows, LatticeOracle};
use crate::error::{Error, Result};
use crate::geometry::lp::{is_bounded_unchecked, range_of};
use crate::geometry::{HPolyhedron, LinearInequality};
use crate::scalar::Field;

/// Counts lattice points by fixing coordinates one at a time; the integer
/// range of the leading coordinate comes from two LPs per level, and the last
/// coordinate is resolved in closed form.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerationCount;

impl LatticeOracle for EnumerationCount {
    fn lattice_count(&self, poly: &HPolyhedron) -> Result<BigUint> {
        poly.require_closed()?;
        if !is_bounded_unchecked::<BigRational>(poly.dim(), poly.rows()) {
            return Err(Error::UnboundedPolytope);
        }
        Ok(count(to_rows(poly), poly.dim()))
    }
}

fn count(rows: Vec<(Vec<BigInt>, BigInt)>, dim: usize) -> BigUint {
    let Some(rows) = split_constant_rows(rows) else {
        return BigUint::zero();
    };
    if dim == 0 {
        return BigUint::one();
    }
    if dim == 1 {
        return match interval_1d(&rows) {
            (Some(lo), Some(hi)) if lo <= hi => (hi - lo + 1u32).to_biguint().expect("nonnegative"),
            (Some(_), Some(_)) => BigUint::zero(),
            _ => unreachable!("bounded input yields bounded slices"),
        };
    }
    let lp_rows: Vec<LinearInequality> =
        rows.iter().map(|(a, b)| LinearInequality::raw(a.clone(), b.clone())).collect();
    let mut e = vec![BigRational::zero(); dim];
    e[0] = BigRational::one();
    let Some((Some(lo), Some(hi))) = range_of(&lp_rows, &e) else {
        return BigUint::zero();
    };
    let mut total = BigUint::zero();
    let mut t = lo.ceil_int();
    let end = hi.floor_int();
    while t <= end {
        total += count(fix_coordinate(&rows, 0, &t), dim - 1);
        t += 1;
    }
    total
}
