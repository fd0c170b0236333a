use std::cell::Cell;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{fix_coordinate, interval_1d, split_constant_rows, to_rows, IlpOracle};
use crate::error::{Error, Result};
use crate::geometry::lp::range_of;
use crate::geometry::{HPolyhedron, LinearInequality};
use crate::scalar::Field;

type Rows = Vec<(Vec<BigInt>, BigInt)>;

/// Branch-and-bound integer feasibility.
///
/// Branches on a coordinate with a bounded LP range, else on a constraint
/// normal `a` whose value `a·x` is bounded (only multiples of `gcd(a)` are
/// tried), else searches doubling boxes `|x_j| ≤ R` up to `box_cap`. Running
/// out of boxes or of the node budget is reported as `IlpIncomplete`.
#[derive(Clone, Debug)]
pub struct BranchAndBound {
    pub box_cap: u64,
    pub node_budget: u64,
}

impl Default for BranchAndBound {
    fn default() -> Self {
        BranchAndBound { box_cap: 1 << 30, node_budget: 5_000_000 }
    }
}

impl IlpOracle for BranchAndBound {
    fn feasible_point(&self, poly: &HPolyhedron) -> Result<Option<Vec<BigInt>>> {
        poly.require_closed()?;
        let search = Search { cfg: self, nodes: Cell::new(0) };
        search.solve(to_rows(poly), poly.dim(), &BTreeSet::new())
    }
}

struct Search<'a> {
    cfg: &'a BranchAndBound,
    nodes: Cell<u64>,
}

impl Search<'_> {
    fn tick(&self) -> Result<()> {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        if n > self.cfg.node_budget {
            return Err(Error::IlpIncomplete(format!("node budget {} exhausted", self.cfg.node_budget)));
        }
        Ok(())
    }

    fn solve(&self, rows: Rows, dim: usize, fixed: &BTreeSet<Vec<BigInt>>) -> Result<Option<Vec<BigInt>>> {
        self.tick()?;
        let Some(rows) = split_constant_rows(rows) else {
            return Ok(None);
        };
        if dim == 0 {
            return Ok(Some(Vec::new()));
        }
        if dim == 1 {
            let (lo, hi) = interval_1d(&rows);
            let pick = match (lo, hi) {
                (Some(l), Some(h)) if l > h => return Ok(None),
                (Some(l), _) => l,
                (None, Some(h)) => h.min(BigInt::zero()),
                (None, None) => BigInt::zero(),
            };
            return Ok(Some(vec![pick]));
        }
        let lp_rows: Vec<LinearInequality> =
            rows.iter().map(|(a, b)| LinearInequality::raw(a.clone(), b.clone())).collect();

        for k in 0..dim {
            let mut e = vec![BigRational::zero(); dim];
            e[k] = BigRational::one();
            match range_of(&lp_rows, &e) {
                None => return Ok(None),
                Some((Some(lo), Some(hi))) => {
                    let mut t = lo.ceil_int();
                    let end = hi.floor_int();
                    while t <= end {
                        if let Some(mut z) = self.solve(fix_coordinate(&rows, k, &t), dim - 1, &BTreeSet::new())? {
                            z.insert(k, t);
                            return Ok(Some(z));
                        }
                        t += 1;
                    }
                    return Ok(None);
                }
                Some(_) => {}
            }
        }

        for (a, _) in &rows {
            let g = a.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
            let lead_negative = a.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
            let g = if lead_negative { -g } else { g };
            let normal: Vec<BigInt> = a.iter().map(|v| v / &g).collect();
            if fixed.contains(&normal) {
                continue;
            }
            let objective: Vec<BigRational> = normal.iter().map(BigRational::from_bigint).collect();
            let Some((Some(lo), Some(hi))) = range_of(&lp_rows, &objective) else {
                continue;
            };
            // normal·x takes only integer values on ℤ^d
            let mut fixed_here = fixed.clone();
            fixed_here.insert(normal.clone());
            let mut v = lo.ceil_int();
            let end = hi.floor_int();
            while v <= end {
                let mut slice = rows.clone();
                slice.push((normal.clone(), v.clone()));
                slice.push((normal.iter().map(|c| -c).collect(), -&v));
                if let Some(z) = self.solve(slice, dim, &fixed_here)? {
                    return Ok(Some(z));
                }
                v += 1;
            }
            return Ok(None);
        }

        let mut radius: u64 = 1;
        while radius <= self.cfg.box_cap {
            let mut boxed = rows.clone();
            for k in 0..dim {
                let mut e = vec![BigInt::zero(); dim];
                e[k] = BigInt::one();
                boxed.push((e.clone(), BigInt::from(radius)));
                e[k] = -BigInt::one();
                boxed.push((e, BigInt::from(radius)));
            }
            if let Some(z) = self.solve(boxed, dim, fixed)? {
                return Ok(Some(z));
            }
            radius *= 2;
        }
        Err(Error::IlpIncomplete(format!(
            "no integer point within |x| <= {} and no bounded direction to certify emptiness",
            self.cfg.box_cap
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::oracles::{ilp_feasible_point, polytope_lattice_count};
    use proptest::prelude::*;

    type Q = BigRational;

    fn poly(d: usize, spec: &[(Vec<i64>, i64)]) -> HPolyhedron {
        HPolyhedron::new(d, spec.iter().map(|(a, b)| LinearInequality::le(a, *b).unwrap()).collect()).unwrap()
    }

    #[test]
    fn examples() {
        let thin = poly(1, &[(vec![-3], -2), (vec![3], 2)]);
        assert_eq!(ilp_feasible_point::<Q>(&thin).unwrap(), None);
        let sq = HPolyhedron::integer_box(&[0, 0], &[1, 1]).unwrap();
        let p: Point<Q> = ilp_feasible_point(&sq).unwrap().unwrap();
        assert!(p.is_integral() && sq.contains(&p).unwrap());
        let ray = poly(1, &[(vec![-1], -5)]);
        assert_eq!(ilp_feasible_point::<Q>(&ray).unwrap(), Some(Point::from_ints(&[5])));
    }

    #[test]
    fn unbounded_strips_and_cones() {
        // 1 ≤ 2x - 2y ≤ 1: the line x - y = 1/2 has no integer point.
        let strip = poly(2, &[(vec![2, -2], 1), (vec![-2, 2], -1)]);
        assert_eq!(ilp_feasible_point::<Q>(&strip).unwrap(), None);
        // 2 ≤ 3x + 3y ≤ 4 contains x + y = 1.
        let wide = poly(2, &[(vec![3, 3], 4), (vec![-3, -3], -2)]);
        let p: Point<Q> = ilp_feasible_point(&wide).unwrap().unwrap();
        assert!(wide.contains(&p).unwrap() && p.is_integral());
        // A cone far from the origin.
        let cone = poly(2, &[(vec![-1, 0], -40), (vec![1, -1], 0)]);
        let p: Point<Q> = ilp_feasible_point(&cone).unwrap().unwrap();
        assert!(cone.contains(&p).unwrap() && p.is_integral());
        let whole_plane_cut = poly(3, &[(vec![1, 1, 1], -7)]);
        let p: Point<Q> = ilp_feasible_point(&whole_plane_cut).unwrap().unwrap();
        assert!(whole_plane_cut.contains(&p).unwrap());
    }

    #[test]
    fn node_budget_is_reported() {
        let tiny = BranchAndBound { box_cap: 1 << 30, node_budget: 3 };
        let b = HPolyhedron::integer_box(&[0, 0, 0], &[9, 9, 9]).unwrap();
        let thin = HPolyhedron::new(3, {
            let mut r = b.into_rows();
            r.push(LinearInequality::le(&[0, 0, 3], 2).unwrap());
            r.push(LinearInequality::le(&[0, 0, -3], -1).unwrap());
            r
        })
        .unwrap();
        assert!(matches!(tiny.feasible_point(&thin), Err(Error::IlpIncomplete(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn agrees_with_lattice_count(
            lo in proptest::collection::vec(-6i64..6, 2),
            widths in proptest::collection::vec(0i64..5, 2),
            cut in proptest::collection::vec(-4i64..=4, 2),
            cut_b in -8i64..8,
            flip in any::<bool>(),
        ) {
            let hi: Vec<i64> = lo.iter().zip(&widths).map(|(l, w)| l + w).collect();
            let mut rows = HPolyhedron::integer_box(&lo, &hi).unwrap().into_rows();
            if cut.iter().any(|&c| c != 0) {
                let h = LinearInequality::le(&cut, cut_b).unwrap();
                rows.push(h.clone());
                if flip {
                    rows.push(h.reversed_closed());
                }
            }
            let p = HPolyhedron::new(2, rows).unwrap();
            let count = polytope_lattice_count(&p).unwrap();
            match ilp_feasible_point::<Q>(&p).unwrap() {
                None => prop_assert!(count.is_zero()),
                Some(z) => {
                    prop_assert!(z.is_integral() && p.contains(&z).unwrap());
                    prop_assert!(!count.is_zero());
                }
            }
        }
    }
}
