use std::collections::BTreeSet;

use itertools::Itertools;

use super::linalg::solve;
use super::lp::is_bounded_unchecked;
use super::{LinearInequality, Point};
use crate::error::{Error, Result};
use crate::scalar::{dot, Field};

/// Vertex set of a bounded polytope, sorted lexicographically.
///
/// Every `dim`-subset of rows with a unique intersection point is tried; the
/// point is kept when it satisfies all rows. Degenerate vertices reached from
/// several bases collapse by exact comparison.
pub fn enumerate_vertices<F: Field>(dim: usize, rows: &[LinearInequality]) -> Result<Vec<Point<F>>> {
    if let Some(r) = rows.iter().find(|r| r.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: r.dim() });
    }
    if rows.iter().any(LinearInequality::is_strict) {
        return Err(Error::StrictRow);
    }
    if !is_bounded_unchecked::<F>(dim, rows) {
        return Err(Error::UnboundedPolytope);
    }
    Ok(vertices_unchecked(dim, rows))
}

pub(crate) fn vertices_unchecked<F: Field>(dim: usize, rows: &[LinearInequality]) -> Vec<Point<F>> {
    let field_rows: Vec<(Vec<F>, F)> = rows
        .iter()
        .map(|r| (r.coeffs().iter().map(F::from_bigint).collect(), F::from_bigint(r.bound())))
        .collect();
    let mut found = BTreeSet::new();
    if dim == 0 {
        return Vec::new();
    }
    for combo in (0..rows.len()).combinations(dim) {
        let m = combo.iter().map(|&i| field_rows[i].0.clone()).collect();
        let rhs = combo.iter().map(|&i| field_rows[i].1.clone()).collect();
        let Some(x) = solve(m, rhs) else {
            continue;
        };
        if rows.iter().all(|r| dot(r.coeffs(), &x) <= F::from_bigint(r.bound())) {
            found.insert(Point::new(x));
        }
    }
    found.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linalg::rank;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn rows(spec: &[(&[i64], i64)]) -> Vec<LinearInequality> {
        spec.iter().map(|(a, b)| LinearInequality::le(a, *b).unwrap()).collect()
    }

    fn pts(spec: &[&[i64]]) -> Vec<Point<Q>> {
        let mut v: Vec<_> = spec.iter().map(|c| Point::from_ints(c)).collect();
        v.sort();
        v
    }

    #[test]
    fn square_and_simplex() {
        let sq = rows(&[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)]);
        assert_eq!(enumerate_vertices::<Q>(2, &sq).unwrap(), pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]));
        let mut simplex = rows(&[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 1)]);
        let expected = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(enumerate_vertices::<Q>(2, &simplex).unwrap(), expected);
        simplex.push(LinearInequality::le(&[1, 1], 2).unwrap());
        assert_eq!(enumerate_vertices::<Q>(2, &simplex).unwrap(), expected);
    }

    #[test]
    fn unbounded_and_empty() {
        assert!(matches!(
            enumerate_vertices::<Q>(1, &rows(&[(&[1], 0)])),
            Err(Error::UnboundedPolytope)
        ));
        assert!(enumerate_vertices::<Q>(1, &rows(&[(&[1], 0), (&[-1], -1)])).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn random_boxes_bounded_with_tight_vertices(
            lo in proptest::collection::vec(-5i64..5, 1..4),
            widths in proptest::collection::vec(0i64..4, 3),
            cut in proptest::collection::vec(-3i64..=3, 3),
            cut_b in -4i64..6,
        ) {
            let d = lo.len();
            let hi: Vec<i64> = lo.iter().zip(&widths).map(|(l, w)| l + w).collect();
            let mut r = crate::geometry::HPolyhedron::integer_box(&lo, &hi).unwrap().into_rows();
            if cut[..d].iter().any(|&c| c != 0) {
                r.push(LinearInequality::le(&cut[..d], cut_b).unwrap());
            }
            prop_assert!(crate::geometry::is_bounded::<Q>(d, &r).unwrap());
            let verts = enumerate_vertices::<Q>(d, &r).unwrap();
            for v in &verts {
                let tight: Vec<Vec<Q>> = r
                    .iter()
                    .filter(|row| dot(row.coeffs(), &v.coords) == Q::from_bigint(row.bound()))
                    .map(|row| row.coeffs().iter().map(Q::from_bigint).collect())
                    .collect();
                prop_assert!(r.iter().all(|row| row.holds(v).unwrap()));
                prop_assert_eq!(rank(tight), d);
            }
            // a half-space on its own is never bounded
            let half = vec![r[0].clone()];
            prop_assert!(!crate::geometry::is_bounded::<Q>(d, &half).unwrap());
            prop_assert!(matches!(enumerate_vertices::<Q>(d, &half), Err(Error::UnboundedPolytope)));
        }
    }
}
