use std::collections::BTreeSet;

use super::VolumeOracle;
use crate::error::{Error, Result};
use crate::geometry::linalg::{affine_dim, determinant};
use crate::geometry::lp::is_bounded_unchecked;
use crate::geometry::vertices::vertices_unchecked;
use crate::geometry::{HPolyhedron, Point};
use crate::scalar::{dot, Field};

/// Vertex enumeration followed by a recursive boundary-fan triangulation.
///
/// The apex of every face is its lexicographically smallest vertex; each
/// facet not containing the apex is triangulated recursively and coned to it.
#[derive(Clone, Copy, Debug, Default)]
pub struct TriangulationVolume;

impl<F: Field> VolumeOracle<F> for TriangulationVolume {
    fn volume(&self, poly: &HPolyhedron) -> Result<F> {
        poly.require_closed()?;
        let d = poly.dim();
        if !is_bounded_unchecked::<F>(d, poly.rows()) {
            return Err(Error::UnboundedPolytope);
        }
        let verts: Vec<Point<F>> = vertices_unchecked(d, poly.rows());
        if verts.len() <= d {
            return Ok(F::zero());
        }
        let all: Vec<&[F]> = verts.iter().map(|v| v.coords.as_slice()).collect();
        if affine_dim(&all) != Some(d) {
            return Ok(F::zero());
        }
        let tight: Vec<BTreeSet<usize>> = poly
            .rows()
            .iter()
            .map(|r| {
                let b = F::from_bigint(r.bound());
                (0..verts.len()).filter(|&i| dot(r.coeffs(), &verts[i].coords) == b).collect()
            })
            .collect();
        let face: Vec<usize> = (0..verts.len()).collect();
        let mut total = F::zero();
        for simplex in triangulate(&verts, &tight, &face, d) {
            let apex = &verts[simplex[0]].coords;
            let m = simplex[1..]
                .iter()
                .map(|&i| verts[i].coords.iter().zip(apex).map(|(a, b)| a.clone() - b.clone()).collect())
                .collect();
            total = total + determinant(m).abs();
        }
        let factorial = (1..=d as i64).fold(F::one(), |acc, k| acc * F::from_i64(k));
        Ok(total / factorial)
    }
}

/// Simplices (as vertex index lists) triangulating a `k`-dimensional face.
fn triangulate<F: Field>(
    verts: &[Point<F>],
    tight: &[BTreeSet<usize>],
    face: &[usize],
    k: usize,
) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for t in tight {
        let sub: Vec<usize> = face.iter().copied().filter(|i| t.contains(i)).collect();
        if sub.len() < k || sub.len() == face.len() || sub.contains(&apex) {
            continue;
        }
        let pts: Vec<&[F]> = sub.iter().map(|&i| verts[i].coords.as_slice()).collect();
        if affine_dim(&pts) == Some(k - 1) {
            facets.insert(sub);
        }
    }
    let mut out = Vec::new();
    for facet in &facets {
        for mut s in triangulate(verts, tight, facet, k - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LinearInequality;
    use crate::oracles::polytope_volume;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn poly(d: usize, spec: &[(&[i64], i64)]) -> HPolyhedron {
        HPolyhedron::new(d, spec.iter().map(|(a, b)| LinearInequality::le(a, *b).unwrap()).collect()).unwrap()
    }

    #[test]
    fn unit_square_and_simplices() {
        let sq = HPolyhedron::integer_box(&[0, 0], &[1, 1]).unwrap();
        assert_eq!(polytope_volume::<Q>(&sq).unwrap(), q(1, 1));
        let simplex = poly(3, &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0), (&[1, 1, 1], 1)]);
        assert_eq!(polytope_volume::<Q>(&simplex).unwrap(), q(1, 6));
        // Triangle (0,0),(2,0),(0,2): half of base times height, 2·2/2.
        let tri = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 2)]);
        let cross = q(2, 1) * q(2, 1) / q(2, 1);
        assert_eq!(polytope_volume::<Q>(&tri).unwrap(), cross);
    }

    #[test]
    fn degenerate_inputs() {
        let flat = poly(2, &[(&[1, 0], 0), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)]);
        assert_eq!(polytope_volume::<Q>(&flat).unwrap(), q(0, 1));
        let empty = poly(1, &[(&[1], 0), (&[-1], -1)]);
        assert_eq!(polytope_volume::<Q>(&empty).unwrap(), q(0, 1));
        let half = poly(1, &[(&[1], 0)]);
        assert!(matches!(polytope_volume::<Q>(&half), Err(Error::UnboundedPolytope)));
    }

    #[test]
    fn octahedron_and_cross_polytope() {
        // |x|+|y|+|z| ≤ 1 has volume 4/3.
        let mut rows = Vec::new();
        for sx in [-1, 1] {
            for sy in [-1, 1] {
                for sz in [-1, 1] {
                    rows.push(LinearInequality::le(&[sx, sy, sz], 1).unwrap());
                }
            }
        }
        let oct = HPolyhedron::new(3, rows).unwrap();
        assert_eq!(polytope_volume::<Q>(&oct).unwrap(), q(4, 3));
    }

    #[test]
    fn small_field_backend_agrees() {
        let tri = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 2)]);
        let v: num_rational::Rational64 = polytope_volume(&tri).unwrap();
        assert_eq!(v, num_rational::Rational64::from_integer(2));
    }

    fn translate(p: &HPolyhedron, t: &[i64]) -> HPolyhedron {
        let rows = p
            .rows()
            .iter()
            .map(|r| {
                let shift: num_bigint::BigInt =
                    r.coeffs().iter().zip(t).map(|(a, ti)| a * ti).sum();
                LinearInequality::new(r.coeffs().to_vec(), r.bound() + shift, false).unwrap()
            })
            .collect();
        HPolyhedron::new(p.dim(), rows).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn box_volume_is_product_of_sides(
            lo in proptest::collection::vec(-5i64..5, 1..=4),
            widths in proptest::collection::vec(0i64..4, 4),
        ) {
            let hi: Vec<i64> = lo.iter().zip(&widths).map(|(l, w)| l + w).collect();
            let b = HPolyhedron::integer_box(&lo, &hi).unwrap();
            let expected: i64 = widths[..lo.len()].iter().product();
            prop_assert_eq!(polytope_volume::<Q>(&b).unwrap(), q(expected, 1));
        }

        #[test]
        fn volume_is_translation_invariant_and_additive(
            lo in proptest::collection::vec(-4i64..4, 2),
            widths in proptest::collection::vec(1i64..4, 2),
            cut in proptest::collection::vec(-3i64..=3, 2),
            cut_b in -6i64..6,
            t in proptest::collection::vec(-5i64..5, 2),
        ) {
            prop_assume!(cut.iter().any(|&c| c != 0));
            let hi: Vec<i64> = lo.iter().zip(&widths).map(|(l, w)| l + w).collect();
            let b = HPolyhedron::integer_box(&lo, &hi).unwrap();
            let whole = polytope_volume::<Q>(&b).unwrap();
            prop_assert_eq!(polytope_volume::<Q>(&translate(&b, &t)).unwrap(), whole.clone());

            let h = LinearInequality::le(&cut, cut_b).unwrap();
            let mut below = b.rows().to_vec();
            below.push(h.clone());
            let mut above = b.rows().to_vec();
            above.push(h.reversed_closed());
            let below = HPolyhedron::new(2, below).unwrap();
            let above = HPolyhedron::new(2, above).unwrap();
            let parts = polytope_volume::<Q>(&below).unwrap() + polytope_volume::<Q>(&above).unwrap();
            prop_assert_eq!(parts, whole.clone());
            prop_assert_eq!(polytope_volume::<Q>(&translate(&below, &t)).unwrap(), polytope_volume::<Q>(&below).unwrap());
        }
    }
}
