//! SVG pictures of planar circuits: the arrangement lines clipped to a box and
//! one filled polygon per cell of the region.

use std::cmp::Ordering;
use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arrangement::Arrangement;
use crate::circuit::PolyhedraCircuit;
use crate::error::{Error, Result};
use crate::geometry::vertices::vertices_unchecked;
use crate::geometry::{normalize_hyperplane, LinearInequality, Point};

type Q = BigRational;

/// SVG units per coordinate unit.
const SCALE: i64 = 64;

/// Renders the region of a 2-dimensional circuit inside `lo ≤ x ≤ hi`.
pub fn render_svg(c: &PolyhedraCircuit, lo: &[Q], hi: &[Q], cell_cap: usize) -> Result<String> {
    if c.dim() != 2 {
        return Err(Error::Unsupported("render requires dim 2".into()));
    }
    if lo.len() != 2 || hi.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: lo.len().min(hi.len()) });
    }
    if lo.iter().zip(hi).any(|(l, h)| l >= h) {
        return Err(Error::InvalidParams("empty bounding box".into()));
    }
    let bbox = box_rows(lo, hi);
    let canon = c.canonicalize_for_volume();
    let line_keys = canon.leaves().map(|l| Ok(normalize_hyperplane(l)?.key)).collect::<Result<Vec<_>>>()?;
    let clipped = canon.clipped(lo, hi)?;
    let arr = Arrangement::new(2, &clipped.leaves().cloned().collect::<Vec<_>>())?;
    let (cells, _) = arr.decompose_interior::<Q>(cell_cap)?;

    let sx = |x: &Q| coord(&((x - &lo[0]) * Q::from_integer(SCALE.into())));
    let sy = |y: &Q| coord(&((&hi[1] - y) * Q::from_integer(SCALE.into())));
    let width = coord(&((&hi[0] - &lo[0]) * Q::from_integer(SCALE.into())));
    let height = coord(&((&hi[1] - &lo[1]) * Q::from_integer(SCALE.into())));

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, r##"<rect class="bbox" x="0" y="0" width="{width}" height="{height}" fill="none" stroke="#999"/>"##).unwrap();

    out.push_str("<g class=\"lines\" stroke=\"#333\" stroke-width=\"1\">\n");
    let mut drawn = std::collections::BTreeSet::new();
    for key in &line_keys {
        if !drawn.insert(key.clone()) {
            continue;
        }
        let mut rows = bbox.clone();
        rows.push(key.le_row());
        rows.push(key.ge_row());
        let ends: Vec<Point<Q>> = vertices_unchecked(2, &rows);
        if let [a, b] = ends.as_slice() {
            writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                sx(&a.coords[0]),
                sy(&a.coords[1]),
                sx(&b.coords[0]),
                sy(&b.coords[1])
            )
            .unwrap();
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"cells\" fill=\"#4a7fc1\" fill-opacity=\"0.6\" stroke=\"none\">\n");
    for cell in &cells {
        if !clipped.contains(&cell.interior_witness)? {
            continue;
        }
        let verts = counterclockwise(vertices_unchecked(2, cell.closed_rep.rows()));
        let points: Vec<String> = verts.iter().map(|v| format!("{},{}", sx(&v.coords[0]), sy(&v.coords[1]))).collect();
        writeln!(out, r#"<polygon data-signs="{}" points="{}"/>"#, cell.signs, points.join(" ")).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn box_rows(lo: &[Q], hi: &[Q]) -> Vec<LinearInequality> {
    let mut rows = Vec::new();
    for k in 0..lo.len() {
        for (bound, sign) in [(&hi[k], 1i64), (&lo[k], -1i64)] {
            let mut a = vec![BigInt::zero(); lo.len()];
            a[k] = bound.denom() * sign;
            rows.push(LinearInequality::new(a, bound.numer() * sign, false).expect("nonzero row"));
        }
    }
    rows
}

/// Vertices of a convex polygon in counterclockwise order, compared exactly.
fn counterclockwise(verts: Vec<Point<Q>>) -> Vec<Point<Q>> {
    if verts.is_empty() {
        return verts;
    }
    let n = Q::from_integer(verts.len().into());
    let cx = verts.iter().map(|v| v.coords[0].clone()).sum::<Q>() / &n;
    let cy = verts.iter().map(|v| v.coords[1].clone()).sum::<Q>() / &n;
    let rel = |v: &Point<Q>| (&v.coords[0] - &cx, &v.coords[1] - &cy);
    let upper = |(x, y): &(Q, Q)| y.is_positive() || (y.is_zero() && x.is_positive());
    let mut sorted = verts;
    sorted.sort_by(|a, b| {
        let (u, v) = (rel(a), rel(b));
        match (upper(&u), upper(&v)) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => {
                let cross = &u.0 * &v.1 - &u.1 * &v.0;
                Q::zero().cmp(&cross)
            }
        }
    });
    sorted
}

/// Truncates toward zero at six decimals and drops trailing zeros.
fn coord(v: &Q) -> String {
    let scaled = (v * Q::from_integer(1_000_000.into())).trunc().to_integer();
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = format!("{digits:0>7}");
    let (int_part, frac_part) = digits.split_at(digits.len() - 6);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}
