//! Exact two-phase tableau simplex over free variables, with Bland's rule.

use num_bigint::BigInt;
use num_traits::Signed;

use super::{LinearInequality, Point};
use crate::error::{Error, Result};
use crate::scalar::{dot, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<F> {
    Optimal { point: Point<F>, value: F },
    Infeasible,
    Unbounded,
}

impl<F> LpOutcome<F> {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

#[derive(Debug)]
pub(crate) enum RawOutcome<F> {
    Optimal(Vec<F>, F),
    Infeasible,
    Unbounded,
}

struct Tableau<F> {
    t: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<usize>,
}

impl<F: Field> Tableau<F> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        if !p.is_one() {
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
            self.rhs[r] = self.rhs[r].clone() / p;
        }
        let (pivot_row, pivot_rhs) = (self.t[r].clone(), self.rhs[r].clone());
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (v, pv) in self.t[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost·y` over columns `< ncols`. Returns `false` on unboundedness.
    fn optimize(&mut self, cost: &[F], ncols: usize) -> bool {
        loop {
            let cb: Vec<&F> = self.basis.iter().map(|&j| &cost[j]).collect();
            // Bland: lowest-index improving column enters.
            let entering = (0..ncols).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, row) in self.t.iter().enumerate() {
                    if !row[j].is_zero() && !cb[i].is_zero() {
                        r = r - cb[i].clone() * row[j].clone();
                    }
                }
                r.is_positive()
            });
            let Some(c) = entering else {
                return true;
            };
            // Ratio test; ties go to the lowest-index basic variable.
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / self.t[i][c].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    fn value_of(&self, col: usize) -> F {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|i| self.rhs[i].clone())
            .unwrap_or_else(F::zero)
    }
}

/// Maximizes `c·x` subject to `A x ≤ b` with every variable free.
pub(crate) fn maximize<F: Field>(a: &[Vec<F>], b: &[F], c: &[F]) -> RawOutcome<F> {
    let n = c.len();
    let m = a.len();
    let n_struct = 2 * n + m;
    let n_art = b.iter().filter(|v| v.is_negative()).count();
    let width = n_struct + n_art;

    let mut t = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n_struct;
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = vec![F::zero(); width];
        for j in 0..n {
            let v = if flip { -row[j].clone() } else { row[j].clone() };
            r[n + j] = -v.clone();
            r[j] = v;
        }
        r[2 * n + i] = if flip { -F::one() } else { F::one() };
        if flip {
            r[next_art] = F::one();
            basis.push(next_art);
            next_art += 1;
            rhs.push(-bi.clone());
        } else {
            basis.push(2 * n + i);
            rhs.push(bi.clone());
        }
        t.push(r);
    }
    let mut tab = Tableau { t, rhs, basis };

    if n_art > 0 {
        let mut cost = vec![F::zero(); width];
        for v in cost.iter_mut().skip(n_struct) {
            *v = -F::one();
        }
        tab.optimize(&cost, width);
        let infeasible = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .any(|(&j, v)| j >= n_struct && v.is_positive());
        if infeasible {
            return RawOutcome::Infeasible;
        }
        // Drive zero-level artificials out; rows with no structural entry are redundant.
        let mut redundant = Vec::new();
        for i in 0..tab.t.len() {
            if tab.basis[i] < n_struct {
                continue;
            }
            match (0..n_struct).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            tab.t.remove(i);
            tab.rhs.remove(i);
            tab.basis.remove(i);
        }
    }

    let mut cost = vec![F::zero(); width];
    for j in 0..n {
        cost[j] = c[j].clone();
        cost[n + j] = -c[j].clone();
    }
    if !tab.optimize(&cost, n_struct) {
        return RawOutcome::Unbounded;
    }
    let x: Vec<F> = (0..n).map(|j| tab.value_of(j) - tab.value_of(n + j)).collect();
    let value = x
        .iter()
        .zip(c)
        .fold(F::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    RawOutcome::Optimal(x, value)
}

fn check_dims(dim: usize, rows: &[LinearInequality]) -> Result<()> {
    match rows.iter().find(|r| r.dim() != dim) {
        Some(r) => Err(Error::DimensionMismatch { expected: dim, found: r.dim() }),
        None => Ok(()),
    }
}

fn to_field_rows<F: Field>(rows: &[LinearInequality]) -> (Vec<Vec<F>>, Vec<F>) {
    rows.iter()
        .map(|r| {
            (
                r.coeffs().iter().map(F::from_bigint).collect(),
                F::from_bigint(r.bound()),
            )
        })
        .unzip()
}

/// Exact LP optimum of `objective·x` over the closed rows.
pub fn solve_lp<F: Field>(
    rows: &[LinearInequality],
    objective: &[F],
    sense: Sense,
) -> Result<LpOutcome<F>> {
    check_dims(objective.len(), rows)?;
    if rows.iter().any(LinearInequality::is_strict) {
        return Err(Error::StrictRow);
    }
    Ok(solve_closed(rows, objective, sense))
}

/// [`solve_lp`] with strictness ignored and dimensions already checked.
pub(crate) fn solve_closed<F: Field>(
    rows: &[LinearInequality],
    objective: &[F],
    sense: Sense,
) -> LpOutcome<F> {
    let (a, b) = to_field_rows::<F>(rows);
    let c: Vec<F> = match sense {
        Sense::Maximize => objective.to_vec(),
        Sense::Minimize => objective.iter().map(|v| -v.clone()).collect(),
    };
    match maximize(&a, &b, &c) {
        RawOutcome::Optimal(x, v) => {
            for r in rows {
                assert!(
                    dot(r.coeffs(), &x) <= F::from_bigint(r.bound()),
                    "simplex returned an infeasible point"
                );
            }
            let value = if sense == Sense::Maximize { v } else { -v };
            LpOutcome::Optimal { point: Point::new(x), value }
        }
        RawOutcome::Infeasible => LpOutcome::Infeasible,
        RawOutcome::Unbounded => LpOutcome::Unbounded,
    }
}

/// A point strictly inside every row, or `None` when the open region is empty.
///
/// Solves `max δ` subject to `a_i·x + δ‖a_i‖₁ ≤ b_i` and `δ ≤ 1`; the open
/// region is nonempty exactly when the optimal `δ` is positive.
pub fn interior_point<F: Field>(dim: usize, rows: &[LinearInequality]) -> Result<Option<Point<F>>> {
    check_dims(dim, rows)?;
    Ok(interior_point_unchecked(dim, rows))
}

pub(crate) fn interior_point_unchecked<F: Field>(
    dim: usize,
    rows: &[LinearInequality],
) -> Option<Point<F>> {
    let mut a = Vec::with_capacity(rows.len() + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    for r in rows {
        let l1: BigInt = r.coeffs().iter().map(|v| v.abs()).sum();
        let mut row: Vec<F> = r.coeffs().iter().map(F::from_bigint).collect();
        row.push(F::from_bigint(&l1));
        a.push(row);
        b.push(F::from_bigint(r.bound()));
    }
    let mut cap = vec![F::zero(); dim];
    cap.push(F::one());
    a.push(cap);
    b.push(F::one());
    let mut c = vec![F::zero(); dim];
    c.push(F::one());
    match maximize(&a, &b, &c) {
        RawOutcome::Optimal(mut x, delta) if delta.is_positive() => {
            x.truncate(dim);
            let p = Point::new(x);
            debug_assert!(rows.iter().all(|r| dot(r.coeffs(), &p.coords) < F::from_bigint(r.bound())));
            Some(p)
        }
        RawOutcome::Optimal(..) => None,
        // δ is capped and free, so the slack LP is always feasible and bounded.
        other => unreachable!("max-slack LP returned {other:?}"),
    }
}

/// True iff the feasible set is bounded; the empty set counts as bounded.
pub fn is_bounded<F: Field>(dim: usize, rows: &[LinearInequality]) -> Result<bool> {
    check_dims(dim, rows)?;
    Ok(is_bounded_unchecked::<F>(dim, rows))
}

pub(crate) fn is_bounded_unchecked<F: Field>(dim: usize, rows: &[LinearInequality]) -> bool {
    for k in 0..dim {
        let mut e = vec![F::zero(); dim];
        e[k] = F::one();
        for sense in [Sense::Maximize, Sense::Minimize] {
            match solve_closed(rows, &e, sense) {
                LpOutcome::Infeasible => return true,
                LpOutcome::Unbounded => return false,
                LpOutcome::Optimal { .. } => {}
            }
        }
    }
    true
}

/// LP range of `objective·x` over the rows: `(min, max)`, each `None` when unbounded.
/// Returns `None` overall when the rows are infeasible.
pub(crate) fn range_of<F: Field>(
    rows: &[LinearInequality],
    objective: &[F],
) -> Option<(Option<F>, Option<F>)> {
    let lo = match solve_closed(rows, objective, Sense::Minimize) {
        LpOutcome::Infeasible => return None,
        LpOutcome::Unbounded => None,
        LpOutcome::Optimal { value, .. } => Some(value),
    };
    let hi = match solve_closed(rows, objective, Sense::Maximize) {
        LpOutcome::Infeasible => return None,
        LpOutcome::Unbounded => None,
        LpOutcome::Optimal { value, .. } => Some(value),
    };
    Some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Rational64};

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn rows(spec: &[(&[i64], i64)]) -> Vec<LinearInequality> {
        spec.iter().map(|(a, b)| LinearInequality::le(a, *b).unwrap()).collect()
    }

    fn unit_square() -> Vec<LinearInequality> {
        rows(&[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)])
    }

    #[test]
    fn lp_examples() {
        let interval = rows(&[(&[1], 1), (&[-1], 0)]);
        assert_eq!(
            solve_lp(&interval, &[q(1, 1)], Sense::Maximize).unwrap(),
            LpOutcome::Optimal { point: Point::new(vec![q(1, 1)]), value: q(1, 1) }
        );
        let ray = rows(&[(&[-1], 0)]);
        assert_eq!(solve_lp(&ray, &[q(1, 1)], Sense::Maximize).unwrap(), LpOutcome::Unbounded);
        let empty = rows(&[(&[1], 0), (&[-1], -1)]);
        assert_eq!(solve_lp(&empty, &[q(1, 1)], Sense::Maximize).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn lp_rejects_strict_rows() {
        let r = vec![LinearInequality::lt(&[1], 1).unwrap()];
        assert!(matches!(solve_lp(&r, &[q(1, 1)], Sense::Maximize), Err(Error::StrictRow)));
    }

    #[test]
    fn lp_minimize_and_degenerate() {
        // Degenerate vertex at the origin: three rows tight.
        let r = rows(&[(&[-1, 0], 0), (&[0, -1], 0), (&[-1, -1], 0), (&[1, 1], 4)]);
        match solve_lp(&r, &[q(1, 2), q(1, 1)], Sense::Minimize).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(0, 1)),
            other => panic!("{other:?}"),
        }
        match solve_lp(&r, &[q(1, 2), q(1, 1)], Sense::Maximize).unwrap() {
            LpOutcome::Optimal { point, value } => {
                assert_eq!(value, q(4, 1));
                assert_eq!(point.coords, vec![q(0, 1), q(4, 1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interior_point_examples() {
        let p: Point<Q> = interior_point(2, &unit_square()).unwrap().unwrap();
        assert_eq!(p.coords, vec![q(1, 2), q(1, 2)]);
        let empty = rows(&[(&[1], 0), (&[-1], -1)]);
        assert!(interior_point::<Q>(1, &empty).unwrap().is_none());
        let half = rows(&[(&[1], 0)]);
        let p: Point<Q> = interior_point(1, &half).unwrap().unwrap();
        assert_eq!(p.coords, vec![q(-1, 1)]);
    }

    #[test]
    fn interior_point_none_for_flat_sets() {
        // x = 0 as two closed rows has no interior.
        let flat = rows(&[(&[1, 0], 0), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 1)]);
        assert!(interior_point::<Q>(2, &flat).unwrap().is_none());
        let whole: Point<Q> = interior_point(3, &[]).unwrap().unwrap();
        assert_eq!(whole.dim(), 3);
    }

    #[test]
    fn boundedness_examples() {
        let cube = rows(&[
            (&[1, 0, 0], 1), (&[-1, 0, 0], 0),
            (&[0, 1, 0], 1), (&[0, -1, 0], 0),
            (&[0, 0, 1], 1), (&[0, 0, -1], 0),
        ]);
        assert!(is_bounded::<Q>(3, &cube).unwrap());
        assert!(!is_bounded::<Q>(1, &rows(&[(&[1], 0)])).unwrap());
        assert!(is_bounded::<Q>(1, &rows(&[(&[1], 0), (&[-1], -1)])).unwrap());
    }

    #[test]
    fn small_field_agrees() {
        let p: Point<Rational64> = interior_point(2, &unit_square()).unwrap().unwrap();
        assert_eq!(p.coords, vec![Rational64::new(1, 2), Rational64::new(1, 2)]);
    }

    #[test]
    fn range_of_strip() {
        let strip = rows(&[(&[1, 1], 3), (&[-1, -1], 1)]);
        let (lo, hi) = range_of::<Q>(&strip, &[q(1, 1), q(1, 1)]).unwrap();
        assert_eq!((lo, hi), (Some(q(-1, 1)), Some(q(3, 1))));
        let (lo, hi) = range_of::<Q>(&strip, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!((lo, hi), (None, None));
    }
}
