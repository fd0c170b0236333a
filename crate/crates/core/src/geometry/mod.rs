//! Exact half-space geometry: points, integer inequalities, H-polyhedra and
//! hyperplane normalization. The LP and vertex machinery live in submodules.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{dot, Field};

pub mod linalg;
pub mod lp;
pub mod vertices;

pub use lp::{interior_point, is_bounded, solve_lp, LpOutcome, Sense};
pub use vertices::enumerate_vertices;

/// A point of `F^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point<F> {
    pub coords: Vec<F>,
}

impl<F: Field> Point<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point { coords: coords.iter().map(|&c| F::from_i64(c)).collect() }
    }

    pub fn origin(dim: usize) -> Self {
        Point { coords: vec![F::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(Field::is_integral)
    }
}

impl<F: fmt::Display> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Exact position of a point relative to the hyperplane `a·x = b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignClass {
    SatisfiedStrictly,
    OnBoundary,
    Violated,
}

/// `a·x ≤ b` or, when `strict`, `a·x < b`, with integer data and `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearInequality {
    a: Vec<BigInt>,
    b: BigInt,
    strict: bool,
}

impl LinearInequality {
    pub fn new(a: Vec<BigInt>, b: BigInt, strict: bool) -> Result<Self> {
        if a.iter().all(Zero::is_zero) {
            return Err(Error::ZeroRow);
        }
        Ok(LinearInequality { a, b, strict })
    }

    pub fn le(a: &[i64], b: i64) -> Result<Self> {
        Self::new(a.iter().map(|&v| BigInt::from(v)).collect(), BigInt::from(b), false)
    }

    pub fn lt(a: &[i64], b: i64) -> Result<Self> {
        Self::new(a.iter().map(|&v| BigInt::from(v)).collect(), BigInt::from(b), true)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.a
    }

    pub fn bound(&self) -> &BigInt {
        &self.b
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found });
        }
        Ok(())
    }

    /// Side of the bounding hyperplane, ignoring strictness.
    pub fn eval_sign<F: Field>(&self, p: &Point<F>) -> Result<SignClass> {
        self.check_dim(p.dim())?;
        let lhs = dot(&self.a, &p.coords);
        let b = F::from_bigint(&self.b);
        Ok(match lhs.cmp(&b) {
            std::cmp::Ordering::Less => SignClass::SatisfiedStrictly,
            std::cmp::Ordering::Equal => SignClass::OnBoundary,
            std::cmp::Ordering::Greater => SignClass::Violated,
        })
    }

    /// Membership with strictness honored.
    pub fn holds<F: Field>(&self, p: &Point<F>) -> Result<bool> {
        Ok(match self.eval_sign(p)? {
            SignClass::SatisfiedStrictly => true,
            SignClass::OnBoundary => !self.strict,
            SignClass::Violated => false,
        })
    }

    pub fn closed(&self) -> Self {
        LinearInequality { strict: false, ..self.clone() }
    }

    pub fn with_strict(&self, strict: bool) -> Self {
        LinearInequality { strict, ..self.clone() }
    }

    /// Closed row selecting the same integer points: `a·x < b` becomes `a·x ≤ b - 1`.
    pub fn lattice_closed(&self) -> Self {
        if self.strict {
            LinearInequality { a: self.a.clone(), b: &self.b - 1, strict: false }
        } else {
            self.clone()
        }
    }

    /// The complementary half-space: `a·x ≤ b` becomes `-a·x < -b` and vice versa.
    pub fn negated(&self) -> Self {
        LinearInequality {
            a: self.a.iter().map(|v| -v).collect(),
            b: -&self.b,
            strict: !self.strict,
        }
    }

    /// The reversed closed row `-a·x ≤ -b`, i.e. `a·x ≥ b`.
    pub(crate) fn reversed_closed(&self) -> Self {
        LinearInequality { a: self.a.iter().map(|v| -v).collect(), b: -&self.b, strict: false }
    }

    pub(crate) fn raw(a: Vec<BigInt>, b: BigInt) -> Self {
        debug_assert!(a.iter().any(|v| !v.is_zero()));
        LinearInequality { a, b, strict: false }
    }
}

impl fmt::Display for LinearInequality {
    /// Prints in the circuit DSL term syntax: `2 x1 - 3 x2 <= 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                write!(f, "{c} x{}", i + 1)?;
                first = false;
            } else if c.is_negative() {
                write!(f, " - {} x{}", c.abs(), i + 1)?;
            } else {
                write!(f, " + {c} x{}", i + 1)?;
            }
        }
        let op = if self.strict { "<" } else { "<=" };
        write!(f, " {op} {}", self.b)
    }
}

/// Intersection of finitely many half-spaces in dimension `dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPolyhedron {
    dim: usize,
    rows: Vec<LinearInequality>,
}

impl HPolyhedron {
    pub fn new(dim: usize, rows: Vec<LinearInequality>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(HPolyhedron { dim, rows })
    }

    /// The closed axis-aligned box `lo ≤ x ≤ hi`.
    pub fn integer_box(lo: &[i64], hi: &[i64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let dim = lo.len();
        let mut rows = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![0i64; dim];
            e[k] = 1;
            rows.push(LinearInequality::le(&e, hi[k])?);
            e[k] = -1;
            rows.push(LinearInequality::le(&e, -lo[k])?);
        }
        Ok(HPolyhedron { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearInequality] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<LinearInequality> {
        self.rows
    }

    pub fn contains<F: Field>(&self, p: &Point<F>) -> Result<bool> {
        for row in &self.rows {
            if !row.holds(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn require_closed(&self) -> Result<()> {
        if self.rows.iter().any(LinearInequality::is_strict) {
            return Err(Error::StrictRow);
        }
        Ok(())
    }
}

/// Canonical representative of a hyperplane: `gcd(|a| ∪ {|b|}) = 1` and the
/// first nonzero entry of `a` positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperplaneKey {
    pub a: Vec<BigInt>,
    pub b: BigInt,
}

impl HyperplaneKey {
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Closed `a·x ≤ b`.
    pub fn le_row(&self) -> LinearInequality {
        LinearInequality::raw(self.a.clone(), self.b.clone())
    }

    /// Closed `a·x ≥ b`, the closure of the open side.
    pub fn ge_row(&self) -> LinearInequality {
        self.le_row().reversed_closed()
    }

    /// `a·x ≥ b + 1`, which selects exactly the integer points with `a·x > b`.
    pub fn gt_lattice_row(&self) -> LinearInequality {
        LinearInequality::raw(self.a.iter().map(|v| -v).collect(), -(&self.b + BigInt::one()))
    }

    pub fn side_of<F: Field>(&self, p: &Point<F>) -> Side {
        if dot(&self.a, &p.coords) <= F::from_bigint(&self.b) {
            Side::Le
        } else {
            Side::Gt
        }
    }
}

impl fmt::Display for HyperplaneKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.le_row())
    }
}

/// Which side of a normalized hyperplane: closed `a·x ≤ b` or open `a·x > b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Le,
    Gt,
}

impl Side {
    pub fn letter(self) -> char {
        match self {
            Side::Le => 'L',
            Side::Gt => 'G',
        }
    }
}

/// Normalized form of the row's bounding hyperplane.
///
/// `side` is the side of the key the original (non-strict) row selects: `Le`
/// when the row is `key.a·x ≤ key.b`, `Gt` when it is `key.a·x ≥ key.b`.
/// Strictness is returned separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedHyperplane {
    pub key: HyperplaneKey,
    pub side: Side,
    pub strict: bool,
}

pub fn normalize_hyperplane(ineq: &LinearInequality) -> Result<NormalizedHyperplane> {
    let first = ineq.a.iter().find(|v| !v.is_zero()).ok_or(Error::ZeroRow)?;
    let g = ineq.a.iter().fold(ineq.b.abs(), |g, v| g.gcd(v));
    let sign = if first.is_negative() { -BigInt::one() } else { BigInt::one() };
    let scale = &g * &sign;
    let key = HyperplaneKey {
        a: ineq.a.iter().map(|v| v / &scale).collect(),
        b: &ineq.b / &scale,
    };
    let side = if sign.is_negative() { Side::Gt } else { Side::Le };
    Ok(NormalizedHyperplane { key, side, strict: ineq.strict })
}
