//! Dense exact linear algebra over a [`Field`].

use crate::scalar::Field;

/// Row-reduces `m` in place and returns the rank.
pub fn rank<F: Field>(mut m: Vec<Vec<F>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in (r + 1)..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / pivot.clone();
            for j in c..cols {
                let v = m[r][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Solves the square system `m x = rhs`; `None` when `m` is singular.
pub fn solve<F: Field>(mut m: Vec<Vec<F>>, mut rhs: Vec<F>) -> Option<Vec<F>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        rhs.swap(c, p);
        let pivot = m[c][c].clone();
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / pivot.clone();
            for j in c..n {
                let v = m[c][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
            let v = rhs[c].clone() * f;
            rhs[i] = rhs[i].clone() - v;
        }
    }
    Some((0..n).map(|i| rhs[i].clone() / m[i][i].clone()).collect())
}

pub fn determinant<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut det = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return F::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det = det * pivot.clone();
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / pivot.clone();
            for j in c..n {
                let v = m[c][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
    }
    det
}

/// Affine dimension of a point set, `None` for the empty set.
pub fn affine_dim<F: Field>(points: &[&[F]]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    Some(rank(diffs))
}
