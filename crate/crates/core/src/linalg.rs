//! Exact linear algebra over the rationals.
//!
//! Rank and determinant use fraction-free (Bareiss) elimination on integer
//! rows obtained by clearing denominators; kernels use rational RREF.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

pub type Vector = Vec<Rational>;

/// Scales a rational row to integers; returns the row and the multiplier.
fn integer_row(row: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    (ints, lcm)
}

/// Bareiss elimination in place. Returns (rank, sign of row permutation,
/// last pivot). For a square full-rank matrix the last pivot is `±det`.
fn bareiss(a: &mut [Vec<BigInt>], cols: usize) -> (usize, i32, BigInt) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut sign = 1;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = &row[j] * &pivot - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    (rank, sign, prev)
}

/// Rank of a matrix given by rows.
pub fn rank(rows: &[Vector]) -> usize {
    let Some(cols) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r).0).collect();
    bareiss(&mut a, cols).0
}

/// Determinant of a square matrix given by rows. The 0×0 determinant is 1.
pub fn determinant(rows: &[Vector]) -> Rational {
    let n = rows.len();
    if n == 0 {
        return Rational::one();
    }
    assert!(rows.iter().all(|r| r.len() == n), "determinant of non-square matrix");
    let mut scale = BigInt::one();
    let mut a = Vec::with_capacity(n);
    for r in rows {
        let (ints, m) = integer_row(r);
        scale *= m;
        a.push(ints);
    }
    let (rank, sign, last) = bareiss(&mut a, n);
    if rank < n {
        return Rational::zero();
    }
    let det = if sign < 0 { -last } else { last };
    Rational::new(det, scale)
}

/// Determinant of the matrix whose columns are the given vectors.
pub fn det_columns(cols: &[&Vector]) -> Rational {
    let n = cols.len();
    let rows: Vec<Vector> = (0..n)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    determinant(&rows)
}

/// Reduced row echelon form; returns the pivot columns.
fn rref(a: &mut [Vector], cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}` for `A` given by rows of length `cols`.
pub fn nullspace(rows: &[Vector], cols: usize) -> Vec<Vector> {
    let mut a: Vec<Vector> = rows.to_vec();
    let pivots = rref(&mut a, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

/// Basis of the linear functionals on `Q^dim` that vanish on every vector.
pub fn annihilator(vectors: &[&Vector], dim: usize) -> Vec<Vector> {
    let rows: Vec<Vector> = vectors.iter().map(|v| (*v).clone()).collect();
    nullspace(&rows, dim)
}

/// True when `v` lies in the span of `basis`.
pub fn in_span(basis: &[&Vector], v: &Vector) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let mut rows: Vec<Vector> = basis.iter().map(|b| (*b).clone()).collect();
    let before = rank(&rows);
    rows.push(v.clone());
    rank(&rows) == before
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales a nonzero vector so its entries are coprime integers with a
/// positive first nonzero entry.
pub fn primitive(v: &[Rational]) -> Vector {
    let (ints, _) = integer_row(v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let first_neg = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    ints.into_iter()
        .map(|x| {
            let y = x / &g;
            Rational::from_integer(if first_neg { -y } else { y })
        })
        .collect()
}
