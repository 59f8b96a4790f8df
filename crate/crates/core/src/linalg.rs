//! Exact linear algebra over the integers and rationals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numeric::BigRational;

/// Rank by Gaussian elimination over the rationals.
pub fn rank(matrix: &[Vec<BigInt>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = matrix
        .iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[rank][c];
                let pivot_row = rows[rank].clone();
                for (x, y) in rows[i][c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the square system `matrix · x = rhs` by fraction-free (Bareiss)
/// elimination followed by rational back substitution.
///
/// Returns `None` when the matrix is singular.
pub fn solve_square(matrix: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = matrix.len();
    assert_eq!(rhs.len(), n, "right-hand side length");
    assert!(matrix.iter().all(|r| r.len() == n), "matrix must be square");
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(a[i][i].clone());
    }
    Some(x)
}

/// `matrix · x - rhs`, exactly.
pub fn residual(matrix: &[Vec<BigInt>], x: &[BigRational], rhs: &[BigInt]) -> Vec<BigRational> {
    matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut acc = -BigRational::from_integer(b.clone());
            for (m, xv) in row.iter().zip(x) {
                acc += BigRational::from_integer(m.clone()) * xv;
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn solves_with_row_swaps() {
        let a = m(&[&[0, 2, 1], &[1, 1, 0], &[2, 0, 3]]);
        let b = v(&[3, 2, 5]);
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, vec![ratio(1, 1), ratio(1, 1), ratio(1, 1)]);
        assert!(residual(&a, &x, &b).iter().all(Zero::is_zero));
    }

    #[test]
    fn rational_solution() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let b = v(&[1, 0]);
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x, vec![ratio(3, 5), ratio(-1, 5)]);
    }

    #[test]
    fn singular_systems() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(solve_square(&a, &v(&[1, 2])).is_none());
        assert_eq!(rank(&a), 1);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[1, 0, 2], &[0, 1, 1], &[1, 1, 3]])), 2);
    }
}
