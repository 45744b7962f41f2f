//! Dense exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::polyring::rational::{lcm_of_denominators, Rational};

/// Clears denominators row by row; row scaling does not change rank or kernel.
fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = Rational::from_integer(lcm_of_denominators(row));
            row.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect()
}

/// Bareiss fraction-free elimination on an integer copy of the matrix.
/// Returns the echelon form and the pivot columns.
fn bareiss(rows: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut a = integer_rows(rows);
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    bareiss(rows).1.len()
}

/// Determinant of a square matrix via fraction-free elimination.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "square matrix required");
    if n == 0 {
        return Rational::one();
    }
    // undo the row scaling used to clear denominators
    let scale: Rational = rows
        .iter()
        .map(|row| Rational::from_integer(lcm_of_denominators(row)))
        .product();
    let mut a = integer_rows(rows);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    Rational::from_integer(sign * &a[n - 1][n - 1]) / scale
}

/// Reduced row echelon form over the rationals with pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of `{v : rows * v = 0}`, one vector per free column.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (a, pivots) = rref(rows);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(rows: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = rows.len();
    let augmented: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (a, pivots) = rref(&augmented);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Greedy choice of linearly independent columns, scanning in `order`.
pub fn independent_columns(rows: &[Vec<Rational>], order: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for c in order {
        let mut trial = chosen.clone();
        trial.push(c);
        let sub: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| trial.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if rank(&sub) == trial.len() {
            chosen = trial;
        }
    }
    chosen.sort_unstable();
    chosen
}
