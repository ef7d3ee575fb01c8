//! Exact Gaussian elimination over `Scalar` matrices: rank, kernel bases,
//! and reduced row echelon form. Everything is fraction-exact; no floating
//! point anywhere.

use crate::exact_arith::{FieldId, Scalar};

#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    pub pivot_cols: Vec<usize>,
}

/// Reduced row echelon form. Column pivoting is deterministic: first nonzero
/// entry scanning rows top-down, columns left-right.
pub fn rref(field: FieldId, m: &[Vec<Scalar>]) -> Rref {
    let nrows = m.len();
    let ncols = if nrows > 0 { m[0].len() } else { 0 };
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].invert().unwrap();
        for j in c..ncols {
            a[r][j] = a[r][j].mul(&inv);
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    let t = a[r][j].mul(&f);
                    a[i][j] = a[i][j].sub(&t);
                }
                a[i][c] = Scalar::zero(field);
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    Rref { rows: a, pivot_cols }
}

pub fn rank(field: FieldId, m: &[Vec<Scalar>]) -> usize {
    rref(field, m).pivot_cols.len()
}

/// Basis of the right kernel {v : M v = 0}, one vector per free column.
pub fn kernel_basis(field: FieldId, m: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let red = rref(field, m);
    let pivot_set: Vec<usize> = red.pivot_cols.clone();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(field); ncols];
        v[free] = Scalar::one(field);
        for (ri, &pc) in pivot_set.iter().enumerate() {
            v[pc] = red.rows[ri][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Determinant by fraction-exact elimination.
pub fn det(field: FieldId, m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut acc = Scalar::one(field);
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Scalar::zero(field);
        };
        if pr != c {
            a.swap(c, pr);
            acc = acc.neg();
        }
        acc = acc.mul(&a[c][c]);
        let inv = a[c][c].invert().unwrap();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv);
            for j in c..n {
                let t = a[c][j].mul(&f);
                a[i][j] = a[i][j].sub(&t);
            }
        }
    }
    acc
}

/// Solve M x = b for square invertible M; None when singular.
pub fn solve(field: FieldId, m: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = m.len();
    let aug: Vec<Vec<Scalar>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref(field, &aug);
    if red.pivot_cols.len() != n || red.pivot_cols.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| red.rows[i][n].clone()).collect())
}

pub fn mat_vec(m: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            let mut acc = row[0].mul(&v[0]);
            for (a, b) in row.iter().zip(v).skip(1) {
                acc = acc.add(&a.mul(b));
            }
            acc
        })
        .collect()
}
