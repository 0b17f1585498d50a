//! Small dense complex matrices: row-pivoted elimination and determinants.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{ONE, ZERO};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy with the selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j));
            }
        }
        out
    }

    /// Copy with column `skip` removed.
    pub fn without_column(&self, skip: usize) -> Matrix {
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip).collect();
        self.select_columns(&cols)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Outcome of a pivoted solve: the solution and the smallest pivot seen.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<Complex64>,
    pub min_pivot: f64,
}

/// Solves `a x = b` by Gaussian elimination with partial (row) pivoting.
///
/// A pivot smaller than `rel_threshold * max|a_ij|` is reported as
/// [`Error::SingularSystem`].
pub fn solve(a: &Matrix, b: &[Complex64], rel_threshold: f64) -> Result<Solution> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "square system required");
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let threshold = rel_threshold * m.max_abs();
    let mut min_pivot = f64::INFINITY;

    for col in 0..n {
        let (piv_row, piv_mag) = (col..n)
            .map(|r| (r, m.get(r, col).norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_mag > threshold) {
            return Err(Error::SingularSystem {
                column: col,
                pivot: piv_mag,
                threshold,
            });
        }
        min_pivot = min_pivot.min(piv_mag);
        m.swap_rows(col, piv_row);
        rhs.swap(col, piv_row);

        let pivot = m.get(col, col);
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let v = m.get(r, j) - factor * m.get(col, j);
                m.set(r, j, v);
            }
            rhs[r] = rhs[r] - factor * rhs[col];
        }
    }

    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= m.get(i, j) * x[j];
        }
        x[i] = s / m.get(i, i);
    }
    Ok(Solution { x, min_pivot })
}

/// Determinant by row-pivoted elimination; exact zero pivots give 0.
pub fn determinant(a: &Matrix) -> Complex64 {
    let n = a.rows();
    assert_eq!(a.cols(), n, "square matrix required");
    if n == 0 {
        return ONE;
    }
    let mut m = a.clone();
    let mut det = ONE;
    for col in 0..n {
        let (piv_row, piv_mag) = (col..n)
            .map(|r| (r, m.get(r, col).norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_mag == 0.0 {
            return ZERO;
        }
        if piv_row != col {
            m.swap_rows(col, piv_row);
            det = -det;
        }
        let pivot = m.get(col, col);
        det *= pivot;
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            for j in col..n {
                let v = m.get(r, j) - factor * m.get(col, j);
                m.set(r, j, v);
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_with_pivoting() {
        // leading zero forces a row swap
        let a = Matrix::from_rows(vec![vec![ZERO, ONE], vec![c(2.0, 0.0), c(1.0, 1.0)]]);
        let x = solve(&a, &[c(3.0, 0.0), c(4.0, 0.0)], 1e-13).unwrap().x;
        assert!((x[1] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((x[0] - (c(4.0, 0.0) - c(3.0, 3.0)) / 2.0).norm() < 1e-15);
    }

    #[test]
    fn zero_matrix_is_singular() {
        let a = Matrix::zeros(2, 2);
        assert!(matches!(
            solve(&a, &[ONE, ONE], 1e-13),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn determinant_matches_closed_forms() {
        let (p, q, r, s) = (c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0), c(0.0, 4.0));
        let a = Matrix::from_rows(vec![vec![p, q], vec![r, s]]);
        assert!((determinant(&a) - (p * s - q * r)).norm() < 1e-14);
        assert_eq!(determinant(&Matrix::zeros(0, 0)), ONE);
        let dup = Matrix::from_rows(vec![vec![p, p], vec![r, r]]);
        assert!(determinant(&dup).norm() < 1e-14);
    }
}
