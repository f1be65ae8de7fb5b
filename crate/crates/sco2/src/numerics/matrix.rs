//! Dense row-major matrix with the factorizations the rest of the crate needs.

use crate::error::NumericsError;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn column(entries: &[f64]) -> Self {
        Matrix::from_vec(entries.len(), 1, entries.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    /// x^T self (left multiply by a row vector).
    pub fn vecmat(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += xi * a;
            }
        }
        y
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Copies `block` into self with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Matrix {
        assert!(r0 + nrows <= self.rows && c0 + ncols <= self.cols);
        let mut out = Matrix::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    /// LU factorization with partial pivoting; solves self * X = B.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, NumericsError> {
        if !self.is_square() {
            return Err(NumericsError::Dimension {
                context: "solve requires a square matrix".into(),
            });
        }
        if rhs.rows != self.rows {
            return Err(NumericsError::Dimension {
                context: "rhs row count mismatch in solve".into(),
            });
        }
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            // pivot
            let mut pmax = lu[k * n + k].abs();
            let mut prow = k;
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > pmax {
                    pmax = v;
                    prow = i;
                }
            }
            if pmax < 1e-300 {
                return Err(NumericsError::Singular);
            }
            if prow != k {
                for j in 0..n {
                    lu.swap(k * n + j, prow * n + j);
                }
                piv.swap(k, prow);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        let mut out = Matrix::zeros(n, rhs.cols);
        let mut col = vec![0.0; n];
        for c in 0..rhs.cols {
            for i in 0..n {
                col[i] = rhs[(piv[i], c)];
            }
            // forward
            for i in 1..n {
                let mut acc = col[i];
                for j in 0..i {
                    acc -= lu[i * n + j] * col[j];
                }
                col[i] = acc;
            }
            // backward
            for i in (0..n).rev() {
                let mut acc = col[i];
                for j in (i + 1)..n {
                    acc -= lu[i * n + j] * col[j];
                }
                col[i] = acc / lu[i * n + i];
            }
            for i in 0..n {
                out[(i, c)] = col[i];
            }
        }
        Ok(out)
    }

    pub fn solve_vec(&self, rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
        let b = Matrix::column(rhs);
        let x = self.solve(&b)?;
        Ok(x.data)
    }

    /// Least-squares / minimum-norm solve via normal equations with Tikhonov
    /// fallback; used when the bordered target system is singular.
    pub fn solve_least_squares(&self, rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
        let at = self.transpose();
        let mut ata = &at * self;
        let reg = 1e-10 * (ata.norm_inf().max(1.0));
        for i in 0..ata.rows {
            ata[(i, i)] += reg;
        }
        let atb = at.matvec(rhs);
        ata.solve_vec(&atb)
    }

    /// Spectral radius estimate via Gelfand's formula, rho(A) =
    /// lim ||A^k||^(1/k), evaluated by repeated squaring with log-scale
    /// accumulation.
    pub fn spectral_radius_upper_bound(&self) -> f64 {
        assert!(self.is_square());
        let mut a = self.clone();
        let mut log_scale = 0.0f64;
        let mut power = 1.0f64;
        for _ in 0..6 {
            let norm = a.norm_inf();
            if norm == 0.0 {
                return 0.0;
            }
            log_scale += norm.ln() / power;
            a = a.scale(1.0 / norm);
            a = &a * &a;
            power *= 2.0;
        }
        let norm = a.norm_inf();
        if norm == 0.0 {
            return 0.0;
        }
        (log_scale + norm.ln() / power).exp()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = out.row_mut(i);
                for (o, r) in orow.iter_mut().zip(rrow) {
                    *o += aik * r;
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o += r;
        }
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(&rhs.data) {
            *o -= r;
        }
        out
    }
}
