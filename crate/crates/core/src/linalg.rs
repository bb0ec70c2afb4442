//! Dense matrices over `GF(p^N)` and Gaussian elimination.
//!
//! Everything that compares subspaces goes through [`Matrix::rref`], so the
//! reduced row echelon form is the canonical representative of a row space.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};
use crate::poly::inv_mod_p;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: GaloisField,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Result of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    /// Every solution is `particular` plus a combination of `kernel` (rows in reduced echelon form).
    Solutions { particular: Vec<FieldElement>, kernel: Vec<Vec<FieldElement>> },
}

impl LinearSolution {
    pub fn unique(&self) -> Option<&[FieldElement]> {
        match self {
            LinearSolution::Solutions { particular, kernel } if kernel.is_empty() => Some(particular),
            _ => None,
        }
    }
}

impl Matrix {
    pub fn zeros(field: &GaloisField, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &GaloisField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &GaloisField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Builds a matrix from rows of equal length. `cols` is needed when `rows` is empty.
    pub fn from_rows(field: &GaloisField, cols: usize, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!("row of length {} in a {cols}-column matrix", row.len())));
            }
            if row.iter().any(|x| x.field() != field) {
                return Err(Error::FieldMismatch);
            }
            data.extend(row);
        }
        Ok(Matrix { field: field.clone(), rows: n, cols, data })
    }

    /// Columns given as vectors.
    pub fn from_columns(field: &GaloisField, rows: usize, columns: &[Vec<FieldElement>]) -> Self {
        Self::from_fn(field, rows, columns.len(), |r, c| columns[c][r].clone())
    }

    /// Lifts a matrix of prime-field residues.
    pub fn from_prime(field: &GaloisField, entries: &[Vec<u64>]) -> Self {
        let cols = entries.first().map_or(0, Vec::len);
        Self::from_fn(field, entries.len(), cols, |r, c| field.from_u64(entries[r][c]))
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + &(a * other.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![self.field.zero(); self.cols];
        for (r, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o += &(x * self.get(r, c));
            }
        }
        out
    }

    /// Applies `f` entrywise; the result lives over the field of `f`'s outputs.
    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        let data: Vec<FieldElement> = self.data.iter().map(f).collect();
        let field = data.first().map_or_else(|| self.field.clone(), |x| x.field().clone());
        Matrix { field, rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise `x -> x^(p^k)`.
    pub fn frobenius_pow(&self, k: i64) -> Matrix {
        self.map(|x| x.frobenius_pow(k))
    }

    /// Entries as prime-field residues, if they all lie in `F_p`.
    pub fn to_prime(&self) -> Option<Vec<Vec<u64>>> {
        (0..self.rows).map(|r| self.row(r).iter().map(FieldElement::as_prime).collect()).collect()
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form with zero rows removed, and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        m.data.truncate(pivots.len() * m.cols);
        m.rows = pivots.len();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.get(r, c).inv().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Self::from_fn(&self.field, n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c).clone()
            } else if c - n == r {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(&self.field, n, n, |r, c| red.get(r, n + c).clone()))
    }

    /// Right kernel `{x : A x = 0}`, as rows in reduced echelon form.
    pub fn kernel(&self) -> Vec<Vec<FieldElement>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vec<FieldElement>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -red.get(i, f);
                }
                v
            })
            .collect();
        canonical_rows(&self.field, self.cols, basis)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|r| self.row(r))).finish()
    }
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = a[0].field().zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// Reduced echelon basis of the span of `rows`.
pub fn canonical_rows(field: &GaloisField, cols: usize, rows: Vec<Vec<FieldElement>>) -> Vec<Vec<FieldElement>> {
    if rows.is_empty() {
        return rows;
    }
    let m = Matrix::from_rows(field, cols, rows).expect("rows of equal length");
    m.rref().0.row_vecs()
}

/// Solves `A x = b` exactly.
pub fn solve_linear(a: &Matrix, b: &[FieldElement]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(Error::InvalidInput("right-hand side length does not match the system".into()));
    }
    let n = a.cols();
    let aug = Matrix::from_fn(a.field(), a.rows(), n + 1, |r, c| if c < n { a.get(r, c).clone() } else { b[r].clone() });
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Ok(LinearSolution::Inconsistent);
    }
    let mut particular = vec![a.field().zero(); n];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = red.get(i, n).clone();
    }
    Ok(LinearSolution::Solutions { particular, kernel: a.kernel() })
}

/// Right kernel of a matrix over `F_p` given as residue rows, returned in reduced echelon form.
///
/// This is the prime-field fast path for large flattened systems.
pub fn kernel_mod_p(rows: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let pivots = rref_mod_p(&mut m, cols, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<u64>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[i][f]) % p;
            }
            v
        })
        .collect();
    let k = rref_mod_p(&mut basis, cols, p).len();
    basis.truncate(k);
    basis
}

/// In-place reduced row echelon form over `F_p`; returns pivot columns, nonzero rows first.
pub fn rref_mod_p(m: &mut [Vec<u64>], cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(pr) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod_p(m[r][c], p);
        for x in m[r][c..].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = (*x + (p - f) * y) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Determinant of a square matrix over `F_p`.
pub fn det_mod_p(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if pr != c {
            a.swap(pr, c);
            det = (p - det) % p;
        }
        det = det * a[c][c] % p;
        let inv = inv_mod_p(a[c][c], p);
        for i in c + 1..n {
            let f = a[i][c] * inv % p;
            if f == 0 {
                continue;
            }
            for j in c..n {
                a[i][j] = (a[i][j] + (p - f) * a[c][j]) % p;
            }
        }
    }
    det
}
