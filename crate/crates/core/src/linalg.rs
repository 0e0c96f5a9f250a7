//! Exact dense linear algebra over Q(ζ_N): products, traces, ranks and
//! scalar-matrix tests. Rank is the payload of the dimension theorem, so
//! elimination uses exact zero tests; no numerical thresholds anywhere.

use std::sync::Arc;

use crate::cyclo::{CycloField, CycloNum};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<CycloNum>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycloNum) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<CycloNum>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{}x{} needs {} entries, got {}", rows, cols, rows * cols, entries.len())));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn identity(field: &Arc<CycloField>, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                CycloNum::one(field)
            } else {
                CycloNum::zero(field)
            }
        })
    }

    pub fn zero(field: &Arc<CycloField>, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| CycloNum::zero(field))
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNum {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycloNum) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[CycloNum] {
        &self.entries
    }

    pub fn mat_mul(&self, other: &Matrix) -> Result<Matrix, Error> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let field = self.entries[0].field().clone();
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = CycloNum::zero(&field);
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        }))
    }

    pub fn mat_add(&self, other: &Matrix) -> Result<Matrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in add".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(other.get(i, j))))
    }

    pub fn mat_sub(&self, other: &Matrix) -> Result<Matrix, Error> {
        self.mat_add(&other.scalar_mul(&CycloNum::from_int(&other.entries[0].field().clone(), -1)))
    }

    pub fn scalar_mul(&self, c: &CycloNum) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn trace(&self) -> Result<CycloNum, Error> {
        if self.rows != self.cols {
            return Err(Error::Dimension("trace of a non-square matrix".into()));
        }
        let field = self.entries[0].field().clone();
        let mut acc = CycloNum::zero(&field);
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        Ok(acc)
    }

    /// Exact rank by Gaussian elimination over the field, pivoting on the
    /// first nonzero entry of each column.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..work.cols {
            // find a pivot at or below `row`
            let pivot = (row..work.rows).find(|&r| !work.get(r, col).is_zero());
            let Some(p) = pivot else { continue };
            // swap rows p and row
            for j in 0..work.cols {
                let a = work.get(p, j).clone();
                let b = work.get(row, j).clone();
                work.set(p, j, b);
                work.set(row, j, a);
            }
            // cross-multiplied elimination: row_r ← pivot·row_r − factor·row_p
            // scales rows but preserves rank, and needs no field inversion
            let pivot = work.get(row, col).clone();
            for r in row + 1..work.rows {
                let factor = work.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..work.cols {
                    let v = work.get(r, j).mul(&pivot).sub(&factor.mul(work.get(row, j)));
                    work.set(r, j, v);
                }
            }
            rank += 1;
            row += 1;
            if row == work.rows {
                break;
            }
        }
        rank
    }

    /// The scalar λ when the matrix equals λ·I exactly; None otherwise.
    pub fn is_scalar(&self) -> Option<CycloNum> {
        if self.rows != self.cols || self.rows == 0 {
            return None;
        }
        let lambda = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected_scalar = i == j;
                let e = self.get(i, j);
                if expected_scalar && *e != lambda {
                    return None;
                }
                if !expected_scalar && !e.is_zero() {
                    return None;
                }
            }
        }
        Some(lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Rat;
    use num::BigInt;

    fn f12() -> Arc<CycloField> {
        CycloField::get(12)
    }

    fn from_ints(rows: usize, cols: usize, vals: &[i64]) -> Matrix {
        let field = f12();
        Matrix::from_fn(rows, cols, |i, j| CycloNum::from_int(&field, vals[i * cols + j]))
    }

    #[test]
    fn products_and_identity() {
        let field = f12();
        let id = Matrix::identity(&field, 3);
        assert_eq!(id.mat_mul(&id).unwrap(), id);
        let a = from_ints(2, 2, &[2, 0, 0, 3]);
        let b = from_ints(2, 2, &[5, 0, 0, 7]);
        assert_eq!(a.mat_mul(&b).unwrap(), from_ints(2, 2, &[10, 0, 0, 21]));
        let id2 = Matrix::identity(&field, 2);
        assert_eq!(a.mat_mul(&id2).unwrap(), a);
        assert!(a.mat_mul(&id).is_err());
    }

    #[test]
    fn trace_basics() {
        let field = f12();
        assert_eq!(Matrix::identity(&field, 3).trace().unwrap(), CycloNum::from_int(&field, 3));
        assert!(Matrix::zero(&field, 2, 2).trace().unwrap().is_zero());
        assert!(Matrix::zero(&field, 2, 3).trace().is_err());
        // trace(AB) = trace(BA)
        let a = from_ints(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let b = from_ints(3, 3, &[2, -1, 0, 3, 0, 5, 1, 1, -2]);
        assert_eq!(
            a.mat_mul(&b).unwrap().trace().unwrap(),
            b.mat_mul(&a).unwrap().trace().unwrap()
        );
    }

    #[test]
    fn ranks() {
        let field = f12();
        assert_eq!(Matrix::identity(&field, 4).rank(), 4);
        assert_eq!(from_ints(2, 2, &[1, 0, 0, 0]).rank(), 1);
        assert_eq!(from_ints(3, 3, &[1, 2, 3, 2, 4, 6, 1, 1, 1]).rank(), 2);
        // rank is stable under row permutation
        assert_eq!(from_ints(3, 3, &[1, 1, 1, 2, 4, 6, 1, 2, 3]).rank(), 2);
    }

    #[test]
    fn involution_projections() {
        // conjugated sign matrix: A = P D P^{-1} with D = diag(1, 1, -1)
        let field = f12();
        let p = from_ints(3, 3, &[1, 2, 0, 0, 1, 1, 1, 0, 1]);
        // inverse of p computed by hand times det; use rational entries instead
        let d = from_ints(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, -1]);
        // p is invertible (det = 3); build p_inv exactly via adjugate
        let third = CycloNum::from_rational(&field, Rat::new(BigInt::from(1), BigInt::from(3)));
        let adj = from_ints(3, 3, &[1, -2, 2, 1, 1, -1, -1, 2, 1]);
        let p_inv = adj.scalar_mul(&third);
        assert!(p.mat_mul(&p_inv).unwrap().is_scalar().unwrap().is_one());
        let a = p.mat_mul(&d).unwrap().mat_mul(&p_inv).unwrap();
        let id = Matrix::identity(&field, 3);
        assert!(a.mat_mul(&a).unwrap().is_scalar().unwrap().is_one());
        let plus = id.mat_add(&a).unwrap();
        let minus = id.mat_sub(&a).unwrap();
        assert_eq!(plus.rank() + minus.rank(), 3);
        assert_eq!(plus.rank(), 2);
        // (I+A)(I-A) = 0 exactly
        assert!(plus.mat_mul(&minus).unwrap().is_scalar().map_or(false, |z| z.is_zero()));
    }

    #[test]
    fn scalar_detection() {
        let field = f12();
        assert!(Matrix::identity(&field, 3).is_scalar().unwrap().is_one());
        assert!(from_ints(2, 2, &[1, 0, 0, 2]).is_scalar().is_none());
        let gamma = CycloNum::root_of_unity(&field, 5).add(&CycloNum::from_int(&field, 2));
        let g2 = gamma.mul(&gamma);
        let m = Matrix::identity(&field, 3).scalar_mul(&g2);
        assert_eq!(m.is_scalar().unwrap(), g2);
    }
}
