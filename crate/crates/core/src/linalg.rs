//! Exact sparse linear algebra over the rationals: ranks, kernels and
//! cohomology dimensions of matrix pairs.
//!
//! Matrices here are small dense-ish per-weight slices, so plain rational
//! Gaussian elimination with a deterministic pivot rule (smallest row index,
//! then smallest column index) is used throughout. No floating point, no
//! modular shortcuts: sign-sensitive `d^2 = 0` checks must be exact.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sparse matrix over exact rationals. No zero entry is ever stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zero(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, Scalar::from_int(v));
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Sets an entry; storing zero removes it.
    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.n_rows && col < self.n_cols, "index out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &Scalar) {
        let cur = self.get(row, col);
        self.set(row, col, &cur + value);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    /// First nonzero entry in (row, col) order, if any.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &Scalar)> {
        self.entries.iter().next().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zero(self.n_cols, self.n_rows);
        for (r, c, v) in self.iter() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        // index rhs by row for the sparse product
        let mut rhs_rows: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (r, c, v) in rhs.iter() {
            rhs_rows.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrix::zero(self.n_rows, rhs.n_cols);
        for (r, k, v) in self.iter() {
            if let Some(row) = rhs_rows.get(&k) {
                for (c, w) in row {
                    out.add_to(r, *c, &(v * w));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product (vector as a dense column).
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} cols, vector {}",
                self.n_cols,
                v.len()
            )));
        }
        let mut out = vec![Scalar::zero(); self.n_rows];
        for (r, c, coeff) in self.iter() {
            if !v[c].is_zero() {
                out[r] += coeff * &v[c];
            }
        }
        Ok(out)
    }

    /// Row echelon form with pivot columns, computed destructively on a dense
    /// working copy. Pivots are chosen deterministically: for each successive
    /// row, the smallest column index with a nonzero entry in or below it.
    fn echelon(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m: Vec<Vec<Scalar>> = (0..self.n_rows)
            .map(|_| vec![Scalar::zero(); self.n_cols])
            .collect();
        for (r, c, v) in self.iter() {
            m[r][c] = v.clone();
        }
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..self.n_cols {
            if row >= self.n_rows {
                break;
            }
            let Some(pivot_row) = (row..self.n_rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(row, pivot_row);
            let inv = m[row][col].recip();
            for j in col..self.n_cols {
                let v = &m[row][j] * &inv;
                m[row][j] = v;
            }
            for r in 0..self.n_rows {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for j in col..self.n_cols {
                        let v = &m[r][j] - &(&f * &m[row][j]);
                        m[r][j] = v;
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        (m, pivot_cols)
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// A basis of the exact kernel: `n_cols - rank` linearly independent
    /// vectors `v` with `m * v = 0`, in deterministic column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (m, pivot_cols) = self.echelon();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.n_cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        for free in 0..self.n_cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.n_cols];
            v[free] = Scalar::one();
            for (i, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -&m[i][free];
            }
            basis.push(v);
        }
        basis
    }
}

/// Dimension of `ker(d_out) / im(d_in)` for a composable pair with
/// `d_out * d_in = 0` (checked exactly; a nonzero composite signals an
/// upstream sign or construction bug and is reported with its first entry).
pub fn cohomology_dim(d_out: &SparseMatrix, d_in: &SparseMatrix) -> Result<usize> {
    if d_out.n_cols() != d_in.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "d_out is {}x{}, d_in is {}x{}",
            d_out.n_rows(),
            d_out.n_cols(),
            d_in.n_rows(),
            d_in.n_cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if let Some((r, c, v)) = comp.first_nonzero() {
        return Err(Error::CompositionNonzero {
            row: r.to_string(),
            col: c.to_string(),
            value: v.to_string(),
        });
    }
    let ker = d_out.n_cols() - d_out.rank();
    Ok(ker - d_in.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_trivial_cases() {
        assert_eq!(SparseMatrix::zero(3, 3).rank(), 0);
        assert_eq!(SparseMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn rank_hand_reduced() {
        // rows (1,2,3),(2,4,6),(0,1,1): second row is twice the first,
        // third is independent, so the rank is 2 by hand row-reduction.
        let m = SparseMatrix::from_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }

    #[test]
    fn kernel_trivial_cases() {
        assert!(SparseMatrix::identity(3).kernel_basis().is_empty());
        assert_eq!(SparseMatrix::zero(2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_single_relation() {
        // (1, 1) has kernel spanned by (1, -1)
        let m = SparseMatrix::from_rows(&[&[1, 1]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        assert!((&v[0] + &v[1]).is_zero());
        assert!(!v[0].is_zero());
        assert!(m.apply(v).unwrap().iter().all(Scalar::is_zero));
    }

    #[test]
    fn cohomology_dim_cases() {
        // d_in = 0 into a 5-dim space, d_out = 0: H = full space
        let dim5_in = SparseMatrix::zero(5, 0);
        let dim5_out = SparseMatrix::zero(0, 5);
        assert_eq!(cohomology_dim(&dim5_out, &dim5_in).unwrap(), 5);

        // exact complex: d_in = id, d_out = 0
        let id = SparseMatrix::identity(4);
        let out = SparseMatrix::zero(0, 4);
        assert_eq!(cohomology_dim(&out, &id).unwrap(), 0);

        // middle of 1 -> 2 -> 1 with ker = im = span(1,0)
        let d_in = SparseMatrix::from_rows(&[&[1], &[0]]);
        let d_out = SparseMatrix::from_rows(&[&[0, 1]]);
        assert_eq!(cohomology_dim(&d_out, &d_in).unwrap(), 0);
    }

    #[test]
    fn cohomology_rejects_nonzero_composition() {
        let d_in = SparseMatrix::identity(2);
        let d_out = SparseMatrix::identity(2);
        match cohomology_dim(&d_out, &d_in) {
            Err(Error::CompositionNonzero { .. }) => {}
            other => panic!("expected CompositionNonzero, got {other:?}"),
        }
    }

    #[test]
    fn mul_sparse() {
        let a = SparseMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        let b = SparseMatrix::from_rows(&[&[0, 1], &[1, 0]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, SparseMatrix::from_rows(&[&[2, 1], &[4, 3]]));
    }
}
