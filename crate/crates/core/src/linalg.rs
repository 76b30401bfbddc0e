//! Compressed sparse row storage and direct solvers.
//!
//! Factorizations are delegated to `faer`'s sparse Cholesky and LU. Every
//! solve checks the relative residual and applies a few steps of iterative
//! refinement before reporting failure.

use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};

use crate::error::{Error, Result};

pub const DEFAULT_SPD_TOL: f64 = 1e-12;
pub const DEFAULT_GENERAL_TOL: f64 = 1e-11;
const MAX_REFINEMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in entries {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut tmp: Vec<(usize, f64)> = vec![(0, 0.0); entries.len()];
        for &(r, c, v) in entries {
            tmp[cursor[r]] = (c, v);
            cursor[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        for r in 0..nrows {
            let row = &mut tmp[counts[r]..counts[r + 1]];
            row.sort_unstable_by_key(|e| e.0);
            let mut last = usize::MAX;
            for &(c, v) in row.iter() {
                if c == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                    last = c;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let entries: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &entries)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let entries: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, v)| (i, j, *v))
            })
            .collect();
        Self::from_triplets(nrows, ncols, &entries)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .cloned()
            .zip(self.values[range].iter().cloned())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `y += alpha * A x`.
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += alpha * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>();
        }
    }

    /// Extracts `A[rows, cols]`; `col_map[j]` is the new index of column `j`
    /// or `None` when the column is dropped.
    pub fn submatrix(&self, rows: &[usize], col_map: &[Option<usize>], ncols: usize) -> Self {
        let entries: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(ri, &r)| {
                self.row(r)
                    .filter_map(move |(c, v)| col_map[c].map(|cj| (ri, cj, v)))
            })
            .collect();
        Self::from_triplets(rows.len(), ncols, &entries)
    }

    pub fn max_asymmetry(&self) -> f64 {
        (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (v - self.get(j, i)).abs()))
            .fold(0.0, f64::max)
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let entries: Vec<_> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| Triplet::new(i, j, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &entries)
            .map_err(|e| Error::InvalidArgument(format!("sparse matrix creation failed: {e:?}")))
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut r = b.to_vec();
    a.matvec_add(-1.0, x, &mut r);
    let nb = norm2(b);
    let rel = if nb == 0.0 { norm2(&r) } else { norm2(&r) / nb };
    (r, rel)
}

enum Factor {
    Cholesky(Llt<usize, f64>),
    Lu(Lu<usize, f64>),
}

/// A reusable factorization together with the matrix it came from.
pub struct Factorization {
    matrix: CsrMatrix,
    factor: Factor,
    tol: f64,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.factor {
            Factor::Cholesky(_) => "cholesky",
            Factor::Lu(_) => "lu",
        };
        f.debug_struct("Factorization")
            .field("kind", &kind)
            .field("n", &self.matrix.nrows)
            .field("tol", &self.tol)
            .finish()
    }
}

impl Factorization {
    /// Sparse Cholesky; `a` must be symmetric positive definite.
    pub fn spd(a: CsrMatrix, tol: f64) -> Result<Self> {
        check_square(&a)?;
        let factor = a
            .to_faer()?
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::SolverFailure {
                message: format!("Cholesky factorization failed: {e:?}"),
                residual: f64::NAN,
            })?;
        Ok(Self {
            matrix: a,
            factor: Factor::Cholesky(factor),
            tol,
        })
    }

    /// Sparse LU with partial pivoting.
    pub fn general(a: CsrMatrix, tol: f64) -> Result<Self> {
        check_square(&a)?;
        let factor = a.to_faer()?.sp_lu().map_err(|e| Error::SolverFailure {
            message: format!("LU factorization failed: {e:?}"),
            residual: f64::NAN,
        })?;
        Ok(Self {
            matrix: a,
            factor: Factor::Lu(factor),
            tol,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        use faer::linalg::solvers::Solve;
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = match &self.factor {
            Factor::Cholesky(f) => f.solve(&rhs),
            Factor::Lu(f) => f.solve(&rhs),
        };
        (0..b.len()).map(|i| x[i]).collect()
    }

    /// Solves `A x = b` to the stored relative-residual tolerance.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.matrix.nrows {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.matrix.nrows
            )));
        }
        if b.iter().all(|v| *v == 0.0) {
            return Ok(vec![0.0; b.len()]);
        }
        let mut x = self.apply(b);
        let (mut r, mut rel) = relative_residual(&self.matrix, &x, b);
        let mut steps = 0;
        while !(rel <= self.tol) && steps < MAX_REFINEMENTS {
            let dx = self.apply(&r);
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
            (r, rel) = relative_residual(&self.matrix, &x, b);
            steps += 1;
        }
        if rel <= self.tol {
            Ok(x)
        } else {
            Err(Error::SolverFailure {
                message: format!("residual above tolerance {:e} after refinement", self.tol),
                residual: rel,
            })
        }
    }
}

fn check_square(a: &CsrMatrix) -> Result<()> {
    if a.nrows != a.ncols {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square, got {}×{}",
            a.nrows, a.ncols
        )));
    }
    Ok(())
}

/// Solves a symmetric positive-definite system.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    Factorization::spd(a.clone(), tol)?.solve(b)
}

/// Solves a general nonsingular sparse system.
pub fn solve_general(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    Factorization::general(a.clone(), tol)?.solve(b)
}
