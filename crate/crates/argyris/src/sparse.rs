//! Compressed sparse row matrices with deterministic assembly.
//!
//! Triplet accumulation sorts by (row, col) with a stable sort and sums in
//! that order, so repeated assembly of the same mesh produces bit-identical
//! matrices.

use std::fmt;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

#[derive(Debug)]
pub enum SparseError {
    ShapeMismatch(&'static str),
    Io(std::io::Error),
}

impl fmt::Display for SparseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SparseError::ShapeMismatch(what) => write!(f, "shape mismatch: {what}"),
            SparseError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for SparseError {}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    /// Build from triplets; duplicate entries are summed in (row, col,
    /// insertion) order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &mut Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut it = triplets.iter().peekable();
        while let Some(&(r, c, v)) = it.next() {
            let mut sum = v;
            while let Some(&&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    sum += v2;
                    it.next();
                } else {
                    break;
                }
            }
            indices.push(c);
            data.push(sum);
            indptr[r as usize + 1] += 1;
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.data[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c as usize];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// y += A^T x without forming the transpose.
    pub fn matvec_transpose_add(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let xi = x[i];
            for (c, v) in cols.iter().zip(vals) {
                y[*c as usize] += v * xi;
            }
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                triplets.push((*c, i as u32, *v));
            }
        }
        CsrMatrix::from_triplets(self.ncols, self.nrows, &mut triplets)
    }

    /// Sparse product self * other.
    pub fn spgemm(&self, other: &CsrMatrix) -> Result<CsrMatrix, SparseError> {
        if self.ncols != other.nrows {
            return Err(SparseError::ShapeMismatch("spgemm inner dimensions"));
        }
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices: Vec<u32> = Vec::new();
        let mut data: Vec<f64> = Vec::new();
        let mut marker = vec![usize::MAX; other.ncols];
        let mut accum = vec![0.0f64; other.ncols];
        let mut row_cols: Vec<u32> = Vec::new();
        for i in 0..self.nrows {
            row_cols.clear();
            let (acols, avals) = self.row(i);
            for (ac, av) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(*ac as usize);
                for (bc, bv) in bcols.iter().zip(bvals) {
                    let j = *bc as usize;
                    if marker[j] != i {
                        marker[j] = i;
                        accum[j] = 0.0;
                        row_cols.push(*bc);
                    }
                    accum[j] += av * bv;
                }
            }
            row_cols.sort_unstable();
            for &c in row_cols.iter() {
                indices.push(c);
                data.push(accum[c as usize]);
            }
            indptr[i + 1] = indices.len();
        }
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            indptr,
            indices,
            data,
        })
    }

    /// Keep the listed rows and columns (in the given order).
    pub fn restrict(&self, rows: &[u32], cols: &[u32]) -> CsrMatrix {
        let mut col_map = vec![u32::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old as usize] = new as u32;
        }
        let mut indptr = vec![0usize; rows.len() + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for (new_r, &old_r) in rows.iter().enumerate() {
            let (rcols, rvals) = self.row(old_r as usize);
            for (c, v) in rcols.iter().zip(rvals) {
                let nc = col_map[*c as usize];
                if nc != u32::MAX {
                    indices.push(nc);
                    data.push(*v);
                }
            }
            indptr[new_r + 1] = indices.len();
        }
        CsrMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            indptr,
            indices,
            data,
        }
    }

    /// Lower triangle (including diagonal) of the (idx, idx) submatrix.
    pub fn tril_submatrix(&self, idx: &[u32]) -> CsrMatrix {
        let mut pos = vec![u32::MAX; self.ncols.max(self.nrows)];
        for (new, &old) in idx.iter().enumerate() {
            pos[old as usize] = new as u32;
        }
        let mut indptr = vec![0usize; idx.len() + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for (new_r, &old_r) in idx.iter().enumerate() {
            let (rcols, rvals) = self.row(old_r as usize);
            for (c, v) in rcols.iter().zip(rvals) {
                let nc = pos[*c as usize];
                if nc != u32::MAX && nc as usize <= new_r {
                    indices.push(nc);
                    data.push(*v);
                }
            }
            indptr[new_r + 1] = indices.len();
        }
        CsrMatrix {
            nrows: idx.len(),
            ncols: idx.len(),
            indptr,
            indices,
            data,
        }
    }

    /// Solve L x = b in place for a lower-triangular matrix stored in CSR
    /// with sorted column indices per row (diagonal last).
    pub fn forward_substitute(&self, b: &mut [f64]) {
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc = b[i];
            let mut diag = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j == i {
                    diag = *v;
                } else {
                    acc -= v * b[j];
                }
            }
            debug_assert!(diag != 0.0, "zero diagonal in forward substitution");
            b[i] = acc / diag;
        }
    }

    /// Solve L^T x = b in place, with L as in [`Self::forward_substitute`].
    pub fn backward_substitute_transpose(&self, b: &mut [f64]) {
        for i in (0..self.nrows).rev() {
            let (cols, vals) = self.row(i);
            let mut diag = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                if *c as usize == i {
                    diag = *v;
                }
            }
            debug_assert!(diag != 0.0, "zero diagonal in backward substitution");
            b[i] /= diag;
            let bi = b[i];
            for (c, v) in cols.iter().zip(vals) {
                let j = *c as usize;
                if j < i {
                    b[j] -= v * bi;
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max |A - A^T| entrywise.
    pub fn asymmetry(&self) -> f64 {
        max_abs_diff(self, &self.transpose())
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[(i, *c as usize)] = *v;
            }
        }
        m
    }

    /// Coordinate text dump: `row col value` with 17 significant digits.
    pub fn dump_coordinate(&self, path: &Path) -> Result<(), SparseError> {
        let file = std::fs::File::create(path).map_err(SparseError::Io)?;
        let mut out = std::io::BufWriter::new(file);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:.16e}", i, c, v).map_err(SparseError::Io)?;
            }
        }
        Ok(())
    }
}

/// Entrywise max |a - b| over the union sparsity pattern.
pub fn max_abs_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    assert_eq!(a.nrows, b.nrows);
    assert_eq!(a.ncols, b.ncols);
    let mut dev = 0.0f64;
    for i in 0..a.nrows {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let (mut p, mut q) = (0, 0);
        while p < ac.len() || q < bc.len() {
            if q >= bc.len() || (p < ac.len() && ac[p] < bc[q]) {
                dev = dev.max(av[p].abs());
                p += 1;
            } else if p >= ac.len() || bc[q] < ac[p] {
                dev = dev.max(bv[q].abs());
                q += 1;
            } else {
                dev = dev.max((av[p] - bv[q]).abs());
                p += 1;
                q += 1;
            }
        }
    }
    dev
}
