//! Compressed sparse row storage for the hot loops of the integrators.
//!
//! Operators are built and checked densely; the propagators convert them once
//! to CSR since the Rabi Hamiltonian has at most three non-zeros per row.
//! Dense operands are column-major `dim × dim` slices, matching `nalgebra`.

use nalgebra::DMatrix;

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    cols.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (k, v) in self.row(i) {
                acc += v * x[k];
            }
            *yi = acc;
        }
    }

    /// `out = A B` for a column-major square `B`.
    pub fn mul_dense(&self, b: &[C64], out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(b.len(), d * d);
        debug_assert_eq!(out.len(), d * d);
        for (bcol, ocol) in b.chunks_exact(d).zip(out.chunks_exact_mut(d)) {
            self.matvec(bcol, ocol);
        }
    }

    /// `out += scale · A B A†` for a column-major square `B`.
    pub fn sandwich_add(&self, b: &[C64], scale: f64, out: &mut [C64]) {
        let d = self.dim;
        for j in 0..d {
            for (l, w) in self.row(j) {
                let w = w.conj() * scale;
                let bcol = &b[l * d..(l + 1) * d];
                let ocol = &mut out[j * d..(j + 1) * d];
                for (i, oi) in ocol.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, v) in self.row(i) {
                        acc += v * bcol[k];
                    }
                    *oi += acc * w;
                }
            }
        }
    }
}
