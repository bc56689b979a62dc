//! Minimal complex CSR matrix for generator storage and matvecs.

use crate::error::{Error, Result};
use crate::C64;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use std::io::Write;

/// Coordinate-format accumulator; duplicates are summed on conversion.
#[derive(Clone, Debug, Default)]
pub struct Triplets {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl Triplets {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, val: C64) {
        if val != C64::from(0.0) {
            self.entries.push((row, col, val));
        }
    }

    pub fn into_csr(mut self) -> CsrMatrix {
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<C64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *data.last_mut().expect("entry exists") += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.dim {
            indptr[r + 1] += indptr[r];
        }
        let mut m = CsrMatrix {
            dim: self.dim,
            indptr,
            indices,
            data,
        };
        m.drop_zeros();
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<C64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    fn drop_zeros(&mut self) {
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.data[k] != C64::from(0.0) {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.data = data;
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let lo = self.indptr[row];
        let hi = self.indptr[row + 1];
        match self.indices[lo..hi].binary_search(&col) {
            Ok(k) => self.data[lo + k],
            Err(_) => C64::from(0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::from(0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::from(0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = A^H x`
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::from(0.0); self.dim];
        for (r, &xr) in x.iter().enumerate().take(self.dim) {
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.data[k].conj() * xr;
            }
        }
        y
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, C64>> {
        let trip: Vec<Triplet<usize, usize, C64>> = self
            .iter()
            .map(|(r, c, v)| Triplet { row: r, col: c, val: v })
            .collect();
        SparseColMat::try_new_from_triplets(self.dim, self.dim, &trip)
            .map_err(|e| Error::Eigen(format!("sparse conversion: {e:?}")))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| self.data[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sparse-triplet text export: `row,col,re,im` per line.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "row,col,re,im")?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{r},{c},{:?},{:?}", v.re, v.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = Triplets::new(3);
        t.push(0, 1, C64::new(1.0, 0.0));
        t.push(2, 0, C64::new(0.0, 2.0));
        t.push(0, 1, C64::new(0.5, 1.0));
        t.push(1, 1, C64::new(1.0, 0.0));
        t.push(1, 1, C64::new(-1.0, 0.0));
        let m = t.into_csr();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), C64::new(1.5, 1.0));
        let y = m.matvec(&[C64::from(1.0), C64::from(2.0), C64::from(3.0)]);
        assert_eq!(y[0], C64::new(3.0, 2.0));
        assert_eq!(y[2], C64::new(0.0, 2.0));
    }
}
