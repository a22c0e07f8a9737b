//! Row-compressed complex matrices for the sparse generators that drive the
//! Dyson hierarchy.

use super::matrix::{CMatrix, C64, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    rows: usize,
    cols: usize,
    row_start: Vec<usize>,
    col_index: Vec<usize>,
    values: Vec<C64>,
}

impl Csr {
    pub fn from_dense(a: &CMatrix) -> Self {
        Self::from_triplets(a.rows(), a.cols(), (0..a.rows()).flat_map(|r| (0..a.cols()).map(move |c| (r, c, a[(r, c)]))))
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut per_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if v != ZERO {
                per_row[r].push((c, v));
            }
        }
        let mut row_start = Vec::with_capacity(rows + 1);
        let mut col_index = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for mut row in per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged.into_iter().filter(|&(_, v)| v != ZERO) {
                col_index.push(c);
                values.push(v);
            }
            row_start.push(col_index.len());
        }
        Self {
            rows,
            cols,
            row_start,
            col_index,
            values,
        }
    }

    /// `A ⊗ B*` for dense `A`, `B`, keeping only nonzero products.
    pub fn kron_conj(a: &CMatrix, b: &CMatrix) -> Self {
        let nz = |m: &CMatrix| -> Vec<(usize, usize, C64)> {
            (0..m.rows())
                .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
                .map(|(r, c)| (r, c, m[(r, c)]))
                .filter(|&(_, _, v)| v != ZERO)
                .collect()
        };
        let (na, nb) = (nz(a), nz(b));
        let (br, bc) = b.shape();
        let trip = na
            .iter()
            .flat_map(|&(i, j, x)| nb.iter().map(move |&(k, l, y)| (i * br + k, j * bc + l, x * y.conj())));
        Self::from_triplets(a.rows() * br, a.cols() * bc, trip)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `out += self · x`.
    pub fn mul_add(&self, x: &CMatrix, out: &mut CMatrix) {
        assert_eq!(self.cols, x.rows(), "sparse product inner dimension");
        assert_eq!(out.shape(), (self.rows, x.cols()), "sparse product output shape");
        let n = x.cols();
        let xs = x.as_slice();
        for r in 0..self.rows {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                let v = self.values[idx];
                let src = &xs[self.col_index[idx] * n..(self.col_index[idx] + 1) * n];
                for (j, s) in src.iter().enumerate() {
                    out[(r, j)] += v * s;
                }
            }
        }
    }

    pub fn mul(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, x.cols());
        self.mul_add(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for idx in self.row_start[r]..self.row_start[r + 1] {
                out[(r, self.col_index[idx])] = self.values[idx];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_matrix, seeded};

    #[test]
    fn product_matches_dense() {
        let mut rng = seeded(1);
        let mut a = random_matrix(6, &mut rng);
        for k in 0..6 {
            a[(k, (k + 2) % 6)] = ZERO;
        }
        let x = CMatrix::from_fn(6, 3, |r, c| C64::new(r as f64, c as f64 - 1.0));
        let s = Csr::from_dense(&a);
        assert_eq!(s.nnz(), 30);
        assert!((&s.mul(&x) - &a.matmul(&x)).frobenius_norm() < 1e-13);
        assert_eq!(s.to_dense(), a);
    }

    #[test]
    fn kron_conj_matches_dense() {
        let mut rng = seeded(2);
        let a = random_matrix(3, &mut rng);
        let mut b = CMatrix::unit(2, 0, 1);
        b[(1, 1)] = C64::new(0.5, -2.0);
        let s = Csr::kron_conj(&a, &b);
        assert!((&s.to_dense() - &a.kron(&b.conj())).frobenius_norm() < 1e-15);
    }

    #[test]
    fn duplicates_merge() {
        let one = C64::new(1.0, 0.0);
        let s = Csr::from_triplets(2, 2, [(0, 1, one), (0, 1, one), (1, 0, one), (1, 0, -one)]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.to_dense()[(0, 1)], one * 2.0);
    }
}
