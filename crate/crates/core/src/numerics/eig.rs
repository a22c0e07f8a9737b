//! General complex eigensolver: Householder reduction to upper Hessenberg
//! form, implicit single-shift QR sweeps with Givens rotations down to a
//! complex Schur form `A = Z T Z†`, then back substitution on `T` for the
//! eigenvectors.

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues (with multiplicity) and unit-norm eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.rows()).map(|r| self.vectors[(r, k)]).collect()
    }
}

const SWEEPS_PER_EIGENVALUE: usize = 60;

pub fn eig(a: &CMatrix) -> Result<Eigen> {
    let n = a.ensure_square()?;
    let (mut t, mut z) = hessenberg(a);
    schur(&mut t, &mut z)?;
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let vectors = schur_vectors(&t, &z);
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    a.ensure_square()?;
    let (mut t, mut z) = hessenberg(a);
    schur(&mut t, &mut z)?;
    Ok((0..a.rows()).map(|k| t[(k, k)]).collect())
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|r| h[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|r| h[(r, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vn);
        // H <- (I - 2vv†) H
        for c in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, c)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= vi * dot * 2.0;
            }
        }
        // H <- H (I - 2vv†), Q <- Q (I - 2vv†)
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(i, vi)| m[(r, k + 1 + i)] * vi).sum();
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= dot * vi.conj() * 2.0;
                }
            }
        }
        for r in k + 2..n {
            h[(r, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens pair `(c, s)` with `G = [[c, s], [-s̄, c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    if norm == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, ONE);
    }
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn rotate_rows(m: &mut CMatrix, k: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(m: &mut CMatrix, k: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + b * s.conj();
        m[(i, k + 1)] = -a * s + b * c;
    }
}

fn schur(h: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    let budget = SWEEPS_PER_EIGENVALUE * n;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence(budget));
        }
        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let start = if k > lo { k - 1 } else { k };
            rotate_rows(h, k, c, s, start..n);
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(z, k, c, s, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for r in 1..n {
        for c in 0..r {
            h[(r, c)] = ZERO;
        }
    }
    Ok(())
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = (a + d) * 0.5 + disc;
    let l2 = (a + d) * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur_vectors(t: &CMatrix, z: &CMatrix) -> CMatrix {
    let n = t.rows();
    let small = (f64::EPSILON * t.frobenius_norm()).max(f64::MIN_POSITIVE);
    let mut vecs = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for j in (0..k).rev() {
            let acc: C64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
            let mut den = t[(j, j)] - lambda;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            y[j] = -acc / den;
        }
        let v = z.mul_vec(&y);
        let norm = v.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        for (r, x) in v.iter().enumerate() {
            vecs[(r, k)] = x / norm;
        }
    }
    vecs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, random_matrix, seeded};

    fn residuals(a: &CMatrix, e: &Eigen) -> f64 {
        (0..a.rows())
            .map(|k| {
                let v = e.vector(k);
                let av = a.mul_vec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - e.values[k] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    fn sorted_re(v: &[C64]) -> Vec<f64> {
        let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn diagonal_matrix() {
        let a = CMatrix::diag(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        let e = eig(&a).unwrap();
        assert_eq!(sorted_re(&e.values), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let a = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = eig(&a).unwrap();
        let v = sorted_re(&e.values);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert!(residuals(&a, &e) < 1e-14);
    }

    #[test]
    fn random_general_residuals() {
        let mut rng = seeded(3);
        for n in [1, 2, 5, 8, 16] {
            let a = random_matrix(n, &mut rng);
            let e = eig(&a).unwrap();
            assert!(residuals(&a, &e) <= 1e-9 * a.frobenius_norm(), "n = {n}");
        }
    }

    #[test]
    fn degenerate_hermitian() {
        let mut rng = seeded(9);
        let h = random_hermitian(3, &mut rng);
        let big = h.kron(&CMatrix::identity(3));
        let e = eig(&big).unwrap();
        assert!(residuals(&big, &e) <= 1e-9 * big.frobenius_norm());
    }

    #[test]
    fn jordan_block_converges() {
        let a = CMatrix::from_real(3, 3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
        let vals = eigenvalues(&a).unwrap();
        assert!(vals.iter().all(|v| (v - C64::new(2.0, 0.0)).norm() < 1e-12));
    }
}
