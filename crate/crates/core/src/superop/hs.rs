use std::ops::{Add, Mul};

use crate::algebra::UnitaryFamily;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

/// Linear map on `d × d` operators, acting on row-stacked vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    dim: usize,
    matrix: CMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        matrix.ensure_shape(dim * dim, dim * dim, "superoperator")?;
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::identity(dim * dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hs_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        rho.ensure_shape(self.dim, self.dim, "operator")?;
        unvec(&self.matrix.mul_vec(rho.as_slice()))
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }
}

impl Add for &SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        SuperOp {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Mul for &SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: &SuperOp) -> SuperOp {
        self.compose(rhs)
    }
}

/// Row-stacking: entry `(m, n)` goes to slot `m·d + n`.
pub fn vec(x: &CMatrix) -> Result<Vec<C64>> {
    x.ensure_square()?;
    Ok(x.as_slice().to_vec())
}

pub fn unvec(v: &[C64]) -> Result<CMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() || d == 0 {
        return Err(Error::Dimension(format!("vector length {} is not a positive square", v.len())));
    }
    CMatrix::from_vec(d, d, v.to_vec())
}

/// `ρ ↦ x ρ y`, represented as `x ⊗ yᵀ`.
pub fn left_right_superop(x: &CMatrix, y: &CMatrix) -> Result<SuperOp> {
    let d = x.ensure_square()?;
    y.ensure_shape(d, d, "right factor")?;
    SuperOp::new(d, x.kron(&y.transpose()))
}

/// HS-space base vector for ancilla labels `(m, n; p, q)`: the map
/// `ρ ↦ (|m⟩⟨p| ⊗ U_mp) ρ (|q⟩⟨n| ⊗ U_qn)`, in composite ordering.
pub fn hs_base_vector(family: &UnitaryFamily, m: usize, n: usize, p: usize, q: usize) -> Result<SuperOp> {
    let d_a = family.d_a();
    let left = CMatrix::unit(d_a, m, p).kron(&family.edge_checked(m, p)?);
    let right = CMatrix::unit(d_a, q, n).kron(&family.edge_checked(q, n)?);
    left_right_superop(&left, &right)
}

/// Checks `B(mn,pq) · B(rs,tv) = δ_pr δ_qs B(mn,tv)` for one index tuple and
/// returns the Frobenius residual.
pub fn hs_basis_mult_residual(family: &UnitaryFamily, first: [usize; 4], second: [usize; 4]) -> Result<f64> {
    let [m, n, p, q] = first;
    let [r, s, t, v] = second;
    let a = hs_base_vector(family, m, n, p, q)?;
    let b = hs_base_vector(family, r, s, t, v)?;
    let prod = a.compose(&b);
    let expect = if p == r && q == s {
        hs_base_vector(family, m, n, t, v)?
    } else {
        SuperOp::zeros(a.dim())
    };
    Ok((prod.matrix() - expect.matrix()).frobenius_norm())
}

pub fn hs_basis_mult_check(family: &UnitaryFamily, first: [usize; 4], second: [usize; 4], tol: f64) -> Result<bool> {
    Ok(hs_basis_mult_residual(family, first, second)? <= tol)
}

/// `ρ ↦ P_i ρ P_i` with `P_i = |i⟩⟨i| ⊗ I_B`.
pub fn superprojector(d_a: usize, d_b: usize, i: usize) -> Result<SuperOp> {
    if i >= d_a {
        return Err(Error::IndexOutOfRange { what: "ancilla", index: i, bound: d_a });
    }
    let p = CMatrix::unit(d_a, i, i).kron(&CMatrix::identity(d_b));
    left_right_superop(&p, &p)
}

/// Composite-HS indices of the rows or columns spanning `|a⟩⟨a| ⊗ (·)`,
/// ordered by the row-stacked central index `j·d_B + k`.
pub(crate) fn ancilla_diagonal_slots(d_a: usize, d_b: usize, a: usize) -> Vec<usize> {
    let d = d_a * d_b;
    let mut out = Vec::with_capacity(d_b * d_b);
    for j in 0..d_b {
        for k in 0..d_b {
            out.push((a * d_b + j) * d + a * d_b + k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_matrix, random_unitary, seeded};

    #[test]
    fn vec_round_trip_and_basis() {
        let e = CMatrix::unit(3, 1, 2);
        let v = vec(&e).unwrap();
        assert_eq!(v.iter().position(|z| z.re == 1.0), Some(5));
        let mut rng = seeded(1);
        let x = random_matrix(3, &mut rng);
        assert_eq!(unvec(&vec(&x).unwrap()).unwrap(), x);
        assert!(unvec(&[C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn sandwich_matches_kron() {
        let mut rng = seeded(2);
        for _ in 0..10 {
            let x = random_matrix(4, &mut rng);
            let y = random_matrix(4, &mut rng);
            let rho = random_matrix(4, &mut rng);
            let s = left_right_superop(&x, &y).unwrap();
            let direct = x.matmul(&rho).matmul(&y);
            assert!((&s.apply(&rho).unwrap() - &direct).frobenius_norm() < 1e-12);
        }
        assert_eq!(left_right_superop(&CMatrix::identity(3), &CMatrix::identity(3)).unwrap(), SuperOp::identity(3));
    }

    #[test]
    fn projectors() {
        let p0 = superprojector(3, 2, 0).unwrap();
        let p1 = superprojector(3, 2, 1).unwrap();
        assert_eq!(p0.compose(&p0), p0);
        assert!(p0.compose(&p1).matrix().max_abs() == 0.0);
        let mut rng = seeded(3);
        let rho = random_matrix(6, &mut rng);
        let p = CMatrix::unit(3, 1, 1).kron(&CMatrix::identity(2));
        let direct = p.matmul(&rho).matmul(&p);
        assert!((&p1.apply(&rho).unwrap() - &direct).frobenius_norm() < 1e-15);
    }

    #[test]
    fn base_vector_multiplication_sample() {
        let mut rng = seeded(4);
        let f = UnitaryFamily::new(2, 2, vec![CMatrix::identity(2), random_unitary(2, &mut rng)], 0).unwrap();
        assert!(hs_basis_mult_check(&f, [0, 1, 1, 0], [1, 0, 0, 1], 1e-12).unwrap());
        assert!(hs_basis_mult_residual(&f, [0, 1, 1, 0], [0, 0, 0, 1]).unwrap() < 1e-12);
    }
}
