//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13, chosen from the 1-norm of the scaled argument.

use super::matrix::{CMatrix, C64};
use crate::error::Result;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539_398_330_063_23e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

/// Operations the Padé scaling-and-squaring driver needs. Implemented for
/// dense matrices and for structured block matrices elsewhere in the crate.
pub trait PadeOps: Clone {
    fn identity_like(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn add_scaled(&mut self, other: &Self, s: C64);
    fn scaled(&self, s: C64) -> Self;
    /// Any upper bound on the induced 1-norm.
    fn norm_bound(&self) -> f64;
    /// Solves `self · X = rhs`.
    fn solve_with(&self, rhs: &Self) -> Result<Self>;
}

impl PadeOps for CMatrix {
    fn identity_like(&self) -> Self {
        CMatrix::identity(self.rows())
    }
    fn mul(&self, other: &Self) -> Self {
        self.matmul(other)
    }
    fn add_scaled(&mut self, other: &Self, s: C64) {
        CMatrix::add_scaled(self, other, s)
    }
    fn scaled(&self, s: C64) -> Self {
        self.scale(s)
    }
    fn norm_bound(&self) -> f64 {
        self.norm_one()
    }
    fn solve_with(&self, rhs: &Self) -> Result<Self> {
        self.solve(rhs)
    }
}

/// Returns `exp(scale · a)`.
pub fn expm(a: &CMatrix, scale: C64) -> Result<CMatrix> {
    a.ensure_square()?;
    expm_generic(a, scale)
}

pub fn expm_generic<M: PadeOps>(a: &M, scale: C64) -> Result<M> {
    let a = a.scaled(scale);
    let norm = a.norm_bound();
    if norm == 0.0 {
        return Ok(a.identity_like());
    }
    for (theta, coeffs) in [
        (THETA3, &B3[..]),
        (THETA5, &B5[..]),
        (THETA7, &B7[..]),
        (THETA9, &B9[..]),
    ] {
        if norm <= theta {
            return pade_low(&a, coeffs);
        }
    }
    let squarings = (norm / THETA13).log2().ceil().max(0.0) as i32;
    let scaled = a.scaled(C64::new(0.5f64.powi(squarings), 0.0));
    let mut r = pade13(&scaled)?;
    for _ in 0..squarings {
        r = r.mul(&r);
    }
    Ok(r)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pade_low<M: PadeOps>(a: &M, b: &[f64]) -> Result<M> {
    let id = a.identity_like();
    let a2 = a.mul(a);
    let mut odd = id.scaled(real(b[1]));
    let mut even = id.scaled(real(b[0]));
    let mut pow = id;
    for j in (2..b.len()).step_by(2) {
        pow = pow.mul(&a2);
        even.add_scaled(&pow, real(b[j]));
        if j + 1 < b.len() {
            odd.add_scaled(&pow, real(b[j + 1]));
        }
    }
    let u = a.mul(&odd);
    finish(&u, &even)
}

fn pade13<M: PadeOps>(a: &M) -> Result<M> {
    let b = |k: usize| real(B13[k]);
    let id = a.identity_like();
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);

    let mut inner_u = a6.scaled(b(13));
    inner_u.add_scaled(&a4, b(11));
    inner_u.add_scaled(&a2, b(9));
    let mut u = a6.mul(&inner_u);
    u.add_scaled(&a6, b(7));
    u.add_scaled(&a4, b(5));
    u.add_scaled(&a2, b(3));
    u.add_scaled(&id, b(1));
    let u = a.mul(&u);

    let mut inner_v = a6.scaled(b(12));
    inner_v.add_scaled(&a4, b(10));
    inner_v.add_scaled(&a2, b(8));
    let mut v = a6.mul(&inner_v);
    v.add_scaled(&a6, b(6));
    v.add_scaled(&a4, b(4));
    v.add_scaled(&a2, b(2));
    v.add_scaled(&id, b(0));
    finish(&u, &v)
}

fn finish<M: PadeOps>(u: &M, v: &M) -> Result<M> {
    let mut den = v.clone();
    den.add_scaled(u, real(-1.0));
    let mut num = v.clone();
    num.add_scaled(u, real(1.0));
    den.solve_with(&num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{I, ONE};
    use crate::numerics::random::{random_matrix, seeded};

    fn taylor(a: &CMatrix, terms: usize) -> CMatrix {
        let mut sum = CMatrix::identity(a.rows());
        let mut term = CMatrix::identity(a.rows());
        for k in 1..terms {
            term = term.matmul(a).scale_real(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_generator_gives_identity() {
        assert_eq!(expm(&CMatrix::zeros(3, 3), ONE).unwrap(), CMatrix::identity(3));
    }

    #[test]
    fn pauli_z_rotation() {
        let sz = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let theta = 0.7;
        let w = expm(&sz, -I * theta).unwrap();
        let expect = CMatrix::diag(&[(-I * theta).exp(), (I * theta).exp()]);
        assert!((&w - &expect).frobenius_norm() < 1e-14);
    }

    #[test]
    fn matches_taylor_oracle() {
        let mut rng = seeded(11);
        for _ in 0..5 {
            let mut a = random_matrix(6, &mut rng);
            a = a.scale_real(2.0 / a.frobenius_norm());
            let e = expm(&a, ONE).unwrap();
            let t = taylor(&a, 40);
            assert!((&e - &t).frobenius_norm() < 1e-11);
        }
    }

    #[test]
    fn relative_accuracy_at_large_norm() {
        // exp(A) exp(-A) = I for a moderately large generator exercises squaring.
        let mut rng = seeded(5);
        let mut a = random_matrix(5, &mut rng);
        a = a.scale_real(50.0 / a.frobenius_norm());
        let herm = (&a + &a.adjoint()).scale_real(0.5);
        let w = expm(&herm, -I).unwrap();
        assert!(w.unitarity_defect() < 1e-11);
    }
}
