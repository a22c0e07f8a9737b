//! Closed-system PI propagators, projected blocks and frame dressing.

mod frame;

pub use frame::{DiagonalFrame, Schedule, HERMITIAN_TOL};

use crate::algebra::{membership, AlgebraGraph, PIElement, UnitaryFamily};
use crate::error::{Error, Result};
use crate::numerics::{expm, proportionality_fit, CMatrix, ProportionalityFit, C64, I};

/// `exp(−i t H_AB)` for the lift `H_AB` of `h`.
pub fn pi_propagator(h: &CMatrix, family: &UnitaryFamily, t: f64) -> Result<CMatrix> {
    expm(&PIElement::lift(h, family)?.realize(), -I * t)
}

#[derive(Clone, Debug)]
pub struct XiCheck {
    pub membership_residual: f64,
    /// Largest `|coefficient − ξ_mn(t)|`.
    pub coefficient_error: f64,
    pub passed: bool,
}

/// Checks that the propagator decomposes as `Σ ξ_mn(t) |m⟩⟨n| ⊗ U_mn` with
/// `ξ(t) = exp(−i t h)`.
pub fn xi_correspondence_check(h: &CMatrix, family: &UnitaryFamily, t: f64, tol: f64) -> Result<XiCheck> {
    let w = pi_propagator(h, family, t)?;
    let xi = expm(h, -I * t)?;
    xi_check_against(&w, &xi, family, tol)
}

/// Decomposes an arbitrary composite propagator `w` and compares its
/// coefficients with `xi`.
pub fn xi_check_against(w: &CMatrix, xi: &CMatrix, family: &UnitaryFamily, tol: f64) -> Result<XiCheck> {
    let mem = membership(w, &AlgebraGraph::full(family.clone()))?;
    let coefficient_error = mem
        .coefficients
        .iter()
        .map(|(&(m, n), &c)| (c - xi[(m, n)]).norm())
        .fold(0.0, f64::max);
    Ok(XiCheck {
        membership_residual: mem.residual,
        coefficient_error,
        passed: mem.residual <= tol && coefficient_error <= tol,
    })
}

/// The `(r, i)` ancilla block `⟨r| W |i⟩` of a composite operator, fitted
/// against a target central matrix (by default `U_ri`).
#[derive(Clone, Debug)]
pub struct ProjectedBlock {
    pub i: usize,
    pub r: usize,
    pub block: CMatrix,
    pub target: CMatrix,
    pub fit: ProportionalityFit,
}

impl ProjectedBlock {
    /// `‖B̃†B̃ − I‖_F` with `B̃ = √d_B · B / ‖B‖_F`; zero for trivial blocks.
    pub fn unitarity_defect(&self) -> f64 {
        if self.fit.trivially_zero {
            return 0.0;
        }
        let d_b = self.block.rows() as f64;
        self.block.scale_real(d_b.sqrt() / self.block.frobenius_norm()).unitarity_defect()
    }
}

pub fn extract_block(w: &CMatrix, d_a: usize, d_b: usize, i: usize, r: usize) -> Result<CMatrix> {
    w.ensure_shape(d_a * d_b, d_a * d_b, "composite operator")?;
    for (what, index) in [("initial ancilla", i), ("final ancilla", r)] {
        if index >= d_a {
            return Err(Error::IndexOutOfRange { what, index, bound: d_a });
        }
    }
    Ok(w.block(r * d_b, i * d_b, d_b, d_b))
}

pub fn projected_block(w: &CMatrix, family: &UnitaryFamily, i: usize, r: usize, zero_tol: f64) -> Result<ProjectedBlock> {
    projected_block_against(w, family.d_a(), &family.edge_checked(r, i)?, i, r, zero_tol)
}

pub fn projected_block_against(
    w: &CMatrix,
    d_a: usize,
    target: &CMatrix,
    i: usize,
    r: usize,
    zero_tol: f64,
) -> Result<ProjectedBlock> {
    let block = extract_block(w, d_a, target.rows(), i, r)?;
    let fit = proportionality_fit(&block, target, zero_tol)?;
    Ok(ProjectedBlock {
        i,
        r,
        block,
        target: target.clone(),
        fit,
    })
}

/// `W^(S)(t) = R(t) · W_interaction` with `R(t) = Σ_m |m⟩⟨m| ⊗ R_m(t)`.
pub fn schrodinger_dress(w_interaction: &CMatrix, frame: &DiagonalFrame, t: f64) -> Result<CMatrix> {
    let r = frame.dressing(t)?;
    w_interaction.ensure_shape(r.rows(), r.cols(), "interaction-picture propagator")?;
    Ok(r.matmul(w_interaction))
}

/// Sends `|i⟩ ⊗ U_ik ψ` through `w`, projects onto ancilla `|r⟩` and returns
/// the sine of the angle between the central component and `U_rk ψ`.
pub fn induced_transition_check(
    w: &CMatrix,
    family: &UnitaryFamily,
    i: usize,
    r: usize,
    psi: &[C64],
    zero_tol: f64,
) -> Result<f64> {
    let d_a = family.d_a();
    let d_b = family.d_b();
    let k = family.anchor();
    if psi.len() != d_b {
        return Err(Error::Dimension(format!("state of length {} for d_B = {d_b}", psi.len())));
    }
    let block = extract_block(w, d_a, d_b, i, r)?;
    let input = family.edge_checked(i, k)?.mul_vec(psi);
    let out = block.mul_vec(&input);
    let expect = family.edge_checked(r, k)?.mul_vec(psi);
    let norm_out = out.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    let norm_exp = expect.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
    if norm_out <= zero_tol * norm_exp.max(1.0) {
        return Err(Error::TrivialTransition(norm_out));
    }
    let overlap: C64 = expect.iter().zip(&out).map(|(a, b)| a.conj() * b).sum();
    let cos = (overlap.norm() / (norm_out * norm_exp)).min(1.0);
    Ok((1.0 - cos * cos).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, random_state, random_unitary, seeded};
    use crate::numerics::ONE;

    fn family(d_a: usize, d_b: usize, seed: u64) -> UnitaryFamily {
        let mut rng = seeded(seed);
        let mut reps: Vec<CMatrix> = (0..d_a).map(|_| random_unitary(d_b, &mut rng)).collect();
        reps[0] = CMatrix::identity(d_b);
        UnitaryFamily::new(d_a, d_b, reps, 0).unwrap()
    }

    #[test]
    fn rabi_coefficients() {
        let omega = 1.3;
        let t = 0.4;
        let sx = CMatrix::from_real(2, 2, &[0.0, omega, omega, 0.0]).unwrap();
        let f = family(2, 2, 1);
        let w = pi_propagator(&sx, &f, t).unwrap();
        let b11 = projected_block(&w, &f, 0, 0, 1e-12).unwrap();
        let b21 = projected_block(&w, &f, 0, 1, 1e-12).unwrap();
        assert!((b11.fit.constant - ONE * (omega * t).cos()).norm() < 1e-13);
        assert!((b21.fit.constant + I * (omega * t).sin()).norm() < 1e-13);
        assert!(b21.fit.residual < 1e-13);
    }

    #[test]
    fn xi_correspondence_random() {
        let f = family(3, 2, 2);
        let mut rng = seeded(3);
        let h = random_hermitian(3, &mut rng);
        assert!(xi_correspondence_check(&h, &f, 0.7, 1e-9).unwrap().passed);
        assert!(xi_correspondence_check(&CMatrix::zeros(3, 3), &f, 0.7, 1e-12).unwrap().passed);
    }

    #[test]
    fn xi_detects_generator_outside_algebra() {
        let f = family(2, 2, 4);
        let mut rng = seeded(5);
        let h = random_hermitian(2, &mut rng);
        // W orthogonal to U_01 under the Frobenius product
        let u = f.edge(0, 1);
        let sz = CMatrix::diag(&[ONE, -ONE]);
        let wperp = u.matmul(&sz);
        assert!(u.inner(&wperp).norm() < 1e-12);
        let mut gen = PIElement::lift(&h, &f).unwrap().realize();
        let kick = CMatrix::unit(2, 0, 1).kron(&wperp);
        gen += &kick;
        gen += &kick.adjoint();
        let w = expm(&gen, -I * 1.0).unwrap();
        let xi = expm(&h, -I * 1.0).unwrap();
        let check = xi_check_against(&w, &xi, &f, 1e-9).unwrap();
        assert!(check.membership_residual > 1e-3);
        assert!(!check.passed);
    }

    #[test]
    fn identity_blocks() {
        let f = family(3, 2, 6);
        let w = CMatrix::identity(6);
        assert!(projected_block(&w, &f, 0, 2, 1e-10).unwrap().fit.trivially_zero);
        let b = projected_block(&w, &f, 1, 1, 1e-10).unwrap();
        assert!((b.fit.constant - ONE).norm() < 1e-15);
        assert!(matches!(projected_block(&w, &f, 0, 3, 1e-10), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn dressing_keeps_blocks_unitary() {
        let f = family(3, 2, 7);
        let mut rng = seeded(8);
        let h = random_hermitian(3, &mut rng);
        let frame = DiagonalFrame::constant((0..3).map(|_| random_hermitian(2, &mut rng)).collect()).unwrap();
        let t = 0.9;
        let w = schrodinger_dress(&pi_propagator(&h, &f, t).unwrap(), &frame, t).unwrap();
        let rot = frame.rotations(t).unwrap();
        for i in 0..3 {
            for (r, rot_r) in rot.iter().enumerate() {
                let target = rot_r.matmul(&f.edge(r, i));
                let b = projected_block_against(&w, 3, &target, i, r, 1e-12).unwrap();
                assert!(b.fit.relative_residual() < 1e-12);
                assert!(b.unitarity_defect() < 1e-10);
            }
        }
        let zero = DiagonalFrame::zero(3, 2);
        let w0 = pi_propagator(&h, &f, t).unwrap();
        assert_eq!(schrodinger_dress(&w0, &zero, t).unwrap(), w0);
    }

    #[test]
    fn induced_transition() {
        let f = family(3, 2, 9);
        let mut rng = seeded(10);
        let h = random_hermitian(3, &mut rng);
        let w = pi_propagator(&h, &f, 0.6).unwrap();
        let psi = random_state(2, &mut rng);
        for (i, r) in [(0, 1), (2, 0), (1, 1)] {
            assert!(induced_transition_check(&w, &f, i, r, &psi, 1e-12).unwrap() < 1e-9);
        }
        let id = CMatrix::identity(6);
        assert_eq!(induced_transition_check(&id, &f, 1, 1, &psi, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn random_unitary_breaks_transition() {
        let f = family(2, 2, 11);
        let mut rng = seeded(12);
        let w = random_unitary(4, &mut rng);
        let worst = (0..20)
            .map(|_| {
                let psi = random_state(2, &mut rng);
                induced_transition_check(&w, &f, 0, 1, &psi, 1e-12).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }
}
