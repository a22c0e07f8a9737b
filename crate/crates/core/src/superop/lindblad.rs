use super::hs::SuperOp;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64, I};
use crate::propagation::{DiagonalFrame, HERMITIAN_TOL};

/// Jump operator with its rate folded in. A framed jump evolves as
/// `K(t) = R(t)† K R(t)` with `R(t)` the frame's block-diagonal rotation.
#[derive(Clone, Debug)]
pub struct Jump {
    pub operator: CMatrix,
    pub frame: Option<DiagonalFrame>,
}

impl Jump {
    pub fn constant(operator: CMatrix) -> Self {
        Self { operator, frame: None }
    }

    pub fn framed(operator: CMatrix, frame: DiagonalFrame) -> Self {
        Self {
            operator,
            frame: Some(frame),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        self.frame.is_some()
    }

    pub fn operator_at(&self, t: f64) -> Result<CMatrix> {
        match &self.frame {
            None => Ok(self.operator.clone()),
            Some(frame) => {
                let r = frame.dressing(t)?;
                Ok(r.adjoint().matmul(&self.operator).matmul(&r))
            }
        }
    }
}

/// Composite Hamiltonian plus jump operators, in the interaction picture.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    d_a: usize,
    d_b: usize,
    hamiltonian: CMatrix,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(d_a: usize, d_b: usize, hamiltonian: CMatrix, jumps: Vec<Jump>) -> Result<Self> {
        let d = d_a * d_b;
        hamiltonian.ensure_shape(d, d, "Hamiltonian")?;
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
        }
        for (index, jump) in jumps.iter().enumerate() {
            jump.operator.ensure_shape(d, d, "jump operator")?;
            if let Some(frame) = &jump.frame {
                if frame.d_a() != d_a || frame.d_b() != d_b {
                    return Err(Error::Dimension(format!("frame of jump {index} does not match the composite space")));
                }
                if !frame.is_constant() {
                    return Err(Error::InvalidParameter(format!(
                        "jump {index}: framed jumps need a constant frame"
                    )));
                }
                // K†K must be frame invariant so that the no-jump part stays constant
                let kk = jump.operator.adjoint().matmul(&jump.operator);
                let h0 = frame.hamiltonian_at(0.0)?;
                let comm = kk.commutator(&h0).frobenius_norm();
                if comm > 1e-10 * (1.0 + kk.frobenius_norm() * h0.frobenius_norm()) {
                    return Err(Error::TimeDependentNoJump(index));
                }
            }
        }
        Ok(Self {
            d_a,
            d_b,
            hamiltonian,
            jumps,
        })
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn is_time_dependent(&self) -> bool {
        self.jumps.iter().any(Jump::is_time_dependent)
    }

    /// `H_eff = H − (i/2) Σ K†K`; time independent by construction.
    pub fn effective_hamiltonian(&self) -> CMatrix {
        let mut h = self.hamiltonian.clone();
        for jump in &self.jumps {
            let kk = jump.operator.adjoint().matmul(&jump.operator);
            h.add_scaled(&kk, -I * 0.5);
        }
        h
    }

    /// `−i(H_eff ⊗ I − I ⊗ H_eff*)`.
    pub fn no_jump_generator(&self) -> SuperOp {
        let d = self.dim();
        let h = self.effective_hamiltonian();
        let id = CMatrix::identity(d);
        let mut l = h.kron(&id).scale(-I);
        l.add_scaled(&id.kron(&h.conj()), I);
        SuperOp::new(d, l).expect("square by construction")
    }

    /// `Σ K_i(t) ⊗ K_i(t)*`.
    pub fn jump_superop_at(&self, t: f64) -> Result<SuperOp> {
        let d = self.dim();
        let mut s = CMatrix::zeros(d * d, d * d);
        for jump in &self.jumps {
            let k = jump.operator_at(t)?;
            s += &k.kron(&k.conj());
        }
        SuperOp::new(d, s)
    }

    pub fn jump_superop(&self) -> Result<SuperOp> {
        if self.is_time_dependent() {
            return Err(Error::TimeDependentJumps);
        }
        self.jump_superop_at(0.0)
    }

    pub fn liouvillian_at(&self, t: f64) -> Result<SuperOp> {
        Ok(&self.no_jump_generator() + &self.jump_superop_at(t)?)
    }

    /// Right-hand side of the master equation applied to `ρ` directly.
    pub fn master_rhs(&self, rho: &CMatrix, t: f64) -> Result<CMatrix> {
        let h = &self.hamiltonian;
        let mut out = h.commutator(rho).scale(-I);
        for jump in &self.jumps {
            let k = jump.operator_at(t)?;
            let kd = k.adjoint();
            let kk = kd.matmul(&k);
            out += &k.matmul(rho).matmul(&kd);
            out.add_scaled(&kk.matmul(rho), C64::new(-0.5, 0.0));
            out.add_scaled(&rho.matmul(&kk), C64::new(-0.5, 0.0));
        }
        Ok(out)
    }
}

/// Liouvillian of a model with time-independent jumps.
pub fn liouvillian(model: &LindbladModel) -> Result<SuperOp> {
    Ok(&model.no_jump_generator() + &model.jump_superop()?)
}
