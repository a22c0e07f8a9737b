use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::superop::{Jump, LindbladModel, SuperOp};

/// `L = L_eff + S(t)`: the no-jump generator built from
/// `H_eff = H − (i/2) Σ K†K`, and the jump insertion `S(t) = Σ K ⊗ K*`.
#[derive(Clone, Debug)]
pub struct GeneratorSplit {
    pub l_eff: SuperOp,
    pub h_eff: CMatrix,
    /// Jump insertions from time-independent jumps.
    pub s_const: SuperOp,
    /// Jumps whose operators rotate with a frame.
    pub framed: Vec<Jump>,
}

pub fn split(model: &LindbladModel) -> GeneratorSplit {
    let d = model.dim();
    let mut s = CMatrix::zeros(d * d, d * d);
    let mut framed = Vec::new();
    for jump in model.jumps() {
        if jump.is_time_dependent() {
            framed.push(jump.clone());
        } else {
            s += &jump.operator.kron(&jump.operator.conj());
        }
    }
    GeneratorSplit {
        l_eff: model.no_jump_generator(),
        h_eff: model.effective_hamiltonian(),
        s_const: SuperOp::new(d, s).expect("square by construction"),
        framed,
    }
}

impl GeneratorSplit {
    pub fn dim(&self) -> usize {
        self.l_eff.dim()
    }

    pub fn is_constant(&self) -> bool {
        self.framed.is_empty()
    }

    pub fn s_jump(&self) -> Result<&SuperOp> {
        if self.is_constant() {
            Ok(&self.s_const)
        } else {
            Err(Error::TimeDependentJumps)
        }
    }

    pub fn s_jump_at(&self, t: f64) -> Result<SuperOp> {
        let mut s = self.s_const.matrix().clone();
        for jump in &self.framed {
            let k = jump.operator_at(t)?;
            s += &k.kron(&k.conj());
        }
        SuperOp::new(self.dim(), s)
    }

    pub fn liouvillian_at(&self, t: f64) -> Result<SuperOp> {
        Ok(&self.l_eff + &self.s_jump_at(t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, random_matrix, seeded};
    use crate::numerics::I;
    use crate::superop::liouvillian;

    #[test]
    fn no_jumps_means_no_insertions() {
        let mut rng = seeded(1);
        let m = LindbladModel::new(2, 2, random_hermitian(4, &mut rng), vec![]).unwrap();
        let sp = split(&m);
        assert_eq!(sp.s_jump().unwrap().matrix().max_abs(), 0.0);
        assert_eq!(sp.l_eff, liouvillian(&m).unwrap());
    }

    #[test]
    fn dephasing_shifts_effective_hamiltonian() {
        let kappa: f64 = 0.3;
        let k = CMatrix::unit(2, 1, 1).kron(&CMatrix::identity(2)).scale_real(kappa.sqrt());
        let m = LindbladModel::new(2, 2, CMatrix::zeros(4, 4), vec![Jump::constant(k)]).unwrap();
        let sp = split(&m);
        let expect = CMatrix::unit(2, 1, 1).kron(&CMatrix::identity(2)).scale(-I * (kappa / 2.0));
        assert!((&sp.h_eff - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn reconstruction() {
        let mut rng = seeded(2);
        let jumps = (0..3).map(|_| Jump::constant(random_matrix(4, &mut rng))).collect();
        let m = LindbladModel::new(2, 2, random_hermitian(4, &mut rng), jumps).unwrap();
        let sp = split(&m);
        let sum = sp.liouvillian_at(0.0).unwrap();
        assert!((sum.matrix() - liouvillian(&m).unwrap().matrix()).frobenius_norm() < 1e-12);
    }
}
