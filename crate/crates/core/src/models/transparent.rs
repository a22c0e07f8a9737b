use crate::algebra::{AlgebraGraph, UnitaryFamily};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};
use crate::propagation::{DiagonalFrame, HERMITIAN_TOL};
use crate::superop::{Jump, LindbladModel};

/// Ancilla errors `K_i = √γ_i |i⟩⟨0| ⊗ I` out of level 0 under the frame
/// Hamiltonian `Σ |m⟩⟨m| ⊗ H_m`. `rates[i − 1]` belongs to level `i`.
#[derive(Clone, Debug)]
pub struct ErrorTransparentSpec {
    pub d_a: usize,
    pub d_b: usize,
    pub hamiltonians: Vec<CMatrix>,
    pub rates: Vec<f64>,
    /// Nominal gate time used to pick evaluation times.
    pub gate_time: f64,
}

impl ErrorTransparentSpec {
    /// Three levels, two central levels, every error transparent: the frame
    /// Hamiltonians differ from `H_0 = χ·diag(0, 1)` by multiples of `I`.
    pub fn transparent_example(chi: f64, gamma: f64) -> Self {
        let h0 = CMatrix::diag(&[C64::new(0.0, 0.0), C64::new(chi, 0.0)]);
        let id = CMatrix::identity(2);
        Self {
            d_a: 3,
            d_b: 2,
            hamiltonians: vec![h0.clone(), &h0 - &id.scale_real(0.3), &h0 + &id.scale_real(0.2)],
            rates: vec![gamma; 2],
            gate_time: std::f64::consts::FRAC_PI_2,
        }
    }

    /// As above with `H_0 = H_1 = 0` and `H_2 = χ·diag(0, 1)`, so the error
    /// into level 2 is not transparent.
    pub fn broken_example(chi: f64, gamma: f64) -> Self {
        let zero = CMatrix::zeros(2, 2);
        Self {
            d_a: 3,
            d_b: 2,
            hamiltonians: vec![zero.clone(), zero, CMatrix::diag(&[C64::new(0.0, 0.0), C64::new(chi, 0.0)])],
            rates: vec![gamma; 2],
            gate_time: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_a < 2 || self.d_b == 0 {
            return Err(Error::InvalidParameter("error-transparent model needs d_A >= 2 and d_B >= 1".into()));
        }
        if self.hamiltonians.len() != self.d_a || self.rates.len() != self.d_a - 1 {
            return Err(Error::InvalidParameter(format!(
                "need {} frame Hamiltonians and {} rates",
                self.d_a,
                self.d_a - 1
            )));
        }
        for h in &self.hamiltonians {
            h.ensure_shape(self.d_b, self.d_b, "frame Hamiltonian")?;
            if h.hermiticity_defect() > HERMITIAN_TOL {
                return Err(Error::InvalidParameter("frame Hamiltonians must be Hermitian".into()));
            }
        }
        if self.rates.iter().any(|&g| !(g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter("rates must be finite and non-negative".into()));
        }
        if !(self.gate_time > 0.0 && self.gate_time.is_finite()) {
            return Err(Error::InvalidParameter("gate time must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TransparencyVerdict {
    pub level: usize,
    pub transparent: bool,
    /// `λ = tr(H_0 − H_i)/d_B`, real part.
    pub lambda: f64,
    pub lambda_imag: f64,
    pub residual: f64,
}

/// `[K_i, H₀] = λ K_i` holds iff `H_0 − H_i = λ I`.
pub fn et_condition_check(spec: &ErrorTransparentSpec, tol: f64) -> Result<Vec<TransparencyVerdict>> {
    spec.validate()?;
    Ok((1..spec.d_a)
        .map(|i| {
            let (lambda, residual) = scalar_offset(&spec.hamiltonians[0], &spec.hamiltonians[i]);
            TransparencyVerdict {
                level: i,
                transparent: residual <= tol && lambda.im.abs() <= tol,
                lambda: lambda.re,
                lambda_imag: lambda.im,
                residual,
            }
        })
        .collect())
}

/// Best `λ` with `a − b ≈ λ I`, and the residual `‖a − b − λ I‖_F`.
pub(crate) fn scalar_offset(a: &CMatrix, b: &CMatrix) -> (C64, f64) {
    let diff = a - b;
    let n = diff.rows();
    let lambda = diff.trace() / n as f64;
    let residual = (&diff - &CMatrix::identity(n).scale(lambda)).frobenius_norm();
    (lambda, residual)
}

#[derive(Clone, Debug)]
pub struct EtModel {
    pub model: LindbladModel,
    pub graph: AlgebraGraph,
    pub frame: DiagonalFrame,
    pub family: UnitaryFamily,
    pub verdicts: Vec<TransparencyVerdict>,
    pub gate_time: f64,
}

/// Interaction-picture model with zero Hamiltonian. Transparent errors are
/// static (their phase `e^{−iλt}` cancels in the dissipator); the others
/// rotate as `|i⟩⟨0| ⊗ R_i(t)† R_0(t)`.
pub fn et_model(spec: &ErrorTransparentSpec, tol: f64) -> Result<EtModel> {
    let verdicts = et_condition_check(spec, tol)?;
    let d_a = spec.d_a;
    let d_b = spec.d_b;
    let frame = DiagonalFrame::constant(spec.hamiltonians.clone())?;
    let id = CMatrix::identity(d_b);
    let mut jumps = Vec::new();
    for v in &verdicts {
        let gamma = spec.rates[v.level - 1];
        if gamma == 0.0 {
            continue;
        }
        let k = CMatrix::unit(d_a, v.level, 0).kron(&id).scale_real(gamma.sqrt());
        jumps.push(if v.transparent { Jump::constant(k) } else { Jump::framed(k, frame.clone()) });
    }
    let family = UnitaryFamily::identity(d_a, d_b);
    let model = LindbladModel::new(d_a, d_b, CMatrix::zeros(d_a * d_b, d_a * d_b), jumps)?;
    let graph = AlgebraGraph::generated(family.clone(), (1..d_a).map(|i| (i, 0)))?;
    Ok(EtModel {
        model,
        graph,
        frame,
        family,
        verdicts,
        gate_time: spec.gate_time,
    })
}

/// Groups ancilla levels whose central Hamiltonians differ by a multiple of
/// the identity.
pub fn nas_check(hamiltonians: &[CMatrix], tol: f64) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (m, h) in hamiltonians.iter().enumerate() {
        let home = classes.iter_mut().find(|c| {
            let (lambda, residual) = scalar_offset(&hamiltonians[c[0]], h);
            residual <= tol && lambda.im.abs() <= tol
        });
        match home {
            Some(c) => c.push(m),
            None => classes.push(vec![m]),
        }
    }
    classes
}
