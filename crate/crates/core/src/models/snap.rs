use std::f64::consts::FRAC_PI_2;

use crate::algebra::{AlgebraGraph, UnitaryFamily};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};
use crate::propagation::DiagonalFrame;
use crate::superop::{Jump, LindbladModel};

/// Number-selective phase gate mediated by a `d_A`-level ancilla, with the
/// central mode truncated to `n` levels.
///
/// `dephasing[m]` is the dephasing rate of ancilla level `m`;
/// `relaxation[m − 1]` is the rate of the jump `m → m − 1` (levels counted
/// from zero), so it is indexed by the upper level.
#[derive(Clone, Debug)]
pub struct SnapSpec {
    pub d_a: usize,
    pub n: usize,
    pub phases: Vec<f64>,
    pub omega: f64,
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub dephasing: Vec<f64>,
    pub relaxation: Vec<f64>,
}

pub const DEFAULT_CHI: f64 = 0.5;
pub const DEFAULT_DEPHASING: f64 = 0.02;
pub const DEFAULT_RELAXATION: f64 = 0.02;

impl SnapSpec {
    /// Defaults: `φ_n = nπ/2`, `Ω = 1`, `H₁ = χ·diag(0, 1, …, n−1)` with
    /// `χ = 0.5`, `H₂ = 0`, dephasing and relaxation 0.02 on every level.
    pub fn default_for(d_a: usize, n: usize) -> Self {
        let h1 = CMatrix::diag(&(0..n).map(|k| C64::new(DEFAULT_CHI * k as f64, 0.0)).collect::<Vec<_>>());
        Self {
            d_a,
            n,
            phases: (0..n).map(|k| k as f64 * FRAC_PI_2).collect(),
            omega: 1.0,
            h1,
            h2: CMatrix::zeros(n, n),
            dephasing: vec![DEFAULT_DEPHASING; d_a],
            relaxation: vec![DEFAULT_RELAXATION; d_a.saturating_sub(1)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_a < 2 {
            return Err(Error::InvalidParameter(format!("SNAP needs d_A >= 2 (got {})", self.d_a)));
        }
        if self.n == 0 || self.phases.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "{} phases for truncation {}",
                self.phases.len(),
                self.n
            )));
        }
        if !self.omega.is_finite() || self.omega == 0.0 {
            return Err(Error::InvalidParameter("drive strength must be finite and nonzero".into()));
        }
        self.h1.ensure_shape(self.n, self.n, "H1")?;
        self.h2.ensure_shape(self.n, self.n, "H2")?;
        if self.dephasing.len() != self.d_a || self.relaxation.len() != self.d_a - 1 {
            return Err(Error::InvalidParameter(format!(
                "need {} dephasing and {} relaxation rates",
                self.d_a,
                self.d_a - 1
            )));
        }
        if self.dephasing.iter().chain(&self.relaxation).any(|&g| !(g >= 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter("rates must be finite and non-negative".into()));
        }
        Ok(())
    }

    /// `S(φ) = Σ e^{iφ_n} |n⟩⟨n|`.
    pub fn unitary(&self) -> CMatrix {
        CMatrix::diag(&self.phases.iter().map(|&p| C64::from_polar(1.0, p)).collect::<Vec<_>>())
    }

    /// `T = π/(2Ω)`.
    pub fn gate_time(&self) -> f64 {
        FRAC_PI_2 / self.omega.abs()
    }

    pub fn scaled_rates(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.dephasing.iter_mut().chain(out.relaxation.iter_mut()).for_each(|g| *g *= factor);
        out
    }
}

#[derive(Clone, Debug)]
pub struct SnapModel {
    pub model: LindbladModel,
    pub graph: AlgebraGraph,
    pub frame: DiagonalFrame,
    pub family: UnitaryFamily,
    pub gate_time: f64,
}

/// Interaction-picture model with drive `Ω(|0⟩⟨d_A−1| ⊗ U + h.c.)`.
///
/// The family has `U_{0,m} = U` for every `m ≥ 1`. Relaxation from level 1
/// to level 0 crosses between levels with different frame Hamiltonians and
/// is framed; relaxation among levels `≥ 1` is static. The graph is the one
/// generated by the drive edge and the static relaxation edges.
pub fn snap_model(spec: &SnapSpec) -> Result<SnapModel> {
    spec.validate()?;
    let d_a = spec.d_a;
    let n = spec.n;
    let u = spec.unitary();
    let id = CMatrix::identity(n);
    let mut reps = vec![u.adjoint(); d_a];
    reps[0] = id.clone();
    let family = UnitaryFamily::new(d_a, n, reps, 0)?;

    let drive = CMatrix::unit(d_a, 0, d_a - 1).kron(&u).scale_real(spec.omega);
    let hamiltonian = &drive + &drive.adjoint();

    let mut levels = vec![spec.h2.clone(); d_a];
    levels[0] = spec.h1.clone();
    let frame = DiagonalFrame::constant(levels)?;

    let mut jumps = Vec::new();
    for (m, &kappa) in spec.dephasing.iter().enumerate() {
        if kappa > 0.0 {
            jumps.push(Jump::constant(CMatrix::unit(d_a, m, m).kron(&id).scale_real(kappa.sqrt())));
        }
    }
    for (idx, &gamma) in spec.relaxation.iter().enumerate() {
        let m = idx + 1;
        if gamma > 0.0 {
            let k = CMatrix::unit(d_a, m - 1, m).kron(&id).scale_real(gamma.sqrt());
            jumps.push(if m == 1 { Jump::framed(k, frame.clone()) } else { Jump::constant(k) });
        }
    }
    let model = LindbladModel::new(d_a, n, hamiltonian, jumps)?;
    let edges = std::iter::once((0, d_a - 1)).chain((2..d_a).map(|m| (m - 1, m)));
    let graph = AlgebraGraph::generated(family.clone(), edges)?;
    Ok(SnapModel {
        model,
        graph,
        frame,
        family,
        gate_time: spec.gate_time(),
    })
}
