use crate::error::{Error, Result};
use crate::numerics::{expm, CMatrix, I};

pub const HERMITIAN_TOL: f64 = 1e-10;

/// Piecewise-constant Hermitian schedule. A schedule with a single constant
/// segment covers all `t ≥ 0`.
#[derive(Clone, Debug)]
pub struct Schedule {
    segments: Vec<(f64, CMatrix)>,
    unbounded: bool,
}

impl Schedule {
    pub fn constant(h: CMatrix) -> Result<Self> {
        check_hermitian(&h)?;
        Ok(Self {
            segments: vec![(f64::INFINITY, h)],
            unbounded: true,
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            segments: vec![(f64::INFINITY, CMatrix::zeros(dim, dim))],
            unbounded: true,
        }
    }

    /// Consecutive segments `(duration, H)` starting at `t = 0`.
    pub fn piecewise(segments: Vec<(f64, CMatrix)>) -> Result<Self> {
        let Some((_, first)) = segments.first() else {
            return Err(Error::InvalidParameter("schedule has no segments".into()));
        };
        let dim = first.ensure_square()?;
        for (dt, h) in &segments {
            if !(dt.is_finite() && *dt > 0.0) {
                return Err(Error::InvalidParameter(format!("segment duration {dt} must be positive")));
            }
            h.ensure_shape(dim, dim, "schedule segment")?;
            check_hermitian(h)?;
        }
        Ok(Self {
            segments,
            unbounded: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.segments[0].1.rows()
    }

    pub fn is_constant(&self) -> bool {
        self.unbounded
    }

    /// End of the covered interval (infinite for constant schedules).
    pub fn end(&self) -> f64 {
        if self.unbounded {
            f64::INFINITY
        } else {
            self.segments.iter().map(|(dt, _)| dt).sum()
        }
    }

    fn check_cover(&self, t: f64) -> Result<()> {
        let end = self.end();
        if t < 0.0 || t > end * (1.0 + 1e-12) {
            return Err(Error::ScheduleCoverage { end, t });
        }
        Ok(())
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<&CMatrix> {
        self.check_cover(t)?;
        let mut start = 0.0;
        for (dt, h) in &self.segments {
            if t < start + dt {
                return Ok(h);
            }
            start += dt;
        }
        Ok(&self.segments.last().expect("non-empty").1)
    }

    /// Time-ordered exponential `R(t)` with later segments on the left.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        self.check_cover(t)?;
        let mut r = CMatrix::identity(self.dim());
        let mut remaining = t;
        for (dt, h) in &self.segments {
            if remaining <= 0.0 {
                break;
            }
            let step = remaining.min(*dt);
            r = expm(h, -I * step)?.matmul(&r);
            remaining -= step;
        }
        Ok(r)
    }
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    h.ensure_square()?;
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidParameter(format!(
            "frame Hamiltonian is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Frame Hamiltonian `H₀(t) = Σ_m |m⟩⟨m| ⊗ H_m(t)`, one central schedule
/// per ancilla level.
#[derive(Clone, Debug)]
pub struct DiagonalFrame {
    levels: Vec<Schedule>,
}

impl DiagonalFrame {
    pub fn new(levels: Vec<Schedule>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::InvalidParameter("frame has no levels".into()));
        };
        let d_b = first.dim();
        if let Some(bad) = levels.iter().find(|s| s.dim() != d_b) {
            return Err(Error::Dimension(format!(
                "frame level of size {} but expected {d_b}",
                bad.dim()
            )));
        }
        Ok(Self { levels })
    }

    pub fn constant(hamiltonians: Vec<CMatrix>) -> Result<Self> {
        Self::new(hamiltonians.into_iter().map(Schedule::constant).collect::<Result<_>>()?)
    }

    pub fn zero(d_a: usize, d_b: usize) -> Self {
        Self {
            levels: vec![Schedule::zero(d_b); d_a],
        }
    }

    pub fn d_a(&self) -> usize {
        self.levels.len()
    }

    pub fn d_b(&self) -> usize {
        self.levels[0].dim()
    }

    pub fn level(&self, m: usize) -> &Schedule {
        &self.levels[m]
    }

    pub fn is_constant(&self) -> bool {
        self.levels.iter().all(Schedule::is_constant)
    }

    /// `R_m(t)` for every level.
    pub fn rotations(&self, t: f64) -> Result<Vec<CMatrix>> {
        self.levels.iter().map(|s| s.propagator(t)).collect()
    }

    /// `R(t) = Σ_m |m⟩⟨m| ⊗ R_m(t)`.
    pub fn dressing(&self, t: f64) -> Result<CMatrix> {
        Ok(block_diagonal(&self.rotations(t)?))
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<CMatrix> {
        let hs: Vec<CMatrix> = self
            .levels
            .iter()
            .map(|s| s.hamiltonian_at(t).cloned())
            .collect::<Result<_>>()?;
        Ok(block_diagonal(&hs))
    }
}

fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let d_b = blocks[0].rows();
    let d = blocks.len() * d_b;
    let mut out = CMatrix::zeros(d, d);
    for (m, b) in blocks.iter().enumerate() {
        out.set_block(m * d_b, m * d_b, b);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, seeded};

    #[test]
    fn constant_schedule_is_expm() {
        let mut rng = seeded(1);
        let h = random_hermitian(3, &mut rng);
        let s = Schedule::constant(h.clone()).unwrap();
        let r = s.propagator(0.8).unwrap();
        assert!((&r - &expm(&h, -I * 0.8).unwrap()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn piecewise_orders_later_segments_left() {
        let mut rng = seeded(2);
        let a = random_hermitian(2, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let s = Schedule::piecewise(vec![(0.5, a.clone()), (1.0, b.clone())]).unwrap();
        let r = s.propagator(1.2).unwrap();
        let expect = expm(&b, -I * 0.7).unwrap().matmul(&expm(&a, -I * 0.5).unwrap());
        assert!((&r - &expect).frobenius_norm() < 1e-13);
        assert!(matches!(s.propagator(2.0), Err(Error::ScheduleCoverage { .. })));
        assert_eq!(s.hamiltonian_at(0.7).unwrap(), &b);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(Schedule::constant(m).is_err());
    }
}
