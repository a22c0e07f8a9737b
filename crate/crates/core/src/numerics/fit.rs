use super::matrix::{CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Best complex scalar `c` with `x ≈ c · target` in the Frobenius sense.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProportionalityFit {
    pub constant: C64,
    /// `‖x − c·target‖_F`.
    pub residual: f64,
    /// `‖x‖_F` was below the zero threshold; `constant` is then exactly zero.
    pub trivially_zero: bool,
    pub norm: f64,
}

impl ProportionalityFit {
    /// Residual divided by `‖x‖_F`, i.e. the sine of the angle between `x`
    /// and the target. Zero for a trivially-zero block.
    pub fn relative_residual(&self) -> f64 {
        if self.trivially_zero || self.norm == 0.0 {
            0.0
        } else {
            self.residual / self.norm
        }
    }
}

pub fn proportionality_fit(x: &CMatrix, target: &CMatrix, zero_tol: f64) -> Result<ProportionalityFit> {
    if x.shape() != target.shape() {
        return Err(Error::Dimension(format!(
            "fit: block {:?} against target {:?}",
            x.shape(),
            target.shape()
        )));
    }
    let tt = target.inner(target).re;
    if tt == 0.0 {
        return Err(Error::ZeroTarget);
    }
    let norm = x.frobenius_norm();
    if norm <= zero_tol * tt.sqrt().max(1.0) {
        return Ok(ProportionalityFit {
            constant: ZERO,
            residual: norm,
            trivially_zero: true,
            norm,
        });
    }
    let constant = target.inner(x) / tt;
    let mut diff = x.clone();
    diff.add_scaled(target, -constant);
    Ok(ProportionalityFit {
        constant,
        residual: diff.frobenius_norm(),
        trivially_zero: false,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_matrix, seeded};

    #[test]
    fn self_fit() {
        let mut rng = seeded(1);
        let t = random_matrix(3, &mut rng);
        let f = proportionality_fit(&t, &t, 1e-10).unwrap();
        assert!((f.constant - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn zero_block_is_trivial() {
        let t = CMatrix::identity(2);
        let f = proportionality_fit(&CMatrix::zeros(2, 2), &t, 1e-10).unwrap();
        assert!(f.trivially_zero);
        assert_eq!(f.constant, ZERO);
    }

    #[test]
    fn scalar_multiple() {
        let mut rng = seeded(2);
        let t = random_matrix(4, &mut rng);
        let c = C64::from_polar(2.5, std::f64::consts::PI / 3.0);
        let x = t.scale(c);
        let f = proportionality_fit(&x, &t, 1e-10).unwrap();
        assert!((f.constant - c).norm() < 1e-12);
        assert!(f.residual <= 1e-12 * x.frobenius_norm());
    }

    #[test]
    fn zero_target_rejected() {
        let z = CMatrix::zeros(2, 2);
        assert!(matches!(proportionality_fit(&z, &z, 1e-10), Err(Error::ZeroTarget)));
    }
}
