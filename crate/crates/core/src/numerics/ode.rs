//! Fixed-step classical Runge–Kutta integration for linear matrix ODEs.

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Integrates a system of matrix-valued states `dX_j/dt = f_j(t, X)` from
/// `t0` to `t1` in `steps` equal RK4 steps.
pub fn rk4_system<F>(mut rhs: F, initial: Vec<CMatrix>, t0: f64, t1: f64, steps: usize) -> Result<Vec<CMatrix>>
where
    F: FnMut(f64, &[CMatrix]) -> Vec<CMatrix>,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("integrator needs at least one step".into()));
    }
    let h = (t1 - t0) / steps as f64;
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let mut state = initial;
    let shifted = |base: &[CMatrix], k: &[CMatrix], s: C64| -> Vec<CMatrix> {
        base.iter()
            .zip(k)
            .map(|(b, d)| {
                let mut out = b.clone();
                out.add_scaled(d, s);
                out
            })
            .collect()
    };
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let k1 = rhs(t, &state);
        let k2 = rhs(t + 0.5 * h, &shifted(&state, &k1, half));
        let k3 = rhs(t + 0.5 * h, &shifted(&state, &k2, half));
        let k4 = rhs(t + h, &shifted(&state, &k3, full));
        for (j, x) in state.iter_mut().enumerate() {
            x.add_scaled(&k1[j], sixth);
            x.add_scaled(&k2[j], sixth * 2.0);
            x.add_scaled(&k3[j], sixth * 2.0);
            x.add_scaled(&k4[j], sixth);
        }
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::IntegrationDiverged(t + h));
        }
    }
    Ok(state)
}

/// Solves `dX/dt = G(t) X` on `[0, t_final]` with `steps` RK4 steps.
pub fn ode_propagate<G>(generator: G, initial: &CMatrix, t_final: f64, steps: usize) -> Result<CMatrix>
where
    G: Fn(f64) -> CMatrix,
{
    let out = rk4_system(
        |t, x| vec![generator(t).matmul(&x[0])],
        vec![initial.clone()],
        0.0,
        t_final,
        steps,
    )?;
    Ok(out.into_iter().next().expect("one state"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm::expm;
    use crate::numerics::matrix::ONE;
    use crate::numerics::random::{random_matrix, seeded};

    fn generator() -> CMatrix {
        let mut rng = seeded(21);
        let g = random_matrix(4, &mut rng);
        g.scale_real(2.0 / g.frobenius_norm())
    }

    #[test]
    fn constant_generator_matches_expm() {
        let g = generator();
        let w = ode_propagate(|_| g.clone(), &CMatrix::identity(4), 1.0, 1000).unwrap();
        let exact = expm(&g, ONE).unwrap();
        assert!((&w - &exact).frobenius_norm() < 1e-8);
    }

    #[test]
    fn zero_generator_keeps_initial() {
        let mut rng = seeded(4);
        let x0 = random_matrix(3, &mut rng);
        let w = ode_propagate(|_| CMatrix::zeros(3, 3), &x0, 2.0, 7).unwrap();
        assert_eq!(w, x0);
    }

    #[test]
    fn fourth_order_convergence() {
        let g = generator().scale_real(3.0);
        let exact = expm(&g, ONE).unwrap();
        let err = |steps| {
            let w = ode_propagate(|_| g.clone(), &CMatrix::identity(4), 1.0, steps).unwrap();
            (&w - &exact).frobenius_norm()
        };
        let coarse = err(20);
        let fine = err(40);
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn divergence_detected() {
        let g = CMatrix::identity(1).scale_real(1e200);
        assert!(matches!(
            ode_propagate(|_| g.clone(), &CMatrix::identity(1), 1.0, 2),
            Err(Error::IntegrationDiverged(_))
        ));
    }
}
