use std::collections::BTreeMap;

use super::family::UnitaryFamily;
use super::graph::AlgebraGraph;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64, ZERO};

/// Coefficients `h_mn` over the base vectors of a graph.
#[derive(Clone, Debug)]
pub struct PIElement {
    graph: AlgebraGraph,
    coefficients: BTreeMap<(usize, usize), C64>,
}

/// Orthogonal decomposition of a composite operator over a graph's basis.
#[derive(Clone, Debug)]
pub struct Membership {
    pub coefficients: BTreeMap<(usize, usize), C64>,
    /// `‖x − Σ h_mn |m⟩⟨n| ⊗ U_mn‖_F`.
    pub residual: f64,
    pub norm: f64,
}

impl Membership {
    pub fn is_member(&self, tol: f64) -> bool {
        self.residual <= tol
    }

    pub fn relative_residual(&self) -> f64 {
        if self.norm == 0.0 {
            0.0
        } else {
            self.residual / self.norm
        }
    }
}

impl PIElement {
    pub fn new(graph: AlgebraGraph, coefficients: BTreeMap<(usize, usize), C64>) -> Result<Self> {
        if let Some(&(m, n)) = coefficients.keys().find(|&&(m, n)| !graph.contains(m, n)) {
            return Err(Error::MissingEdge(m, n));
        }
        Ok(Self { graph, coefficients })
    }

    /// `h ↦ Σ h_mn |m⟩⟨n| ⊗ U_mn` on the full graph.
    pub fn lift(h: &CMatrix, family: &UnitaryFamily) -> Result<Self> {
        let d_a = family.d_a();
        h.ensure_shape(d_a, d_a, "ancilla operator")?;
        let coefficients = (0..d_a)
            .flat_map(|m| (0..d_a).map(move |n| (m, n)))
            .map(|(m, n)| ((m, n), h[(m, n)]))
            .collect();
        Ok(Self {
            graph: AlgebraGraph::full(family.clone()),
            coefficients,
        })
    }

    pub fn graph(&self) -> &AlgebraGraph {
        &self.graph
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), C64> {
        &self.coefficients
    }

    /// The `d_A × d_A` matrix of coefficients (zero off the edge set).
    pub fn coefficient_matrix(&self) -> CMatrix {
        let d_a = self.graph.d_a();
        let mut h = CMatrix::zeros(d_a, d_a);
        for (&(m, n), &c) in &self.coefficients {
            h[(m, n)] = c;
        }
        h
    }

    /// Dense operator on the composite space, ancilla as the outer factor.
    pub fn realize(&self) -> CMatrix {
        let family = self.graph.family();
        let d_b = family.d_b();
        let d = family.d_a() * d_b;
        let mut out = CMatrix::zeros(d, d);
        for (&(m, n), &c) in &self.coefficients {
            if c == ZERO {
                continue;
            }
            let u = family.edge(m, n);
            for j in 0..d_b {
                for l in 0..d_b {
                    out[(m * d_b + j, n * d_b + l)] += c * u[(j, l)];
                }
            }
        }
        out
    }
}

/// Decomposes `x` over the base vectors of `graph`, using their
/// orthogonality: `h_mn = ⟨|m⟩⟨n| ⊗ U_mn, x⟩ / d_B`.
pub fn membership(x: &CMatrix, graph: &AlgebraGraph) -> Result<Membership> {
    let family = graph.family();
    let d_b = family.d_b();
    let d = family.d_a() * d_b;
    x.ensure_shape(d, d, "composite operator")?;
    let mut coefficients = BTreeMap::new();
    let mut recon = CMatrix::zeros(d, d);
    for &(m, n) in graph.edges() {
        let u = family.edge(m, n);
        let block = x.block(m * d_b, n * d_b, d_b, d_b);
        let c = u.inner(&block) / d_b as f64;
        coefficients.insert((m, n), c);
        recon.set_block(m * d_b, n * d_b, &u.scale(c));
    }
    Ok(Membership {
        coefficients,
        residual: (x - &recon).frobenius_norm(),
        norm: x.frobenius_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::family::UnitaryFamily;
    use crate::numerics::random::{random_hermitian, random_matrix, random_unitary, seeded};
    use crate::numerics::ONE;

    fn family(d_a: usize, d_b: usize, seed: u64) -> UnitaryFamily {
        let mut rng = seeded(seed);
        let mut reps: Vec<CMatrix> = (0..d_a).map(|_| random_unitary(d_b, &mut rng)).collect();
        reps[0] = CMatrix::identity(d_b);
        UnitaryFamily::new(d_a, d_b, reps, 0).unwrap()
    }

    #[test]
    fn lift_of_projector_and_identity_family() {
        let f = family(3, 2, 1);
        let p = CMatrix::unit(3, 0, 0);
        let e = PIElement::lift(&p, &f).unwrap().realize();
        assert!((&e - &p.kron(&CMatrix::identity(2))).frobenius_norm() < 1e-15);

        let mut rng = seeded(2);
        let h = random_hermitian(3, &mut rng);
        let id = UnitaryFamily::identity(3, 2);
        let e = PIElement::lift(&h, &id).unwrap().realize();
        assert!((&e - &h.kron(&CMatrix::identity(2))).frobenius_norm() < 1e-15);
    }

    #[test]
    fn lift_sigma_x_two_level() {
        let mut rng = seeded(3);
        let u = random_unitary(2, &mut rng);
        let f = UnitaryFamily::new(2, 2, vec![CMatrix::identity(2), u.clone()], 0).unwrap();
        let sx = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let got = PIElement::lift(&sx, &f).unwrap().realize();
        let mut expect = CMatrix::zeros(4, 4);
        expect.set_block(0, 2, &u.adjoint());
        expect.set_block(2, 0, &u);
        assert!((&got - &expect).frobenius_norm() < 1e-15);
    }

    #[test]
    fn conjugation_identity() {
        let f = family(3, 3, 4);
        let mut rng = seeded(5);
        let h = random_matrix(3, &mut rng);
        let u_ab = f.conjugation_unitary();
        let expect = u_ab.matmul(&h.kron(&CMatrix::identity(3))).matmul(&u_ab.adjoint());
        let got = PIElement::lift(&h, &f).unwrap().realize();
        assert!((&got - &expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn membership_round_trip() {
        let f = family(3, 2, 6);
        let mut rng = seeded(7);
        let h = random_matrix(3, &mut rng);
        let x = PIElement::lift(&h, &f).unwrap().realize();
        let mem = membership(&x, &AlgebraGraph::full(f)).unwrap();
        assert!(mem.residual < 1e-12);
        for (&(m, n), &c) in &mem.coefficients {
            assert!((c - h[(m, n)]).norm() < 1e-12);
        }
    }

    #[test]
    fn dephasing_is_member_of_loop_graph() {
        let f = family(3, 2, 8);
        let deph = CMatrix::diag(&[ONE * 0.3, ONE * -1.2, ONE * 2.0]).kron(&CMatrix::identity(2));
        let loops = AlgebraGraph::new(f, []).unwrap();
        assert!(membership(&deph, &loops).unwrap().residual < 1e-14);
    }

    #[test]
    fn off_algebra_block_residual_matches_projection() {
        let f = family(2, 2, 9);
        let mut rng = seeded(10);
        let w = random_unitary(2, &mut rng);
        let x = CMatrix::unit(2, 0, 1).kron(&w);
        let mem = membership(&x, &AlgebraGraph::full(f.clone())).unwrap();
        let overlap = f.edge(0, 1).inner(&w).norm_sqr() / 4.0;
        let expect = (1.0 - overlap).sqrt() * x.frobenius_norm();
        assert!((mem.residual - expect).abs() < 1e-12);
    }

    #[test]
    fn element_rejects_foreign_edges() {
        let g = AlgebraGraph::new(UnitaryFamily::identity(2, 1), []).unwrap();
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 1), ONE);
        assert!(matches!(PIElement::new(g, coeffs), Err(Error::MissingEdge(0, 1))));
    }
}
