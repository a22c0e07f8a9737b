use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// Explicit assignment of central-system unitaries to ancilla pairs `(m, n)`.
pub type EdgeMap = BTreeMap<(usize, usize), CMatrix>;

/// Tolerance applied to unitarity of representatives and the anchor identity.
pub const UNITARY_TOL: f64 = 1e-10;

/// A unitary cocycle `{U_mn}` stored through representatives
/// `V_m = U_{m,anchor}`, so that `U_mn = V_m V_n†`.
///
/// Storing representatives makes `U_me U_en = U_mn`, `U_mm = I` and
/// `U_mn = U_nm†` hold by construction. Phases are part of the data: two
/// families whose edges differ by a global phase are different families.
#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    d_a: usize,
    d_b: usize,
    reps: Vec<CMatrix>,
    anchor: usize,
}

impl UnitaryFamily {
    pub fn new(d_a: usize, d_b: usize, reps: Vec<CMatrix>, anchor: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidParameter("family dimensions must be positive".into()));
        }
        if reps.len() != d_a {
            return Err(Error::Dimension(format!(
                "{} representatives for {d_a} ancilla levels",
                reps.len()
            )));
        }
        if anchor >= d_a {
            return Err(Error::IndexOutOfRange { what: "anchor", index: anchor, bound: d_a });
        }
        for (index, v) in reps.iter().enumerate() {
            v.ensure_shape(d_b, d_b, "representative")?;
            let defect = v.unitarity_defect();
            if defect > UNITARY_TOL {
                return Err(Error::NotUnitary { index, defect });
            }
        }
        let anchor_defect = (&reps[anchor] - &CMatrix::identity(d_b)).frobenius_norm();
        if anchor_defect > UNITARY_TOL {
            return Err(Error::AnchorNotIdentity(anchor_defect));
        }
        Ok(Self { d_a, d_b, reps, anchor })
    }

    /// All edges equal to the identity.
    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Self {
            d_a,
            d_b,
            reps: vec![CMatrix::identity(d_b); d_a],
            anchor: 0,
        }
    }

    /// Converts an explicit edge map into a family after checking the
    /// cocycle conditions on every triple.
    pub fn from_edge_map(d_a: usize, d_b: usize, map: &EdgeMap, anchor: usize, tol: f64) -> Result<Self> {
        let report = verify_cocycle(map, d_a, tol)?;
        if !report.holds {
            return Err(Error::CocycleViolation {
                residual: report.worst_residual,
                triple: report.worst_triple.unwrap_or((0, 0, 0)),
            });
        }
        if anchor >= d_a {
            return Err(Error::IndexOutOfRange { what: "anchor", index: anchor, bound: d_a });
        }
        let reps = (0..d_a).map(|m| map[&(m, anchor)].clone()).collect();
        Self::new(d_a, d_b, reps, anchor)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn representative(&self, m: usize) -> &CMatrix {
        &self.reps[m]
    }

    pub fn representatives(&self) -> &[CMatrix] {
        &self.reps
    }

    /// `U_mn = V_m V_n†`.
    pub fn edge(&self, m: usize, n: usize) -> CMatrix {
        assert!(m < self.d_a && n < self.d_a, "edge ({m}, {n}) outside d_A = {}", self.d_a);
        self.reps[m].matmul(&self.reps[n].adjoint())
    }

    pub fn edge_checked(&self, m: usize, n: usize) -> Result<CMatrix> {
        self.check_index("ancilla", m)?;
        self.check_index("ancilla", n)?;
        Ok(self.edge(m, n))
    }

    pub fn check_index(&self, what: &'static str, index: usize) -> Result<()> {
        if index < self.d_a {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { what, index, bound: self.d_a })
        }
    }

    /// The same edges, re-expressed with representatives anchored at `k`.
    pub fn with_anchor(&self, k: usize) -> Result<Self> {
        self.check_index("anchor", k)?;
        let vk = self.reps[k].adjoint();
        let reps = self.reps.iter().map(|v| v.matmul(&vk)).collect();
        Ok(Self {
            d_a: self.d_a,
            d_b: self.d_b,
            reps,
            anchor: k,
        })
    }

    pub fn edge_map(&self) -> EdgeMap {
        let mut map = EdgeMap::new();
        for m in 0..self.d_a {
            for n in 0..self.d_a {
                map.insert((m, n), self.edge(m, n));
            }
        }
        map
    }

    /// `U_AB = Σ_m |m⟩⟨m| ⊗ U_{m,anchor}`, which conjugates `h ⊗ I` into the
    /// lifted PI operator.
    pub fn conjugation_unitary(&self) -> CMatrix {
        let d = self.d_a * self.d_b;
        let mut u = CMatrix::zeros(d, d);
        for (m, v) in self.reps.iter().enumerate() {
            u.set_block(m * self.d_b, m * self.d_b, v);
        }
        u
    }
}

#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub holds: bool,
    /// Largest `‖U_me U_en − U_mn‖_F` over all triples.
    pub worst_residual: f64,
    pub worst_triple: Option<(usize, usize, usize)>,
    /// Largest `‖U_mm − I‖_F`.
    pub identity_defect: f64,
    /// Largest `‖U_mn − U_nm†‖_F`.
    pub adjoint_defect: f64,
}

/// Checks `U_me U_en = U_mn` on all `d_A³` triples, plus `U_mm = I` and
/// `U_mn = U_nm†`. Every pair must be present in the map.
pub fn verify_cocycle(map: &EdgeMap, d_a: usize, tol: f64) -> Result<CocycleReport> {
    let get = |m: usize, n: usize| map.get(&(m, n)).ok_or(Error::MissingEdge(m, n));
    let mut worst_residual = 0.0f64;
    let mut worst_triple = None;
    for m in 0..d_a {
        for e in 0..d_a {
            for n in 0..d_a {
                let lhs = get(m, e)?.matmul(get(e, n)?);
                let res = (&lhs - get(m, n)?).frobenius_norm();
                if res > worst_residual || worst_triple.is_none() {
                    worst_residual = worst_residual.max(res);
                    worst_triple = Some((m, e, n));
                }
            }
        }
    }
    let mut identity_defect = 0.0f64;
    let mut adjoint_defect = 0.0f64;
    for m in 0..d_a {
        let u = get(m, m)?;
        identity_defect = identity_defect.max((u - &CMatrix::identity(u.rows())).frobenius_norm());
        for n in 0..d_a {
            adjoint_defect = adjoint_defect.max((get(m, n)? - &get(n, m)?.adjoint()).frobenius_norm());
        }
    }
    Ok(CocycleReport {
        holds: worst_residual <= tol && identity_defect <= tol && adjoint_defect <= tol,
        worst_residual,
        worst_triple,
        identity_defect,
        adjoint_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, random_unitary, seeded};
    use crate::numerics::{expm, C64, I};

    pub(crate) fn random_family(d_a: usize, d_b: usize, seed: u64) -> UnitaryFamily {
        let mut rng = seeded(seed);
        let mut reps: Vec<CMatrix> = (0..d_a).map(|_| random_unitary(d_b, &mut rng)).collect();
        reps[0] = CMatrix::identity(d_b);
        UnitaryFamily::new(d_a, d_b, reps, 0).unwrap()
    }

    #[test]
    fn identity_family_edges() {
        let f = UnitaryFamily::identity(3, 2);
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(f.edge(m, n), CMatrix::identity(2));
            }
        }
        assert!(verify_cocycle(&f.edge_map(), 3, 1e-12).unwrap().holds);
    }

    #[test]
    fn two_level_phase_family() {
        let v2 = CMatrix::diag(&[C64::from_polar(1.0, 0.3), C64::from_polar(1.0, 1.1)]);
        let f = UnitaryFamily::new(2, 2, vec![CMatrix::identity(2), v2.clone()], 0).unwrap();
        assert_eq!(f.edge(1, 0), v2);
        assert!((&f.edge(0, 1) - &v2.adjoint()).frobenius_norm() < 1e-15);
        assert!((&f.edge(0, 0) - &CMatrix::identity(2)).frobenius_norm() < 1e-15);
        assert!((&f.edge(1, 1) - &CMatrix::identity(2)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn random_family_cocycle_exhaustive() {
        let f = random_family(3, 2, 7);
        let report = verify_cocycle(&f.edge_map(), 3, 1e-12).unwrap();
        assert!(report.holds);
        assert!(report.worst_residual <= 1e-12);
    }

    #[test]
    fn perturbed_edge_detected() {
        let f = random_family(3, 2, 8);
        let mut map = f.edge_map();
        let mut rng = seeded(99);
        let kick = expm(&random_hermitian(2, &mut rng), -I * 1e-3).unwrap();
        let bad = map[&(0, 2)].matmul(&kick);
        map.insert((0, 2), bad);
        let report = verify_cocycle(&map, 3, 1e-9).unwrap();
        assert!(!report.holds);
        let (m, e, n) = report.worst_triple.unwrap();
        assert!([(m, e), (e, n), (m, n)].contains(&(0, 2)));
    }

    #[test]
    fn rejects_bad_inputs() {
        let nonunitary = CMatrix::identity(2).scale_real(2.0);
        assert!(matches!(
            UnitaryFamily::new(2, 2, vec![CMatrix::identity(2), nonunitary], 0),
            Err(Error::NotUnitary { index: 1, .. })
        ));
        let sx = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            UnitaryFamily::new(2, 2, vec![sx, CMatrix::identity(2)], 0),
            Err(Error::AnchorNotIdentity(_))
        ));
        let mut map = UnitaryFamily::identity(2, 1).edge_map();
        map.remove(&(1, 0));
        assert!(matches!(verify_cocycle(&map, 2, 1e-12), Err(Error::MissingEdge(1, 0))));
    }

    #[test]
    fn reanchoring_preserves_edges() {
        let f = random_family(3, 3, 12);
        let g = f.with_anchor(2).unwrap();
        assert!((&g.representative(2).clone() - &CMatrix::identity(3)).frobenius_norm() < 1e-12);
        for m in 0..3 {
            for n in 0..3 {
                assert!((&f.edge(m, n) - &g.edge(m, n)).frobenius_norm() < 1e-12);
            }
        }
        let back = UnitaryFamily::from_edge_map(3, 3, &f.edge_map(), 1, 1e-10).unwrap();
        assert!((&back.edge(2, 0) - &f.edge(2, 0)).frobenius_norm() < 1e-12);
    }
}
