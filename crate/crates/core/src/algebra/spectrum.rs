use super::element::PIElement;
use super::family::UnitaryFamily;
use crate::error::Result;
use crate::numerics::{eig, eigenvalues, CMatrix, C64, ZERO};

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub ancilla_eigenvalues: Vec<C64>,
    pub composite_eigenvalues: Vec<C64>,
    /// Largest distance between paired eigenvalues after optimal matching.
    pub max_pairing_distance: f64,
    pub multiplicity_verified: bool,
    pub eigvec_residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn max_eigvec_residual(&self) -> f64 {
        self.eigvec_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Minimum-cost perfect matching on a square cost matrix given row-major.
/// Returns `assignment[row] = col`.
pub fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    // potentials and matching use 1-based sentinel column 0
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Matches two equal-length multisets of complex numbers, minimizing the
/// summed distance, and returns the largest paired distance.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let cost: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).collect();
    hungarian(&cost, n)
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .fold(0.0, f64::max)
}

/// Spectral correspondence between `h` and its lift: each ancilla
/// eigenvalue appears `d_B` times in the composite spectrum, with
/// eigenvectors `Σ_m c_m |m⟩ ⊗ U_mk |j⟩` for the family's anchor `k`.
pub fn lemma1_verify(h: &CMatrix, family: &UnitaryFamily, tol: f64) -> Result<SpectrumReport> {
    lemma1_verify_with_anchor(h, family, family.anchor(), tol)
}

pub fn lemma1_verify_with_anchor(h: &CMatrix, family: &UnitaryFamily, k: usize, tol: f64) -> Result<SpectrumReport> {
    family.check_index("anchor", k)?;
    let h_ab = PIElement::lift(h, family)?.realize();
    let d_a = family.d_a();
    let d_b = family.d_b();
    let anc = eig(h)?;
    let composite = eigenvalues(&h_ab)?;
    let expected: Vec<C64> = anc.values.iter().flat_map(|&l| std::iter::repeat(l).take(d_b)).collect();
    let max_pairing_distance = multiset_distance(&expected, &composite);

    let edges: Vec<CMatrix> = (0..d_a).map(|m| family.edge(m, k)).collect();
    let mut residuals = Vec::with_capacity(d_a * d_b);
    for (i, &lambda) in anc.values.iter().enumerate() {
        let c = anc.vector(i);
        for j in 0..d_b {
            let mut v = vec![ZERO; d_a * d_b];
            for m in 0..d_a {
                for l in 0..d_b {
                    v[m * d_b + l] = c[m] * edges[m][(l, j)];
                }
            }
            let hv = h_ab.mul_vec(&v);
            let res = hv
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            residuals.push(res);
        }
    }
    let ok = max_pairing_distance <= tol && residuals.iter().all(|&r| r <= tol);
    Ok(SpectrumReport {
        ancilla_eigenvalues: anc.values,
        composite_eigenvalues: composite,
        max_pairing_distance,
        multiplicity_verified: ok,
        eigvec_residuals: residuals,
    })
}
