use rand::Rng;

use super::hs::{ancilla_diagonal_slots, SuperOp};
use super::lindblad::LindbladModel;
use crate::algebra::{membership, multiset_distance, AlgebraGraph, SpectrumReport, UnitaryFamily};
use crate::error::{Error, Result};
use crate::numerics::{eig, eigenvalues, expm, ode_propagate, proportionality_fit, CMatrix, ProportionalityFit, C64, ONE, ZERO};

/// The `|rr⟩⟩⟨⟨ii|` block of a superoperator: the induced map on the
/// central system, row-stacked, of size `d_B² × d_B²`.
pub fn projected_hs_block(w_hat: &CMatrix, d_a: usize, d_b: usize, i: usize, r: usize) -> Result<CMatrix> {
    let d = d_a * d_b;
    w_hat.ensure_shape(d * d, d * d, "superoperator")?;
    for (what, index) in [("initial ancilla", i), ("final ancilla", r)] {
        if index >= d_a {
            return Err(Error::IndexOutOfRange { what, index, bound: d_a });
        }
    }
    Ok(w_hat.select(&ancilla_diagonal_slots(d_a, d_b, r), &ancilla_diagonal_slots(d_a, d_b, i)))
}

/// `V ⊗ V*`: conjugation by `V` in row-stacked form.
pub fn conjugation_superop(v: &CMatrix) -> CMatrix {
    v.kron(&v.conj())
}

#[derive(Clone, Debug)]
pub struct GateCondition {
    pub block: CMatrix,
    pub fit: ProportionalityFit,
    /// Relative distance of the induced central map from a single-Kraus
    /// map `X ↦ V X V†` (any `V`), zero for trivially-zero blocks.
    pub channel_unitarity: f64,
}

/// Projects `w_hat` between ancilla `i` and `r` and fits the result against
/// conjugation by `U_ri`.
pub fn pi_gate_condition(w_hat: &SuperOp, family: &UnitaryFamily, i: usize, r: usize, zero_tol: f64) -> Result<GateCondition> {
    let u = family.edge_checked(r, i)?;
    pi_gate_condition_against(w_hat, family.d_a(), &u, i, r, zero_tol)
}

pub fn pi_gate_condition_against(
    w_hat: &SuperOp,
    d_a: usize,
    target_unitary: &CMatrix,
    i: usize,
    r: usize,
    zero_tol: f64,
) -> Result<GateCondition> {
    let d_b = target_unitary.rows();
    let block = projected_hs_block(w_hat.matrix(), d_a, d_b, i, r)?;
    let fit = proportionality_fit(&block, &conjugation_superop(target_unitary), zero_tol)?;
    let channel_unitarity = if fit.trivially_zero { 0.0 } else { rank_one_defect(&block, d_b)? };
    Ok(GateCondition {
        block,
        fit,
        channel_unitarity,
    })
}

/// Reshuffles a row-stacked central map `M` so that `V ⊗ V*` becomes the
/// rank-one matrix `vec(V) vec(V)†`, then measures the relative norm outside
/// the leading singular direction.
fn rank_one_defect(block: &CMatrix, d_b: usize) -> Result<f64> {
    let n = d_b * d_b;
    let mut shuffled = CMatrix::zeros(n, n);
    for j in 0..d_b {
        for k in 0..d_b {
            for jp in 0..d_b {
                for kp in 0..d_b {
                    shuffled[(j * d_b + jp, k * d_b + kp)] = block[(j * d_b + k, jp * d_b + kp)];
                }
            }
        }
    }
    let total = shuffled.frobenius_norm().powi(2);
    if total == 0.0 {
        return Ok(0.0);
    }
    let gram = shuffled.matmul(&shuffled.adjoint());
    let top = eigenvalues(&gram)?.iter().map(|z| z.re).fold(0.0, f64::max);
    Ok(((total - top).max(0.0) / total).sqrt())
}

/// Evolution superoperator of the model over `[0, t]`: a single
/// exponential for time-independent models, RK4 with `steps` otherwise.
pub fn evolve(model: &LindbladModel, t: f64, steps: usize) -> Result<SuperOp> {
    let d = model.dim();
    if !model.is_time_dependent() {
        let l = super::lindblad::liouvillian(model)?;
        return SuperOp::new(d, expm(l.matrix(), ONE * t)?);
    }
    let l_eff = model.no_jump_generator();
    let w = ode_propagate(
        |s| {
            let mut g = l_eff.matrix().clone();
            g += model.jump_superop_at(s).expect("frame covers all t").matrix();
            g
        },
        &CMatrix::identity(d * d),
        t,
        steps,
    )?;
    SuperOp::new(d, w)
}

/// Spectral correspondence in HS space for the coefficient tensor
/// `h[((m·d_A + n)·d_A + p)·d_A + q] = h_{mn,pq}`.
pub fn lemma3_verify(coefficients: &[C64], family: &UnitaryFamily, tol: f64) -> Result<SpectrumReport> {
    lemma3_verify_with_anchor(coefficients, family, family.anchor(), tol)
}

pub fn lemma3_verify_with_anchor(coefficients: &[C64], family: &UnitaryFamily, l: usize, tol: f64) -> Result<SpectrumReport> {
    family.check_index("anchor", l)?;
    let d_a = family.d_a();
    let d_b = family.d_b();
    let na = d_a * d_a;
    if coefficients.len() != na * na {
        return Err(Error::Dimension(format!(
            "{} coefficients for d_A = {d_a} (need {})",
            coefficients.len(),
            na * na
        )));
    }
    let h_a = CMatrix::from_vec(na, na, coefficients.to_vec())?;
    let d = d_a * d_b;
    let mut h_ab = CMatrix::zeros(d * d, d * d);
    let mut idx = 0;
    for m in 0..d_a {
        for n in 0..d_a {
            for p in 0..d_a {
                for q in 0..d_a {
                    let c = coefficients[idx];
                    idx += 1;
                    if c == ZERO {
                        continue;
                    }
                    let base = super::hs::hs_base_vector(family, m, n, p, q)?;
                    h_ab.add_scaled(base.matrix(), c);
                }
            }
        }
    }
    let anc = eig(&h_a)?;
    let composite = eigenvalues(&h_ab)?;
    let expected: Vec<C64> = anc.values.iter().flat_map(|&x| std::iter::repeat(x).take(d_b * d_b)).collect();
    let max_pairing_distance = multiset_distance(&expected, &composite);

    let edges: Vec<CMatrix> = (0..d_a).map(|m| family.edge(m, l)).collect();
    let mut residuals = Vec::with_capacity(na * d_b * d_b);
    for (e, &lambda) in anc.values.iter().enumerate() {
        let c = anc.vector(e);
        for j in 0..d_b {
            for k in 0..d_b {
                // X = Σ c_mn |m⟩⟨n| ⊗ U_ml |j⟩⟨k| U_nl†
                let mut x = CMatrix::zeros(d, d);
                for m in 0..d_a {
                    for n in 0..d_a {
                        let cmn = c[m * d_a + n];
                        for a in 0..d_b {
                            for b in 0..d_b {
                                x[(m * d_b + a, n * d_b + b)] = cmn * edges[m][(a, j)] * edges[n][(b, k)].conj();
                            }
                        }
                    }
                }
                let v = x.as_slice();
                let hv = h_ab.mul_vec(v);
                let res = hv.iter().zip(v).map(|(y, z)| (y - lambda * z).norm_sqr()).sum::<f64>().sqrt();
                residuals.push(res);
            }
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelOperator {
    Hamiltonian,
    Jump(usize),
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub operator: ModelOperator,
    /// Membership residual, maximized over the spot-check times for framed jumps.
    pub residual: f64,
    pub member: bool,
}

#[derive(Clone, Debug)]
pub struct SpotCheck {
    pub t: f64,
    /// Largest relative gate-condition residual over all ancilla pairs.
    pub worst_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Theorem1Report {
    pub exact_pi: bool,
    /// Every model operator with its membership residual.
    pub witnesses: Vec<Witness>,
    pub graph: AlgebraGraph,
    pub spot_checks: Vec<SpotCheck>,
    /// Whether all spot checks passed; only evaluated when `exact_pi`.
    pub consistent: bool,
}

impl Theorem1Report {
    pub fn failing(&self) -> impl Iterator<Item = &Witness> {
        self.witnesses.iter().filter(|w| !w.member)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Theorem1Options {
    pub tol: f64,
    pub gate_tol: f64,
    pub zero_tol: f64,
    /// Spot-check times are drawn from `(0, horizon]`.
    pub horizon: f64,
    pub samples: usize,
    pub steps: usize,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            gate_tol: 1e-8,
            zero_tol: 1e-10,
            horizon: std::f64::consts::PI,
            samples: 3,
            steps: 2000,
        }
    }
}

/// Exact PI criterion: the Hamiltonian and every jump belong to the
/// self-adjoint extension of `graph`. When they do, the gate condition is
/// spot-checked on the evolved channel at random times.
pub fn theorem1_check<R: Rng + ?Sized>(
    model: &LindbladModel,
    graph: &AlgebraGraph,
    opts: &Theorem1Options,
    rng: &mut R,
) -> Result<Theorem1Report> {
    let closure = graph.closure_check();
    if !closure.closed {
        return Err(Error::NotClosed(closure.missing_edges));
    }
    let graph = graph.self_adjoint_extension()?;
    let family = graph.family();
    if family.d_a() != model.d_a() || family.d_b() != model.d_b() {
        return Err(Error::Dimension("graph family does not match the model".into()));
    }
    let times: Vec<f64> = (0..opts.samples.max(1))
        .map(|_| opts.horizon * (1.0 - rng.gen::<f64>()))
        .collect();

    let mut witnesses = Vec::with_capacity(model.jumps().len() + 1);
    let h_res = membership(model.hamiltonian(), &graph)?.residual;
    witnesses.push(Witness {
        operator: ModelOperator::Hamiltonian,
        residual: h_res,
        member: h_res <= opts.tol,
    });
    for (index, jump) in model.jumps().iter().enumerate() {
        let residual = if jump.is_time_dependent() {
            let mut worst = 0.0f64;
            for &t in &times {
                worst = worst.max(membership(&jump.operator_at(t)?, &graph)?.residual);
            }
            worst
        } else {
            membership(&jump.operator, &graph)?.residual
        };
        witnesses.push(Witness {
            operator: ModelOperator::Jump(index),
            residual,
            member: residual <= opts.tol,
        });
    }
    let exact_pi = witnesses.iter().all(|w| w.member);

    let mut spot_checks = Vec::new();
    let mut consistent = true;
    if exact_pi {
        for &t in &times {
            let w_hat = evolve(model, t, opts.steps)?;
            let mut worst = 0.0f64;
            for i in 0..family.d_a() {
                for r in 0..family.d_a() {
                    let gc = pi_gate_condition(&w_hat, family, i, r, opts.zero_tol)?;
                    worst = worst.max(gc.fit.relative_residual());
                }
            }
            consistent &= worst <= opts.gate_tol;
            spot_checks.push(SpotCheck { t, worst_residual: worst });
        }
    }
    Ok(Theorem1Report {
        exact_pi,
        witnesses,
        graph,
        spot_checks,
        consistent,
    })
}
