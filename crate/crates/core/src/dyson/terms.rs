use super::split::GeneratorSplit;
use crate::error::{Error, Result};
use crate::numerics::{expm_generic, rk4_system, CMatrix, Csr, PadeOps, C64, ONE};

/// Dyson terms `Ŵ_0 … Ŵ_pmax` at time `t`, optionally restricted to a subset
/// of input columns (HS slots) of the superoperators.
#[derive(Clone, Debug)]
pub struct DysonStack {
    pub t: f64,
    pub dim: usize,
    /// Input HS slots kept in every term, in order.
    pub columns: Vec<usize>,
    pub terms: Vec<CMatrix>,
}

impl DysonStack {
    pub fn pmax(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_full(&self) -> bool {
        self.columns.len() == self.dim * self.dim
    }

    pub fn sum(&self) -> CMatrix {
        let mut acc = self.terms[0].clone();
        for term in &self.terms[1..] {
            acc += term;
        }
        acc
    }

    fn restricted(mut self, columns: Option<&[usize]>) -> Self {
        if let Some(cols) = columns {
            let rows: Vec<usize> = (0..self.dim * self.dim).collect();
            self.terms = self.terms.iter().map(|w| w.select(&rows, cols)).collect();
            self.columns = cols.to_vec();
        }
        self
    }
}

/// Upper-triangular block-Toeplitz matrix given by its first block row. The
/// exponential of the block-bidiagonal Dyson generator stays in this class.
#[derive(Clone, Debug)]
pub struct BlockToeplitz {
    pub blocks: Vec<CMatrix>,
}

impl PadeOps for BlockToeplitz {
    fn identity_like(&self) -> Self {
        let n = self.blocks[0].rows();
        let mut blocks = vec![CMatrix::zeros(n, n); self.blocks.len()];
        blocks[0] = CMatrix::identity(n);
        Self { blocks }
    }

    fn mul(&self, other: &Self) -> Self {
        let blocks = (0..self.blocks.len())
            .map(|k| {
                let mut acc = self.blocks[0].matmul(&other.blocks[k]);
                for j in 1..=k {
                    acc += &self.blocks[j].matmul(&other.blocks[k - j]);
                }
                acc
            })
            .collect();
        Self { blocks }
    }

    fn add_scaled(&mut self, other: &Self, s: C64) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.add_scaled(b, s);
        }
    }

    fn scaled(&self, s: C64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    fn norm_bound(&self) -> f64 {
        self.blocks.iter().map(CMatrix::norm_one).sum()
    }

    fn solve_with(&self, rhs: &Self) -> Result<Self> {
        let mut out: Vec<CMatrix> = Vec::with_capacity(rhs.blocks.len());
        for k in 0..rhs.blocks.len() {
            let mut b = rhs.blocks[k].clone();
            for j in 1..=k {
                b -= &self.blocks[j].matmul(&out[k - j]);
            }
            out.push(self.blocks[0].solve(&b)?);
        }
        Ok(Self { blocks: out })
    }
}

/// Dyson terms for a time-independent insertion `S` from one exponential of
/// the `(pmax+1)`-block bidiagonal generator. The superdiagonal is scaled by
/// `α ≈ ‖L_eff‖/‖S‖` so all blocks have comparable norms, then unscaled.
pub fn dyson_terms_constant(sp: &GeneratorSplit, t: f64, pmax: usize) -> Result<DysonStack> {
    let s = sp.s_jump()?;
    let d = sp.dim();
    let n = d * d;
    let l_norm = sp.l_eff.matrix().norm_one();
    let s_norm = s.matrix().norm_one();
    let alpha = if s_norm > 0.0 { (l_norm / s_norm).clamp(1.0, 1e8) } else { 1.0 };
    let mut blocks = vec![CMatrix::zeros(n, n); pmax + 1];
    blocks[0] = sp.l_eff.matrix().clone();
    if pmax >= 1 {
        blocks[1] = s.matrix().scale_real(alpha);
    }
    let e = expm_generic(&BlockToeplitz { blocks }, ONE * t)?;
    let terms = e
        .blocks
        .into_iter()
        .enumerate()
        .map(|(p, w)| w.scale_real(alpha.powi(-(p as i32))))
        .collect();
    Ok(DysonStack {
        t,
        dim: d,
        columns: (0..n).collect(),
        terms,
    })
}

/// As [`dyson_terms_constant`], keeping only the given input columns.
pub fn dyson_terms_constant_columns(sp: &GeneratorSplit, t: f64, pmax: usize, columns: Option<&[usize]>) -> Result<DysonStack> {
    Ok(dyson_terms_constant(sp, t, pmax)?.restricted(columns))
}

/// Integrates `dG_p/dt = L_eff G_p + S(t) G_{p−1}` with RK4, `G_0(0)` the
/// identity (restricted to `columns`) and `G_{p≥1}(0) = 0`.
pub fn dyson_terms_timedep(sp: &GeneratorSplit, t: f64, pmax: usize, steps: usize, columns: Option<&[usize]>) -> Result<DysonStack> {
    let d = sp.dim();
    let n = d * d;
    let cols: Vec<usize> = columns.map(<[usize]>::to_vec).unwrap_or_else(|| (0..n).collect());
    if let Some(&bad) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::IndexOutOfRange { what: "HS column", index: bad, bound: n });
    }
    let mut g0 = CMatrix::zeros(n, cols.len());
    for (j, &c) in cols.iter().enumerate() {
        g0[(c, j)] = ONE;
    }
    let mut initial = vec![CMatrix::zeros(n, cols.len()); pmax + 1];
    initial[0] = g0;
    let l = Csr::from_dense(sp.l_eff.matrix());
    let s_const = Csr::from_dense(sp.s_const.matrix());
    let mut failure = None;
    let terms = rk4_system(
        |s, g| {
            let mut framed = Vec::with_capacity(sp.framed.len());
            for jump in &sp.framed {
                match jump.operator_at(s) {
                    Ok(k) => framed.push(Csr::kron_conj(&k, &k)),
                    Err(e) => {
                        failure.get_or_insert(e);
                    }
                }
            }
            let mut out = Vec::with_capacity(g.len());
            out.push(l.mul(&g[0]));
            for p in 1..g.len() {
                let mut x = l.mul(&g[p]);
                s_const.mul_add(&g[p - 1], &mut x);
                for f in &framed {
                    f.mul_add(&g[p - 1], &mut x);
                }
                out.push(x);
            }
            out
        },
        initial,
        0.0,
        t,
        steps,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(DysonStack {
        t,
        dim: d,
        columns: cols,
        terms,
    })
}

/// Runs the hierarchy at `steps` and `2·steps` and accepts the finer result
/// when every non-negligible term agrees to relative `tol`.
pub fn dyson_terms_timedep_checked(
    sp: &GeneratorSplit,
    t: f64,
    pmax: usize,
    steps: usize,
    tol: f64,
    columns: Option<&[usize]>,
) -> Result<DysonStack> {
    let coarse = dyson_terms_timedep(sp, t, pmax, steps, columns)?;
    let fine = dyson_terms_timedep(sp, t, pmax, 2 * steps, columns)?;
    let error = self_convergence_error(&coarse, &fine);
    if error > tol {
        return Err(Error::InsufficientSteps {
            steps,
            doubled: 2 * steps,
            error,
            tol,
        });
    }
    Ok(fine)
}

fn self_convergence_error(a: &DysonStack, b: &DysonStack) -> f64 {
    let scale = b.terms.iter().map(CMatrix::frobenius_norm).fold(0.0, f64::max);
    a.terms
        .iter()
        .zip(&b.terms)
        .filter_map(|(x, y)| {
            let norm = y.frobenius_norm();
            (norm > 1e-14 * scale).then(|| (x - y).frobenius_norm() / norm)
        })
        .fold(0.0, f64::max)
}

/// Constant splits use the block exponential, time-dependent ones the
/// self-checked hierarchy.
pub fn dyson_stack(
    sp: &GeneratorSplit,
    t: f64,
    pmax: usize,
    steps: usize,
    ode_tol: f64,
    columns: Option<&[usize]>,
) -> Result<DysonStack> {
    if sp.is_constant() {
        dyson_terms_constant_columns(sp, t, pmax, columns)
    } else {
        dyson_terms_timedep_checked(sp, t, pmax, steps, ode_tol, columns)
    }
}
