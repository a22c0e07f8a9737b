use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::split::{split, GeneratorSplit};
use super::terms::{dyson_stack, DysonStack};
use crate::algebra::UnitaryFamily;
use crate::error::{Error, Result};
use crate::numerics::{proportionality_fit, CMatrix, C64};
use crate::propagation::DiagonalFrame;
use crate::superop::{conjugation_superop, LindbladModel};

/// Verdict for one ancilla path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PiOrder {
    /// Even the no-jump term violates the condition.
    Broken,
    /// Partial sums up to this order satisfy the condition, the next does not.
    Finite(usize),
    /// Every computed order satisfies the condition.
    Exact,
    /// The projected block is zero at every computed order.
    Unreachable,
}

impl fmt::Display for PiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiOrder::Broken => f.write_str("BROKEN"),
            PiOrder::Finite(n) => write!(f, "{n}"),
            PiOrder::Exact => f.write_str("EXACT"),
            PiOrder::Unreachable => f.write_str("UNREACHABLE"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PiOrderOptions {
    pub pmax: usize,
    pub pass_tol: f64,
    pub fail_tol: f64,
    /// Terms below `zero_tol` times the largest projected term are treated as zero.
    pub zero_tol: f64,
    pub steps: usize,
    pub ode_tol: f64,
    /// Generic times are drawn from `[window.0·T, window.1·T]`.
    pub window: (f64, f64),
    pub times: usize,
}

impl Default for PiOrderOptions {
    fn default() -> Self {
        Self {
            pmax: 6,
            pass_tol: 1e-7,
            fail_tol: 1e-4,
            zero_tol: 1e-10,
            steps: 2000,
            ode_tol: 1e-9,
            window: (0.3, 1.0),
            times: 3,
        }
    }
}

impl PiOrderOptions {
    pub fn validate(&self) -> Result<()> {
        if self.pmax == 0 {
            return Err(Error::InvalidParameter("pmax must be at least 1".into()));
        }
        if !(self.pass_tol > 0.0 && self.pass_tol < self.fail_tol) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < pass_tol < fail_tol (got {} and {})",
                self.pass_tol, self.fail_tol
            )));
        }
        if !(self.zero_tol > 0.0 && self.ode_tol > 0.0) || self.steps == 0 || self.times == 0 {
            return Err(Error::InvalidParameter("tolerances, steps and times must be positive".into()));
        }
        let (lo, hi) = self.window;
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidParameter(format!("invalid time window ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// Order analysis of one path at one time.
///
/// `term_residuals[p]` is the sine of the angle between the projected term
/// `Δ_p` and the target (zero when `Δ_p` is negligible); `residuals[k]` is
/// their running maximum, which vanishes exactly when every partial sum up
/// to `k` is proportional to the target. The partial-sum fits are reported
/// alongside.
#[derive(Clone, Debug)]
pub struct PiOrderEntry {
    pub i: usize,
    pub r: usize,
    pub t: f64,
    pub order: PiOrder,
    pub term_norms: Vec<f64>,
    pub term_residuals: Vec<f64>,
    pub residuals: Vec<f64>,
    pub constants: Vec<C64>,
    pub partial_residuals: Vec<f64>,
    /// Central unitary the blocks are compared against.
    pub target: CMatrix,
}

/// Classifies the projected Dyson terms of `stack` for path `i → r` against
/// conjugation by `target`. `dressing`, when given, multiplies every block
/// from the left (Schrödinger-picture rotation of the final level).
pub fn classify(
    stack: &DysonStack,
    d_a: usize,
    i: usize,
    r: usize,
    target: &CMatrix,
    dressing: Option<&CMatrix>,
    opts: &PiOrderOptions,
) -> Result<PiOrderEntry> {
    let d_b = target.rows();
    let d = d_a * d_b;
    if stack.dim != d {
        return Err(Error::Dimension(format!("stack of dimension {} for composite {d}", stack.dim)));
    }
    let slots = |a: usize| -> Vec<usize> {
        (0..d_b)
            .flat_map(|j| (0..d_b).map(move |k| (a * d_b + j) * d + a * d_b + k))
            .collect()
    };
    let positions: BTreeMap<usize, usize> = stack.columns.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    let cols = slots(i)
        .into_iter()
        .map(|c| positions.get(&c).copied().ok_or(Error::IndexOutOfRange { what: "stack column", index: c, bound: d * d }))
        .collect::<Result<Vec<_>>>()?;
    let rows = slots(r);
    let t_hat = conjugation_superop(target);
    let blocks: Vec<CMatrix> = stack
        .terms
        .iter()
        .map(|w| {
            let b = w.select(&rows, &cols);
            match dressing {
                Some(rot) => rot.matmul(&b),
                None => b,
            }
        })
        .collect();

    let term_norms: Vec<f64> = blocks.iter().map(CMatrix::frobenius_norm).collect();
    let scale = term_norms.iter().copied().fold(0.0, f64::max);
    let mut term_residuals = Vec::with_capacity(blocks.len());
    for (b, &norm) in blocks.iter().zip(&term_norms) {
        if norm == 0.0 || norm <= opts.zero_tol * scale {
            term_residuals.push(0.0);
        } else {
            let fit = proportionality_fit(b, &t_hat, 0.0)?;
            term_residuals.push(fit.residual / norm);
        }
    }
    let mut residuals = Vec::with_capacity(blocks.len());
    let mut running = 0.0f64;
    for &x in &term_residuals {
        running = running.max(x);
        residuals.push(running);
    }
    let mut constants = Vec::with_capacity(blocks.len());
    let mut partial_residuals = Vec::with_capacity(blocks.len());
    let mut acc = CMatrix::zeros(d_b * d_b, d_b * d_b);
    for b in &blocks {
        acc += b;
        let fit = proportionality_fit(&acc, &t_hat, 0.0)?;
        constants.push(fit.constant);
        partial_residuals.push(fit.residual);
    }

    let order = if scale <= opts.zero_tol * t_hat.frobenius_norm() {
        PiOrder::Unreachable
    } else {
        match term_residuals.iter().position(|&x| x > opts.pass_tol) {
            None => PiOrder::Exact,
            Some(k) => {
                let residual = term_residuals[k];
                if residual < opts.fail_tol {
                    return Err(Error::GrayZone {
                        i,
                        r,
                        t: stack.t,
                        k,
                        residual,
                        pass_tol: opts.pass_tol,
                        fail_tol: opts.fail_tol,
                    });
                }
                if k == 0 {
                    PiOrder::Broken
                } else {
                    PiOrder::Finite(k - 1)
                }
            }
        }
    };
    Ok(PiOrderEntry {
        i,
        r,
        t: stack.t,
        order,
        term_norms,
        term_residuals,
        residuals,
        constants,
        partial_residuals,
        target: target.clone(),
    })
}

fn seed_columns(d_a: usize, d_b: usize, i: usize) -> Vec<usize> {
    let d = d_a * d_b;
    (0..d_b)
        .flat_map(|j| (0..d_b).map(move |k| (i * d_b + j) * d + i * d_b + k))
        .collect()
}

fn check_path(family: &UnitaryFamily, i: usize, r: usize) -> Result<()> {
    family.check_index("initial ancilla", i)?;
    family.check_index("final ancilla", r)
}

/// Interaction-picture order of path `i → r` at time `t`.
pub fn pi_order(model: &LindbladModel, family: &UnitaryFamily, i: usize, r: usize, t: f64, opts: &PiOrderOptions) -> Result<PiOrderEntry> {
    opts.validate()?;
    check_path(family, i, r)?;
    let sp = split(model);
    let cols = seed_columns(family.d_a(), family.d_b(), i);
    let stack = dyson_stack(&sp, t, opts.pmax, opts.steps, opts.ode_tol, Some(&cols))?;
    classify(&stack, family.d_a(), i, r, &family.edge(r, i), None, opts)
}

/// Lab-frame order: blocks dressed by `R_r(t) ⊗ R_r(t)*` and compared with
/// `R_r(t) U_ri`. Fails with [`Error::FrameDependence`] if the verdict
/// differs from the interaction picture.
pub fn schrodinger_pi_order(
    model: &LindbladModel,
    family: &UnitaryFamily,
    i: usize,
    r: usize,
    t: f64,
    frame: &DiagonalFrame,
    opts: &PiOrderOptions,
) -> Result<PiOrderEntry> {
    let report = pi_order_report(model, family, &[(i, r)], &[t], opts, Some(frame))?;
    let path = report.paths.into_iter().next().expect("one path");
    Ok(path.lab_entries.into_iter().next().expect("one time"))
}

/// Draws `opts.times` generic evaluation times in the configured window.
pub fn generic_times<R: Rng + ?Sized>(gate_time: f64, opts: &PiOrderOptions, rng: &mut R) -> Vec<f64> {
    let (lo, hi) = opts.window;
    (0..opts.times)
        .map(|_| {
            let u: f64 = rng.gen();
            gate_time * (lo + (hi - lo) * u)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PathOrder {
    pub i: usize,
    pub r: usize,
    pub order: PiOrder,
    /// One entry per evaluation time.
    pub entries: Vec<PiOrderEntry>,
    /// Schrödinger-picture entries, when a frame was supplied.
    pub lab_entries: Vec<PiOrderEntry>,
}

#[derive(Clone, Debug)]
pub struct PiOrderReport {
    pub times: Vec<f64>,
    pub paths: Vec<PathOrder>,
}

/// Orders for several paths at several times. Paths sharing an initial level
/// share one Dyson stack per time. Verdicts must agree across times and,
/// with a frame, between pictures.
pub fn pi_order_report(
    model: &LindbladModel,
    family: &UnitaryFamily,
    paths: &[(usize, usize)],
    times: &[f64],
    opts: &PiOrderOptions,
    frame: Option<&DiagonalFrame>,
) -> Result<PiOrderReport> {
    opts.validate()?;
    if times.is_empty() {
        return Err(Error::InvalidParameter("no evaluation times".into()));
    }
    for &(i, r) in paths {
        check_path(family, i, r)?;
    }
    let sp = split(model);
    let mut entries: Vec<Vec<PiOrderEntry>> = vec![Vec::new(); paths.len()];
    let mut lab: Vec<Vec<PiOrderEntry>> = vec![Vec::new(); paths.len()];
    for &t in times {
        let rotations = frame.map(|f| f.rotations(t)).transpose()?;
        let mut stacks: BTreeMap<usize, DysonStack> = BTreeMap::new();
        for (slot, &(i, r)) in paths.iter().enumerate() {
            let stack = match stacks.entry(i) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(stack_for(&sp, family, i, t, opts)?),
            };
            let u = family.edge(r, i);
            entries[slot].push(classify(stack, family.d_a(), i, r, &u, None, opts)?);
            if let Some(rot) = &rotations {
                let target = rot[r].matmul(&u);
                let dressing = conjugation_superop(&rot[r]);
                lab[slot].push(classify(stack, family.d_a(), i, r, &target, Some(&dressing), opts)?);
            }
        }
    }
    let mut out = Vec::with_capacity(paths.len());
    for ((&(i, r), es), ls) in paths.iter().zip(entries).zip(lab) {
        let order = es[0].order;
        if es.iter().any(|e| e.order != order) {
            let orders = es.iter().map(|e| format!("t={:.6}: {}", e.t, e.order)).collect::<Vec<_>>().join(", ");
            return Err(Error::TimeDisagreement { i, r, orders });
        }
        if let Some(bad) = ls.iter().find(|e| e.order != order) {
            return Err(Error::FrameDependence {
                i,
                r,
                interaction: order.to_string(),
                lab: bad.order.to_string(),
            });
        }
        out.push(PathOrder {
            i,
            r,
            order,
            entries: es,
            lab_entries: ls,
        });
    }
    Ok(PiOrderReport {
        times: times.to_vec(),
        paths: out,
    })
}

fn stack_for(sp: &GeneratorSplit, family: &UnitaryFamily, i: usize, t: f64, opts: &PiOrderOptions) -> Result<DysonStack> {
    let cols = seed_columns(family.d_a(), family.d_b(), i);
    dyson_stack(sp, t, opts.pmax, opts.steps, opts.ode_tol, Some(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PIElement;
    use crate::numerics::random::{random_hermitian, random_unitary, seeded};
    use crate::numerics::ONE;
    use crate::superop::Jump;

    fn family(seed: u64) -> UnitaryFamily {
        let mut rng = seeded(seed);
        UnitaryFamily::new(2, 2, vec![CMatrix::identity(2), random_unitary(2, &mut rng)], 0).unwrap()
    }

    fn stack_of(blocks: Vec<CMatrix>) -> DysonStack {
        // d_A = 1, d_B = 2: the whole superoperator is the projected block
        DysonStack {
            t: 1.0,
            dim: 2,
            columns: (0..4).collect(),
            terms: blocks,
        }
    }

    #[test]
    fn classify_orders_by_first_bad_term() {
        let u = CMatrix::identity(2);
        let t = conjugation_superop(&u);
        let mut bad = CMatrix::zeros(4, 4);
        bad[(1, 1)] = ONE;
        let opts = PiOrderOptions::default();
        let e = classify(&stack_of(vec![t.clone(), t.scale_real(0.1), bad.clone()]), 1, 0, 0, &u, None, &opts).unwrap();
        assert_eq!(e.order, PiOrder::Finite(1));
        let e = classify(&stack_of(vec![t.clone(), t.scale_real(0.1)]), 1, 0, 0, &u, None, &opts).unwrap();
        assert_eq!(e.order, PiOrder::Exact);
        let e = classify(&stack_of(vec![bad.clone(), t.clone()]), 1, 0, 0, &u, None, &opts).unwrap();
        assert_eq!(e.order, PiOrder::Broken);
        let z = CMatrix::zeros(4, 4);
        let e = classify(&stack_of(vec![z.clone(), z]), 1, 0, 0, &u, None, &opts).unwrap();
        assert_eq!(e.order, PiOrder::Unreachable);
    }

    #[test]
    fn tiny_terms_do_not_vacuously_pass_and_gray_zone_errors() {
        let u = CMatrix::identity(2);
        let t = conjugation_superop(&u);
        let mut off = t.clone();
        off[(1, 1)] += ONE * 1e-6;
        let opts = PiOrderOptions::default();
        let err = classify(&stack_of(vec![t.clone(), off]), 1, 0, 0, &u, None, &opts);
        assert!(matches!(err, Err(Error::GrayZone { k: 1, .. })));
        // a small but clearly misaligned higher term still counts
        let mut bad = CMatrix::zeros(4, 4);
        bad[(1, 1)] = ONE * 1e-6;
        let e = classify(&stack_of(vec![t, bad]), 1, 0, 0, &u, None, &opts).unwrap();
        assert_eq!(e.order, PiOrder::Finite(0));
    }

    #[test]
    fn compliant_model_is_exact_in_both_pictures() {
        let f = family(1);
        let mut rng = seeded(2);
        let h = PIElement::lift(&random_hermitian(2, &mut rng), &f).unwrap().realize();
        let k = CMatrix::unit(2, 0, 1).kron(&f.edge(0, 1)).scale_real(0.3);
        let deph = CMatrix::unit(2, 1, 1).kron(&CMatrix::identity(2)).scale_real(0.2);
        let model = LindbladModel::new(2, 2, h, vec![Jump::constant(k), Jump::constant(deph)]).unwrap();
        let frame = DiagonalFrame::constant(vec![random_hermitian(2, &mut rng), random_hermitian(2, &mut rng)]).unwrap();
        let opts = PiOrderOptions::default();
        let report = pi_order_report(&model, &f, &[(0, 0), (0, 1), (1, 0)], &[0.7, 1.3], &opts, Some(&frame)).unwrap();
        for p in &report.paths {
            assert_eq!(p.order, PiOrder::Exact, "{}->{}: {:?}", p.i, p.r, p.entries[0].term_residuals);
            assert_eq!(p.lab_entries.len(), 2);
        }
    }

    #[test]
    fn options_validation() {
        let o = PiOrderOptions { pass_tol: 1e-3, ..Default::default() };
        assert!(o.validate().is_err());
        let o = PiOrderOptions { pmax: 0, ..Default::default() };
        assert!(o.validate().is_err());
    }
}
