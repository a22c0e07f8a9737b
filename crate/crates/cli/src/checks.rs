//! Execution of the individual checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;

use picheck_core::algebra::{lemma1_verify, lemma1_verify_with_anchor, verify_cocycle, AlgebraGraph, UnitaryFamily};
use picheck_core::dyson::{generic_times, pi_order_report, PiOrder, PiOrderOptions, PiOrderReport};
use picheck_core::models::{et_condition_check, nas_check};
use picheck_core::numerics::random::{gaussian, random_hermitian, random_unitary, uniform};
use picheck_core::numerics::CMatrix;
use picheck_core::propagation::{pi_propagator, projected_block, xi_correspondence_check};
use picheck_core::superop::{lemma3_verify, theorem1_check, ModelOperator, Theorem1Options};
use picheck_core::Error;

use crate::config::{parse_order, CheckKind, CheckSection, NumericsSection};
use crate::model::BuiltModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Fail,
    /// Numerical gray zone: the tolerances cannot separate pass from fail.
    Gray,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Gray => "GRAY",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrderData {
    pub report: PiOrderReport,
    pub expected: Option<Vec<PiOrder>>,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: CheckKind,
    pub verdict: Verdict,
    pub worst_residual: Option<f64>,
    /// Report body, one entry per line.
    pub lines: Vec<String>,
    pub failures: Vec<String>,
    pub orders: Option<OrderData>,
    pub seconds: f64,
}

impl CheckOutcome {
    fn new(name: String, kind: CheckKind) -> Self {
        Self {
            name,
            kind,
            verdict: Verdict::Pass,
            worst_residual: None,
            lines: Vec::new(),
            failures: Vec::new(),
            orders: None,
            seconds: 0.0,
        }
    }

    fn line(&mut self, s: String) {
        self.lines.push(s);
    }

    fn fail(&mut self, s: String) {
        self.verdict = self.verdict.max(Verdict::Fail);
        self.failures.push(s);
    }

    fn residual(&mut self, r: f64) {
        self.worst_residual = Some(self.worst_residual.map_or(r, |w| w.max(r)));
    }
}

/// Core errors rephrased with one-based ancilla levels.
pub fn describe_error(e: &Error) -> String {
    match e {
        Error::GrayZone {
            i,
            r,
            t,
            k,
            residual,
            pass_tol,
            fail_tol,
        } => format!(
            "gray zone on path {}->{} at t = {t:.6}: residual {residual:.3e} at order {k} lies between \
             pass_tol {pass_tol:.1e} and fail_tol {fail_tol:.1e}; try other evaluation times (numerics.window, --seed) \
             or adjust the tolerances",
            i + 1,
            r + 1
        ),
        Error::TimeDisagreement { i, r, orders } => format!(
            "orders on path {}->{} disagree across evaluation times ({orders}); try other evaluation times",
            i + 1,
            r + 1
        ),
        Error::FrameDependence { i, r, interaction, lab } => format!(
            "order on path {}->{} differs between interaction picture ({interaction}) and lab frame ({lab})",
            i + 1,
            r + 1
        ),
        Error::InsufficientSteps { .. } => format!("{e}; raise numerics.steps"),
        Error::MissingEdge(m, n) => format!("edge ({}, {}) is missing", m + 1, n + 1),
        Error::NotClosed(missing) => format!("graph is not closed under composition; missing {}", edge_list(missing)),
        other => other.to_string(),
    }
}

fn is_gray(e: &Error) -> bool {
    matches!(
        e,
        Error::GrayZone { .. } | Error::TimeDisagreement { .. } | Error::FrameDependence { .. } | Error::InsufficientSteps { .. }
    )
}

fn edge_list(edges: &[(usize, usize)]) -> String {
    let items: Vec<String> = edges.iter().map(|(m, n)| format!("({}, {})", m + 1, n + 1)).collect();
    format!("[{}]", items.join(", "))
}

pub fn run_check<R: Rng>(
    check: &CheckSection,
    index: usize,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
) -> CheckOutcome {
    let kind = check.kind();
    let mut out = CheckOutcome::new(check.display_name(index), kind);
    let result = match kind {
        CheckKind::Cocycle => cocycle(model, num, &mut out),
        CheckKind::Closure => closure(check, model, &mut out),
        CheckKind::Lemma1 => lemma1(check, model, num, rng, &mut out),
        CheckKind::Lemma3 => lemma3(check, model, num, rng, &mut out),
        CheckKind::Xi => xi(check, model, num, rng, &mut out),
        CheckKind::Theorem1 => theorem1(check, model, num, rng, &mut out),
        CheckKind::PiOrder => pi_order(check, model, num, rng, &mut out),
        CheckKind::EtCondition => et_condition(check, model, num, &mut out),
        CheckKind::Nas => nas(check, model, num, &mut out),
    };
    if let Err(e) = result {
        let message = describe_error(&e);
        if is_gray(&e) {
            out.verdict = Verdict::Gray;
            out.failures.push(message);
        } else {
            out.fail(format!("error: {message}"));
        }
    }
    out
}

type CheckResult = Result<(), Error>;

fn cocycle(model: &BuiltModel, num: &NumericsSection, out: &mut CheckOutcome) -> CheckResult {
    let rep = verify_cocycle(&model.family.edge_map(), model.family.d_a(), num.tol)?;
    out.residual(rep.worst_residual.max(rep.identity_defect).max(rep.adjoint_defect));
    out.line(format!("composition residual  {:.3e}", rep.worst_residual));
    out.line(format!("identity defect       {:.3e}", rep.identity_defect));
    out.line(format!("adjoint defect        {:.3e}", rep.adjoint_defect));
    if !rep.holds {
        let (m, e, n) = rep.worst_triple.unwrap_or_default();
        out.fail(format!("cocycle condition violated (worst triple ({}, {}, {}))", m + 1, e + 1, n + 1));
    }
    Ok(())
}

fn closure(check: &CheckSection, model: &BuiltModel, out: &mut CheckOutcome) -> CheckResult {
    let graph = match &check.edges {
        Some(edges) => AlgebraGraph::new(model.family.clone(), edges.iter().map(|e| (e[0] - 1, e[1] - 1)))?,
        None => model.graph.clone(),
    };
    let rep = graph.closure_check();
    let edges: Vec<(usize, usize)> = graph.edges().iter().copied().collect();
    out.line(format!("edges         {}", edge_list(&edges)));
    out.line(format!("closed        {}", rep.closed));
    out.line(format!("self-adjoint  {}", rep.self_adjoint));
    if !rep.missing_edges.is_empty() {
        out.line(format!("missing       {}", edge_list(&rep.missing_edges)));
    }
    let want_closed = check.expect_closed.unwrap_or(true);
    if rep.closed != want_closed {
        out.fail(format!("closed = {}, expected {want_closed}", rep.closed));
    }
    if let Some(want) = check.expect_self_adjoint {
        if rep.self_adjoint != want {
            out.fail(format!("self-adjoint = {}, expected {want}", rep.self_adjoint));
        }
    }
    Ok(())
}

fn draw_dims(check: &CheckSection, model: &BuiltModel) -> (usize, usize) {
    (
        check.d_a.unwrap_or(model.family.d_a()),
        check.d_b.unwrap_or(model.family.d_b()),
    )
}

fn random_family<R: Rng>(d_a: usize, d_b: usize, rng: &mut R) -> Result<UnitaryFamily, Error> {
    let mut reps: Vec<CMatrix> = (0..d_a).map(|_| random_unitary(d_b, rng)).collect();
    reps[0] = CMatrix::identity(d_b);
    UnitaryFamily::new(d_a, d_b, reps, 0)
}

fn lemma1<R: Rng>(
    check: &CheckSection,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
    out: &mut CheckOutcome,
) -> CheckResult {
    let (d_a, d_b) = draw_dims(check, model);
    let draws = check.draws.unwrap_or(20);
    let mut bad = 0;
    let mut worst_pair = 0.0f64;
    let mut worst_vec = 0.0f64;
    for _ in 0..draws {
        let h = random_hermitian(d_a, rng);
        let family = random_family(d_a, d_b, rng)?;
        let mut ok = true;
        let base = lemma1_verify(&h, &family, num.spectrum_tol)?;
        for rep in std::iter::once(Ok(base)).chain((1..d_a).map(|k| lemma1_verify_with_anchor(&h, &family, k, num.spectrum_tol))) {
            let rep = rep?;
            worst_pair = worst_pair.max(rep.max_pairing_distance);
            worst_vec = worst_vec.max(rep.max_eigvec_residual());
            ok &= rep.multiplicity_verified && rep.max_eigvec_residual() <= num.spectrum_tol;
        }
        bad += usize::from(!ok);
    }
    out.residual(worst_pair.max(worst_vec));
    out.line(format!("draws                  {draws} at d_A = {d_a}, d_B = {d_b}, every anchor"));
    out.line(format!("max pairing distance   {worst_pair:.3e}"));
    out.line(format!("max eigvec residual    {worst_vec:.3e}"));
    if bad > 0 {
        out.fail(format!("{bad} of {draws} draws violate the spectral correspondence"));
    }
    Ok(())
}

fn lemma3<R: Rng>(
    check: &CheckSection,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
    out: &mut CheckOutcome,
) -> CheckResult {
    let (d_a, d_b) = draw_dims(check, model);
    let draws = check.draws.unwrap_or(10);
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let family = random_family(d_a, d_b, rng)?;
        let coeffs: Vec<_> = (0..d_a.pow(4)).map(|_| gaussian(rng)).collect();
        let rep = lemma3_verify(&coeffs, &family, num.hs_spectrum_tol)?;
        worst = worst.max(rep.max_pairing_distance);
        bad += usize::from(!rep.multiplicity_verified);
    }
    out.residual(worst);
    out.line(format!("draws                  {draws} at d_A = {d_a}, d_B = {d_b}"));
    out.line(format!("max pairing distance   {worst:.3e}"));
    if bad > 0 {
        out.fail(format!("{bad} of {draws} draws miss the multiplicity d_B^2"));
    }
    Ok(())
}

fn xi<R: Rng>(
    check: &CheckSection,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
    out: &mut CheckOutcome,
) -> CheckResult {
    let (d_a, d_b) = draw_dims(check, model);
    let draws = check.draws.unwrap_or(20);
    let (mut worst_xi, mut worst_fit, mut worst_unit) = (0.0f64, 0.0f64, 0.0f64);
    let mut bad = 0;
    for _ in 0..draws {
        let h = random_hermitian(d_a, rng);
        let family = random_family(d_a, d_b, rng)?;
        let t = check.time.unwrap_or_else(|| uniform(0.0, std::f64::consts::PI, rng).max(1e-3));
        let xc = xi_correspondence_check(&h, &family, t, num.tol)?;
        worst_xi = worst_xi.max(xc.membership_residual).max(xc.coefficient_error);
        let mut ok = xc.passed;
        let w = pi_propagator(&h, &family, t)?;
        for i in 0..d_a {
            for r in 0..d_a {
                let pb = projected_block(&w, &family, i, r, num.zero_tol)?;
                worst_fit = worst_fit.max(pb.fit.relative_residual());
                worst_unit = worst_unit.max(pb.unitarity_defect());
                ok &= pb.fit.relative_residual() <= num.tol && pb.unitarity_defect() <= num.gate_tol;
            }
        }
        bad += usize::from(!ok);
    }
    out.residual(worst_xi.max(worst_fit));
    out.line(format!("draws                   {draws} at d_A = {d_a}, d_B = {d_b}"));
    out.line(format!("xi correspondence       {worst_xi:.3e}"));
    out.line(format!("block fit (relative)    {worst_fit:.3e}"));
    out.line(format!("block unitarity defect  {worst_unit:.3e}"));
    if bad > 0 {
        out.fail(format!("{bad} of {draws} propagators violate the block structure"));
    }
    Ok(())
}

fn operator_label(op: ModelOperator, model: &BuiltModel) -> String {
    match op {
        ModelOperator::Hamiltonian => "Hamiltonian".to_string(),
        ModelOperator::Jump(k) => model.jump_labels.get(k).cloned().unwrap_or_else(|| format!("jump {}", k + 1)),
    }
}

fn theorem1<R: Rng>(
    check: &CheckSection,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
    out: &mut CheckOutcome,
) -> CheckResult {
    let opts = Theorem1Options {
        tol: num.tol,
        gate_tol: num.gate_tol,
        zero_tol: num.zero_tol,
        horizon: 2.0 * model.gate_time,
        samples: num.times,
        steps: num.steps,
    };
    let rep = theorem1_check(&model.model, &model.graph, &opts, rng)?;
    for w in &rep.witnesses {
        out.residual(w.residual);
        let tag = if w.member { "member" } else { "NOT a member" };
        out.line(format!("{:<28} {:.3e}  {tag}", operator_label(w.operator, model), w.residual));
    }
    for s in &rep.spot_checks {
        out.line(format!("gate condition at t = {:.6}: {:.3e}", s.t, s.worst_residual));
    }
    out.line(format!("exact PI      {}", rep.exact_pi));
    let want = check.expect_exact.unwrap_or(true);
    if rep.exact_pi != want {
        let culprits: Vec<String> = rep.failing().map(|w| operator_label(w.operator, model)).collect();
        if rep.exact_pi {
            out.fail("exact PI holds but was expected to fail".to_string());
        } else {
            out.fail(format!("not exactly PI; outside the algebra: {}", culprits.join(", ")));
        }
    } else if !rep.exact_pi {
        let culprits: Vec<String> = rep.failing().map(|w| operator_label(w.operator, model)).collect();
        out.line(format!("outside the algebra (as expected): {}", culprits.join(", ")));
    }
    if rep.exact_pi && !rep.consistent {
        out.fail(format!("gate condition exceeds gate_tol {:.1e} at a spot-check time", num.gate_tol));
    }
    Ok(())
}

fn pi_order<R: Rng>(
    check: &CheckSection,
    model: &BuiltModel,
    num: &NumericsSection,
    rng: &mut R,
    out: &mut CheckOutcome,
) -> CheckResult {
    let d_a = model.family.d_a();
    let opts = PiOrderOptions {
        pmax: check.pmax.unwrap_or(num.pmax),
        pass_tol: num.pass_tol,
        fail_tol: num.fail_tol,
        zero_tol: num.zero_tol,
        steps: num.steps,
        ode_tol: num.ode_tol,
        window: (num.window[0], num.window[1]),
        times: num.times,
    };
    let paths: Vec<(usize, usize)> = match &check.paths {
        Some(p) => p.iter().map(|p| (p[0] - 1, p[1] - 1)).collect(),
        None => (0..d_a).map(|r| (0, r)).collect(),
    };
    let times = match &check.times {
        Some(ts) => ts.clone(),
        None => generic_times(model.gate_time, &opts, rng),
    };
    let frame = if check.frame.unwrap_or(true) { model.frame.as_ref() } else { None };
    let report = pi_order_report(&model.model, &model.family, &paths, &times, &opts, frame)?;
    let expected: Option<Vec<PiOrder>> = check
        .expect
        .as_ref()
        .map(|e| e.iter().map(|s| parse_order(s).expect("validated")).collect());

    let ts: Vec<String> = report.times.iter().map(|t| format!("{t:.6}")).collect();
    out.line(format!("times         {}", ts.join(", ")));
    out.line(format!("pictures      {}", if frame.is_some() { "interaction and lab frame" } else { "interaction" }));
    for (slot, p) in report.paths.iter().enumerate() {
        let mut line = format!("path {}->{}    order {}", p.i + 1, p.r + 1, p.order);
        if let Some(exp) = &expected {
            let _ = write!(line, "  (expected {})", exp[slot]);
            if exp[slot] != p.order {
                out.fail(format!("path {}->{}: order {}, expected {}", p.i + 1, p.r + 1, p.order, exp[slot]));
            }
        }
        out.line(line);
        let first = &p.entries[0];
        let res: Vec<String> = first.residuals.iter().map(|r| format!("{r:.2e}")).collect();
        out.line(format!("    residuals k=0..{}: {}", res.len() - 1, res.join(" ")));
        if let PiOrder::Finite(n) = p.order {
            for e in &p.entries {
                if let Some(r) = e.residuals.get(n + 1) {
                    out.residual(*r);
                }
            }
        }
    }
    if let Some(et) = &model.et {
        let opaque: Vec<usize> = model
            .level_hamiltonians
            .as_ref()
            .map(|hs| (1..hs.len()).filter(|&i| !same_class(&hs[0], &hs[i], num.tol)).collect())
            .unwrap_or_default();
        if !opaque.is_empty() && et.d_a == 3 {
            out.line(
                "note: the reference order statement for this three-level example is ambiguous \
                 (level 3 is listed both as infinitely reachable and as reachable only at order 0); \
                 the orders above are derived from the Dyson terms"
                    .to_string(),
            );
        }
    }
    out.orders = Some(OrderData { report, expected });
    Ok(())
}

fn same_class(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    nas_check(&[a.clone(), b.clone()], tol).len() == 1
}

fn et_condition(check: &CheckSection, model: &BuiltModel, num: &NumericsSection, out: &mut CheckOutcome) -> CheckResult {
    let spec = model.et.as_ref().expect("validated");
    let verdicts = et_condition_check(spec, num.tol)?;
    let expected: Option<Vec<bool>> = check
        .expect
        .as_ref()
        .map(|e| e.iter().map(|s| s.eq_ignore_ascii_case("transparent")).collect());
    for (k, v) in verdicts.iter().enumerate() {
        out.residual(v.residual);
        let tag = if v.transparent { "transparent" } else { "not transparent" };
        out.line(format!(
            "error 1 -> {}   lambda = {:+.6}  residual {:.3e}  {tag}",
            v.level + 1,
            v.lambda,
            v.residual
        ));
        let want = expected.as_ref().and_then(|e| e.get(k).copied()).unwrap_or(true);
        if v.transparent != want {
            out.fail(format!("error 1 -> {} is {tag}", v.level + 1));
        }
    }
    Ok(())
}

fn nas(check: &CheckSection, model: &BuiltModel, num: &NumericsSection, out: &mut CheckOutcome) -> CheckResult {
    let Some(hs) = &model.level_hamiltonians else {
        return Err(Error::InvalidParameter("the model has no per-level Hamiltonians (set model.frame)".into()));
    };
    let classes = nas_check(hs, num.tol);
    let show: Vec<String> = classes
        .iter()
        .map(|c| format!("{{{}}}", c.iter().map(|l| (l + 1).to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    out.line(format!("classes       {}", show.join(" ")));
    if let Some(want) = &check.classes {
        let got: BTreeSet<BTreeSet<usize>> = classes.iter().map(|c| c.iter().map(|l| l + 1).collect()).collect();
        let want: BTreeSet<BTreeSet<usize>> = want.iter().map(|c| c.iter().copied().collect()).collect();
        if got != want {
            out.fail("noiseless ancilla classes differ from the expected partition".to_string());
        }
    }
    Ok(())
}
