//! Builds core models from the `[model]` section.

use picheck_core::models::{et_model, snap_model, ErrorTransparentSpec, SnapSpec};
use picheck_core::numerics::{CMatrix, C64};
use picheck_core::{AlgebraGraph, DiagonalFrame, Jump, LindbladModel, UnitaryFamily};

use crate::config::{MatrixSpec, ModelSection, NumericsSection, Rates};
use crate::error::CliError;

/// A model ready for the checks. Level indices are zero-based here.
#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub name: String,
    pub model: LindbladModel,
    pub graph: AlgebraGraph,
    pub family: UnitaryFamily,
    pub frame: Option<DiagonalFrame>,
    /// Central Hamiltonian of each ancilla level, when the model has them.
    pub level_hamiltonians: Option<Vec<CMatrix>>,
    pub gate_time: f64,
    /// One label per jump operator, in model order.
    pub jump_labels: Vec<String>,
    pub et: Option<ErrorTransparentSpec>,
}

pub fn matrix(spec: &MatrixSpec, field: &str) -> Result<CMatrix, CliError> {
    let rows: Vec<Vec<C64>> = spec
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    if rows.is_empty() {
        return Err(CliError::invalid(field, "empty matrix"));
    }
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(CliError::invalid(field, "matrix must be square"));
    }
    let m = CMatrix::from_rows(&rows).map_err(|e| CliError::invalid(field, e.to_string()))?;
    if !m.is_finite() {
        return Err(CliError::invalid(field, "non-finite entry"));
    }
    Ok(m)
}

fn sized(spec: &MatrixSpec, n: usize, field: &str) -> Result<CMatrix, CliError> {
    let m = matrix(spec, field)?;
    if m.rows() != n {
        return Err(CliError::invalid(field, format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols())));
    }
    Ok(m)
}

fn real_diag(values: impl IntoIterator<Item = f64>) -> CMatrix {
    CMatrix::diag(&values.into_iter().map(|v| C64::new(v, 0.0)).collect::<Vec<_>>())
}

fn rates(r: &Option<Rates>, n: usize, field: &str) -> Result<Vec<f64>, CliError> {
    r.as_ref().expect("defaults filled").expand(n, field)
}

pub fn build_model(m: &ModelSection, num: &NumericsSection) -> Result<BuiltModel, CliError> {
    match m.builtin.as_str() {
        "snap" => build_snap(m),
        "error_transparent" => build_et(m, num),
        _ => build_explicit(m),
    }
}

fn build_snap(m: &ModelSection) -> Result<BuiltModel, CliError> {
    let d_a = m.d_a.expect("filled");
    let n = m.n.expect("filled");
    let mut spec = SnapSpec::default_for(d_a, n);
    spec.phases = m.phases.clone().expect("filled");
    spec.omega = m.omega.expect("filled");
    spec.h1 = match (&m.h1, m.chi) {
        (Some(h), _) => sized(h, n, "model.h1")?,
        (None, Some(chi)) => real_diag((0..n).map(|k| chi * k as f64)),
        (None, None) => spec.h1,
    };
    if let Some(h) = &m.h2 {
        spec.h2 = sized(h, n, "model.h2")?;
    }
    spec.dephasing = rates(&m.dephasing, d_a, "model.dephasing")?;
    spec.relaxation = rates(&m.relaxation, d_a.saturating_sub(1), "model.relaxation")?;
    spec.validate()?;

    let mut labels = Vec::new();
    for (k, &g) in spec.dephasing.iter().enumerate() {
        if g > 0.0 {
            labels.push(format!("dephasing of level {}", k + 1));
        }
    }
    for (k, &g) in spec.relaxation.iter().enumerate() {
        if g > 0.0 {
            labels.push(format!("relaxation {} -> {}", k + 2, k + 1));
        }
    }
    let mut levels = vec![spec.h2.clone(); d_a];
    levels[0] = spec.h1.clone();
    let built = snap_model(&spec)?;
    Ok(BuiltModel {
        name: format!("snap (d_A = {d_a}, N = {n})"),
        model: built.model,
        graph: built.graph,
        family: built.family,
        frame: Some(built.frame),
        level_hamiltonians: Some(levels),
        gate_time: built.gate_time,
        jump_labels: labels,
        et: None,
    })
}

fn build_et(m: &ModelSection, num: &NumericsSection) -> Result<BuiltModel, CliError> {
    let d_a = m.d_a.expect("filled");
    let d_b = m.d_b.expect("filled");
    let mut spec = match (&m.hamiltonians, m.variant.as_deref()) {
        (Some(hs), _) => {
            let hamiltonians = hs
                .iter()
                .enumerate()
                .map(|(k, h)| sized(h, d_b, &format!("model.hamiltonians[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            ErrorTransparentSpec {
                d_a,
                d_b,
                hamiltonians,
                rates: Vec::new(),
                gate_time: 0.0,
            }
        }
        (None, variant) => {
            if d_a != 3 || d_b != 2 {
                return Err(CliError::invalid(
                    "model.variant",
                    "the built-in variants have d_A = 3 and d_B = 2; give model.hamiltonians for other sizes",
                ));
            }
            let chi = m.chi.expect("filled");
            if variant == Some("broken") {
                ErrorTransparentSpec::broken_example(chi, 0.0)
            } else {
                ErrorTransparentSpec::transparent_example(chi, 0.0)
            }
        }
    };
    spec.rates = rates(&m.rates, d_a.saturating_sub(1), "model.rates")?;
    spec.gate_time = m.gate_time.expect("filled");
    spec.validate()?;
    let built = et_model(&spec, num.tol)?;
    let labels = built
        .verdicts
        .iter()
        .filter(|v| spec.rates[v.level - 1] > 0.0)
        .map(|v| format!("error 1 -> {}", v.level + 1))
        .collect();
    let name = match m.variant.as_deref() {
        Some(v) if m.hamiltonians.is_none() => format!("error_transparent ({v})"),
        _ => "error_transparent".to_string(),
    };
    Ok(BuiltModel {
        name,
        model: built.model,
        graph: built.graph,
        family: built.family,
        frame: Some(built.frame),
        level_hamiltonians: Some(spec.hamiltonians.clone()),
        gate_time: built.gate_time,
        jump_labels: labels,
        et: Some(spec),
    })
}

fn build_explicit(m: &ModelSection) -> Result<BuiltModel, CliError> {
    let (d_a, d_b) = m.dims();
    let dim = d_a * d_b;
    let h = m
        .hamiltonian
        .as_ref()
        .map(|h| sized(h, dim, "model.hamiltonian"))
        .transpose()?
        .unwrap_or_else(|| CMatrix::zeros(dim, dim));
    let jumps = m
        .jumps
        .iter()
        .flatten()
        .enumerate()
        .map(|(k, j)| sized(j, dim, &format!("model.jumps[{k}]")).map(Jump::constant))
        .collect::<Result<Vec<_>, _>>()?;
    let family = match &m.representatives {
        Some(reps) => {
            if reps.len() != d_a {
                return Err(CliError::invalid("model.representatives", format!("expected {d_a} matrices")));
            }
            let reps = reps
                .iter()
                .enumerate()
                .map(|(k, r)| sized(r, d_b, &format!("model.representatives[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            UnitaryFamily::new(d_a, d_b, reps, m.anchor.expect("filled") - 1)?
        }
        None => UnitaryFamily::identity(d_a, d_b),
    };
    let graph = match &m.edges {
        Some(edges) => AlgebraGraph::new(family.clone(), edges.iter().map(|e| (e[0] - 1, e[1] - 1)))?,
        None => AlgebraGraph::full(family.clone()),
    };
    let levels = m
        .frame
        .as_ref()
        .map(|hs| {
            if hs.len() != d_a {
                return Err(CliError::invalid("model.frame", format!("expected {d_a} matrices")));
            }
            hs.iter()
                .enumerate()
                .map(|(k, h)| sized(h, d_b, &format!("model.frame[{k}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let frame = levels.clone().map(DiagonalFrame::constant).transpose()?;
    let labels = (1..=jumps.len()).map(|k| format!("jump {k}")).collect();
    Ok(BuiltModel {
        name: format!("explicit (d_A = {d_a}, d_B = {d_b})"),
        model: LindbladModel::new(d_a, d_b, h, jumps)?,
        graph,
        family,
        frame,
        level_hamiltonians: levels,
        gate_time: m.gate_time.expect("filled"),
        jump_labels: labels,
        et: None,
    })
}
