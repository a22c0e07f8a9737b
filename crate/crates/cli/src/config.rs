//! Run configuration: TOML schema, defaults and validation.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use picheck_core::dyson::PiOrder;
use picheck_core::models::{SnapSpec, DEFAULT_CHI, DEFAULT_DEPHASING, DEFAULT_RELAXATION};

use crate::error::CliError;

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Uniform(f64),
    PerLevel(Vec<f64>),
}

impl Rates {
    pub fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Rates::Uniform(g) => Ok(vec![*g; n]),
            Rates::PerLevel(v) if v.len() == n => Ok(v.clone()),
            Rates::PerLevel(v) => Err(CliError::invalid(what, format!("expected {n} rates, got {}", v.len()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub checks: Vec<CheckSection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    /// `snap`, `error_transparent` or `explicit`.
    pub builtin: String,
    #[serde(default, alias = "d_A", skip_serializing_if = "Option::is_none")]
    pub d_a: Option<usize>,
    #[serde(default, alias = "d_B", skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<Rates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<Rates>,
    /// `transparent` or `broken` for the error-transparent example.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Rates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonians: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<MatrixSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<MatrixSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsSection {
    /// Equality and membership tolerance.
    pub tol: f64,
    pub pass_tol: f64,
    pub fail_tol: f64,
    pub zero_tol: f64,
    pub gate_tol: f64,
    pub spectrum_tol: f64,
    pub hs_spectrum_tol: f64,
    pub steps: usize,
    pub ode_tol: f64,
    pub pmax: usize,
    pub times: usize,
    pub window: [f64; 2],
    /// Largest composite dimension `d_A·d_B` accepted.
    pub max_dim: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            pass_tol: 1e-7,
            fail_tol: 1e-4,
            zero_tol: 1e-10,
            gate_tol: 1e-8,
            spectrum_tol: 1e-8,
            hs_spectrum_tol: 1e-7,
            steps: 2000,
            ode_tol: 1e-9,
            pmax: 6,
            times: 3,
            window: [0.3, 1.0],
            max_dim: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    pub dir: String,
    pub report: String,
    pub summary: String,
    pub seed: u64,
    /// Record wall-clock seconds; off by default so outputs are byte-stable.
    pub timings: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "picheck-out".into(),
            report: "report.txt".into(),
            summary: "summary.csv".into(),
            seed: 0,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSection {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_self_adjoint: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Cocycle,
    Closure,
    Lemma1,
    Lemma3,
    Xi,
    Theorem1,
    PiOrder,
    EtCondition,
    Nas,
}

impl CheckKind {
    pub const ALL: [(&'static str, CheckKind); 9] = [
        ("cocycle", CheckKind::Cocycle),
        ("closure", CheckKind::Closure),
        ("lemma1", CheckKind::Lemma1),
        ("lemma3", CheckKind::Lemma3),
        ("xi", CheckKind::Xi),
        ("theorem1", CheckKind::Theorem1),
        ("pi_order", CheckKind::PiOrder),
        ("et_condition", CheckKind::EtCondition),
        ("nas", CheckKind::Nas),
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().find(|(n, _)| *n == s).map(|&(_, k)| k)
    }

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(_, k)| *k == self).map(|(n, _)| *n).expect("listed")
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            CheckKind::Cocycle => &[],
            CheckKind::Closure => &["edges", "expect_closed", "expect_self_adjoint"],
            CheckKind::Lemma1 | CheckKind::Lemma3 => &["draws", "d_a", "d_b"],
            CheckKind::Xi => &["draws", "d_a", "d_b", "time"],
            CheckKind::Theorem1 => &["expect_exact"],
            CheckKind::PiOrder => &["paths", "pmax", "expect", "frame", "times"],
            CheckKind::EtCondition => &["expect"],
            CheckKind::Nas => &["classes"],
        }
    }
}

impl CheckSection {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |cond: bool, name: &'static str| {
            if cond {
                out.push(name)
            }
        };
        push(self.draws.is_some(), "draws");
        push(self.d_a.is_some(), "d_a");
        push(self.d_b.is_some(), "d_b");
        push(self.time.is_some(), "time");
        push(self.times.is_some(), "times");
        push(self.paths.is_some(), "paths");
        push(self.pmax.is_some(), "pmax");
        push(self.expect.is_some(), "expect");
        push(self.frame.is_some(), "frame");
        push(self.edges.is_some(), "edges");
        push(self.expect_closed.is_some(), "expect_closed");
        push(self.expect_self_adjoint.is_some(), "expect_self_adjoint");
        push(self.expect_exact.is_some(), "expect_exact");
        push(self.classes.is_some(), "classes");
        out
    }

    pub fn kind(&self) -> CheckKind {
        CheckKind::parse(&self.kind).expect("validated")
    }

    pub fn display_name(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("{}#{}", self.kind, index + 1))
    }
}

impl ModelSection {
    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |cond: bool, name: &'static str| {
            if cond {
                out.push(name)
            }
        };
        push(self.d_a.is_some(), "d_a");
        push(self.d_b.is_some(), "d_b");
        push(self.n.is_some(), "n");
        push(self.phases.is_some(), "phases");
        push(self.omega.is_some(), "omega");
        push(self.chi.is_some(), "chi");
        push(self.dephasing.is_some(), "dephasing");
        push(self.relaxation.is_some(), "relaxation");
        push(self.variant.is_some(), "variant");
        push(self.rates.is_some(), "rates");
        push(self.gate_time.is_some(), "gate_time");
        push(self.anchor.is_some(), "anchor");
        push(self.edges.is_some(), "edges");
        push(self.h1.is_some(), "h1");
        push(self.h2.is_some(), "h2");
        push(self.hamiltonians.is_some(), "hamiltonians");
        push(self.hamiltonian.is_some(), "hamiltonian");
        push(self.jumps.is_some(), "jumps");
        push(self.representatives.is_some(), "representatives");
        push(self.frame.is_some(), "frame");
        out
    }

    fn allowed(&self) -> Option<&'static [&'static str]> {
        match self.builtin.as_str() {
            "snap" => Some(&["d_a", "n", "phases", "omega", "chi", "h1", "h2", "dephasing", "relaxation"]),
            "error_transparent" => Some(&["d_a", "d_b", "variant", "chi", "rates", "hamiltonians", "gate_time"]),
            "explicit" => Some(&[
                "d_a",
                "d_b",
                "hamiltonian",
                "jumps",
                "representatives",
                "anchor",
                "edges",
                "frame",
                "gate_time",
            ]),
            _ => None,
        }
    }

    /// `(d_A, d_B)` after defaults have been filled.
    pub fn dims(&self) -> (usize, usize) {
        let d_a = self.d_a.unwrap_or(0);
        let d_b = match self.builtin.as_str() {
            "snap" => self.n.unwrap_or(0),
            _ => self.d_b.unwrap_or(0),
        };
        (d_a, d_b)
    }
}

/// A parsed configuration together with the keys that were not recognized.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: RunConfig,
    pub warnings: Vec<String>,
}

pub fn load_config(path: &Path, strict: bool) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, strict)
}

/// Parses, fills defaults and validates. Unrecognized keys are warnings,
/// or errors when `strict`.
pub fn parse_config(text: &str, strict: bool) -> Result<Loaded, CliError> {
    let mut unknown = Vec::new();
    let de = toml::Deserializer::new(text);
    let mut config: RunConfig = serde_ignored::deserialize(de, |p| unknown.push(p.to_string()))
        .map_err(|e: toml::de::Error| CliError::Parse(e.to_string().trim_end().to_string()))?;

    if let Some(allowed) = config.model.allowed() {
        for key in config.model.present() {
            if !allowed.contains(&key) {
                unknown.push(format!("model.{key} (not used by builtin '{}')", config.model.builtin));
            }
        }
    }
    for (i, check) in config.checks.iter().enumerate() {
        if let Some(kind) = CheckKind::parse(&check.kind) {
            for key in check.present() {
                if !kind.allowed().contains(&key) {
                    unknown.push(format!("checks[{i}].{key} (not used by kind '{}')", check.kind));
                }
            }
        }
    }
    let warnings: Vec<String> = unknown.into_iter().map(|k| format!("unknown key {k}")).collect();
    if strict && !warnings.is_empty() {
        return Err(CliError::invalid("config", warnings.join("; ")));
    }
    fill_defaults(&mut config)?;
    validate(&config)?;
    Ok(Loaded { config, warnings })
}

fn fill_defaults(config: &mut RunConfig) -> Result<(), CliError> {
    let m = &mut config.model;
    match m.builtin.as_str() {
        "snap" => {
            let d_a = m.d_a.unwrap_or(4);
            let n = m.n.unwrap_or(2);
            let base = SnapSpec::default_for(d_a, n);
            m.d_a = Some(d_a);
            m.n = Some(n);
            m.phases.get_or_insert(base.phases);
            m.omega.get_or_insert(base.omega);
            if m.h1.is_none() {
                m.chi.get_or_insert(DEFAULT_CHI);
            }
            m.dephasing.get_or_insert(Rates::Uniform(DEFAULT_DEPHASING));
            m.relaxation.get_or_insert(Rates::Uniform(DEFAULT_RELAXATION));
        }
        "error_transparent" => {
            m.d_a.get_or_insert(3);
            m.d_b.get_or_insert(2);
            if m.hamiltonians.is_none() {
                m.variant.get_or_insert_with(|| "transparent".into());
                m.chi.get_or_insert(DEFAULT_CHI);
            }
            m.rates.get_or_insert(Rates::Uniform(DEFAULT_RELAXATION));
            m.gate_time.get_or_insert(std::f64::consts::FRAC_PI_2);
        }
        "explicit" => {
            m.anchor.get_or_insert(1);
            m.gate_time.get_or_insert(std::f64::consts::FRAC_PI_2);
        }
        other => {
            let names = ["snap", "error_transparent", "explicit"].join(", ");
            return Err(CliError::invalid("model.builtin", format!("unknown builtin '{other}' (expected one of {names})")));
        }
    }
    Ok(())
}

fn positive(value: f64, field: &str) -> Result<(), CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be positive and finite (got {value})")))
    }
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    let num = &config.numerics;
    for (v, f) in [
        (num.tol, "numerics.tol"),
        (num.pass_tol, "numerics.pass_tol"),
        (num.fail_tol, "numerics.fail_tol"),
        (num.zero_tol, "numerics.zero_tol"),
        (num.gate_tol, "numerics.gate_tol"),
        (num.spectrum_tol, "numerics.spectrum_tol"),
        (num.hs_spectrum_tol, "numerics.hs_spectrum_tol"),
        (num.ode_tol, "numerics.ode_tol"),
    ] {
        positive(v, f)?;
    }
    if num.pass_tol >= num.fail_tol {
        return Err(CliError::invalid(
            "numerics.pass_tol",
            format!("must be below fail_tol ({} >= {})", num.pass_tol, num.fail_tol),
        ));
    }
    if num.steps == 0 || num.pmax == 0 || num.times == 0 {
        return Err(CliError::invalid("numerics", "steps, pmax and times must be at least 1"));
    }
    let [lo, hi] = num.window;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(CliError::invalid("numerics.window", format!("need 0 < lo <= hi (got [{lo}, {hi}])")));
    }

    let (d_a, d_b) = config.model.dims();
    if d_a == 0 || d_b == 0 {
        return Err(CliError::invalid("model.d_a", "ancilla and central dimensions must be given and positive"));
    }
    if d_a * d_b > num.max_dim {
        return Err(CliError::invalid(
            "model.d_a",
            format!("composite dimension {} exceeds numerics.max_dim = {}", d_a * d_b, num.max_dim),
        ));
    }
    if let Some(a) = config.model.anchor {
        check_level(a, d_a, "model.anchor")?;
    }
    if let Some(edges) = &config.model.edges {
        for e in edges {
            check_level(e[0], d_a, "model.edges")?;
            check_level(e[1], d_a, "model.edges")?;
        }
    }
    if let Some(v) = &config.model.variant {
        if v != "transparent" && v != "broken" {
            return Err(CliError::invalid("model.variant", format!("expected 'transparent' or 'broken' (got '{v}')")));
        }
    }
    for (v, f) in [(config.model.omega, "model.omega"), (config.model.gate_time, "model.gate_time")] {
        if let Some(v) = v {
            positive(v, f)?;
        }
    }

    for (i, check) in config.checks.iter().enumerate() {
        let field = |name: &str| format!("checks[{i}].{name}");
        let Some(kind) = CheckKind::parse(&check.kind) else {
            let names: Vec<_> = CheckKind::ALL.iter().map(|(n, _)| *n).collect();
            return Err(CliError::invalid(
                &field("kind"),
                format!("unknown check '{}' (expected one of {})", check.kind, names.join(", ")),
            ));
        };
        if let Some(paths) = &check.paths {
            for p in paths {
                check_level(p[0], d_a, &field("paths"))?;
                check_level(p[1], d_a, &field("paths"))?;
            }
        }
        if let Some(edges) = &check.edges {
            for e in edges {
                check_level(e[0], d_a, &field("edges"))?;
                check_level(e[1], d_a, &field("edges"))?;
            }
        }
        if check.pmax == Some(0) || check.draws == Some(0) {
            return Err(CliError::invalid(&field("pmax"), "pmax and draws must be at least 1"));
        }
        if let (Some(a), Some(b)) = (check.d_a.or(Some(d_a)), check.d_b.or(Some(d_b))) {
            if a == 0 || b == 0 || a * b > num.max_dim {
                return Err(CliError::invalid(&field("d_a"), format!("dimensions {a}x{b} outside 1..={}", num.max_dim)));
            }
        }
        if let Some(t) = check.time {
            positive(t, &field("time"))?;
        }
        if let Some(ts) = &check.times {
            if ts.is_empty() {
                return Err(CliError::invalid(&field("times"), "must list at least one time"));
            }
            for &t in ts {
                positive(t, &field("times"))?;
            }
        }
        if kind == CheckKind::PiOrder {
            if let Some(expect) = &check.expect {
                let n = check.paths.as_ref().map_or(d_a, Vec::len);
                if expect.len() != n {
                    return Err(CliError::invalid(&field("expect"), format!("{} expectations for {n} paths", expect.len())));
                }
                for e in expect {
                    parse_order(e).ok_or_else(|| CliError::invalid(&field("expect"), format!("'{e}' is not an order")))?;
                }
            }
        }
        if kind == CheckKind::EtCondition {
            if config.model.builtin != "error_transparent" {
                return Err(CliError::invalid(&field("kind"), "et_condition needs the error_transparent model"));
            }
            if let Some(expect) = &check.expect {
                if expect.len() + 1 != d_a {
                    return Err(CliError::invalid(&field("expect"), format!("need {} entries, one per error", d_a - 1)));
                }
                if let Some(bad) = expect.iter().find(|e| !["transparent", "opaque"].contains(&e.to_ascii_lowercase().as_str())) {
                    return Err(CliError::invalid(&field("expect"), format!("'{bad}' is neither 'transparent' nor 'opaque'")));
                }
            }
        }
        if let Some(classes) = &check.classes {
            let flat: BTreeSet<usize> = classes.iter().flatten().copied().collect();
            if flat.len() != d_a || classes.iter().map(Vec::len).sum::<usize>() != d_a || flat.iter().any(|&l| l == 0 || l > d_a) {
                return Err(CliError::invalid(&field("classes"), "must partition the ancilla levels 1..=d_A"));
            }
        }
    }
    Ok(())
}

fn check_level(level: usize, d_a: usize, field: &str) -> Result<(), CliError> {
    if (1..=d_a).contains(&level) {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("ancilla level {level} outside 1..={d_a}")))
    }
}

/// Parses `"EXACT"`, `"UNREACHABLE"`, `"BROKEN"` or a non-negative integer.
pub fn parse_order(s: &str) -> Option<PiOrder> {
    match s.trim().to_ascii_uppercase().as_str() {
        "EXACT" => Some(PiOrder::Exact),
        "UNREACHABLE" => Some(PiOrder::Unreachable),
        "BROKEN" => Some(PiOrder::Broken),
        other => other.parse().ok().map(PiOrder::Finite),
    }
}

pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("configuration serializes")
}

/// Ready-to-edit configuration for a builtin model with its default checks.
pub fn builtin_config(name: &str) -> Result<RunConfig, CliError> {
    let mut config = match name {
        "snap" => RunConfig {
            model: ModelSection {
                builtin: "snap".into(),
                d_a: Some(4),
                ..Default::default()
            },
            numerics: NumericsSection::default(),
            output: OutputSection::default(),
            checks: vec![
                check("cocycle"),
                check("closure"),
                CheckSection {
                    kind: "theorem1".into(),
                    expect_exact: Some(false),
                    ..Default::default()
                },
                CheckSection {
                    kind: "pi_order".into(),
                    paths: Some(vec![[1, 4], [1, 3], [1, 2]]),
                    expect: Some(vec!["2".into(), "3".into(), "4".into()]),
                    frame: Some(true),
                    ..Default::default()
                },
                check("nas"),
            ],
        },
        "error_transparent" => RunConfig {
            model: ModelSection {
                builtin: "error_transparent".into(),
                d_a: Some(3),
                d_b: Some(2),
                ..Default::default()
            },
            numerics: NumericsSection::default(),
            output: OutputSection::default(),
            checks: vec![
                check("et_condition"),
                check("theorem1"),
                CheckSection {
                    kind: "pi_order".into(),
                    paths: Some(vec![[1, 1], [1, 2], [1, 3]]),
                    frame: Some(true),
                    ..Default::default()
                },
                check("nas"),
            ],
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown builtin '{other}' (expected snap or error_transparent)"
            )))
        }
    };
    fill_defaults(&mut config)?;
    validate(&config)?;
    Ok(config)
}

fn check(kind: &str) -> CheckSection {
    CheckSection {
        kind: kind.into(),
        ..Default::default()
    }
}
