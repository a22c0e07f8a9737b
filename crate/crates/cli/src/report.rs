//! Text report, CSV emission and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::checks::{CheckOutcome, Verdict};
use crate::config::CheckKind;
use crate::error::CliError;

#[derive(Clone, Debug)]
pub struct RunReport {
    pub version: &'static str,
    pub model: String,
    pub seed: u64,
    pub timings: bool,
    pub config_echo: String,
    pub warnings: Vec<String>,
    pub outcomes: Vec<CheckOutcome>,
}

impl RunReport {
    pub fn worst_verdict(&self) -> Verdict {
        self.outcomes.iter().map(|o| o.verdict).max().unwrap_or(Verdict::Pass)
    }

    /// 0 when every check passes, 1 on a failure, 3 on a gray-zone verdict.
    pub fn exit_code(&self) -> i32 {
        match self.worst_verdict() {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Gray => 3,
        }
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == v).count()
    }
}

/// Full-precision float for CSV output.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_text(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "picheck {}", report.version);
    let _ = writeln!(s, "model: {}", report.model);
    let _ = writeln!(s, "seed: {} (ChaCha8, one stream per check index)", report.seed);
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for (k, o) in report.outcomes.iter().enumerate() {
        let _ = writeln!(s);
        let _ = write!(s, "[{}] {} ({}): {}", k + 1, o.name, o.kind.name(), o.verdict.as_str());
        if report.timings {
            let _ = write!(s, "  [{:.3} s]", o.seconds);
        }
        let _ = writeln!(s);
        for line in &o.lines {
            let _ = writeln!(s, "    {line}");
        }
        for f in &o.failures {
            let _ = writeln!(s, "  ! {f}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "summary: {} checks, {} passed, {} failed, {} gray",
        report.outcomes.len(),
        report.count(Verdict::Pass),
        report.count(Verdict::Fail),
        report.count(Verdict::Gray)
    );
    let failing: Vec<&CheckOutcome> = report.outcomes.iter().filter(|o| o.verdict != Verdict::Pass).collect();
    if !failing.is_empty() {
        let _ = writeln!(s, "failures:");
        for o in failing {
            for f in &o.failures {
                let _ = writeln!(s, "  {} ({}): {f}", o.name, o.verdict.as_str());
            }
        }
    }
    s
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn summary_csv(report: &RunReport) -> Result<Vec<u8>, CliError> {
    let rows = report
        .outcomes
        .iter()
        .map(|o| {
            vec![
                o.name.clone(),
                o.verdict.as_str().to_string(),
                o.worst_residual.map(fmt_float).unwrap_or_default(),
                if report.timings { format!("{:.6}", o.seconds) } else { String::new() },
            ]
        })
        .collect();
    csv_bytes(&["check", "verdict", "worst_residual", "seconds"], rows)
}

/// Residual and fitted constant per order `k` at the first evaluation time.
pub fn order_csv(outcome: &CheckOutcome) -> Option<Result<Vec<u8>, CliError>> {
    let data = outcome.orders.as_ref()?;
    let mut rows = Vec::new();
    for p in &data.report.paths {
        let e = &p.entries[0];
        for (k, (res, c)) in e.residuals.iter().zip(&e.constants).enumerate() {
            rows.push(vec![
                (p.i + 1).to_string(),
                (p.r + 1).to_string(),
                k.to_string(),
                fmt_float(*res),
                fmt_float(c.re),
                fmt_float(c.im),
                p.order.to_string(),
            ]);
        }
    }
    Some(csv_bytes(&["path_i", "path_r", "k", "residual", "c_real", "c_imag", "verdict"], rows))
}

pub fn order_csv_name(index: usize, explicit_name: Option<&str>) -> String {
    match explicit_name {
        Some(n) => {
            let clean: String = n
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                .collect();
            format!("pi_order_{}_{clean}.csv", index + 1)
        }
        None => format!("pi_order_{}.csv", index + 1),
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Output files of a run, relative to the output directory.
pub struct OutputFiles {
    pub report: String,
    pub summary: String,
    pub check_names: Vec<Option<String>>,
}

pub fn write_outputs(report: &RunReport, dir: &Path, files: &OutputFiles) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<(), CliError> {
        let path = dir.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put(&files.report, render_text(report).as_bytes())?;
    put(&files.summary, &summary_csv(report)?)?;
    put("config.toml", report.config_echo.as_bytes())?;
    for (k, o) in report.outcomes.iter().enumerate() {
        if o.kind != CheckKind::PiOrder {
            continue;
        }
        if let Some(bytes) = order_csv(o) {
            let name = order_csv_name(k, files.check_names.get(k).and_then(|n| n.as_deref()));
            put(&name, &bytes?)?;
        }
    }
    Ok(written)
}
