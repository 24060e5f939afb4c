//! Verification records and their text serialization.
//!
//! A report is written as a TOML document with a fixed key order and floats
//! printed with 17 significant digits, so two runs of the same configuration
//! produce identical bytes.

use std::fmt::Write as _;

/// Tolerance classes shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Combinatorial and closed-form matrix identities.
    pub exact: f64,
    /// Quadrature against closed forms, coefficient identities.
    pub closed_form: f64,
    /// Identities involving the numerical exterior derivative.
    pub finite_diff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            closed_form: 1e-9,
            finite_diff: 1e-5,
        }
    }
}

/// `|a − b| / max(|b|, floor)`.
pub fn relative(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(RELATIVE_FLOOR)
}

/// Denominator floor of [`relative`].
pub const RELATIVE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub check_id: String,
    /// Short name of the identity being checked.
    pub anchor: String,
    pub n_samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub warning: Option<String>,
}

impl CheckRecord {
    /// Pass iff the residual is finite and within tolerance. A check with no
    /// samples passes vacuously and carries a warning.
    pub fn from_residual(
        check_id: impl Into<String>,
        anchor: impl Into<String>,
        n_samples: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> Self {
        let warning = (n_samples == 0).then(|| "no samples; vacuous pass".to_string());
        let pass = n_samples == 0 || (max_residual.is_finite() && max_residual < tolerance);
        Self {
            check_id: check_id.into(),
            anchor: anchor.into(),
            n_samples,
            max_residual: if n_samples == 0 { 0.0 } else { max_residual },
            tolerance,
            pass,
            warning,
        }
    }

    /// Check that cannot run, recorded as a failure.
    pub fn error(check_id: impl Into<String>, anchor: impl Into<String>, message: String) -> Self {
        Self {
            check_id: check_id.into(),
            anchor: anchor.into(),
            n_samples: 0,
            max_residual: f64::NAN,
            tolerance: 0.0,
            pass: false,
            warning: Some(message),
        }
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warning = Some(warning.into());
        self
    }
}

/// Max of residuals where any NaN wins.
pub fn max_residual<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, r| {
        if acc.is_nan() || r.is_nan() {
            f64::NAN
        } else {
            acc.max(r)
        }
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub version: String,
    pub config: Vec<(String, String)>,
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self {
            version: crate::VERSION.to_string(),
            config: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
    }

    pub fn overall_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn record(&self, check_id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check_id == check_id)
    }

    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "artifact_version = {}", quote(&self.version));
        let _ = writeln!(out, "overall_pass = {}", self.overall_pass());
        let _ = writeln!(out, "n_checks = {}", self.records.len());
        if !self.config.is_empty() {
            out.push_str("\n[config]\n");
            for (k, v) in &self.config {
                let _ = writeln!(out, "{k} = {}", quote(v));
            }
        }
        for r in &self.records {
            out.push_str("\n[[check]]\n");
            let _ = writeln!(out, "check_id = {}", quote(&r.check_id));
            let _ = writeln!(out, "anchor = {}", quote(&r.anchor));
            let _ = writeln!(out, "n_samples = {}", r.n_samples);
            let _ = writeln!(out, "max_residual = {}", float(r.max_residual));
            let _ = writeln!(out, "tolerance = {}", float(r.tolerance));
            let _ = writeln!(out, "pass = {}", r.pass);
            if let Some(w) = &r.warning {
                let _ = writeln!(out, "warning = {}", quote(w));
            }
        }
        out
    }
}

pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_parses_as_toml() {
        let mut r = VerificationReport::new();
        r.config.push(("group".into(), "su:2".into()));
        r.push(CheckRecord::from_residual("a.b", "x \"y\"", 3, 1.5e-13, 1e-12));
        r.push(CheckRecord::from_residual("a.c", "z", 3, f64::NAN, 1e-12));
        r.push(CheckRecord::from_residual("a.d", "w", 0, 0.0, 1e-12));
        let doc = r.to_document();
        let parsed: toml::Table = doc.parse().unwrap();
        assert_eq!(parsed["overall_pass"].as_bool(), Some(false));
        let checks = parsed["check"].as_array().unwrap();
        assert_eq!(checks.len(), 3);
        assert_eq!(checks[0]["anchor"].as_str(), Some("x \"y\""));
        assert_eq!(checks[0]["max_residual"].as_float(), Some(1.5e-13));
        assert!(checks[1]["max_residual"].as_float().unwrap().is_nan());
        assert_eq!(checks[2]["pass"].as_bool(), Some(true));
        assert!(checks[2].get("warning").is_some());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
        assert_eq!(float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn nan_dominates_max() {
        assert!(max_residual([1.0, f64::NAN, 2.0]).is_nan());
        assert_eq!(max_residual([1.0, 3.0]), 3.0);
        assert_eq!(max_residual(std::iter::empty()), 0.0);
    }
}
