//! Configuration and orchestration behind the `scw` binary.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use scw_core::liegroup::{LieError, MatrixGroup};
use scw_core::report::{float, Tolerances, VerificationReport};
use scw_core::suites::{run_suite, Suite, SuiteInputs};
use scw_core::symplectic::PairingKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Group(#[from] LieError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for anything rejected before a suite runs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Write { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub group: String,
    pub suites: Vec<Suite>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
    pub pairing: PairingKind,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            group: "su:2".into(),
            suites: Suite::ALL.to_vec(),
            samples: 50,
            seed: 42,
            tolerances: Tolerances::default(),
            output_path: None,
            pairing: PairingKind::ScaledKilling(1.0),
        }
    }
}

/// Parse a comma-separated suite list. The result is deduplicated and sorted
/// into execution order.
pub fn parse_suites(list: &str) -> Result<Vec<Suite>, CliError> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let suites = Suite::parse(name).ok_or_else(|| CliError::Config(format!("unknown suite {name:?}")))?;
        out.extend(suites);
    }
    if out.is_empty() {
        return Err(CliError::Config("no suites selected".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn parse_pairing(s: &str) -> Result<PairingKind, CliError> {
    s.parse().map_err(|e: scw_core::symplectic::SymplecticError| CliError::Config(e.to_string()))
}

/// Optional keys of a TOML configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub group: Option<String>,
    pub suites: Option<Vec<String>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub pairing: Option<String>,
    pub out: Option<PathBuf>,
    pub tolerances: Option<FileTolerances>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileTolerances {
    pub exact: Option<f64>,
    pub closed_form: Option<f64>,
    pub finite_diff: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(self, config: &mut SuiteConfig) -> Result<(), CliError> {
        if let Some(g) = self.group {
            config.group = g;
        }
        if let Some(s) = self.suites {
            config.suites = parse_suites(&s.join(","))?;
        }
        if let Some(n) = self.samples {
            config.samples = n;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(p) = self.pairing {
            config.pairing = parse_pairing(&p)?;
        }
        if let Some(o) = self.out {
            config.output_path = Some(o);
        }
        if let Some(t) = self.tolerances {
            let tol = &mut config.tolerances;
            tol.exact = t.exact.unwrap_or(tol.exact);
            tol.closed_form = t.closed_form.unwrap_or(tol.closed_form);
            tol.finite_diff = t.finite_diff.unwrap_or(tol.finite_diff);
        }
        Ok(())
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<Arc<MatrixGroup>, CliError> {
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("exact", t.exact), ("closed_form", t.closed_form), ("finite_diff", t.finite_diff)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.suites.is_empty() {
            return Err(CliError::Config("no suites selected".into()));
        }
        Ok(Arc::new(MatrixGroup::parse(&self.group)?))
    }

    /// Key/value echo written into the report.
    pub fn echo(&self, group: &MatrixGroup) -> Vec<(String, String)> {
        let suites: Vec<&str> = self.suites.iter().map(|s| s.name()).collect();
        vec![
            ("group".into(), group.name().to_string()),
            ("suites".into(), suites.join(",")),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("pairing".into(), self.pairing.to_string()),
            ("tol_exact".into(), float(self.tolerances.exact)),
            ("tol_closed".into(), float(self.tolerances.closed_form)),
            ("tol_fd".into(), float(self.tolerances.finite_diff)),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: VerificationReport,
    pub exit_code: i32,
}

/// Run the selected suites in execution order and write the report if an
/// output path is set.
pub fn run(config: &SuiteConfig) -> Result<Outcome, CliError> {
    let group = config.validate()?;
    let mut report = VerificationReport::new();
    report.config = config.echo(&group);
    let inputs = SuiteInputs {
        group,
        samples: config.samples,
        seed: config.seed,
        tolerances: config.tolerances,
        pairing: config.pairing,
    };
    for suite in &config.suites {
        report.extend(run_suite(*suite, &inputs));
    }
    if let Some(path) = &config.output_path {
        std::fs::write(path, report.to_document()).map_err(|source| CliError::Write { path: path.clone(), source })?;
    }
    let exit_code = if report.overall_pass() { 0 } else { 1 };
    Ok(Outcome { report, exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_sorted_and_deduplicated() {
        let s = parse_suites("symplectic, simplicial,simplicial").unwrap();
        assert_eq!(s, vec![Suite::Simplicial, Suite::Symplectic]);
        assert_eq!(parse_suites("all").unwrap(), Suite::ALL.to_vec());
        assert!(parse_suites("bogus").is_err());
        assert!(parse_suites("").is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = SuiteConfig::default();
        c.samples = 0;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = SuiteConfig::default();
        c.tolerances.exact = -1.0;
        assert!(c.validate().is_err());
        let mut c = SuiteConfig::default();
        c.group = "su:1".into();
        assert!(matches!(c.validate(), Err(CliError::Group(LieError::Trivial(_)))));
        c.group = "sp:4".into();
        assert!(matches!(c.validate(), Err(CliError::Group(LieError::UnknownGroup(_)))));
    }

    #[test]
    fn file_config_overrides_defaults() {
        let file: FileConfig = toml::from_str(
            "group = \"so:3\"\nsuites = [\"invariants\", \"liegroup\"]\nseed = 9\n[tolerances]\nclosed_form = 1e-8\n",
        )
        .unwrap();
        let mut c = SuiteConfig::default();
        file.apply(&mut c).unwrap();
        assert_eq!(c.group, "so:3");
        assert_eq!(c.suites, vec![Suite::Liegroup, Suite::Invariants]);
        assert_eq!(c.seed, 9);
        assert_eq!(c.tolerances.closed_form, 1e-8);
        assert_eq!(c.tolerances.exact, 1e-12);
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }

    #[test]
    fn small_run_passes_and_echoes_config() {
        let c = SuiteConfig {
            suites: vec![Suite::Liegroup, Suite::Invariants],
            samples: 3,
            ..SuiteConfig::default()
        };
        let out = run(&c).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.config[0], ("group".to_string(), "su:2".to_string()));
        assert!(out.report.records.iter().all(|r| r.check_id.starts_with("liegroup.") || r.check_id.starts_with("invariants.")));
    }
}
