use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use scw_cli::{parse_pairing, parse_suites, run, CliError, FileConfig, SuiteConfig};
use scw_core::invariants::{chern, p1, p1_closed_complex};
use scw_core::liegroup::MatrixGroup;
use scw_core::report::float;
use scw_core::suites::Suite;

#[derive(Parser)]
#[command(name = "scw", version, about = "Numerical verification of simplicial Chern-Weil identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected suites and print the report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suites, or `all`.
        #[arg(long)]
        suites: Option<String>,
    },
    /// Print the Gram matrices of the invariant polynomials on the algebra basis.
    Polys {
        #[arg(long, default_value = "su:2")]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cocycle, connection and descent checks.
    Shulman {
        #[command(flatten)]
        common: Common,
    },
    /// Pairing and coefficient identity checks.
    Theorem {
        #[command(flatten)]
        common: Common,
    },
    /// Simplicial identities and nerve checks.
    Simplicial {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file with any of: group, suites, samples, seed, pairing, out, [tolerances].
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol_exact: Option<f64>,
    #[arg(long)]
    tol_closed: Option<f64>,
    #[arg(long)]
    tol_fd: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `killing`, `killing:c=<value>` or `trace`.
    #[arg(long)]
    pairing: Option<String>,
}

impl Common {
    fn into_config(self, suites: Option<Vec<Suite>>) -> Result<SuiteConfig, CliError> {
        let mut c = SuiteConfig::default();
        if let Some(path) = &self.config {
            FileConfig::load(path)?.apply(&mut c)?;
        }
        if let Some(s) = suites {
            c.suites = s;
        }
        if let Some(g) = self.group {
            c.group = g;
        }
        if let Some(n) = self.samples {
            c.samples = n;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(t) = self.tol_exact {
            c.tolerances.exact = t;
        }
        if let Some(t) = self.tol_closed {
            c.tolerances.closed_form = t;
        }
        if let Some(t) = self.tol_fd {
            c.tolerances.finite_diff = t;
        }
        if let Some(o) = self.out {
            c.output_path = Some(o);
        }
        if let Some(p) = self.pairing {
            c.pairing = parse_pairing(&p)?;
        }
        Ok(c)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("SCW_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("SCW_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn polys_document(group: &MatrixGroup) -> String {
    let basis = group.basis();
    let mut out = String::new();
    let _ = writeln!(out, "group = \"{}\"", group.name());
    let _ = writeln!(out, "dim = {}", group.dim());
    for (poly, sign) in [(p1(), 1.0), (chern(2), -1.0)] {
        let mut worst: f64 = 0.0;
        let _ = writeln!(out, "\n[[polynomial]]\nlabel = \"{}\"\ndegree = {}", poly.label(), poly.degree());
        out.push_str("gram = [\n");
        for a in basis {
            let row: Vec<String> = basis
                .iter()
                .map(|b| {
                    let v = poly.evaluate(&[a.clone(), b.clone()]).expect("degree 2");
                    worst = worst.max((v - p1_closed_complex(a, b) * sign).norm());
                    float(v.re)
                })
                .collect();
            let _ = writeln!(out, "  [{}],", row.join(", "));
        }
        out.push_str("]\n");
        let _ = writeln!(out, "closed_form_residual = {}", float(worst));
    }
    out
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    let config = match cli.command {
        Command::Polys { group, out } => {
            let g = MatrixGroup::parse(&group)?;
            let doc = polys_document(&g);
            match out {
                Some(path) => std::fs::write(&path, &doc).map_err(|source| CliError::Write { path, source })?,
                None => print!("{doc}"),
            }
            return Ok(0);
        }
        Command::Verify { common, suites } => {
            let suites = suites.map(|s| parse_suites(&s)).transpose()?;
            common.into_config(suites)?
        }
        Command::Shulman { common } => common.into_config(Some(vec![Suite::Shulman]))?,
        Command::Theorem { common } => common.into_config(Some(vec![Suite::Symplectic]))?,
        Command::Simplicial { common } => common.into_config(Some(vec![Suite::Simplicial]))?,
    };
    let start = Instant::now();
    let outcome = run(&config)?;
    if config.output_path.is_none() {
        print!("{}", outcome.report.to_document());
    }
    for r in outcome.report.failures() {
        eprintln!(
            "FAIL {}: residual {} tolerance {}{}",
            r.check_id,
            float(r.max_residual),
            float(r.tolerance),
            r.warning.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
        );
    }
    eprintln!("wall_time = {:.3}s", start.elapsed().as_secs_f64());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                eprintln!("usage: scw <verify|polys|shulman|theorem|simplicial> [--group su:N|so:N|o:N|u:N|spin:N] [options]");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
