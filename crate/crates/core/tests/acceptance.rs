//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use scw_core::liegroup::MatrixGroup;
use scw_core::report::{CheckRecord, Tolerances, VerificationReport};
use scw_core::shulman::{connection_suite, descent_suite, shulman_theorem_suite};
use scw_core::suites::{forms_suite, invariants_suite, simplicial_suite};
use scw_core::symplectic::{
    final_theorem_check, final_theorem_check_with, killing_lemma_check, CoefficientSource, PairingKind,
    QuadraticPairing,
};

const SEED: u64 = 42;

fn group(spec: &str) -> Arc<MatrixGroup> {
    Arc::new(spec.parse().expect("valid group"))
}

struct Criterion {
    label: &'static str,
    records: Vec<(String, CheckRecord)>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Self { label, records: Vec::new() }
    }

    fn take(&mut self, context: &str, report: &VerificationReport, ids: &[&str]) {
        for id in ids {
            match report.record(id) {
                Some(r) => self.records.push((context.to_string(), r.clone())),
                None => self
                    .records
                    .push((context.to_string(), CheckRecord::error(*id, "missing", "check not produced".into()))),
            }
        }
    }

    fn take_all(&mut self, context: &str, report: &VerificationReport) {
        for r in &report.records {
            self.records.push((context.to_string(), r.clone()));
        }
    }

    fn push(&mut self, context: &str, r: CheckRecord) {
        self.records.push((context.to_string(), r));
    }

    fn pass(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|(_, r)| r.pass)
    }

    fn print(&self) {
        let tag = if self.pass() { "PASS" } else { "FAIL" };
        let worst = self
            .records
            .iter()
            .map(|(_, r)| if r.tolerance > 0.0 { r.max_residual / r.tolerance } else { f64::NAN })
            .fold(0.0, |a: f64, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) });
        println!("[{tag}] {} ({} checks, worst residual/tolerance {worst:.3e})", self.label, self.records.len());
        for (ctx, r) in self.records.iter().filter(|(_, r)| !r.pass) {
            println!(
                "       failed {ctx} {}: residual {:.6e} tolerance {:.1e}{}",
                r.check_id,
                r.max_residual,
                r.tolerance,
                r.warning.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
            );
        }
    }
}

fn theorem(c: &mut Criterion, spec: &str, kind: PairingKind, source: CoefficientSource, tol: &Tolerances) {
    let ctx = format!("{spec} {kind}");
    let result = QuadraticPairing::new(kind, group(spec))
        .map_err(|e| e.to_string())
        .and_then(|p| final_theorem_check_with(&p, 100, SEED, tol, source).map_err(|e| e.to_string()));
    match result {
        Ok(r) => c.take_all(&ctx, &r),
        Err(e) => c.push(&ctx, CheckRecord::error("symplectic.theorem", "coefficient identity", e)),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut criteria = Vec::new();

    let mut c = Criterion::new("1 simplicial and cosimplicial identities");
    for spec in ["su:2", "so:3"] {
        let r = simplicial_suite(group(spec), 50, SEED, &tol);
        c.take(spec, &r, &["simplicial.cosimplicial_equations", "simplicial.nerve_identities"]);
    }
    criteria.push(c);

    let mut c = Criterion::new("2 normal form round trip, [k] -> [m], k, m <= 5");
    c.take("", &simplicial_suite(group("su:2"), 1, SEED, &tol), &["simplicial.normal_form_roundtrip"]);
    criteria.push(c);

    let mut c3 = Criterion::new("3 Maurer-Cartan equation, 50 samples");
    let mut c5 = Criterion::new("5 fibre integration constants");
    let mut c6 = Criterion::new("6 boundary formula on 20 polynomial 1-forms");
    for spec in ["su:2", "su:3", "so:3"] {
        let r = forms_suite(group(spec), 50, SEED, &tol);
        c3.take(spec, &r, &["forms.maurer_cartan_equation"]);
        if spec == "su:2" {
            c5.take(spec, &r, &["forms.quadrature_constants"]);
            c6.take(spec, &r, &["forms.stokes_boundary"]);
        }
    }

    let mut c4 = Criterion::new("4 curvature closed formula vs definition, n = 1, 2");
    c4.take("su:2", &connection_suite(group("su:2"), 20, SEED, &tol), &["shulman.curvature_formula"]);

    let mut c7 = Criterion::new("7 chi_1, chi_2 closed forms, chi_3 = chi_4 = 0");
    for spec in ["su:2", "so:3"] {
        c7.take(spec, &connection_suite(group(spec), 100, SEED, &tol), &["shulman.chi_closed_forms"]);
    }
    let shulman = shulman_theorem_suite(group("su:2"), 50, SEED, &tol);
    c7.take("su:2", &shulman, &["shulman.chi3_vanishes", "shulman.chi4_vanishes"]);

    let mut c8 = Criterion::new("8 normalization and cocycle equation");
    c8.take(
        "su:2",
        &shulman,
        &["shulman.normalization", "shulman.cocycle_level2", "shulman.cocycle_level3", "shulman.chi0_zero"],
    );
    criteria.extend([c3, c4, c5, c6, c7, c8]);

    let mut c = Criterion::new("9 polarization oracle and c2 = -p1");
    c.take(
        "su:3",
        &invariants_suite(group("su:3"), 100, SEED, &tol),
        &["invariants.polarization", "invariants.chern_vs_pontryagin"],
    );
    criteria.push(c);

    let mut c = Criterion::new("10 Killing form = 2n tr on su(n), (n-2) tr on so(n)");
    for spec in ["su:2", "su:3", "su:4", "so:3", "so:4", "so:5"] {
        match killing_lemma_check(&group(spec), 100, SEED) {
            Ok(r) => c.take_all(spec, &r),
            Err(e) => c.push(spec, CheckRecord::error("symplectic.killing_lemma", "Killing lemma", e.to_string())),
        }
    }
    criteria.push(c);

    let mut c = Criterion::new("11a coefficient identity: SU Killing pairings, trace pairing");
    for spec in ["su:2", "su:3"] {
        let n = group(spec).n() as f64;
        for scale in [1.0, -1.0 / (16.0 * n * PI * PI)] {
            theorem(&mut c, spec, PairingKind::ScaledKilling(scale), CoefficientSource::Stated, &tol);
        }
    }
    for spec in ["su:3", "so:3"] {
        theorem(&mut c, spec, PairingKind::Trace, CoefficientSource::Stated, &tol);
    }
    criteria.push(c);

    let mut c = Criterion::new("11b coefficient identity: SO Killing pairing, coefficient -1/(8(n-1)c pi^2)");
    for spec in ["so:3", "so:4"] {
        let pairing = QuadraticPairing::new(PairingKind::ScaledKilling(1.0), group(spec)).expect("nondegenerate");
        match final_theorem_check(&pairing, 100, SEED, &tol) {
            Ok(r) => c.take_all(spec, &r),
            Err(e) => c.push(spec, CheckRecord::error("symplectic.theorem", "coefficient identity", e.to_string())),
        }
    }
    let mut info = Criterion::new("   info: same check with coefficient -1/(8(n-2)c pi^2) from the Killing factor");
    for spec in ["so:3", "so:4"] {
        theorem(&mut info, spec, PairingKind::ScaledKilling(1.0), CoefficientSource::FromKillingFactor, &tol);
    }
    criteria.push(c);

    let mut c = Criterion::new("12 descent: gamma^* Phi = chi for two lifts");
    c.take("su:2", &descent_suite(group("su:2"), 50, SEED, &tol), &["shulman.descent_lifts"]);
    criteria.push(c);

    criteria.sort_by_key(|c| {
        let head = c.label.split_whitespace().next().unwrap_or("");
        let digits: String = head.chars().take_while(|ch| ch.is_ascii_digit()).collect();
        (digits.parse::<u32>().unwrap_or(0), head.to_string())
    });
    let mut all_pass = true;
    for c in &criteria {
        c.print();
        if c.label.starts_with("11b") {
            info.print();
        }
        all_pass &= c.pass();
    }
    let passed = criteria.iter().filter(|c| c.pass()).count();
    println!("{passed}/{} criteria passed in {:.1}s", criteria.len(), start.elapsed().as_secs_f64());
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
