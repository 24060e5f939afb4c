use std::process::{Command, Output};

fn scw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scw"))
        .args(args)
        .env("SCW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn trivial_and_unknown_groups_exit_two() {
    for group in ["su:1", "sp:4", "su", "su:x"] {
        let out = scw(&["verify", "--group", group, "--suites", "liegroup"]);
        assert_eq!(code(&out), 2, "{group}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&scw(&["verify", "--suites", "nope"])), 2);
    assert_eq!(code(&scw(&["verify", "--samples", "0"])), 2);
    assert_eq!(code(&scw(&["verify", "--tol-fd", "-1"])), 2);
    assert_eq!(code(&scw(&["theorem", "--pairing", "cartan"])), 2);
    assert_eq!(code(&scw(&["frobnicate"])), 2);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    let args = ["verify", "--group", "so:3", "--suites", "simplicial,forms,invariants", "--samples", "6", "--seed", "11"];
    let mut first: Vec<&str> = args.to_vec();
    first.extend(["--out", a.to_str().unwrap()]);
    let mut second: Vec<&str> = args.to_vec();
    second.extend(["--out", b.to_str().unwrap()]);
    assert_eq!(code(&scw(&first)), 0);
    let single = Command::new(env!("CARGO_BIN_EXE_scw")).args(&second).env("SCW_THREADS", "1").output().unwrap();
    assert_eq!(code(&single), 0);
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn report_is_a_toml_document_with_config_echo() {
    let out = scw(&["simplicial", "--group", "su:2", "--samples", "4", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc["overall_pass"].as_bool(), Some(true));
    assert_eq!(doc["config"]["group"].as_str(), Some("su:2"));
    assert_eq!(doc["config"]["suites"].as_str(), Some("simplicial"));
    let checks = doc["check"].as_array().unwrap();
    assert_eq!(checks.len() as i64, doc["n_checks"].as_integer().unwrap());
    assert!(checks.iter().all(|c| c["check_id"].as_str().unwrap().starts_with("simplicial.")));
    assert!(doc.get("wall_time").is_none());
}

#[test]
fn numerical_failure_exits_one_and_lists_failures() {
    // Killing pairing with the stated orthogonal coefficient does not match
    let out = scw(&["theorem", "--group", "so:3", "--samples", "5"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL symplectic.theorem_level1"));
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc["overall_pass"].as_bool(), Some(false));
}

#[test]
fn trace_pairing_theorem_passes() {
    for group in ["su:3", "so:3"] {
        assert_eq!(code(&scw(&["theorem", "--group", group, "--pairing", "trace", "--samples", "10"])), 0, "{group}");
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "group = \"su:1\"\nsuites = [\"invariants\"]\nsamples = 3\n[tolerances]\nexact = 1e-11\n").unwrap();
    let path = cfg.to_str().unwrap();
    assert_eq!(code(&scw(&["verify", "--config", path])), 2);
    let out = scw(&["verify", "--config", path, "--group", "su:3"]);
    assert_eq!(code(&out), 0);
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc["config"]["tol_exact"].as_str(), Some("9.9999999999999994e-12"));
    assert_eq!(doc["config"]["samples"].as_str(), Some("3"));
    std::fs::write(&cfg, "samples = \"many\"\n").unwrap();
    assert_eq!(code(&scw(&["verify", "--config", path])), 2);
}

#[test]
fn polys_prints_gram_matrices() {
    let out = scw(&["polys", "--group", "su:2"]);
    assert_eq!(code(&out), 0);
    let doc: toml::Table = String::from_utf8(out.stdout).unwrap().parse().unwrap();
    assert_eq!(doc["dim"].as_integer(), Some(3));
    for poly in doc["polynomial"].as_array().unwrap() {
        assert_eq!(poly["gram"].as_array().unwrap().len(), 3);
        assert!(poly["closed_form_residual"].as_float().unwrap() < 1e-12);
    }
    assert_eq!(code(&scw(&["polys", "--group", "su:1"])), 2);
}
