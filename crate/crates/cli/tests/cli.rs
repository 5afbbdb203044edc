use std::fs;
use std::process::Command;

use fqrigid_cli::{main_with_args, parse_config, read_report, run, CliError, Report, ViolationSummary};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("fqrigid").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn rigidity_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let (code, stdout, _) = call(&["rigidity", "--p", "7", "--n", "2", "--d", "3", "--cosets", "0", "--out", p]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("violations: none"));
    let report = read_report(&path).unwrap();
    assert_eq!(report.schema_version, 1);
    assert_eq!(report.command, "rigidity");
    assert!(report.violations.is_none());
    let direct = fqrigid::search::verify_thm_main(7, 2, 3, &[0], &Default::default()).unwrap();
    assert_eq!(report.payload, serde_json::to_value(&direct).unwrap());
    let again = serde_json::from_str::<Report>(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
    let raw: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(raw["violations"], "none");
}

#[test]
fn payload_does_not_depend_on_worker_count() {
    let base = ["fqrigid", "rigidity", "--p", "5", "--n", "2", "--d", "4", "--cosets", "0,1"];
    let one = parse_config(base.iter().copied().chain(["--jobs", "1"]).map(String::from).collect::<Vec<_>>());
    let two = parse_config(base.iter().copied().chain(["--jobs", "2"]).map(String::from).collect::<Vec<_>>());
    let (a, _) = run(&one.unwrap()).unwrap();
    let (b, _) = run(&two.unwrap()).unwrap();
    assert_eq!(a.payload, b.payload);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    let out = dir.path().join("out.json");
    fs::write(&cfg, format!("command = clique\np = 3\nn = 1\nd = 4\ncosets = 0,1\nout = {}\n", out.display())).unwrap();
    let (code, stdout, stderr) = call(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    let report = read_report(&out).unwrap();
    assert_eq!(report.command, "clique");
    assert_eq!(report.payload["governing"], "prime_base");

    // the flag wins over the file
    let (code, _, _) = call(&["clique", "--config", cfg.to_str().unwrap(), "--cosets", "0,2"]);
    assert_eq!(code, 0);
    assert_eq!(read_report(&out).unwrap().payload["cosets"], serde_json::json!([0, 2]));

    fs::write(&cfg, "command = clique\nradius = 3\n").unwrap();
    let (code, _, stderr) = call(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown key \"radius\""), "{stderr}");
}

#[test]
fn errors_name_the_problem() {
    let (code, _, stderr) = call(&["rigidity", "--p", "23", "--n", "2", "--d", "3", "--cosets", "0,0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cosets"), "{stderr}");
    let err =
        parse_config(["fqrigid", "rigidity", "--p", "23", "--n", "2", "--d", "3", "--cosets", "0,0"]).unwrap_err();
    assert!(matches!(err, CliError::InvalidValue { .. }));
    assert!(matches!(parse_config(["fqrigid", "prove-everything"]), Err(CliError::UnknownCommand(_))));
    let (code, _, stderr) = call(&["rigidity", "--p", "23", "--n", "2", "--cosets", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("needs a value for d"), "{stderr}");
    let (code, _, stderr) = call(&["field-info", "--p", "6", "--n", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not prime"), "{stderr}");
}

#[test]
fn audit_csv_has_one_row_per_sum() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let (code, stdout, _) =
        call(&["charsum", "audit", "--mode", "cor22", "--count", "7", "--seed", "5", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("kind,p,n,d,"));
    assert!(lines[1..].iter().all(|l| l.starts_with("cor22,") && l.ends_with(",pass")));

    let (code, _, _) = call(&["charsum", "audit", "--mode", "rou", "--d", "4", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 16);
}

#[test]
fn same_seed_same_audits() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let (code, _, _) = call(&[
            "charsum",
            "audit",
            "--mode",
            "weil",
            "--count",
            "10",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(read_report(&a).unwrap().payload, read_report(&b).unwrap().payload);
}

#[test]
fn clique_edges_file() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.txt");
    let (code, _, _) =
        call(&["clique", "--p", "3", "--n", "1", "--d", "2", "--cosets", "0", "--edges", edges.to_str().unwrap()]);
    assert_eq!(code, 0);
    // S = squares of F_9, a 4-regular graph on 9 vertices
    assert_eq!(fs::read_to_string(&edges).unwrap().lines().count(), 18);
}

#[test]
fn example_output() {
    let (code, stdout, _) = call(&["example-f25"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("directions (6): 2u, 3u, 1+u, 1-u, 2+2u, 2-2u"), "{stdout}");
    assert!(stdout.contains("Frobenius-linear: false"));
}

#[test]
fn violations_set_the_exit_status() {
    let config = parse_config(["fqrigid", "directions-theorem", "--q", "3"]).unwrap();
    let (mut report, _) = run(&config).unwrap();
    assert_eq!(report.exit_code(), 0);
    report.violations = ViolationSummary(vec!["THEOREM VIOLATION: synthetic".into()]);
    assert_eq!(report.exit_code(), 1);
    let back: Report = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back.violations.0.len(), 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_fqrigid");
    let ok = Command::new(bin).args(["directions-theorem", "--q", "5"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("violations: none"));
    let bad = Command::new(bin).args(["directions-theorem"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("rigidity"));
}

#[test]
fn catalog_exceptions_are_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let (code, stdout, _) = call(&[
        "clique",
        "--p",
        "2",
        "--n",
        "2",
        "--d",
        "5",
        "--cosets",
        "0,1,2",
        "--mode",
        "catalog",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}");
    let report = read_report(&out).unwrap();
    let exceptions = report.payload["exceptions"].as_array().unwrap().len();
    assert!(exceptions > 0);
    assert!(stdout.contains(&format!("{exceptions} other than F_q")), "{stdout}");
    assert!(report.violations.is_none());
}
