//! End-to-end runs of the binary: exit codes, JSON shape, determinism, and
//! the verify round-trip on real reports.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fpgroups"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is a JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("fpgroups-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn word_problem_answers_and_exit_codes() {
    let trivial = run(&["--fixture", "P4", "wp", "a b a^-1 b^-1"]);
    assert!(trivial.status.success());
    assert!(stdout_of(&trivial).contains("verdict: trivial"));

    let nontrivial = run(&["--fixture", "P4", "wp", "a c a^-1 c^-1"]);
    assert!(nontrivial.status.success());
    assert!(stdout_of(&nontrivial).contains("verdict: nontrivial"));
}

#[test]
fn membership_yes_and_no() {
    let yes = run(&["--fixture", "P4", "member", "--sub", "a,b,c", "a b^-1 c", "--json"]);
    assert!(yes.status.success());
    let rep = json_of(&yes);
    assert_eq!(rep["verdict"], "yes");
    assert_eq!(rep["details"]["verified"], true);

    let no = run(&["--fixture", "P4", "member", "--sub", "a,b,c", "d", "--json"]);
    assert!(no.status.success());
    let rep = json_of(&no);
    assert_eq!(rep["verdict"], "no");
    assert_eq!(rep["details"]["degree"], 2);
}

#[test]
fn height_map_values() {
    let out = run(&["bs-h1", "2", "3", "[[1,1]]", "--json"]);
    let rep = json_of(&out);
    assert_eq!(rep["details"]["value"], "9/6^1");

    let out = run(&["bs-h1", "2", "3", "[[0,1],[1,-1]]", "--json"]);
    let rep = json_of(&out);
    assert_eq!(rep["details"]["value"], "-3/6^1");
    assert_eq!(rep["details"]["zero"], false);
}

#[test]
fn bad_inputs_exit_2_with_stderr() {
    let out = run(&["--fixture", "NOPE", "wp", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown fixture"));

    let out = run(&["--fixture", "P4", "wp", "z"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["wp", "a"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["bs-power-in-n", "2", "2", "1", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounded_outcomes_exit_3() {
    let overflow = run(&["--fixture", "Z", "tc", "--sub", "a^50", "--budget-steps", "10"]);
    assert_eq!(overflow.status.code(), Some(3));
    assert!(stdout_of(&overflow).contains("verdict: overflow"));

    let unknown = run(&["--fixture", "BS(2,3)", "kernel-of-action"]);
    assert_eq!(unknown.status.code(), Some(3));
    assert!(stdout_of(&unknown).contains("verdict: unknown"));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let args = ["--fixture", "zkernel_p4xp4", "classify", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn coset_table_reports_verify_and_print_csv() {
    let out = run(&["--fixture", "droms_index2", "tc", "--table"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("coset,a,a^-1,b,b^-1,c,c^-1,d,d^-1"));
    assert!(text.contains("0,1,1,1,1,1,1,1,1"));

    let json = run(&["--fixture", "droms_index2", "tc", "--json"]);
    let path = scratch("tc.json");
    std::fs::write(&path, &json.stdout).unwrap();
    let verify = run(&["verify", path.to_str().unwrap()]);
    assert!(verify.status.success(), "verify should accept a fresh report");
    assert!(stdout_of(&verify).contains("verdict: valid"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_round_trips_certificate_reports() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("member-yes", vec!["--fixture", "P4", "member", "--sub", "a,b,c", "a b^-1 c"]),
        ("member-no", vec!["--fixture", "P4", "member", "--sub", "a,b,c", "d"]),
        ("kernel", vec!["--fixture", "BS(2,2)", "kernel-of-action"]),
        ("wpd", vec!["--fixture", "P4_SPLITTING", "wpd"]),
        (
            "fiber",
            vec!["--fixture", "zkernel_p4xp4", "fiber", "--side", "1", "--budget-length", "2"],
        ),
        ("separate", vec!["--fixture", "P4", "separate", "--sub", "a,b,c", "d"]),
    ];
    for (name, mut args) in cases {
        args.push("--json");
        let out = run(&args);
        assert!(out.status.success(), "{name} should run clean");
        let path = scratch(&format!("verify-{name}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        let verify = run(&["verify", path.to_str().unwrap()]);
        assert!(
            verify.status.success(),
            "{name} report should verify: {}",
            stdout_of(&verify)
        );
        std::fs::remove_file(&path).ok();
    }
}

#[test]
fn tampered_reports_are_rejected() {
    let out = run(&["--fixture", "P4", "member", "--sub", "a,b,c", "d", "--json"]);
    let mut rep = json_of(&out);
    rep["details"]["subgroup_order"] = Value::from(3);
    let path = scratch("tampered.json");
    std::fs::write(&path, serde_json::to_string(&rep).unwrap()).unwrap();
    let verify = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(2));
    assert!(stdout_of(&verify).contains("verdict: invalid"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn file_inputs_work_for_each_dto() {
    let raag = scratch("path3.json");
    std::fs::write(
        &raag,
        r#"{"vertices":["p","q","r"],"edges":[["p","q"],["q","r"]]}"#,
    )
    .unwrap();
    let out = run(&["nf", "--model", "raag", "--input", raag.to_str().unwrap(), "q p r q^-1"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("normal_form: p r"));
    std::fs::remove_file(&raag).ok();

    let gog = scratch("loop35.json");
    std::fs::write(
        &gog,
        r#"{"vertices":[{"name":"v","rank":1}],
            "edges":[{"tail":0,"head":0,"attach_tail":[3],"attach_head":[5],"tree":false}]}"#,
    )
    .unwrap();
    let out = run(&["wp", "--model", "gog", "--input", gog.to_str().unwrap(), "t^-1 v v v t v^-5"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("verdict: trivial"));
    std::fs::remove_file(&gog).ok();

    let pres = scratch("z6.json");
    std::fs::write(
        &pres,
        r#"{"generators":["a","b"],"relators":["a a a","b b","a b a^-1 b^-1"]}"#,
    )
    .unwrap();
    let out = run(&["tc", "--presentation", pres.to_str().unwrap(), "--json"]);
    let rep = json_of(&out);
    assert_eq!(rep["details"]["index"], 6);
    std::fs::remove_file(&pres).ok();
}

#[test]
fn classify_buckets_match_known_inputs() {
    let z = json_of(&run(&["--fixture", "zkernel_p4xp4", "classify", "--json"]));
    assert_eq!(z["verdict"], "z-kernel");
    assert_eq!(z["details"]["abelianization_first"]["rank"], 1);
    assert_eq!(z["details"]["abelianization_second"]["rank"], 1);

    let full = json_of(&run(&["--fixture", "full_product_p4xp4", "classify", "--json"]));
    assert_eq!(full["verdict"], "finite-index");
    assert_eq!(full["details"]["index_first"], 1);
    assert_eq!(full["details"]["index_second"], 1);
}
