//! End-to-end checks of the `mmn` binary: argument handling, report
//! contents, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn mmn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmn"))
        .args(args)
        .env_remove("MMN_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn testdata(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("testdata")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

/// First number following `prefix` on the line that starts with it.
fn grab(text: &str, prefix: &str) -> f64 {
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| l.starts_with(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix:?} in:\n{text}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .and_then(|t| t.parse().ok())
        .unwrap_or_else(|| panic!("no number after {prefix:?} in {line:?}"))
}

#[test]
fn validate_describes_a_network_file() {
    let out = mmn(&["validate", "--net", &testdata("relay.net")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nodes: 3"));
    assert!(text.contains("kind: discrete"));
    assert!(text.contains("block 4: trivial"));
    assert!(text.trim_end().ends_with("ok"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = mmn(&["validate", "--net", "no/such/file.net"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn feasibility_verdicts_set_the_exit_code() {
    let ok = mmn(&["feasible", "--scenario", "trn_cn"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("verdict: feasible"));

    let bad = mmn(&["feasible", "--scenario", "trn_cn", "--seq", "3,1,2,4"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("verdict: infeasible"));
    assert!(text.contains("witness: (1,2,4)"));
}

#[test]
fn profile_files_load_like_the_builtin_default() {
    let out = mmn(&[
        "feasible",
        "--scenario",
        "trn_cn",
        "--profile",
        &testdata("trn_cn.profile"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("profile zeros: 2"));
}

#[test]
fn feasible_all_enumerates_orders() {
    let out = mmn(&["feasible", "--scenario", "trn_cn", "--all"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("feasible sequences:"));
    assert!(text.contains("(1,2,3,4)"));
    // The coupled block (3) itself has no zero-delay entries, so orders
    // firing it before both noise blocks are still listed here; only the
    // two granted reads constrain the order.
    assert!(grab(&text, "feasible sequences:") >= 1.0);
}

#[test]
fn erasure_capacities_come_out_exact() {
    let out = mmn(&["capacity-dmc", "--net", &testdata("relay.net")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((grab(&text, "C(1,2) =") - 0.5).abs() < 1e-6);
    assert!((grab(&text, "C(2,3) =") - 0.75).abs() < 1e-6);
    assert!((grab(&text, "C(1,3) =") - 0.125).abs() < 1e-6);
    assert!((grab(&text, "{1} ->") - 0.625).abs() < 1e-6);
    assert!((grab(&text, "{1,2} ->") - 0.875).abs() < 1e-6);
}

#[test]
fn membership_verdicts_set_the_exit_code() {
    let inside = mmn(&[
        "member",
        "--net",
        &testdata("relay.net"),
        "--rate",
        "0.62,0,0",
    ]);
    assert_eq!(inside.status.code(), Some(0));
    assert!(stdout(&inside).contains("verdict: inside"));

    let outside = mmn(&[
        "member",
        "--net",
        &testdata("relay.net"),
        "--rate",
        "0.63,0,0",
    ]);
    assert_eq!(outside.status.code(), Some(1));
    let text = stdout(&outside);
    assert!(text.contains("verdict: outside"));
    assert!(text.contains("witness cut: {1}"));
}

#[test]
fn nonsource_rates_are_rejected() {
    let out = mmn(&[
        "member",
        "--net",
        &testdata("relay.net"),
        "--rate",
        "0.1,0.1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gaussian_boundary_is_sharp_from_both_sides() {
    let net = testdata("awgn2.net");
    let inside = mmn(&["member", "--net", &net, "--rate", "0.999999,0"]);
    assert_eq!(inside.status.code(), Some(0), "{}", stdout(&inside));

    let outside = mmn(&["member", "--net", &net, "--rate", "1.000001,0"]);
    assert_eq!(outside.status.code(), Some(1));
    assert!(stdout(&outside).contains("witness cut: {1}"));

    let search = mmn(&["capacity-awgn", "--net", &net, "--rate", "1,0"]);
    assert_eq!(search.status.code(), Some(0));
    let text = stdout(&search);
    assert!(grab(&text, "worst-cut slack:").abs() < 1e-9);
    assert!(text.contains("S(1,2) = 3.000000"));
}

#[test]
fn cutset_routes_agree_on_independent_blocks() {
    let out = mmn(&["cutset", "--scenario", "bsc_cf(0.11)", "--joint"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(grab(&text, "max |per-block - joint| =") < 1e-9);
}

#[test]
fn coupled_cutset_bottoms_out_at_zero() {
    let out = mmn(&["cutset", "--scenario", "trn_cn"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("per-block decomposition does not apply"));
    assert!(grab(&text, "min cut value:").abs() < 1e-12);
}

#[test]
fn simulator_reports_the_cancellation_run() {
    let out = mmn(&[
        "simulate",
        "--scenario",
        "trn_cn",
        "--code",
        "cancel_forward",
        "--slots",
        "500",
        "--trials",
        "5",
        "--probe",
        "1:(1,4)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(grab(&text, "p_err:"), 0.0);
    assert!(grab(&text, "mi estimate:") > 0.99);
}

#[test]
fn sandbox_violations_name_the_edge_and_slot() {
    let out = mmn(&[
        "simulate",
        "--scenario",
        "trn_cn",
        "--code",
        "same_slot_probe",
        "--slots",
        "10",
        "--trials",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out)
        .contains("sandbox violation: encoder of (1,2) at slot 1 may not read (1,1) at slot 1"));
}

#[test]
fn seed_flag_and_env_agree() {
    let args = [
        "simulate",
        "--scenario",
        "bsc_if(0.11,0.05)",
        "--code",
        "uncoded",
        "--slots",
        "3",
        "--trials",
        "50",
    ];
    let flagged = mmn(&[&args[..], &["--seed", "5"][..]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_mmn"))
        .args(args)
        .env("MMN_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(stdout(&flagged), String::from_utf8(env.stdout).unwrap());
}

#[test]
fn listings_cover_scenarios_and_codes() {
    let sc = stdout(&mmn(&["scenarios"]));
    assert!(sc.contains("trn_cn") && sc.contains("bsc_if(p,q)"));

    let all = stdout(&mmn(&["codes"]));
    assert!(all.contains("cancel_forward") && all.contains("rep15"));

    let shelf = stdout(&mmn(&["codes", "--scenario", "trn_cn"]));
    assert!(shelf.contains("same_slot_probe"));
    assert!(!shelf.contains("rep15"));
}
