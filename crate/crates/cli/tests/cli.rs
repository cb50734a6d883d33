// End-to-end runs of the compiled binary. Each test shells out, so the
// assertions here are about the observable contract: exit codes, envelope
// shape, byte determinism.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cohom1"))
        .args(args)
        .output()
        .expect("binary spawns");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("stdout is utf-8"),
        String::from_utf8(out.stderr).expect("stderr is utf-8"),
    )
}

fn json_of(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is one json document")
}

fn temp_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("cohom1-cli-{}-{stem}", std::process::id()))
}

#[test]
fn classify_bound_three_reports_both_family_lists() {
    let (code, out, _) = run(&["classify", "--bound", "3"]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    let flat = doc["result"]["ricci_flat_families"].as_array().unwrap();
    let einstein = doc["result"]["einstein_families"].as_array().unwrap();
    assert_eq!(flat.len(), 3);
    assert_eq!(einstein.len(), 1);
    let names: Vec<String> = flat
        .iter()
        .map(|f| {
            f.as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect::<Vec<_>>().join(",")
        })
        .collect();
    assert!(names.contains(&"1,0,0,0,-1,2".to_string()));
    assert!(names.contains(&"1,0,-2,0,-1,0".to_string()));
    assert!(names.contains(&"1,0,0,0,-1,-2".to_string()));
    assert_eq!(
        einstein[0].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect::<Vec<_>>(),
        vec!["2", "0", "-1", "0", "1", "0"]
    );
    assert_eq!(doc["result"]["sweep"]["points_checked"].as_u64(), Some(117_648));
    assert_eq!(doc["result"]["sweep"]["matches_case_tree"].as_bool(), Some(true));
    assert_eq!(doc["config"]["bound"].as_i64(), Some(3));

    let (code2, out2, _) = run(&["classify", "--bound", "3"]);
    assert_eq!(code2, 0);
    assert_eq!(out, out2, "identical invocations must produce identical bytes");
}

#[test]
fn verify_taub_nut_is_flat_to_stated_tolerance() {
    let (code, out, _) = run(&["verify", "--form", "taub-nut", "--param", "1"]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["einstein_constant"].as_f64(), Some(0.0));
    assert!(doc["result"]["max_ode_residual"].as_f64().unwrap() <= 1e-12);
    assert!(doc["result"]["max_ricci_deviation"].as_f64().unwrap() <= 1e-9);
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 100);
}

#[test]
fn integrate_into_the_nut_exits_three_with_the_event() {
    let (code, out, _) = run(&[
        "integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "-5", "--tol", "1e-10",
    ]);
    assert_eq!(code, 3);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["termination"].as_str(), Some("singular"));
    let event = &doc["result"]["event"];
    assert_eq!(event["side"].as_str(), Some("a2-to-zero"));
    let t0 = event["t0_estimate"].as_f64().unwrap();
    assert!((t0 + 1.0).abs() <= 1e-8, "nut sits at t = -1, got {t0}");
    let bracket = event["bracket"].as_array().unwrap();
    assert!(bracket[1].as_f64().unwrap() - bracket[0].as_f64().unwrap() <= 1e-8);
}

#[test]
fn integrate_forward_round_trips_every_numeric_flag() {
    let (code, out, _) = run(&[
        "integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "1", "--tol", "1e-12",
    ]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    assert_eq!(doc["config"]["t_end"].as_f64(), Some(1.0));
    assert_eq!(doc["config"]["tol"].as_f64(), Some(1e-12));
    assert_eq!(doc["config"]["init"].as_array().unwrap().len(), 2);
    assert_eq!(doc["result"]["termination"].as_str(), Some("reached-t-end"));
    assert!((doc["result"]["t_last"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn integrate_csv_streams_the_sample_table() {
    let (code, out, _) = run(&[
        "integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "0.5", "--format", "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,A1,A2,x,ric00,ric11,ric22,scalar"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8, "bad row {line:?}");
        for f in fields {
            f.parse::<f64>().unwrap_or_else(|_| panic!("unparseable field {f:?}"));
        }
        rows += 1;
    }
    assert!(rows >= 2);
    let first: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(&first[..4], &[0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn unknown_flags_fail_with_usage_on_stderr() {
    let (code, out, err) = run(&["classify", "--bogus", "2"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "stderr was {err:?}");

    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage") || err.contains("unrecognized"), "stderr was {err:?}");
}

#[test]
fn config_file_runs_match_explicit_flag_runs_byte_for_byte() {
    let cfg = temp_path("flags.conf");
    fs::write(
        &cfg,
        "# backward nut run\nparams = 1,0,0,0,-1,2\ninit = 1,1\nt-end = 1\ntol = 1e-10\n",
    )
    .unwrap();

    let (code_a, out_a, _) = run(&["--config", cfg.to_str().unwrap(), "integrate"]);
    let (code_b, out_b, _) = run(&[
        "integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "1", "--tol", "1e-10",
    ]);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(out_a, out_b);

    let (code_c, out_c, _) = run(&["--config", cfg.to_str().unwrap(), "integrate", "--t-end", "2"]);
    assert_eq!(code_c, 0);
    assert_eq!(json_of(&out_c)["config"]["t_end"].as_f64(), Some(2.0));

    fs::remove_file(&cfg).unwrap();
}

#[test]
fn inexact_rationals_are_rejected_up_front() {
    let (code, _, err) = run(&[
        "integrate", "--params", "1e-1,0,0,0,-1,2", "--init", "1,1", "--t-end", "1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("exact rational"), "stderr was {err:?}");
}

#[test]
fn ricci_of_the_unit_round_jet() {
    let (code, out, _) = run(&[
        "ricci", "--a1", "1", "--a1p", "0", "--a1pp", "0", "--a2", "1", "--a2p", "0", "--a2pp", "0",
    ]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["ric00"].as_f64(), Some(0.0));
    assert_eq!(doc["result"]["ric11"].as_f64(), Some(4.0));
    assert_eq!(doc["result"]["ric22"].as_f64(), Some(4.0));
    assert_eq!(doc["result"]["ric33"].as_f64(), Some(4.0));
    assert_eq!(doc["result"]["scalar"].as_f64(), Some(12.0));
}

#[test]
fn asymptote_singular_recovers_the_cube_root_exponents() {
    let (code, out, _) = run(&[
        "asymptote", "--mode", "singular", "--params", "-1,0,0,0,1,2",
        "--init", "2,0.6666666666666666", "--t-end", "-1",
    ]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["event"]["side"].as_str(), Some("both"));
    let e2 = doc["result"]["a2_fit"]["exponent"].as_f64().unwrap();
    let e1 = doc["result"]["a1_fit"]["exponent"].as_f64().unwrap();
    assert!((e2 - 1.0 / 3.0).abs() <= 0.02, "A2 exponent {e2}");
    assert!((e1 + 1.0 / 3.0).abs() <= 0.02, "A1 exponent {e1}");
}

#[test]
fn asymptote_infinity_recovers_the_log_profile() {
    let (code, out, _) = run(&[
        "asymptote", "--mode", "infinity", "--params", "-1,0,0,0,1,2",
        "--init", "2,0.6666666666666666", "--t-end", "12000",
    ]);
    assert_eq!(code, 0);
    let doc = json_of(&out);
    assert_eq!(doc["result"]["termination"].as_str(), Some("reached-t-end"));
    assert_eq!(doc["result"]["tail_class"].as_str(), Some("alc-collapsed"));
    let beta = doc["result"]["beta"].as_f64().unwrap();
    let a1_tail = doc["result"]["a1_tail_mean"].as_f64().unwrap();
    assert!((beta - 0.5).abs() <= 0.01, "beta {beta}");
    assert!((a1_tail - 1.0).abs() <= 1e-3, "a1 tail {a1_tail}");
}

#[test]
fn asymptote_singular_on_a_complete_run_is_a_numerical_failure() {
    let (code, _, err) = run(&[
        "asymptote", "--mode", "singular", "--params", "1,0,0,0,-1,2",
        "--init", "1,1", "--t-end", "1",
    ]);
    assert_eq!(code, 3);
    assert!(!err.is_empty());
}

#[test]
fn catalog_table_lists_the_requested_points() {
    let (code, out, _) = run(&["catalog", "--form", "flat-cone", "--points", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].contains("flat-cone, 3 samples"));
    assert_eq!(lines.len(), 5, "title, header, three rows");
    for row in &lines[2..] {
        let vals: Vec<f64> = row.split_whitespace().map(|f| f.parse().unwrap()).collect();
        let [coord, t, a1, a2] = vals[..] else { panic!("bad row {row:?}") };
        assert_eq!(t, coord, "the cone coordinate is arclength");
        assert_eq!(a1, coord);
        assert_eq!(a2, coord);
    }

    let (code, out, _) = run(&["catalog", "--form", "eguchi-hanson", "--param", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("coord,t,a1,a2,ric00,ric11,ric22,r1,r2"));
    for line in out.lines().skip(1) {
        let vals: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(vals.len(), 9);
        assert!(vals[1] > 0.0, "bolt-anchored t is positive");
        for worst in &vals[4..] {
            assert!(worst.abs() <= 1e-9, "flat form leaves residual {worst} in {line}");
        }
    }
}

#[test]
fn out_flag_writes_the_envelope_to_the_file() {
    let path = temp_path("ricci.json");
    let (code, out, _) = run(&[
        "ricci", "--a1", "1", "--a1p", "0", "--a1pp", "0", "--a2", "1", "--a2p", "0", "--a2pp", "0",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "envelope goes to the file, not stdout");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["result"]["scalar"].as_f64(), Some(12.0));
    fs::remove_file(&path).unwrap();
}

#[test]
fn forms_that_need_a_scale_parameter_insist_on_one() {
    let (code, _, err) = run(&["catalog", "--form", "taub-nut"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let (code, _, _) = run(&["verify", "--form", "no-such-form", "--param", "1"]);
    assert_eq!(code, 2);

    let (code, _, err) = run(&[
        "integrate", "--params", "1,0,0,0,-1,2", "--init", "1,1", "--t-end", "1", "--tol", "1",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("tolerance"), "stderr was {err:?}");
}
