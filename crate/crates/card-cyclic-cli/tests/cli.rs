//! End-to-end checks of the binary: output shapes, exit codes, determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_card-cyclic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn exact_n3_table_with_footer() {
    let text = stdout(&["exact", "--n", "3"]);
    assert!(text.starts_with("permutation,numerator,denominator,float\n"));
    assert!(text.contains("1 2 3,5,27,"));
    assert!(text.contains("2 1 3,4,27,"));
    assert!(text.contains("TV,1,18,"));
    assert!(text.contains("SEPARATION,1,9,"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn exact_n2_two_halves() {
    let text = stdout(&["exact", "--n", "2"]);
    assert!(text.contains("1 2,2,4,0.5"));
    assert!(text.contains("2 1,2,4,0.5"));
}

#[test]
fn exact_size_guard_exits_3_without_output() {
    let out = run(&["exact", "--n", "9"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= 8"));
}

#[test]
fn marginal_spot_values() {
    let text = stdout(&["marginal", "--n", "3", "--which", "first", "--all"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,numerator,denominator,float,mode");
    assert!(lines[1].starts_with("1,10,27,"));
    assert!(lines[2].starts_with("2,8,27,"));
    assert!(lines[3].starts_with("3,9,27,"));
}

#[test]
fn marginal_validation_exit_2() {
    let out = run(&["marginal", "--n", "3", "--which", "first", "--j", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["marginal", "--n", "3", "--which", "first"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn limits_constants_json() {
    let text = stdout(&["limits", "--kind", "constants"]);
    let json: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let b_star = rows[0]["value"].as_f64().unwrap();
    assert!((b_star - 0.722).abs() < 5e-4);
}

#[test]
fn limits_flat_density_at_b1() {
    let text = stdout(&["limits", "--kind", "f", "--b", "1", "--grid", "0:1:0.1"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f"));
    for line in lines {
        assert!(line.ends_with(",1"), "{line}");
    }
}

#[test]
fn limits_card_at_position_plateau() {
    // h_x(b) = e^{b-1} above the jump inverse; at x = 0.3 that holds from
    // roughly b = 0.51 upward
    let text = stdout(&["limits", "--kind", "h", "--x", "0.3", "--grid", "0.7:1:0.1"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,h"));
    for line in lines {
        let mut cols = line.split(',');
        let b: f64 = cols.next().unwrap().parse().unwrap();
        let h: f64 = cols.next().unwrap().parse().unwrap();
        assert!((h - (b - 1.0).exp()).abs() < 1e-9, "{line}");
    }
}

#[test]
fn marginal_json_shape() {
    let text = stdout(&[
        "marginal",
        "--n",
        "4",
        "--which",
        "last",
        "--all",
        "--rescale",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(json["config"]["n"], 4);
    assert_eq!(json["config"]["which"], "last");
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // P(σ_n = n) = 1/n, so the rescaled column ends at 1
    let rescaled = rows[3]["rescaled"].as_f64().unwrap();
    assert!((rescaled - 1.0).abs() < 1e-12);
    assert_eq!(rows[3]["mode"], "exact");
}

#[test]
fn limits_grid_validation() {
    assert_eq!(
        run(&["limits", "--kind", "E", "--grid", "0:1:0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["limits", "--kind", "G", "--grid", "0:1:0.5"])
            .status
            .code(),
        Some(2),
        "G without --b must be rejected"
    );
    assert_eq!(
        run(&["limits", "--kind", "nope", "--grid", "0:1:0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_runs_are_reproducible() {
    let args = [
        "simulate", "position", "--n", "50", "--card", "20", "--reps", "4000", "--seed", "9",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let threads1 = bin()
        .args(["--threads", "1"])
        .args(args)
        .output()
        .expect("binary runs");
    assert_eq!(a, String::from_utf8(threads1.stdout).unwrap());
}

#[test]
fn simulate_walk_exact_small_n() {
    let text = stdout(&["simulate", "walk", "--n", "3", "--m", "5"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,tv_numerator,tv_denominator,tv_float");
    assert!(lines[1].starts_with("1,1,18,"));
    assert_eq!(lines.len(), 6);
}

#[test]
fn simulate_event_reports_gap() {
    let text = stdout(&[
        "simulate", "event", "--n", "500", "--M", "1", "--L", "3", "--reps", "500", "--seed", "4",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,M,L,reps,seed,hits,fraction,stderr,uniform,gap");
    assert_eq!(lines.len(), 2);
}

#[test]
fn output_file_and_json_format() {
    let dir = std::env::temp_dir().join("card_cyclic_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.json");
    let args = [
        "exact",
        "--n",
        "2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ];
    let out = run(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["config"]["n"], 2);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["config"]["tv"]["numerator"], "0");
    std::fs::remove_file(&path).ok();
}

#[test]
fn verify_subset_passes() {
    let text = stdout(&["verify", "--only", "2,4,7"]);
    assert_eq!(text.matches("PASS").count(), 3);
    assert!(text.contains("3 passed, 0 failed out of 3"));
    let out = run(&["verify", "--only", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_deck_sizes_are_rejected() {
    for args in [
        vec!["exact", "--n", "0"],
        vec!["marginal", "--n", "0", "--which", "first", "--all"],
        vec!["simulate", "first", "--n", "0", "--reps", "10"],
        vec!["simulate", "last", "--n", "0", "--reps", "10"],
        vec![
            "simulate", "position", "--n", "0", "--card", "1", "--reps", "10",
        ],
        vec!["simulate", "walk", "--n", "0", "--m", "2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
