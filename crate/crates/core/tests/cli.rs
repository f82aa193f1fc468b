use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

const GOLDEN: [&str; 6] = [
    "fig1_uncorrected",
    "uncorrected_superposed_env",
    "corrected_n3",
    "observer_chain",
    "different_basis",
    "appendix_records",
];

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn unimeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unimeas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn scenario(name: &str) -> String {
    scenarios()
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn expected(file: &str) -> String {
    std::fs::read_to_string(scenarios().join("expected").join(file)).unwrap()
}

fn temp_file(contents: &str) -> PathBuf {
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let path = std::env::temp_dir().join(format!(
        "unimeas-cli-{}-{}.json",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn text_reports_match_goldens() {
    for name in GOLDEN {
        let out = unimeas(&["run", &scenario(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert_eq!(stdout(&out), expected(&format!("{name}.txt")), "{name}");
    }
}

#[test]
fn json_report_matches_golden_and_mirrors_text() {
    let out = unimeas(&["run", "--format", "json", &scenario("corrected_n3")]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout(&out);
    assert_eq!(json, expected("corrected_n3.json"));

    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let titles: Vec<String> = value["sections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["title"].as_str().unwrap().to_string())
        .collect();
    let text = expected("corrected_n3.txt");
    let headers: Vec<String> = text
        .lines()
        .filter_map(|l| l.strip_prefix("== ").and_then(|l| l.strip_suffix(" ==")))
        .map(String::from)
        .collect();
    assert_eq!(titles, headers);
}

#[test]
fn oracle_run_matches_golden() {
    let out = unimeas(&["oracle", &scenario("different_basis")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), expected("different_basis.oracle.txt"));
}

#[test]
fn oracle_cross_check_on_every_scenario() {
    for name in GOLDEN {
        let out = unimeas(&["oracle", &scenario(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", stderr(&out));
        assert!(stdout(&out).contains("status: agree"));
    }
}

#[test]
fn runs_are_byte_identical() {
    for name in GOLDEN {
        for format in ["text", "json"] {
            let a = unimeas(&["run", "--format", format, &scenario(name)]);
            let b = unimeas(&["run", "--format", format, &scenario(name)]);
            assert_eq!(a.stdout, b.stdout, "{name} {format}");
        }
    }
}

#[test]
fn branch_tables_are_normalized() {
    for name in GOLDEN {
        let text = expected(&format!("{name}.txt"));
        let mut sums = Vec::new();
        let mut current: Option<f64> = None;
        let mut prob_col = None;
        for line in text.lines().chain(std::iter::once("")) {
            if line.starts_with("outcome") {
                let cols: Vec<&str> = line.split_whitespace().collect();
                prob_col = cols.iter().position(|c| *c == "probability");
                current = Some(0.0);
                continue;
            }
            match (current.as_mut(), prob_col) {
                (Some(sum), Some(col)) if !line.is_empty() => {
                    let cells: Vec<&str> = line.split_whitespace().collect();
                    *sum += cells[col].parse::<f64>().unwrap();
                }
                (Some(_), _) if line.is_empty() => sums.push(current.take().unwrap()),
                _ => {}
            }
        }
        assert!(!sums.is_empty());
        for s in sums {
            assert!((s - 1.0).abs() < 1e-9, "{name}: {s}");
        }
    }
}

#[test]
fn validate_reports_shape() {
    let out = unimeas(&["validate", &scenario("corrected_n3")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 5 qubits, 4 steps\n");
}

#[test]
fn out_flag_writes_file() {
    let target = temp_file("");
    let out = unimeas(&[
        "run",
        "--out",
        target.to_str().unwrap(),
        &scenario("observer_chain"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&target).unwrap(),
        expected("observer_chain.txt")
    );
    std::fs::remove_file(target).ok();
}

#[test]
fn scenario_errors_exit_with_one() {
    let cases = [
        ("{\"subsystems\": [", "E100"),
        (r#"{"subsystems": [], "extra": 1}"#, "E101"),
        (
            r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[0,0]]}],
                "script": [{"op": "swap", "a": "s", "b": "t"}]}"#,
            "E102",
        ),
        (
            r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[0,0]]},
                               {"label": "s", "amplitudes": [[1,0],[0,0]]}]}"#,
            "E103",
        ),
        (
            r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0]]}]}"#,
            "E104",
        ),
        (
            r#"{"subsystems": [{"label": "", "amplitudes": [[1,0],[0,0]]}]}"#,
            "E105",
        ),
        (
            r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[0,0]]},
                               {"label": "o", "amplitudes": [[1,0],[0,0]]},
                               {"label": "e", "amplitudes": [[1,0],[0,0]]}],
                "script": [{"op": "corrected_measure", "signal": "s", "observer": "o",
                            "environment": ["e"]}]}"#,
            "E106",
        ),
        (
            r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[0,0]]}],
                "options": {"format": "yaml"}}"#,
            "E107",
        ),
    ];
    for (text, code) in cases {
        let path = temp_file(text);
        for cmd in ["run", "validate", "oracle"] {
            let out = unimeas(&[cmd, path.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(1), "{code} via {cmd}");
            assert!(out.stdout.is_empty());
            assert!(stderr(&out).contains(code), "{code}: {}", stderr(&out));
        }
        std::fs::remove_file(path).ok();
    }
}

#[test]
fn bad_flags_are_scenario_errors() {
    let out = unimeas(&["run", "--tol", "-1", &scenario("corrected_n3")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("E107"));
    let out = unimeas(&["run", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_with_two() {
    let out = unimeas(&["run", &scenario("two_qubit_environment")]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("E200") && err.contains("step 4"), "{err}");

    // Observer not ready for an ideal measurement.
    let path = temp_file(
        r#"{"subsystems": [{"label": "s", "amplitudes": [[1,0],[1,0]]},
                           {"label": "o", "amplitudes": [[0,0],[1,0]]}],
            "script": [{"op": "ideal_measure", "signal": "s", "observer": "o"}]}"#,
    );
    let out = unimeas(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn oracle_refuses_large_registers() {
    let subsystems: Vec<String> = (0..13)
        .map(|i| format!(r#"{{"label": "q{i}", "amplitudes": [[1,0],[0,0]]}}"#))
        .collect();
    let path = temp_file(&format!(r#"{{"subsystems": [{}]}}"#, subsystems.join(",")));
    let out = unimeas(&["oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("E202"));
    let out = unimeas(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_file(path).ok();
}

#[test]
fn relabel_flag_controls_anticorrelated_clusters() {
    let path = temp_file(
        r#"{"subsystems": [{"label": "s", "amplitudes": [[0.6,0],[0.8,0]]},
                           {"label": "o", "amplitudes": [[1,0],[0,0]]},
                           {"label": "e", "amplitudes": [[0,0],[1,0]]}],
            "script": [{"op": "uncorrected_measure", "signal": "s", "observer": "o",
                        "environment": "e"},
                       {"op": "ledger_record", "tag": "after"}]}"#,
    );
    let on = unimeas(&["run", path.to_str().unwrap()]);
    assert_eq!(on.status.code(), Some(0));
    let text = stdout(&on);
    assert!(text.contains("total: 1"), "{text}");
    assert!(text.contains("s o      0.6   0.8     01     1"), "{text}");

    let off = unimeas(&["run", "--relabel", "off", path.to_str().unwrap()]);
    assert_eq!(off.status.code(), Some(2));
    assert!(stderr(&off).contains("residual"));
    std::fs::remove_file(path).ok();
}
