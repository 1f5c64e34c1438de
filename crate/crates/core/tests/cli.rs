use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_touch-alarm");

fn cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn golden(name: &str) -> String {
    fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn design_defaults() {
    let o = cli(&["design"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("quantity"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("trigger_timeout ") && l.contains("11.374s")));
}

#[test]
fn design_kv_matches_golden() {
    let o = cli(&["design", "--format", "kv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("design_default.kv"));
}

#[test]
fn design_with_circuit_override() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "c.txt", "# larger timing capacitor\nc2 = 100u\n");
    let o = cli(&["design", "--format", "kv", &path]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l == "trigger_timeout=24.2s"));
}

#[test]
fn design_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.kv");
    let o = cli(&["design", "--format", "kv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        golden("design_default.kv")
    );
}

#[test]
fn design_input_errors() {
    assert_eq!(code(&cli(&["design", "/nonexistent/circuit.txt"])), 3);
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&cli(&["design", &write(&dir, "a", "r99 = 1k\n")])), 3);
    assert_eq!(code(&cli(&["design", &write(&dir, "b", "c2 = 47uV\n")])), 3);
    assert_eq!(code(&cli(&["design", "--format", "xml"])), 2);
}

#[test]
fn design_compute_error() {
    let dir = TempDir::new().unwrap();
    let o = cli(&["design", &write(&dir, "c", "c2 = 0\n")]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trigger"));
}

#[test]
fn verify_matches_golden_and_exits_1() {
    let o = cli(&["verify"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), golden("verify_default.txt"));
}

#[test]
fn verify_loose_tolerance_keeps_printed_precision() {
    let o = cli(&["verify", "--tolerance", "0.5"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text
        .lines()
        .any(|l| l.starts_with("low_period ") && l.contains("ERRATUM")));
    assert!(text
        .lines()
        .any(|l| l.starts_with("high_duty ") && l.contains("ERRATUM")));
}

#[test]
fn verify_errors() {
    assert_eq!(code(&cli(&["verify", "--circuit", "/nonexistent"])), 3);
    assert_eq!(code(&cli(&["verify", "--tolerance", "-1"])), 2);
    assert_eq!(code(&cli(&["verify", "--tolerance", "abc"])), 2);
}

#[test]
fn snap_examples() {
    let cases: [(&[&str], &str); 5] = [
        (&["snap", "--series", "E12", "451.43"], "451.43 -> 470\n"),
        (
            &["snap", "--series", "E12", "--mode", "down", "451.43"],
            "451.43 -> 390\n",
        ),
        (&["snap", "--series", "E12", "470"], "470 -> 470\n"),
        (&["snap", "980"], "980 -> 1000\n"),
        (
            &["snap", "--series", "E6", "2405.6u"],
            "0.0024056 -> 0.0022\n",
        ),
    ];
    for (args, want) in cases {
        let o = cli(args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert_eq!(stdout(&o), want, "{args:?}");
    }
}

#[test]
fn snap_errors() {
    assert_eq!(code(&cli(&["snap", "foo"])), 2);
    assert_eq!(code(&cli(&["snap", "0"])), 2);
    assert_eq!(code(&cli(&["snap", "--series", "E7", "1"])), 2);
    assert_eq!(code(&cli(&["snap", "--mode", "sideways", "1"])), 2);
    assert_eq!(code(&cli(&["snap"])), 2);
}

#[test]
fn tolerance_examples() {
    let o = cli(&[
        "tolerance",
        "--tol",
        "0.10",
        "--runs",
        "10000",
        "--seed",
        "42",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("runs=10000 "));
    assert!(text.trim_end().ends_with("contains_measured=true"));
    let o = cli(&["tolerance", "--tol", "0.001", "--runs", "100"]);
    assert!(stdout(&o).trim_end().ends_with("contains_measured=false"));
    assert_eq!(
        stdout(&o),
        stdout(&cli(&["tolerance", "--tol", "0.001", "--runs", "100"]))
    );
}

#[test]
fn tolerance_errors() {
    assert_eq!(code(&cli(&["tolerance", "--runs", "0"])), 2);
    assert_eq!(code(&cli(&["tolerance", "--tol", "1.5"])), 2);
    assert_eq!(code(&cli(&["tolerance", "--tol", "0"])), 2);
    assert_eq!(code(&cli(&["tolerance", "--circuit", "/nonexistent"])), 3);
}

#[test]
fn simulate_summary_and_files() {
    let dir = TempDir::new().unwrap();
    let scen = write(&dir, "s.txt", "# one touch\n1 touch_start\n");
    let csv = dir.path().join("o.csv");
    let wav = dir.path().join("o.wav");
    let o = cli(&[
        "simulate",
        "--scenario",
        &scen,
        "--csv",
        csv.to_str().unwrap(),
        "--wav",
        wav.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "alarm_windows=1 sounding=11.374s\n");
    let wav_len = fs::metadata(&wav).unwrap().len();
    assert_eq!(wav_len, 44 + 2 * 31 * 16_000);
    let first_csv = fs::read(&csv).unwrap();
    let first_wav = fs::read(&wav).unwrap();
    let again = cli(&[
        "simulate",
        "--scenario",
        &scen,
        "--csv",
        csv.to_str().unwrap(),
        "--wav",
        wav.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&again), stdout(&o));
    assert_eq!(fs::read(&csv).unwrap(), first_csv);
    assert_eq!(fs::read(&wav).unwrap(), first_wav);
}

#[test]
fn simulate_held_touch_modes() {
    let dir = TempDir::new().unwrap();
    let scen = write(&dir, "s.txt", "1 touch_start\n21 touch_end\nduration 40\n");
    let csv = dir.path().join("o.csv");
    let csv = csv.to_str().unwrap();
    let level = cli(&["simulate", "--scenario", &scen, "--csv", csv]);
    assert_eq!(stdout(&level), "alarm_windows=1 sounding=20s\n");
    let once = cli(&["simulate", "--scenario", &scen, "--csv", csv, "--one-shot"]);
    assert_eq!(stdout(&once), "alarm_windows=1 sounding=11.374s\n");
}

#[test]
fn simulate_empty_scenario() {
    let dir = TempDir::new().unwrap();
    let scen = write(&dir, "s.txt", "duration 1\n");
    let wav = dir.path().join("o.wav");
    let o = cli(&[
        "simulate",
        "--scenario",
        &scen,
        "--wav",
        wav.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "alarm_windows=0 sounding=0s\n");
    assert_eq!(fs::metadata(&wav).unwrap().len(), 32_044);
}

#[test]
fn simulate_ideal_pair() {
    let dir = TempDir::new().unwrap();
    let scen = write(&dir, "s.txt", "0 touch_start\nduration 2\n");
    let csv = dir.path().join("o.csv");
    let o = cli(&[
        "simulate",
        "--scenario",
        &scen,
        "--csv",
        csv.to_str().unwrap(),
        "--ideal-pair",
        "600,900",
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.lines().skip(1).all(|l| {
        let f = l.split(',').nth(4).unwrap();
        f == "600" || f == "900" || f == "0"
    }));
}

#[test]
fn simulate_errors_leave_no_files() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.txt", "1 touch_start\nduration 2\n");
    let csv = dir.path().join("o.csv");
    let csv_s = csv.to_str().unwrap();

    assert_eq!(code(&cli(&["simulate", "--scenario", &good])), 2);
    let bad = write(&dir, "bad.txt", "5 mains_fail\n3 touch_start\n");
    assert_eq!(
        code(&cli(&["simulate", "--scenario", &bad, "--csv", csv_s])),
        3
    );
    let alt = write(&dir, "alt.txt", "1 touch_start\n2 touch_start\n");
    assert_eq!(
        code(&cli(&["simulate", "--scenario", &alt, "--csv", csv_s])),
        3
    );
    assert_eq!(
        code(&cli(&[
            "simulate",
            "--scenario",
            "/nonexistent",
            "--csv",
            csv_s
        ])),
        3
    );
    assert_eq!(
        code(&cli(&[
            "simulate",
            "--scenario",
            &good,
            "--csv",
            csv_s,
            "--sample-rate",
            "500"
        ])),
        2
    );
    let wav = dir.path().join("o.wav");
    assert_eq!(
        code(&cli(&[
            "simulate",
            "--scenario",
            &good,
            "--csv",
            csv_s,
            "--wav",
            wav.to_str().unwrap(),
            "--sample-rate",
            "4000"
        ])),
        2
    );
    let zero_cap = write(&dir, "c.txt", "c2 = 0\n");
    assert_eq!(
        code(&cli(&[
            "simulate",
            "--circuit",
            &zero_cap,
            "--scenario",
            &good,
            "--csv",
            csv_s
        ])),
        4
    );
    assert!(!csv.exists());
    assert!(!wav.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 4);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&cli(&[])), 2);
    assert_eq!(code(&cli(&["frobnicate"])), 2);
    assert_eq!(code(&cli(&["design", "--bogus"])), 2);
    assert_eq!(code(&cli(&["--help"])), 0);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let rc = touch_alarm::cli::run(["touch-alarm", "verify"], &mut out, &mut err);
    assert_eq!(rc, touch_alarm::cli::EXIT_ERRATA);
    assert_eq!(
        String::from_utf8(out).unwrap(),
        golden("verify_default.txt")
    );
    assert!(err.is_empty());
}
