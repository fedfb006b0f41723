use std::path::Path;
use std::process::{Command, Output};

fn sonoscape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonoscape")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&sonoscape(&["--help"])), 0);
    assert_eq!(code(&sonoscape(&["--bogus"])), 1);
    assert_eq!(code(&sonoscape(&["simulate"])), 1);
    assert_eq!(code(&sonoscape(&["robot", "--profile", "clumsy"])), 1);
    let out = sonoscape(&["analyze", "--input", "/nonexistent/export.json", "--out", "/tmp/x"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn help_lists_every_subcommand() {
    let help = String::from_utf8(sonoscape(&["--help"]).stdout).unwrap();
    for sub in ["simulate", "render", "serve", "robot", "analyze"] {
        assert!(help.contains(sub), "{sub} missing from help");
    }
    let robot = String::from_utf8(sonoscape(&["robot", "--help"]).stdout).unwrap();
    for flag in ["--sessions", "--profile", "--delay", "--pmiss", "--pfa", "--server"] {
        assert!(robot.contains(flag), "{flag} missing from robot help");
    }
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&sonoscape(&["simulate", "--levels", "42", "--out", s(out)])), 0);
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    // Ten levels, each with its frame log, plus the scenario.
    assert_eq!(names.len(), 21);
    for name in names {
        assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn render_all_ecologies_of_a_level_set() {
    let dir = tempfile::tempdir().unwrap();
    let levels = dir.path().join("levels");
    let wavs = dir.path().join("wav");
    assert_eq!(code(&sonoscape(&["simulate", "--levels", "3", "--out", s(&levels)])), 0);
    let scenario = levels.join("levels.json");
    let args = ["render", "--ecology", "ALL", "--ecology", "MIXED", "--level", s(&scenario), "--out", s(&wavs)];
    let out = sonoscape(&[&args[..], &["--sample-rate", "8000"]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let count = std::fs::read_dir(&wavs).unwrap().count();
    assert_eq!(count, 30);
    let one = std::fs::read(wavs.join("L01_NATURE.wav")).unwrap();
    assert_eq!(&one[..4], b"RIFF");

    // A single output file only takes one level and one ecology.
    let single = dir.path().join("one.wav");
    let out = sonoscape(&["render", "--ecology", "SYNTH", "--level", s(&scenario), "--out", s(&single)]);
    assert_eq!(code(&out), 2);
    let out = sonoscape(&["render", "--ecology", "JUNGLE", "--level", s(&levels.join("L01.json")), "--out", s(&single)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn robot_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("export.json");
    let report = dir.path().join("report");
    let out = sonoscape(&["robot", "--sessions", "1", "--no-audio", "--export", s(&export)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = sonoscape(&["analyze", "--input", s(&export), "--out", s(&report)]);
    assert_eq!(code(&out), 0);
    for table in ["report.json", "sensitivity.csv", "times.csv", "primary.csv", "survey.csv", "anova.csv"] {
        assert!(report.join(table).is_file(), "{table}");
    }
}
