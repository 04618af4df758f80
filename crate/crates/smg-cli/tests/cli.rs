//! End-to-end tests of the `smg` binary: exit codes, file round trips and
//! report output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use smg::constructions::octahedron;
use smg::io::{write_graph, GraphMetadata};

fn smg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

#[test]
fn construct_verify_audit_round_trip() {
    let dir = workdir();
    let out = smg(&["construct", "icosahedron", "-o", "i.json"], dir.path());
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("certificate: PASS"));
    assert!(dir.path().join("i.json").exists());

    let out = smg(&["verify", "i.json", "--regular", "5"], dir.path());
    assert_eq!(exit_code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("overall: PASS"));

    let out = smg(&["audit", "i.json"], dir.path());
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("audit: PASS"));
    assert!(text.contains("connected=true"));
    assert!(text.contains("degree-5=true"));
    assert!(text.contains("nonzero finals: none"));
}

#[test]
fn verify_json_output_is_parseable() {
    let dir = workdir();
    smg(&["construct", "icosahedron", "-o", "i.json"], dir.path());
    let out = smg(&["verify", "i.json", "--json"], dir.path());
    assert_eq!(exit_code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["overall"], serde_json::Value::Bool(true));

    let out = smg(&["audit", "i.json", "--json"], dir.path());
    assert_eq!(exit_code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    assert_eq!(doc["all_finals_zero"], serde_json::Value::Bool(true));
}

fn octa_file(dir: &Path) -> PathBuf {
    let path = dir.join("octa.json");
    write_graph(&path, &octahedron(), &GraphMetadata::named("octahedron")).unwrap();
    path
}

#[test]
fn octahedron_fails_degree_five_with_six_witnesses() {
    let dir = workdir();
    octa_file(dir.path());
    let out = smg(&["verify", "octa.json", "--min-degree", "5"], dir.path());
    assert_eq!(exit_code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("overall: FAIL"));
    assert_eq!(text.matches("has degree 4").count(), 6, "{text}");

    let out = smg(&["verify", "octa.json", "--min-degree", "4"], dir.path());
    assert_eq!(exit_code(&out), 0);

    // The octahedron still audits clean: zero totals and finals.
    let out = smg(&["audit", "octa.json"], dir.path());
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("degree-5=false"));
}

#[test]
fn export_formats() {
    let dir = workdir();
    smg(&["construct", "icosahedron", "-o", "i.json"], dir.path());
    for (format, name, needle) in [
        ("off", "i.off", "OFF"),
        ("csv", "i.csv", "i,j,length_rad"),
        ("svg", "i.svg", "<svg"),
    ] {
        let out = smg(
            &["export", "i.json", "--format", format, "-o", name],
            dir.path(),
        );
        assert_eq!(exit_code(&out), 0, "{format}: {}", stderr(&out));
        let content = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(content.contains(needle), "{format} output lacks {needle}");
    }
    let out = smg(
        &[
            "export", "i.json", "--format", "svg", "-o", "side.svg", "--view", "1,0,0",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = workdir();
    let out = smg(&["construct", "megahedron", "-o", "x.json"], dir.path());
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown construction"));
    assert!(!dir.path().join("x.json").exists());

    let out = smg(&["verify", "missing.json"], dir.path());
    assert_eq!(exit_code(&out), 2);

    let out = smg(&["frobnicate"], dir.path());
    assert_eq!(exit_code(&out), 2);

    std::fs::write(dir.path().join("bad.json"), "{\"format\": \"smg-9\"}").unwrap();
    let out = smg(&["verify", "bad.json"], dir.path());
    assert_eq!(exit_code(&out), 2);

    let out = smg(
        &["export", "bad2.json", "--format", "gif", "-o", "x.gif"],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn solve_orbits_finds_the_snub_dodecahedron() {
    let dir = workdir();
    let out = smg(
        &[
            "solve-orbits",
            "--group",
            "I",
            "--orbits",
            "1",
            "--seed",
            "1",
            "--starts",
            "8",
            "-o",
            "sd.json",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("60 vertices, 150 edges"));
    let out = smg(&["verify", "sd.json", "--regular", "5"], dir.path());
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn written_files_round_trip_byte_identically() {
    let dir = workdir();
    smg(&["construct", "snub-cube", "-o", "a.json"], dir.path());
    let first = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    smg(&["construct", "snub-cube", "-o", "b.json"], dir.path());
    let second = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn multi_start_search_is_deterministic_across_processes() {
    let dir = workdir();
    let args = [
        "construct",
        "robinson-48",
        "--seed",
        "5",
        "--starts",
        "8",
        "-o",
    ];
    let mut files = Vec::new();
    for name in ["r1.json", "r2.json"] {
        let mut full: Vec<&str> = args.to_vec();
        full.push(name);
        let out = smg(&full, dir.path());
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
        files.push(std::fs::read_to_string(dir.path().join(name)).unwrap());
    }
    assert_eq!(files[0], files[1]);
}
