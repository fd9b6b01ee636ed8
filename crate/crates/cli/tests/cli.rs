use std::process::{Command, Output};

use markov_core::arith::RealEnclosure;
use markov_core::collisions::{collision_census, CensusReport};
use markov_core::farey::{CoprimePair, FareyFraction};
use markov_core::fock::{corner_slopes, psi, CornerSlopes};
use markov_core::ordering::{scan_line, LatticeLine, ScanMode, ScanResult, Slope};
use markov_core::verify::SuiteReport;
use serde_json::Value;

fn markov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = markov(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("one JSON document")
}

/// The document without its `command` tag, as a library type.
fn payload<T: serde::de::DeserializeOwned>(mut v: Value) -> T {
    v.as_object_mut().expect("object").remove("command");
    serde_json::from_value(v).expect("payload re-parses")
}

#[test]
fn markov_number_and_distance() {
    let v = json(&["markov", "2/5"]);
    assert_eq!(v["command"], "markov");
    assert_eq!(v["markov_number"], "194");
    assert_eq!(json(&["markov", "--pair", "2", "0"])["distance"], "7/3");
    assert_eq!(json(&["markov", "--pair", "2", "2"])["distance"], "34/3");
}

#[test]
fn sigma_to_four_digits() {
    let v = json(&["sigma", "--digits", "4"]);
    assert_eq!(v["sigma_minus"], "-1.2417");
    assert_eq!(v["sigma_plus"], "-1.1432");
    let e: RealEnclosure = serde_json::from_value(v["sigma_minus_enclosure"].clone()).unwrap();
    assert!(e.lo().to_f64() < -1.24166 && e.hi().to_f64() > -1.24167);
}

#[test]
fn scan_line_example_round_trips() {
    let v = json(&[
        "scan-line",
        "--slope",
        "-1",
        "--through",
        "4,3",
        "--bound",
        "10",
    ]);
    assert_eq!(v["classification"], "Increasing");
    let got: ScanResult = payload(v);
    let line = LatticeLine::new(Slope::new(1, 1).unwrap(), (4, 3));
    assert_eq!(got, scan_line(line, 10, ScanMode::AllSector).unwrap());
    let distances: Vec<String> = got.distances.iter().map(|d| d.to_string()).collect();
    assert_eq!(distances, ["169", "194", "233", "281"]);
}

#[test]
fn enclosures_round_trip_bit_for_bit() {
    let v = json(&["psi", "1/3"]);
    let e: RealEnclosure = serde_json::from_value(v["value"].clone()).unwrap();
    assert_eq!(e, psi(FareyFraction::new(1, 3).unwrap(), 128).unwrap());

    let v = json(&["--prec", "96", "slopes", "5", "2"]);
    let got: CornerSlopes = payload(v);
    assert_eq!(
        got,
        corner_slopes(CoprimePair::new(5, 2).unwrap(), 96).unwrap()
    );
}

#[test]
fn census_round_trips() {
    let got: CensusReport = payload(json(&["census", "--bound", "25"]));
    let mut expected = collision_census(25).unwrap();
    expected.label_index = None;
    assert_eq!(got, expected);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["frobnicate"],
        vec!["markov", "2/4"],
        vec!["markov", "x/3"],
        vec!["markov"],
        vec!["psi", "2/3"],
        vec!["--prec", "0", "psi", "1/3"],
        vec!["find-antimodal", "--slope", "-1", "--kmax", "10"],
        vec!["verify", "--suite", "nope"],
    ] {
        let out = markov(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_markov"))
            .args(["verify", "--suite", "thm14", "--bound", "12"])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report: SuiteReport = payload(serde_json::from_slice(&a.stdout).unwrap());
    assert!(report.passed);
}

#[test]
fn antimodal_witness_through_the_cli() {
    let v = json(&[
        "find-antimodal",
        "--slope",
        "-7/6",
        "--kmax",
        "40",
        "--limit",
        "1",
    ]);
    assert_eq!(v["k_reached"], 17);
    assert!(v["witnesses"][0]["classification"]["StrictlyAntimodal"].is_u64());
}

#[test]
fn cache_snapshot_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.tsv");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_markov"))
            .args(["markov", "3/8"])
            .env("MARKOV_CACHE", &path)
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(first.lines().any(|l| l == "3/8\t7561"), "{first}");
    assert!(run().status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);

    std::fs::write(&path, "garbage\n").unwrap();
    assert_eq!(run().status.code(), Some(1));
}

#[test]
fn ball_svg_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.svg");
    let v = json(&["ball-svg", "--bound", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(v["directions"], 13);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}
