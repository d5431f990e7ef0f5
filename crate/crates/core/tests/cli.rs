mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfr_core::syntax::parse_program;
use common::EXAMPLE;

fn cfr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfr"))
        .args(args)
        .output()
        .expect("cfr binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn refine_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let output = dir.path().join("loop_cfr.chc");
    let out = cfr(&[
        "refine",
        s(&input),
        "--props",
        "auto",
        "--entry",
        "while0/3",
        "-o",
        s(&output),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&output).unwrap();
    assert!(text.starts_with("% solve__1: while0 []\n"));
    let refined = parse_program(&text).unwrap();
    assert_eq!(refined.predicates().len(), 5);
}

#[test]
fn refine_strengthen_and_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let on = stdout(&cfr(&["refine", s(&input), "--entry", "while0/3"]));
    let off = stdout(&cfr(&[
        "refine",
        s(&input),
        "--entry",
        "while0/3",
        "--strengthen",
        "off",
    ]));
    assert_ne!(on, off);
    // Without strengthening the if0 versions carry only their guards.
    assert!(
        off.contains("solve__2(X,Y,M) :- Y<M, solve__3(X,Y+1,M).")
            || off.contains("solve__2(X,Y,M) :- M>Y, solve__3(X,Y+1,M)."),
        "{off}"
    );
    let renamed = stdout(&cfr(&["refine", s(&input), "--entry", "while0/3", "--prefix", "loop_"]));
    assert!(renamed.contains("loop_5(") && !renamed.contains("solve__"));
}

#[test]
fn refine_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.chc");
    let out = cfr(&["refine", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.chc"));

    let bad = write(dir.path(), "bad.chc", "p(X) :- X>0.\np(X) :- X*X>0.\n");
    let out = cfr(&["refine", s(&bad), "--entry", "p/1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.chc:2:"), "{}", stderr(&out));

    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let out = cfr(&["refine", s(&input)]);
    assert_eq!(out.status.code(), Some(1));
    let out = cfr(&["refine", s(&input), "--entry", "while0/2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cfr(&["refine", s(&input), "--entry", "nope/3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cfr(&["refine", s(&input), "--entry", "while0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cfr(&["refine", s(&input), "--entry", "while0/3", "--strengthen", "maybe"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_prints_trace_and_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let out = cfr(&[
        "run",
        s(&input),
        "while0(5,3,10)",
        "--props",
        "auto",
        "--max-steps",
        "10000",
        "--trace",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "while0(5,3,10) [A1>0]");
    assert_eq!(lines[1], "if0(5,3,10) [A1>0, A2<A3]");
    assert_eq!(lines[24], "while0(0,10,10) [A1=<0, A2>=A3]");
    assert_eq!(&lines[25..], ["success", "calls: 25"]);

    let out = cfr(&["run", s(&input), "while0(5,3,10)", "--max-steps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "budget exhausted\ncalls: 10\n");

    let out = cfr(&["run", s(&input), "while0(5,3)"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cfr(&["run", s(&input), "while0(X,3,10)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.chc", "p(X) :- X>0.\n");
    let out = cfr(&["run", s(&input), "p(0)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "failure\ncalls: 1\n");
}

#[test]
fn props_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let props = dir.path().join("loop.props");
    let out = cfr(&["props", s(&input), "-o", s(&props)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&props).unwrap();
    assert_eq!(
        text,
        "if0(A1,A2,A3): A1>0; A2<A3; A2>=A3.\nwhile0(A1,A2,A3): A1>0; A1=<0; A2>=A3.\n"
    );

    let auto = stdout(&cfr(&["refine", s(&input), "--entry", "while0/3"]));
    let from_file = stdout(&cfr(&[
        "refine",
        s(&input),
        "--entry",
        "while0/3",
        "--props",
        s(&props),
    ]));
    assert_eq!(auto, from_file);

    let bad = write(dir.path(), "bad.props", "while0(A,B): A>0.\n");
    let out = cfr(&["props", s(&input), "--props", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.props:1:"), "{}", stderr(&out));
}

#[test]
fn user_properties_change_the_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let props = write(dir.path(), "x.props", "% only the sign of X\nwhile0(X,Y,M): X>0.\n");
    let out = cfr(&["refine", s(&input), "--entry", "while0/3", "--props", s(&props)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let refined = parse_program(&stdout(&out)).unwrap();
    // if0 tracks nothing, so while0 is re-entered at [] and the refinement
    // is a renaming with the entry version and one if0 version.
    assert_eq!(refined.predicates().len(), 2);
    assert_eq!(refined.clauses().len(), 4);
}

#[test]
fn check_equiv_agrees_and_detects_disagreement() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    let refined = dir.path().join("refined.chc");
    cfr(&["refine", s(&input), "--entry", "while0/3", "-o", s(&refined)]);
    let args = |r: &Path| {
        vec![
            "check-equiv".to_string(),
            s(&input).to_string(),
            s(r).to_string(),
            "--entry-version".into(),
            "solve__1".into(),
            "--entry".into(),
            "while0/3".into(),
            "--trials".into(),
            "50".into(),
        ]
    };
    let out = Command::new(env!("CARGO_BIN_EXE_cfr"))
        .args(args(&refined))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("trials: 50\nagreements: 50\ndisagreements: 0\nbudget exhausted: 0\n"));

    // Break the exit clause of the entry version.
    let text = std::fs::read_to_string(&refined).unwrap();
    assert!(text.contains("solve__1(X,Y,M) :- X=<0."));
    let broken = write(
        dir.path(),
        "broken.chc",
        &text.replace("solve__1(X,Y,M) :- X=<0.", "solve__1(X,Y,M) :- X>100."),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_cfr"))
        .args(args(&broken))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("disagreement: while0("), "{}", stdout(&out));

    let mut bad_version = args(&refined);
    bad_version[4] = "solve__9".into();
    let out = Command::new(env!("CARGO_BIN_EXE_cfr"))
        .args(bad_version)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "loop.chc", EXAMPLE);
    for args in [
        vec!["refine", s(&input), "--entry", "while0/3"],
        vec!["run", s(&input), "while0(3,-2,4)", "--trace"],
        vec!["props", s(&input)],
    ] {
        assert_eq!(cfr(&args).stdout, cfr(&args).stdout);
    }
}
