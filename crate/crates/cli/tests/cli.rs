use std::path::PathBuf;
use std::process::{Command, Output};

use timed_parity::model::Player;
use timed_parity::parity::pgsolver::read_pgsolver;
use timed_parity::parity::solve_zielonka;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn tpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpg"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of `key` in the machine block.
fn machine(o: &Output, key: &str) -> String {
    let text = stdout(o);
    let block = text.split("\n[machine]\n").nth(1).expect("machine block");
    block
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{block}"))
        .to_string()
}

#[test]
fn fixture_memberships_set_the_exit_code() {
    let deadlines = fixture("deadlines.game");
    let o = tpg(&["solve", &deadlines, "--exact"]);
    assert_eq!(code(&o), 0);
    assert_eq!(machine(&o, "member"), "true");
    let o = tpg(&["solve", &deadlines, "--limit-robust"]);
    assert_eq!(code(&o), 0);
    let o = tpg(&[
        "solve",
        &deadlines,
        "--bounded-robust",
        "--jitter",
        "1/2",
        "--response",
        "0",
    ]);
    assert_eq!(code(&o), 10);
    assert_eq!(machine(&o, "member"), "false");
    assert_eq!(machine(&o, "scale_factor"), "2");
}

#[test]
fn limit_robust_loses_from_the_late_start() {
    let text = std::fs::read_to_string(fixture("deadlines.game"))
        .unwrap()
        .replace("initial: x=0, y=0", "initial: x=1, y=1");
    let path = scratch("late_start.game");
    std::fs::write(&path, text).unwrap();
    let path = path.to_str().unwrap();
    assert_eq!(code(&tpg(&["solve", path, "--exact"])), 0);
    let o = tpg(&["solve", path, "--limit-robust"]);
    assert_eq!(code(&o), 10);
    assert!(stdout(&o).contains("start: l0 x=1 y=1\n"));
}

#[test]
fn usage_errors() {
    let deadlines = fixture("deadlines.game");
    assert_eq!(code(&tpg(&[])), 11);
    assert_eq!(code(&tpg(&["solve", &deadlines])), 11);
    assert_eq!(
        code(&tpg(&["solve", &deadlines, "--exact", "--limit-robust"])),
        11
    );
    assert_eq!(
        code(&tpg(&[
            "solve",
            &deadlines,
            "--bounded-robust",
            "--jitter",
            "1/10"
        ])),
        11
    );
    let o = tpg(&[
        "solve",
        &deadlines,
        "--bounded-robust",
        "--jitter",
        "one",
        "--response",
        "0",
    ]);
    assert_eq!(code(&o), 11);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a rational"));
    assert_eq!(
        code(&tpg(&[
            "compare",
            &deadlines,
            "--jitter",
            "1/0",
            "--response",
            "0"
        ])),
        11
    );
    assert_eq!(code(&tpg(&["--help"])), 0);
}

#[test]
fn input_errors() {
    assert_eq!(
        code(&tpg(&["solve", &fixture("missing.game"), "--exact"])),
        12
    );
    let cases = [
        ("empty.game", ""),
        ("two_initial.game", "clocks x;\nlocation a { invariant: \"true\"; priority: 0; initial: x=0; }\nlocation b { invariant: \"true\"; priority: 0; initial: x=0; }\n"),
        ("unknown_clock.game", "clocks x;\nlocation a { invariant: \"y <= 1\"; priority: 0; initial: x=0; }\n"),
        ("unknown_target.game", "clocks x;\nlocation a { invariant: \"true\"; priority: 0; initial: x=0; }\nedge e { player: 1; from: a; to: b; guard: \"true\"; reset: []; }\n"),
    ];
    for (name, text) in cases {
        let path = scratch(name);
        std::fs::write(&path, text).unwrap();
        let o = tpg(&["solve", path.to_str().unwrap(), "--exact"]);
        assert_eq!(code(&o), 12, "{name}");
        assert!(o.stdout.is_empty(), "{name}");
        assert!(
            String::from_utf8_lossy(&o.stderr).starts_with("error: "),
            "{name}"
        );
    }
    let deadlines = fixture("deadlines.game");
    let o = tpg(&[
        "solve",
        &deadlines,
        "--bounded-robust",
        "--jitter=-1/2",
        "--response",
        "0",
    ]);
    assert_eq!(code(&o), 12);
}

#[test]
fn export_round_trips_through_the_pgsolver_reader() {
    let out = scratch("deadlines.pg");
    let o = tpg(&["export", &fixture("deadlines.game"), out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let (g, labels) = read_pgsolver(&text).unwrap();
    assert_eq!(g.len().to_string(), machine(&o, "states"));
    assert_eq!(g.edge_count().to_string(), machine(&o, "edges"));
    assert_eq!(
        text.lines().next().unwrap(),
        format!("parity {};", machine(&o, "max_id"))
    );
    // state 0 is the start region, and player 1 wins there as in the solve
    assert!(
        labels[0].starts_with("l0 | h: x=0 y=0 z=0 |"),
        "{}",
        labels[0]
    );
    assert_eq!(solve_zielonka(&g).unwrap().winner[0], Player::One);
}

#[test]
fn export_to_an_unwritable_path_fails() {
    let o = tpg(&[
        "export",
        &fixture("deadlines.game"),
        "/nonexistent/dir/out.pg",
    ]);
    assert_eq!(code(&o), 16);
}

#[test]
fn compare_on_the_open_fixture() {
    let o = tpg(&[
        "compare",
        &fixture("open.game"),
        "--jitter",
        "1/2",
        "--response",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(machine(&o, "chain_holds"), "true");
    assert_eq!(machine(&o, "exact_equals_limit_robust"), "true");
    assert_eq!(machine(&o, "witness_limit_strict_count"), "0");
    for prefix in ["exact.", "limit_robust.", "bounded."] {
        assert_eq!(machine(&o, &format!("{prefix}solvers_agree")), "true");
        assert_eq!(machine(&o, &format!("{prefix}certificate_valid")), "true");
    }
}

#[test]
fn timing_goes_to_stderr_only() {
    let deadlines = fixture("deadlines.game");
    let plain = tpg(&["solve", &deadlines, "--exact"]);
    let timed = tpg(&["solve", &deadlines, "--exact", "--timing"]);
    assert_eq!(plain.stdout, timed.stdout);
    assert!(plain.stderr.is_empty());
    assert!(String::from_utf8_lossy(&timed.stderr).starts_with("wall_time_ms="));
}
