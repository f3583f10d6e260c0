use std::process::{Command, Output};

fn cra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_fixture_sentence() {
    let o = cra(&[
        "eval",
        "--sig",
        "succ-cls1",
        "--formula",
        "fix:phi1",
        "--word",
        "fix:fig1-word",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
    let o = cra(&[
        "eval",
        "--sig",
        "succ-cls1",
        "--formula",
        "fix:ack-then-request",
        "--word",
        "(r,1)(a,1)",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn run_prints_table() {
    let o = cra(&["run", "--automaton", "fix:fig3", "--word", "fix:fig3-word"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out
        .lines()
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows[0], ["pos", "input", "trans", "state", "r1", "r2"]);
    let states: Vec<&str> = rows[1..5].iter().map(|r| r[3]).collect();
    assert_eq!(states, ["q1", "q1", "q2", "q2"]);
    let r1: Vec<&str> = rows[1..5].iter().map(|r| r[4]).collect();
    assert_eq!(r1, ["8", "5", "8", "5"]);
    let r2: Vec<&str> = rows[1..5].iter().map(|r| r[5]).collect();
    assert_eq!(r2, ["⊥", "8", "⊥", "⊥"]);
    assert!(out.ends_with("run check: accepted\n"));
}

#[test]
fn member_exit_codes() {
    let o = cra(&["member", "--automaton", "fix:fig3", "--word", "(r,8)(a,5)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "no accepting run\n");
    let o = cra(&[
        "member",
        "--automaton",
        "fix:fig3",
        "--word",
        "(r,8)(a,8)",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["member"], true);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["eval", "--formula", "fix:nope", "--word", "(r,1)"][..],
        &[
            "eval",
            "--sig",
            "succ-cls1",
            "--formula",
            "E x. x bogus x",
            "--word",
            "(r,1)",
        ],
        &["run", "--automaton", "/no/such/file.cra", "--word", "(r,1)"],
        &["graph", "--sig", "nonsense", "--word", "(r,1)"],
        &["frobnicate"],
    ] {
        let o = cra(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn compile_then_member_by_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("phi1.json");
    let t = table.to_str().unwrap();
    let o = cra(&[
        "compile",
        "--formula",
        "fix:phi1",
        "--max-len",
        "4",
        "--out",
        t,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("B = 4, t = 2"));
    let o = cra(&["member", "--table", t, "--word", "(a,2)(r,1)(a,1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("accepted\n"));
    let o = cra(&["member", "--table", t, "--word", "(a,1)(r,2)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "rejected\n");
    let o = cra(&[
        "member",
        "--table",
        t,
        "--word",
        "(r,1)(r,2)(r,3)(r,4)(r,5)",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("out of coverage"));
}

#[test]
fn dot_exports() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.dot");
    let o = cra(&[
        "graph",
        "--word",
        "fix:fig2-word",
        "--emit-dot",
        g.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&g).unwrap().starts_with("digraph"));
    let s = dir.path().join("spheres");
    let o = cra(&[
        "spheres",
        "--word",
        "fix:fig1-word",
        "--radius",
        "1",
        "--emit-dot",
        s.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("canonical run: accepted"));
    let n = std::fs::read_dir(&s).unwrap().count();
    assert_eq!(n, 8);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &[
            "spheres",
            "--word",
            "fix:fig2-word",
            "--radius",
            "1",
            "--json",
        ][..],
        &[
            "hanf-type",
            "--word",
            "fix:fig1-word",
            "--radius",
            "1",
            "--threshold",
            "2",
        ],
        &[
            "enumerate",
            "--sig",
            "succ-cls1",
            "--alphabet",
            "r",
            "a",
            "--max-len",
            "3",
            "--formula",
            "fix:phi2",
        ],
        &["validate", "--automaton", "fix:fresh-requests", "--json"],
    ] {
        let (a, b) = (cra(args), cra(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn enumerate_counts() {
    let o = cra(&[
        "enumerate",
        "--sig",
        "succ-cls1",
        "--alphabet",
        "r,a",
        "--max-len",
        "2",
        "--max-vals",
        "2",
    ]);
    // 1 empty word, 2 of length one, 4 label pairs times 2 data patterns.
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn examples_and_oracle() {
    let o = cra(&["examples", "list"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("fig1-word ")));
    let o = cra(&["examples", "show", "fig3"]);
    assert!(stdout(&o).contains("final[cls1]: q2"));
    let o = cra(&["oracle", "--only", "1", "2", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("3/3 criteria passed\n"));
}
