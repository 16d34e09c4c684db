use std::process::{Command, Output};

fn nts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nts")).args(args).output().expect("run nts")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Column `name` of the single data row of a CSV result.
fn field(csv: &str, name: &str) -> String {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    let row = r.records().next().unwrap().unwrap();
    row[i].to_string()
}

#[test]
fn help_lists_every_flag() {
    let o = nts(&["simulate", "--help"]);
    let text = stdout(&o);
    for flag in [
        "--tree", "--algo", "--q", "--model", "--trials", "--seed", "--epsilon", "--lambda", "--kappa1", "--kappa2",
        "--out",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
}

#[test]
fn noiseless_simulation_walks_the_depth() {
    let o = nts(&["simulate", "--tree", "complete:b=3,d=4", "--algo", "a_walk", "--trials", "20"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(field(&csv, "moves_mean"), "4");
    assert_eq!(field(&csv, "moves_stderr"), "0");
    assert_eq!(field(&csv, "queries_mean"), "5");
}

#[test]
fn bad_input_is_rejected() {
    let o = nts(&["simulate", "--tree", "path:n=3", "--algo", "a_bogus"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algorithm"));
    let o = nts(&["simulate", "--tree", "path:n=3", "--algo", "a_walk", "--trials", "0"]);
    assert!(!o.status.success());
    let o = nts(&["simulate", "--tree", "path:n=3", "--algo", "a_walk", "--lambda", "0.5"]);
    assert!(!o.status.success());
    let o = nts(&["simulate", "--algo", "a_walk"]);
    assert!(!o.status.success());
}

#[test]
fn oracle_on_a_three_node_path() {
    // From 0 the walk must go to 1; from 1 it reaches τ with probability
    // 1/2 + 1/4, so E1 = 1 + E0/4 and E0 = 1 + E1, giving E0 = 8/3.
    let o = nts(&["oracle", "--tree", "path:n=3,td=2", "--algo", "pf:lambda=0.5", "--metric", "moves"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "8/3");
    let o = nts(&["oracle", "--tree", "path:n=3,td=2", "--algo", "a_walk", "--q", "0.3"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn oracle_refuses_large_instances() {
    let o = nts(&["oracle", "--tree", "complete:b=2,d=5", "--algo", "a_walk", "--q", "0.1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("enumeration cap"));
}

#[test]
fn generated_tree_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let o = nts(&["generate", "--tree", "random:n=40,seed=3", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let spec = format!("file:{}", path.display());
    let a = nts(&["simulate", "--tree", &spec, "--algo", "a_loop", "--q", "0.2", "--trials", "50"]);
    let b = nts(&["simulate", "--tree", "random:n=40,seed=3", "--algo", "a_loop", "--q", "0.2", "--trials", "50"]);
    assert!(a.status.success());
    assert_eq!(field(&stdout(&a), "queries_mean"), field(&stdout(&b), "queries_mean"));
}

#[test]
fn worker_count_does_not_change_results() {
    let args = [
        "simulate", "--tree", "ary:delta=4,d=5", "--algo", "pf", "--q", "0.1", "--trials", "500", "--seed", "9",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_nts"))
            .args(args)
            .env("NTS_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn sweep_and_config_runs() {
    let o = nts(&[
        "sweep", "--tree", "ary:delta=3,d=3", "--algo", "a_walk", "--q", "0.1", "--axis", "tree.d", "--values",
        "2;3;4", "--trials", "30",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.ini");
    std::fs::write(
        &path,
        "trials = 40\n\n[walk]\ntree = ary:delta=4,d=4\nalgo = a_walk\nq = 0.1\n\n\
         [sep]\ntree = regular:delta=4,d=3\nalgo = a_sep\nq = 0.05\nsweep = seed\nvalues = 1; 2\n",
    )
    .unwrap();
    let o = nts(&["run", path.to_str().unwrap(), "--out", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("\"name\":\"walk\""));
    assert!(lines[2].contains("\"seed\":2"));
}

#[test]
fn verify_single_criteria() {
    let o = nts(&["verify", "--only", "AC2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("AC2 PASS"));
    let o = nts(&["verify", "--only", "AC42"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown criterion"));
}
