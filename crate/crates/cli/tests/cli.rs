use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratdeploy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(o: &Output, key: &str) -> String {
    let prefix = format!("{key}: ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_owned))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{}", stdout(o)))
}

fn generate(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--output", path.to_str().unwrap()]);
    let o = run(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn figure1_totals() {
    let dir = TempDir::new().unwrap();
    let nr = generate(&dir, "f1.json", &["--family", "fig1"]);
    let o = run(&["solve", s(&nr)]);
    assert!(o.status.success());
    assert_eq!(field(&o, "total"), "23");
    assert_eq!(field(&o, "method"), "tree-no-return");

    let rt = generate(
        &dir,
        "f1r.json",
        &["--family", "fig1", "--variant", "return"],
    );
    assert_eq!(field(&run(&["solve", s(&rt)]), "total"), "25");
    assert_eq!(field(&run(&["oracle", s(&nr)]), "optimum"), "23");
    assert_eq!(field(&run(&["oracle", s(&rt)]), "optimum"), "25");
}

#[test]
fn figure4_total_and_decomposition() {
    let dir = TempDir::new().unwrap();
    let f4 = generate(&dir, "f4.json", &["--family", "fig4"]);
    let o = run(&["solve", s(&f4), "--dump-decomposition"]);
    assert_eq!(field(&o, "total"), "46");
    let out = stdout(&o);
    assert!(out.contains("\n  T(b7,b6)^{12,"), "{out}");
    assert!(out.contains("T(b5)^{7,9} @ v2"), "{out}");
}

#[test]
fn exact_cover_gadget_through_the_oracle() {
    let dir = TempDir::new().unwrap();
    let yes = generate(&dir, "xc3.json", &["--family", "xc3"]);
    let no = generate(&dir, "xc3n.json", &["--family", "xc3", "--no-cover"]);
    assert_eq!(field(&run(&["oracle", s(&yes)]), "optimum"), "19");
    assert_eq!(field(&run(&["oracle", s(&no)]), "optimum"), "20");
    let same = generate(
        &dir,
        "xc3s.json",
        &[
            "--family",
            "xc3",
            "--sets",
            "1,2,3;1,2,4;3,5,7;5,8,9;6,8,10;9,11,12",
        ],
    );
    assert_eq!(
        std::fs::read_to_string(&same).unwrap(),
        std::fs::read_to_string(&yes).unwrap()
    );
}

#[test]
fn solve_then_validate_closes_the_loop() {
    let dir = TempDir::new().unwrap();
    let mut cases = Vec::new();
    for seed in 0..6u64 {
        let seed = seed.to_string();
        for variant in ["no-return", "return"] {
            cases.push(
                vec![
                    "--family",
                    "random-tree",
                    "--n",
                    "30",
                    "--seed",
                    &seed,
                    "--variant",
                    variant,
                ]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>(),
            );
            cases.push(
                vec![
                    "--family",
                    "random-graph",
                    "--n",
                    "12",
                    "--seed",
                    &seed,
                    "--variant",
                    variant,
                ]
                .into_iter()
                .map(String::from)
                .collect(),
            );
        }
    }
    cases.push(vec![
        "--family".into(),
        "zigzag".into(),
        "--m".into(),
        "7".into(),
    ]);
    cases.push(vec![
        "--family".into(),
        "uniform-gap".into(),
        "--values".into(),
        "5,9,2".into(),
        "--eps".into(),
        "2".into(),
    ]);
    for (i, args) in cases.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let inst = generate(&dir, &format!("i{i}.json"), &args);
        let walk = dir.path().join(format!("s{i}.json"));
        let solved = run(&["solve", s(&inst), "--schedule-out", s(&walk)]);
        assert!(solved.status.success(), "{args:?}");
        let checked = run(&["validate", s(&inst), s(&walk)]);
        assert!(checked.status.success(), "{args:?}\n{}", stdout(&checked));
        assert_eq!(
            field(&checked, "total"),
            field(&solved, "total"),
            "{args:?}"
        );
        assert_eq!(field(&checked, "accepted"), "true");
    }
}

#[test]
fn approximation_prints_its_certificate() {
    let dir = TempDir::new().unwrap();
    let g = generate(
        &dir,
        "g.json",
        &[
            "--family",
            "random-graph",
            "--n",
            "9",
            "--seed",
            "4",
            "--edge-prob",
            "0.5",
        ],
    );
    let o = run(&["solve", s(&g), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["method"], "mst-approx");
    let (total, lower) = (
        v["total"].as_u64().unwrap(),
        v["lower_bound"].as_u64().unwrap(),
    );
    assert!(lower <= total && total <= 2 * lower);
    assert!(v["ratio"].as_f64().unwrap() <= 2.0);
    let opt: u64 = field(&run(&["oracle", s(&g)]), "optimum").parse().unwrap();
    assert!(lower <= opt && opt <= total && total <= 2 * opt);
}

#[test]
fn validate_rejects_bad_walks() {
    let dir = TempDir::new().unwrap();
    let nr = generate(&dir, "f1.json", &["--family", "fig1"]);
    let rt = generate(
        &dir,
        "f1r.json",
        &["--family", "fig1", "--variant", "return"],
    );
    let walk = dir.path().join("w.json");
    assert!(run(&["solve", s(&nr), "--schedule-out", s(&walk)])
        .status
        .success());

    let o = run(&["validate", s(&rt), s(&walk)]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(field(&o, "ends_at_start"), "false");
    assert_eq!(field(&o, "accepted_no_return"), "true");

    let short = dir.path().join("short.json");
    std::fs::write(
        &short,
        r#"{"start":"v1","steps":[{"edge":"e1","to":"v2"}]}"#,
    )
    .unwrap();
    let o = run(&["validate", s(&nr), s(&short)]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(field(&o, "missing"), "v3 v4 v5");

    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        r#"{"start":"v1","steps":[{"edge":"e2","to":"v3"}]}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["validate", s(&nr), s(&broken)]).status.code(),
        Some(2)
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        run(&["solve", "/nonexistent/instance.json"]).status.code(),
        Some(1)
    );

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(run(&["solve", s(&junk)]).status.code(), Some(2));
    std::fs::write(
        &junk,
        r#"{"variant":"return","start":"a","vertices":[{"id":"a","weight":-1}],"edges":[]}"#,
    )
    .unwrap();
    assert_eq!(run(&["solve", s(&junk)]).status.code(), Some(2));

    let g = generate(
        &dir,
        "g.json",
        &["--family", "random-graph", "--n", "8", "--edge-prob", "0.6"],
    );
    assert_eq!(
        run(&["solve", s(&g), "--method", "tree"]).status.code(),
        Some(3)
    );

    let big = generate(&dir, "t25.json", &["--family", "random-tree", "--n", "25"]);
    assert_eq!(run(&["oracle", s(&big)]).status.code(), Some(4));
    assert_eq!(
        run(&["oracle", s(&big), "--cap", "30"]).status.code(),
        Some(4)
    );
    assert_eq!(run(&["oracle", s(&g), "--cap", "5"]).status.code(), Some(4));

    assert_eq!(
        run(&["generate", "--family", "star", "--n", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn generation_is_seeded() {
    let a = run(&[
        "generate",
        "--family",
        "random-graph",
        "--n",
        "15",
        "--seed",
        "7",
    ]);
    let b = run(&[
        "generate",
        "--family",
        "random-graph",
        "--n",
        "15",
        "--seed",
        "7",
    ]);
    let c = run(&[
        "generate",
        "--family",
        "random-graph",
        "--n",
        "15",
        "--seed",
        "8",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let o = run(&[
        "bench",
        "star",
        "--sizes",
        "10,100,1000",
        "--reps",
        "2",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,n,seed,total,solve_time_ns,schedule_len")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let n: u64 = r[1].parse().unwrap();
        assert_eq!(r[3].parse::<u64>().unwrap(), n + 1);
    }

    let zig = run(&["bench", "zigzag", "--sizes", "4,8,16"]);
    let lens: Vec<u64> = stdout(&zig)
        .lines()
        .skip(1)
        .step_by(3)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert!(lens[2] > 3 * lens[1] && lens[1] > 3 * lens[0], "{lens:?}");

    let lite = run(&[
        "bench",
        "random-tree",
        "--sizes",
        "500",
        "--reps",
        "1",
        "--totals-only",
    ]);
    let row = stdout(&lite).lines().nth(1).unwrap().to_owned();
    assert!(
        row.starts_with("random-tree,500,0,") && row.ends_with(','),
        "{row}"
    );
    assert_eq!(
        run(&["bench", "star", "--sizes", "0"]).status.code(),
        Some(2)
    );
}
