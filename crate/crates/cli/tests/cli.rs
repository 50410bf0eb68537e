use std::process::{Command, Output};

fn ffcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffcomm"))
        .args(args)
        .env_remove("FFC_SEED")
        .output()
        .expect("spawn ffcomm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn dims_rows() {
    let o = ffcomm(&["dims", "--ensemble", "mg", "--k", "2", "--L", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ensemble,k,L,dim\nmg,2,3,14\n");
    let o = ffcomm(&["dims", "--ensemble", "mg", "--k", "1", "--L", "5"]);
    assert!(stdout(&o).contains("\nmg,1,5,2\n"));
}

#[test]
fn dims_verify_ed() {
    let o = ffcomm(&[
        "dims",
        "--ensemble",
        "nc",
        "--k",
        "2",
        "--L",
        "2",
        "--verify-ed",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\nnc,2,2,20,20,MATCH\n"));
}

#[test]
fn exact_k2_page_curve() {
    let o = ffcomm(&[
        "page-curve",
        "--method",
        "exact-k2",
        "--L",
        "4",
        "--ell",
        "0,2,4",
    ]);
    assert!(o.status.success());
    let r = rows(&o);
    let vals: Vec<&str> = r.iter().map(|r| r[4].as_str()).collect();
    assert_eq!(vals, ["1", "0.485714285714286", "1"]);
    assert_eq!(
        stdout(&o).lines().next().unwrap(),
        "method,k,L,ell,value,stderr,samples,seed"
    );
}

#[test]
fn oracle_full_cut_is_one() {
    let o = ffcomm(&[
        "page-curve",
        "--method",
        "oracle",
        "--k",
        "2",
        "--L",
        "2",
        "--ell",
        "2",
        "--samples",
        "100",
        "--seed",
        "7",
    ]);
    assert!(o.status.success());
    let r = &rows(&o)[0];
    assert_eq!(
        (r[4].as_str(), r[5].as_str(), r[7].as_str()),
        ("1", "0", "7")
    );
}

#[test]
fn saddle_half_cut() {
    let o = ffcomm(&["page-curve", "--method", "saddle", "--k", "2", "--r", "0.5"]);
    assert!(o.status.success());
    let r = &rows(&o)[0];
    let v: f64 = r[4].parse().unwrap();
    assert!((v - (4.0 - 2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
    assert_eq!(r[5], "0");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["page-curve", "--method", "exact-k2", "--k", "3", "--L", "4"][..],
        &["page-curve", "--method", "coherent-mc", "--L", "3"],
        &["page-curve", "--method", "bogus", "--L", "3"],
        &["dims", "--ensemble", "xx", "--k", "1", "--L", "1"],
        &["dims", "--k", "1"],
        &[
            "page-curve",
            "--method",
            "exact-k2",
            "--L",
            "4",
            "--ell",
            "5",
        ],
    ] {
        let o = ffcomm(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn resource_cap_exits_3() {
    let o = ffcomm(&[
        "page-curve",
        "--method",
        "oracle",
        "--L",
        "12",
        "--ell",
        "3",
        "--samples",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_suites() {
    let o = ffcomm(&[
        "check",
        "--suite",
        "casimir",
        "--ensemble",
        "nc",
        "--k",
        "2",
        "--L",
        "2",
    ]);
    assert!(o.status.success());
    assert!(rows(&o).iter().all(|r| r[4] == "PASS"));
    let o = ffcomm(&[
        "check",
        "--suite",
        "lemma1",
        "--ensemble",
        "mg",
        "--k",
        "2",
        "--L",
        "3",
    ]);
    assert!(o.status.success());
    let o = ffcomm(&["check"]);
    assert!(o.status.success());
    let suites: std::collections::BTreeSet<String> =
        rows(&o).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(suites.len(), 7);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "page-curve",
        "--method",
        "coherent-mc",
        "--L",
        "4",
        "--ell",
        "1,2",
        "--samples",
        "600",
        "--seed",
        "11",
    ];
    let mut first = base.to_vec();
    first.extend(["--threads", "1", "--out", a.to_str().unwrap()]);
    let mut second = base.to_vec();
    second.extend(["--threads", "4", "--out", b.to_str().unwrap()]);
    assert!(ffcomm(&first).status.success());
    assert!(ffcomm(&second).status.success());
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn env_seed_is_the_default() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ffcomm"));
        c.args([
            "page-curve",
            "--method",
            "oracle",
            "--L",
            "4",
            "--ell",
            "2",
            "--samples",
            "50",
        ]);
        match env {
            Some(s) => c.env("FFC_SEED", s),
            None => c.env_remove("FFC_SEED"),
        };
        stdout(&c.output().unwrap())
    };
    let with_env = run(Some("19"));
    assert!(with_env.trim_end().ends_with(",50,19"));
    let explicit = stdout(&ffcomm(&[
        "page-curve",
        "--method",
        "oracle",
        "--L",
        "4",
        "--ell",
        "2",
        "--samples",
        "50",
        "--seed",
        "19",
    ]));
    assert_eq!(with_env, explicit);
    assert!(run(None).trim_end().ends_with(",50,0"));
}

#[test]
fn json_has_schema_version() {
    let o = ffcomm(&["rate", "--r", "0.25,0.5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "rate");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# manifest\nensemble = mg\nk = 2\nL = 3\n").unwrap();
    let o = ffcomm(&["dims", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&o), "ensemble,k,L,dim\nmg,2,3,14\n");
    let o = ffcomm(&["dims", "--L", "5", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&o), "ensemble,k,L,dim\nmg,2,5,22\n");
}

#[test]
fn kernel_export_round_trips() {
    let o = ffcomm(&["kernel", "--ensemble", "mg", "--k", "2", "--L", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let head: Vec<usize> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    let (dim, count) = (head[0], head[1]);
    assert_eq!(dim, 16);
    assert_eq!(count, 6);
    let vecs: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(vecs.len(), count);
    for (i, a) in vecs.iter().enumerate() {
        assert_eq!(a.len(), 2 * dim);
        for b in &vecs[i..] {
            // <a|b> with interleaved (re, im)
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..dim {
                let (ar, ai, br, bi) = (a[2 * j], a[2 * j + 1], b[2 * j], b[2 * j + 1]);
                re += ar * br + ai * bi;
                im += ar * bi - ai * br;
            }
            let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn projector_report() {
    let o = ffcomm(&[
        "projector",
        "--k",
        "2",
        "--L",
        "2",
        "--samples",
        "500",
        "--seed",
        "1",
    ]);
    assert!(o.status.success());
    let r = &rows(&o)[0];
    assert_eq!(r[4], "5");
    let dist: f64 = r[8].parse().unwrap();
    assert!(dist.is_finite() && dist > 0.0);
}
