//! End-to-end runs of the semio binary: exit codes, emitted bytes,
//! diagnostics on standard error.

use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_semio");

const FIXTURE: &str = "\
algebra W chain 5
sign s
oset A : s { support a b ; sim a b 0.5 }
comp f : s -> s { entry a a = 1 ; entry a b = 0.5 ; entry b a = 0.5 ; entry b b = 1 }
comp q : s s -> { entry a a = 1 ; entry a b = 0.5 ; entry b a = 0.5 ; entry b b = 1 }
comp g : s s -> { entry a a = 1 ; entry a b = 0.75 ; entry b a = 0.75 ; entry b b = 1 }
comp h : s s -> { entry a a = 1 ; entry a b = 0.25 ; entry b a = 0.25 ; entry b b = 1 }
comp dom : s s -> { entry a a = 1 ; entry a b = 1 }
diagram D {
  node x : A
  node y : A
  edge e : f ( x -> y )
  sources x ;
}
diagram Q {
  node x : A
  node y : A
  edge e : q ( x y -> )
  sources x y ;
}
total D
pool P { diagrams q ; concepts g h ; domains dom }
";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn check_passes_on_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, err) = run(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 0, "stdout:\n{}\nstderr:\n{}", out, err);
    assert!(out.contains("ok total:D"));
    assert!(out.lines().last().unwrap().starts_with("passed"));
}

#[test]
fn parse_errors_carry_spans_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.sem", "algebra W boolean\noset A : s { support a ; }\n");
    let (code, _, err) = run(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains(":2:10"), "stderr was: {}", err);
    assert!(err.contains("never declared"));

    let g = write(
        dir.path(),
        "bad2.sem",
        "algebra W godel\nsign s\noset A : s { support a ; }\ncomp f : s -> s { entry a zz = 1 }\n",
    );
    let (code, _, err) = run(&["check", g.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("zz"));
}

#[test]
fn limit_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let args = ["limit", f.to_str().unwrap(), "--diagram", "D"];
    let (c1, out1, _) = run(&args);
    let (c2, out2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
    assert!(out1.starts_with("x,value\n"));
    assert_eq!(out1.lines().count(), 3);

    let out_file = dir.path().join("lim.csv");
    let (c3, _, _) = run(&[
        "limit",
        f.to_str().unwrap(),
        "--diagram",
        "D",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert_eq!(c3, 0);
    assert_eq!(std::fs::read_to_string(&out_file).unwrap(), out1);
}

#[test]
fn cap_exceeded_exits_three_with_count() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, _, err) =
        run(&["limit", f.to_str().unwrap(), "--diagram", "D", "--cap", "1"]);
    assert_eq!(code, 3);
    assert!(err.contains("cap"), "stderr was: {}", err);

    // the environment variable is the fallback, the flag wins
    let (code, _, _) = run_env(
        &["limit", f.to_str().unwrap(), "--diagram", "D"],
        &[("SEMIO_CAP", "1")],
    );
    assert_eq!(code, 3);
    let (code, _, _) = run_env(
        &["limit", f.to_str().unwrap(), "--diagram", "D", "--cap", "1000000"],
        &[("SEMIO_CAP", "1")],
    );
    assert_eq!(code, 0);
}

#[test]
fn commutes_prints_degree_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, _) =
        run(&["commutes", f.to_str().unwrap(), "--diagram", "D", "--sources", "x"]);
    assert_eq!(code, 0, "stdout: {}", out);
    assert!(out.contains("degree 1.00000000e0"));
    assert!(out.contains("commutative true"));
}

#[test]
fn gamma_reports_quality_then_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, _) =
        run(&["gamma", f.to_str().unwrap(), "--left", "q", "--right", "g"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "quality 5.00000000e-1");
    assert!(lines.next().unwrap().ends_with("value"));
}

#[test]
fn consistency_verdicts_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let base = ["consistent", f.to_str().unwrap(), "--diagram", "q", "--against", "g"];
    let at = |lam: &str, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.push("--lambda");
        args.push(lam);
        args.extend_from_slice(extra);
        run(&args)
    };
    let (code, out, _) = at("0.25", &[]);
    assert_eq!(code, 0);
    assert!(out.contains("holds true"));
    assert!(out.contains("fiber 4"));
    let (code, out, _) = at("0.75", &[]);
    assert_eq!(code, 1);
    assert!(out.contains("holds false"));
    let (code, _, _) = at("0.75", &["--exists"]);
    assert_eq!(code, 0);
    let (code, _, _) = at("0.5", &["--domain", "dom"]);
    assert_eq!(code, 0);
}

#[test]
fn answers_lists_concepts_with_their_domains() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, _) = run(&[
        "answers",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--diagram",
        "q",
        "--lambda",
        "0.25",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, vec!["g [dom]", "h [dom]"]);
    let (code, out, _) = run(&[
        "answers",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--diagram",
        "q",
        "--lambda",
        "0.6",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("no answers"));
}

#[test]
fn entailment_and_formulas_run_over_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, _) = run(&[
        "infer",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--premises",
        "q",
        "--conclusion",
        "q",
        "--lambda",
        "0.25",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "entails true\n");

    let (code, out, _) = run(&[
        "rl",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--formula",
        "q",
        "--concept",
        "g",
        "--lambda",
        "0.25",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "satisfied true\n");
    let (code, out, _) = run(&[
        "rl",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--formula",
        "q",
        "--concept",
        "g",
        "--lambda",
        "0.75",
    ]);
    assert_eq!(code, 1);
    assert_eq!(out, "satisfied false\n");
    let (code, _, err) = run(&[
        "rl",
        f.to_str().unwrap(),
        "--pool",
        "P",
        "--formula",
        "[I] q * q",
        "--concept",
        "g",
        "--lambda",
        "0.25",
    ]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn bayes_and_classify_emit_tables() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let (code, out, _) = run(&["bayes", f.to_str().unwrap(), "--comp", "f"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("s,s2,value\n"));
    assert_eq!(out.lines().count(), 5);

    let (code, out, _) = run(&[
        "classify",
        f.to_str().unwrap(),
        "--diagram",
        "D",
        "--vertex",
        "y",
        "--obs",
        "x=a",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("y,value\n"));
    assert_eq!(out.lines().count(), 3);
}

const PART_A: &str = "\
algebra GA godel
sign sa
oset U : sa { support u1 u2 ; sim u1 u2 0.5 }
comp fa : sa -> sa { entry u1 u1 = 1 ; entry u2 u2 = 1 ; entry u1 u2 = 0.5 ; entry u2 u1 = 0.5 }
";

const PART_B: &str = "\
algebra PB product
sign sb
oset V : sb { support v1 v2 ; }
comp fb : sb -> sb { entry v1 v1 = 0.8 ; entry v2 v2 = 1 }
";

#[test]
fn integrate_merges_into_a_product_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sem", PART_A);
    let b = write(dir.path(), "b.sem", PART_B);
    let merged = dir.path().join("merged.sem");
    let (code, _, err) = run(&[
        "integrate",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {}", err);
    let text = std::fs::read_to_string(&merged).unwrap();
    assert!(text.contains("algebra a_b product_of godel product"), "got:\n{}", text);
    assert!(text.contains("sign sa"));
    assert!(text.contains("sign sb"));
    assert!(text.contains("comp fa :"));
    assert!(text.contains("comp fb :"));

    let (code, out, err) = run(&["check", merged.to_str().unwrap()]);
    assert_eq!(code, 0, "stdout: {} stderr: {}", out, err);
}

#[test]
fn integrate_rejects_a_sign_clash_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sem", PART_A);
    let clash = write(
        dir.path(),
        "c.sem",
        "algebra C boolean\nsign sa\noset W : sa { support w ; }\n",
    );
    let (code, _, err) = run(&["integrate", a.to_str().unwrap(), clash.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("'sa'"), "stderr was: {}", err);
    assert!(err.contains("disagree"));
}

#[test]
fn dataset_round_trip_restores_the_full_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "base.sem", FIXTURE);
    let csv = dir.path().join("q.csv");
    let (code, _, _) = run(&[
        "limit",
        f.to_str().unwrap(),
        "--diagram",
        "Q",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let enc = dir.path().join("enc.sem");
    let (code, _, err) = run(&[
        "encode-dataset",
        f.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--name",
        "dset",
        "--signs",
        "s,s",
        "--out",
        enc.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {}", err);
    let text = std::fs::read_to_string(&enc).unwrap();
    assert!(text.contains("sign Omega"));
    assert!(text.contains("comp dset : s s -> Omega"));
    assert!(text.contains("diagram dset_cfg"));

    let (code, out, err) = run(&["check", enc.to_str().unwrap()]);
    assert_eq!(code, 0, "stdout: {} stderr: {}", out, err);

    // the registered graph holds full truth exactly at the CSV's top rows
    let ws = semio::parse::parse_spec("enc.sem", &text).unwrap();
    let alg = ws.algebra().unwrap().clone();
    let table = &ws.comp("dset").unwrap().table;
    let omega_port = table.ports().last().unwrap();
    let top_elem = omega_port
        .oset
        .elems
        .iter()
        .position(|e| {
            semio::workspace::parse_value_str(e)
                .map(|v| alg.is_top(&v))
                .unwrap_or(false)
        })
        .unwrap();
    let mut tops = Vec::new();
    for idx in semio_core::relation::tuples(&table.shape()) {
        if idx[2] == top_elem && alg.is_top(table.entry(&idx)) {
            tops.push((idx[0], idx[1]));
        }
    }
    // support order of A is (a, b); the kept rows were (a,a) and (b,b)
    assert_eq!(tops, vec![(0, 0), (1, 1)]);
}

#[test]
fn epsilon_flag_loosens_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    // limit of E differs from c by 1e-7: strict check fails, loose passes
    let text = "\
algebra W product
sign s
oset A : s { support a ; }
comp p : s -> { entry a = 0.9999999 }
comp c : s -> { entry a = 1 }
diagram E {
  node x : A
  edge e : p ( x -> )
}
limitdef c <- E
";
    let f = write(dir.path(), "eps.sem", text);
    let (code, out, _) = run(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 1, "stdout: {}", out);
    let (code, out, _) =
        run(&["check", f.to_str().unwrap(), "--epsilon", "0.001"]);
    assert_eq!(code, 0, "stdout: {}", out);
    let (code, out, _) = run_env(
        &["check", f.to_str().unwrap()],
        &[("SEMIO_EPSILON", "0.001")],
    );
    assert_eq!(code, 0, "stdout: {}", out);
}
