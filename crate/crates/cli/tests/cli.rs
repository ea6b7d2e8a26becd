use std::path::PathBuf;
use std::process::{Command, Output};

use pometh_core::{Pfa, Podtmc};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pometh"));
    cmd.args(args).current_dir(models()).env_remove("POMETH_MAX_PATHS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> (String, i32) {
    let out = run_env(args, &[]);
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn stderr(args: &[&str]) -> String {
    String::from_utf8(run_env(args, &[]).stderr).unwrap()
}

#[test]
fn check_example_holds() {
    let out = run(&["check", "--model", "fig.pm", "--semantics", "clk", "--formula", "Pr[i](q) = 1", "--horizon", "0"]);
    assert_eq!(out, ("HOLDS\n".into(), 0));
}

#[test]
fn failing_check_names_a_path_and_exits_one() {
    let out = run(&["check", "--model", "fig.pm", "--semantics", "spr", "--formula", "K[i] F !q"]);
    assert_eq!(out, ("FAILS pt=s\n".into(), 1));
    let out = run(&["check", "--model", "fig.pm", "--semantics", "spr", "--formula", "X X q", "--format", "json-lines"]);
    assert_eq!(out, ("{\"path\":[\"s\",\"s\",\"u\"],\"verdict\":\"FAILS\"}\n".into(), 1));
}

#[test]
fn mixed_atom_needs_a_bound() {
    let args = ["check", "--model", "hilbert.pm", "--formula", "exists t . Pr(p3@t) = 1/12"];
    assert_eq!(run(&args).1, 2);
    let with_bound: Vec<&str> = args.iter().copied().chain(["--bound", "4"]).collect();
    assert_eq!(run(&with_bound), ("WITNESS t=1\n".into(), 0));
}

#[test]
fn unbounded_without_qualitative_reading_is_refused() {
    let args = ["check", "--model", "fig.pm", "--semantics", "spr", "--formula", "Pr[i](F !q & X q) > 1/2"];
    let (out, code) = run(&args);
    assert_eq!((out.as_str(), code), ("", 2));
    assert!(stderr(&args).contains("horizon"));
}

#[test]
fn horizon_cut_confirms_or_reports_no_witness() {
    let base = ["check", "--model", "fig.pm", "--semantics", "spr", "--formula"];
    let confirm: Vec<&str> = base.iter().copied().chain(["E X (Pr[i](q) < 1 & F !q)", "--horizon", "3"]).collect();
    assert_eq!(run(&confirm), ("HOLDS\n".into(), 0));
    let unconfirmed: Vec<&str> = base.iter().copied().chain(["E X (Pr[i](q) = 1 & F !q)", "--horizon", "3"]).collect();
    assert_eq!(run(&unconfirmed), ("NOWITNESS bound=3\n".into(), 1));
    // cutting inside a probability comparison is unsound either way
    let inside: Vec<&str> = base.iter().copied().chain(["Pr[i](F !q & q) > 1/2", "--horizon", "3"]).collect();
    assert_eq!(run(&inside).1, 2);
}

#[test]
fn beliefs_example() {
    let (out, code) = run(&["beliefs", "--model", "hilbert.pm", "--agent", "i", "--semantics", "clk", "--time", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "CELL obs=⊥ measure=1 s1=13/48 s2=5/24 s3=1/12 s4=7/16\n");
}

#[test]
fn beliefs_for_one_history() {
    let (out, code) = run(&["beliefs", "--model", "fig.pm", "--agent", "i", "--semantics", "spr", "--history", "⊥,⊥"]);
    assert_eq!(code, 0);
    assert_eq!(out, "CELL obs=⊥,⊥ measure=1 s=1/2 u=1/2\n");
    let (_, code) = run(&["beliefs", "--model", "fig.pm", "--agent", "i", "--semantics", "spr", "--history", "x"]);
    assert_eq!(code, 2);
}

#[test]
fn eval_term_is_exact() {
    let out = run(&[
        "eval-term", "--model", "fig.pm", "--semantics", "spr", "--term", "2*Pr[i](q)^2 - Pr[i](X q)", "--path", "s,s,s",
    ]);
    // belief at time 2 is (1/4, 3/4): 2/16 - 1/8
    assert_eq!(out, ("VALUE 0\n".into(), 0));
}

#[test]
fn reductions_and_exit_codes() {
    assert_eq!(run(&["reduce-dioph", "--poly", "n1 - 2", "--bound", "8"]), ("WITNESS t1=2\n".into(), 0));
    assert_eq!(run(&["reduce-dioph", "--poly", "2*n1 - 3", "--bound", "6"]), ("NOWITNESS bound=6\n".into(), 1));
    assert_eq!(run(&["reduce-pfa", "--pfa", "tiny.pfa", "--horizon", "2"]), ("HOLDS\n".into(), 0));
    // u_n = n - 4
    assert_eq!(run(&["skolem", "--coeffs", "2,-1", "--init", "-4,-3", "--bound", "10"]), ("WITNESS t=4\n".into(), 0));
    assert_eq!(run(&["qualitative", "--model", "fig.pm", "--query", "forall-positive", "--prop", "q"]), ("TRUE\n".into(), 0));
    assert_eq!(run(&["qualitative", "--model", "fig.pm", "--query", "exists-zero", "--prop", "q"]), ("FALSE\n".into(), 1));
}

#[test]
fn emitted_models_parse_back() {
    let (out, code) = run(&["reduce-pfa", "--pfa", "tiny.pfa", "--emit"]);
    assert_eq!(code, 0);
    let m = Podtmc::parse(&out).unwrap();
    assert_eq!(Podtmc::parse(&m.to_text()).unwrap(), m);
    assert!(out.lines().last().unwrap().starts_with("# query: E F"));
    let pfa = Pfa::parse(&std::fs::read_to_string(models().join("tiny.pfa")).unwrap()).unwrap();
    assert_eq!(m.num_states(), pfa.states().len() * pfa.alphabet().len());

    for args in [
        &["reduce-dioph", "--poly", "p(a,b) = a*b - 2", "--emit"][..],
        &["skolem", "--coeffs", "1,1", "--init", "0,1", "--emit"][..],
    ] {
        let (out, code) = run(args);
        assert_eq!(code, 0);
        let m = Podtmc::parse(&out).unwrap();
        assert_eq!(m.to_text(), out.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
    }
}

#[test]
fn input_errors_exit_two() {
    let cases: [&[&str]; 5] = [
        &["check", "--model", "missing.pm", "--semantics", "spr", "--formula", "q"],
        &["check", "--model", "fig.pm", "--semantics", "spr", "--formula", "q U"],
        &["check", "--model", "fig.pm", "--semantics", "spr", "--formula", "nope"],
        &["check", "--model", "fig.pm", "--semantics", "spr", "--bogus"],
        &["reduce-dioph", "--poly", "n1 +"],
    ];
    for args in cases {
        assert_eq!(run(args).1, 2, "{args:?}");
    }
    assert!(stderr(cases[1]).contains("column"));
}

#[test]
fn enumeration_guard_is_configurable() {
    let args = ["check", "--model", "hilbert.pm", "--semantics", "spr", "--formula", "A G<=6 (p1 | !p1)"];
    let low = run_env(&args, &[("POMETH_MAX_PATHS", "10")]);
    assert_eq!(low.status.code(), Some(2));
    assert!(String::from_utf8(low.stderr).unwrap().contains("bound"));
    let high = run_env(&args, &[("POMETH_MAX_PATHS", "1000000")]);
    assert_eq!(high.status.code(), Some(0));
    let bad = run_env(&args, &[("POMETH_MAX_PATHS", "lots")]);
    assert_eq!(bad.status.code(), Some(2));
}
