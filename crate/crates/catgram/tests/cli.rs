//! End-to-end tests of the `catgram` binary: exit codes and output shape
//! for each subcommand.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::grammar_path;

fn catgram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catgram"))
        .args(args)
        .output()
        .expect("failed to spawn catgram")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

fn path_arg(p: &Path) -> String {
    p.to_string_lossy().to_string()
}

#[test]
fn reduce_answers_yes_no_and_rejects_bad_syntax() {
    let out = catgram(&["reduce", "--target", "p/p", r"(p/p)/p; p; p; p\(p\p)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "yes\n");

    let out = catgram(&["reduce", "--target", "p", r"(p/p)/p; p; p; p\(p\p)"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "no\n");

    let out = catgram(&["reduce", "--target", "p", "p/"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reduce_all_lists_both_targets() {
    let out = catgram(&["reduce", "--all", r"(p/p)/p; p; p; p\(p\p)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "p/p\np\\p\n");
}

#[test]
fn reduce_renders_trees_in_both_formats() {
    let out = catgram(&[
        "reduce",
        "--target",
        r"p\p",
        "--trees",
        "4",
        r"(p/p)/p; p; p; p\(p\p)",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("yes\n"));
    assert_eq!(text.matches("tree ").count(), 1);
    assert!(text.contains("\\E p\\p"));

    let out = catgram(&[
        "reduce",
        "--target",
        r"p\p",
        "--trees",
        "1",
        "--format",
        "latex",
        r"(p/p)/p; p; p; p\(p\p)",
    ]);
    assert!(stdout(&out).contains("\\infer{p \\BS p}"));
}

#[test]
fn reduce_cap_exceeded_is_exit_3() {
    let out = catgram(&[
        "reduce",
        "--cap",
        "2",
        "--target",
        "p/p",
        r"(p/p)/p; p; p; p\(p\p)",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn gnf_converts_and_reports_rule_count() {
    let tmp = tempdir();
    let out_path = tmp.join("anbn_gnf_out.cfg");
    let out = catgram(&[
        "gnf",
        &path_arg(&grammar_path("anbn.cfg")),
        "-o",
        &path_arg(&out_path),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).trim_end().ends_with("rules"));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let g = catgram::Cfg::parse(&text).unwrap();
    assert!(catgram::is_gnf2(&g));
}

#[test]
fn gnf_rejects_epsilon_and_empty_language() {
    let tmp = tempdir();
    let eps = tmp.join("eps.cfg");
    std::fs::write(&eps, "start: S\nS -> \n").unwrap();
    let out = catgram(&["gnf", &path_arg(&eps)]);
    assert_eq!(code(&out), 2);

    let out = catgram(&["gnf", &path_arg(&grammar_path("empty_language.cfg"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no terminal string"));
}

#[test]
fn encode_reports_image_lengths_and_writes_the_bundle() {
    let tmp = tempdir();
    let bundle_path = tmp.join("anbn_bundle.json");
    let out = catgram(&[
        "encode",
        &path_arg(&grammar_path("anbn_gnf.cfg")),
        "-o",
        &path_arg(&bundle_path),
        "--assume-gnf2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("h(a): 43"), "stats were: {text}");
    assert!(text.contains("h(b): 3"));

    let bundle =
        catgram::encode::Bundle::from_json(&std::fs::read_to_string(&bundle_path).unwrap())
            .unwrap();
    assert_eq!(bundle.target, "S/S");
    let (uca, hom) = bundle.to_grammar().unwrap();
    let image = hom.image(&["a", "b"]).unwrap();
    assert!(catgram::uca_member(&uca, &image).unwrap());
}

#[test]
fn encode_rejects_uncovered_terminals() {
    let out = catgram(&["encode", &path_arg(&grammar_path("unused_terminal.cfg"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn member_agrees_on_both_deciders() {
    let g = path_arg(grammar_path("anbn.cfg").as_path());
    let out = catgram(&["member", "-g", &g, "--chars", "--via", "both", "aabb"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "aabb: yes\n");

    let out = catgram(&["member", "-g", &g, "--chars", "--via", "both", "aab"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "aab: no\n");

    let out = catgram(&["member", "-g", &g, "--chars", "xy"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn member_accepts_token_words_and_word_lists() {
    let g = path_arg(grammar_path("anbn.cfg").as_path());
    let out = catgram(&["member", "-g", &g, "a a b b", "a b"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "a a b b: yes\na b: yes\n");
}

#[test]
fn gadget_prints_items_and_legend() {
    let out = catgram(&["gadget", "x", "--a", "p", "--t", "t"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let items: Vec<&str> = text.lines().take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(
        items,
        ["(p/p)/(t/t);", "t/t;", "t;", "t\\p;", "p\\(t/t)"]
    );
    assert!(text.contains("# fresh primitives: t"));

    let out = catgram(&["gadget", "w", "--cats", "p,q"]);
    assert_eq!(code(&out), 0);
    let n = stdout(&out)
        .lines()
        .take_while(|l| !l.starts_with('#'))
        .count();
    assert_eq!(n, 35);

    let out = catgram(&["gadget", "z", "--a", "p", "--b", "p"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_subcommands_are_usage_errors() {
    let out = catgram(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("catgram-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
