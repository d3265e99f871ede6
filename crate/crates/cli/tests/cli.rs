//! End-to-end checks of the `catlab` binary: exit codes, JSON mode and
//! experiment artifacts.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn catlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Stdout parsed as exactly one JSON document.
fn one_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut docs = serde_json::Deserializer::from_str(&text).into_iter::<Value>();
    let first = docs.next().expect("one document").expect("valid JSON");
    assert!(docs.next().is_none(), "more than one JSON document: {text}");
    first
}

const P_STAR: &str = "0.65,0.2,0.15";
const Q_STAR: &str = "0.5,0.4,0.1";

#[test]
fn majorize_examples() {
    let o = catlab(&["check", "majorize", "--p", "1,0", "--q", "0.5,0.5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(one_json(&o)["result"], true);

    let o = catlab(&["check", "majorize", "--p", P_STAR, "--q", Q_STAR]);
    assert_eq!(code(&o), 1);
    assert_eq!(one_json(&o)["result"], false);
    let o = catlab(&["check", "majorize", "--p", Q_STAR, "--q", P_STAR]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    assert_eq!(
        code(&catlab(&["exp", "fig2", "--config", "missing.json"])),
        2
    );
    assert_eq!(
        code(&catlab(&[
            "exp",
            "fig2",
            "--config",
            "missing.json",
            "--out",
            out,
            "--seed",
            "1"
        ])),
        2
    );
    // --seed is mandatory for sampling subcommands.
    assert_eq!(code(&catlab(&["exp", "fig2", "--out", out])), 2);
    assert_eq!(
        code(&catlab(&[
            "check", "majorize", "--p", "0.5,0.6", "--q", "1,0"
        ])),
        2
    );
    assert_eq!(code(&catlab(&["check", "majorize", "--bogus"])), 2);
    assert_eq!(code(&catlab(&["presets", "show", "fig7"])), 2);
    assert_eq!(
        code(&catlab(&[
            "exp",
            "fig2",
            "--preset",
            "appendix-d4",
            "--out",
            out,
            "--seed",
            "1"
        ])),
        2
    );
    let o = catlab(&[
        "dilate",
        "--channel",
        r#"[["1/2","1/2"],["1/2","1/2"]]"#,
        "--gibbs",
        r#"["1/3","2/3"]"#,
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn json_mode_emits_one_document() {
    let cases: &[&[&str]] = &[
        &["--json", "check", "tmajorize", "--p", P_STAR, "--q", Q_STAR],
        &[
            "--json",
            "convexsplit",
            "verify",
            "--rho",
            "0.7,0.3",
            "--sigma",
            "0.5,0.5",
            "--m-max",
            "3",
        ],
        &["--json", "presets", "list"],
        &[
            "--json", "check", "majorize", "--p", "1,0", "--q", "0.5,0.5", "--bogus",
        ],
        &["--json", "presets", "show", "nope"],
    ];
    for args in cases {
        let o = catlab(args);
        let v = one_json(&o);
        if code(&o) == 2 {
            assert_eq!(v["exit_code"], 2, "{args:?}");
        }
    }
    let v = one_json(&catlab(&["--json", "presets", "list"]));
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "fig2",
            "fig3",
            "fig4",
            "fig5",
            "fig6",
            "appendix-d4",
            "appendix-d5"
        ]
    );
}

#[test]
fn resource_cap_exits_3() {
    // q is more concentrated than p, so no k works and the search runs into the cap.
    let o = catlab(&[
        "--json",
        "--dim-cap",
        "10000",
        "catalysis",
        "min-k",
        "--p",
        "0.4,0.3,0.2,0.1",
        "--q",
        "0.5,0.5,0,0",
        "--k-max",
        "12",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(one_json(&o)["exit_code"], 3);
}

#[test]
fn catalysis_records() {
    let o = catlab(&["catalysis", "second-laws", "--p", P_STAR, "--q", Q_STAR]);
    assert_eq!(code(&o), 0);
    let v = one_json(&o);
    assert!(v["strict_margin"].as_f64().unwrap() > 0.0);

    // Emitted states and contexts are accepted back by the same flags.
    let inputs = &v["inputs"];
    let o = catlab(&[
        "catalysis",
        "second-laws",
        "--p",
        &inputs["p"].to_string(),
        "--q",
        &inputs["q"].to_string(),
        "--ctx",
        &inputs["ctx"].to_string(),
    ]);
    assert_eq!(one_json(&o)["inputs"], *inputs);

    let pair = ["--p", "0.45,0.25,0.25,0.05", "--q", "0.4,0.35,0.15,0.1"];
    let o = catlab(&[&["catalysis", "min-k"][..], &pair].concat());
    assert_eq!(one_json(&o)["k"], 3);
    let o = catlab(
        &[
            &["catalysis", "duan", "--k", "3", "--exact-den", "100"][..],
            &pair,
        ]
        .concat(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(one_json(&o)["k_copy"], true);
    let o = catlab(&[&["catalysis", "duan", "--k", "2"][..], &pair].concat());
    assert_eq!(one_json(&o)["k_copy"], false);

    // The anchor pair is never k-copy transformable.
    let o = catlab(&["catalysis", "min-k", "--p", P_STAR, "--q", Q_STAR]);
    assert_eq!(code(&o), 1);
    assert_eq!(one_json(&o)["k"], Value::Null);

    let v = one_json(&catlab(&[
        "catalysis",
        "bounds",
        "--d-s",
        "3",
        "--d-c",
        "256",
    ]));
    assert!((v["bound"].as_f64().unwrap() - 2.0 / 17.0).abs() < 1e-15);
}

#[test]
fn convexsplit_and_dilate() {
    let o = catlab(&[
        "convexsplit",
        "verify",
        "--rho",
        "0.7,0.3",
        "--sigma",
        "0.5,0.5",
        "--m-max",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,empirical,bound,ratio");
    assert_eq!(lines.len(), 4);

    let o = catlab(&[
        "dilate",
        "--channel",
        r#"[["1/2","1/2"],["1/4","3/4"]]"#,
        "--gibbs",
        r#"["1/3","2/3"]"#,
    ]);
    assert_eq!(code(&o), 0);
    let v = one_json(&o);
    assert_eq!(v["verified"], true);
    assert_eq!(v["shell_size"], 6);
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn experiment_runs_are_reproducible_and_contained() {
    let work = tempfile::tempdir().unwrap();
    let config = work.path().join("cfg.json");
    std::fs::write(&config, r#"{"d_c": [4, 16], "n_c": 30, "n_s": 40}"#).unwrap();
    let run = |name: &str, threads: &str| {
        let out = work.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_catlab"))
            .current_dir(work.path())
            .env("CATLAB_THREADS", threads)
            .args(["--json", "exp", "fig4", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--seed", "11", "--targets", "grid:0.1"])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let summary = one_json(&o);
        assert_eq!(summary["complete"], true);
        assert_eq!(summary["seed"], 11);
        out
    };
    let a = run("a", "4");
    let b = run("b", "1");
    let files = csvs(&a);
    assert!(files.iter().any(|(n, _)| n == "fig4.csv"));
    assert!(files.iter().any(|(n, _)| n == "boundary.csv"));
    assert_eq!(files, csvs(&b));

    let mut entries: Vec<_> = std::fs::read_dir(work.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    entries.sort();
    assert_eq!(entries, ["a", "b", "cfg.json"]);

    // A preset dumped by `presets show` is a valid --config file.
    let v = one_json(&catlab(&["presets", "show", "fig3"]));
    let dumped = work.path().join("fig3.json");
    std::fs::write(&dumped, v["config"].to_string()).unwrap();
    let o = catlab(&[
        "exp",
        "fig3",
        "--config",
        dumped.to_str().unwrap(),
        "--out",
        work.path().join("c").to_str().unwrap(),
        "--seed",
        "2",
        "--n-c",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}
