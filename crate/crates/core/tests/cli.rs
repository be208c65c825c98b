use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_psdmanopt"));
    c.env_remove("PSDMANOPT_THREADS");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("psdmanopt-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_EIG: [&str; 8] = ["--set", "experiment=eig", "--set", "n=40", "--set", "r=2", "--set", "p=3"];

/// Trace text with the wall-clock column blanked.
fn without_seconds(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f[5] = "_";
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn run_succeeds_and_writes_traces_and_manifest() {
    let out = scratch("ok");
    let o = bin()
        .args(SMALL_EIG)
        .args(["--set", "methods=g2,embedded", "--out"])
        .arg(&out)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["quotient-g2.csv", "embedded.csv", "manifest.txt"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("experiment=eig") && manifest.contains("n=40"));
    assert!(manifest.contains("# result quotient-g2 status=converged"));
}

#[test]
fn config_errors_exit_with_two() {
    let cases: [&[&str]; 5] = [
        &["--set", "n=5", "--set", "p=9", "run"],
        &["--set", "bogus=1", "run"],
        &["--set", "n=abc", "run"],
        &["--set", "novalue", "run"],
        &["--config", "/definitely/not/here.cfg", "run"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("config error"), "{args:?}");
    }
    let o = bin().env("PSDMANOPT_THREADS", "zero").args(SMALL_EIG).arg("run").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn exhausted_budget_exits_with_three() {
    let out = scratch("budget");
    let o = bin()
        .args(SMALL_EIG)
        .args(["--set", "methods=g1", "--set", "max_iters=2", "--quiet", "--out"])
        .arg(&out)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("g1"));
    // Traces are still written for inspection.
    assert!(out.join("quotient-g1.csv").is_file());
    assert!(o.stdout.is_empty(), "--quiet prints nothing");
}

#[test]
fn manifest_reproduces_the_run() {
    let first = scratch("first");
    let o = bin()
        .args(SMALL_EIG)
        .args(["--seed", "17", "--set", "methods=g3,g2", "--quiet", "--out"])
        .arg(&first)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let second = scratch("second");
    let o = bin()
        .arg("--config")
        .arg(first.join("manifest.txt"))
        .args(["--quiet", "--out"])
        .arg(&second)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["quotient-g3.csv", "quotient-g2.csv"] {
        assert_eq!(without_seconds(&first.join(f)), without_seconds(&second.join(f)), "{f}");
    }
    // A later --set overrides the file.
    let third = scratch("third");
    let o = bin()
        .arg("--config")
        .arg(first.join("manifest.txt"))
        .args(["--set", "seed=18", "--quiet", "--out"])
        .arg(&third)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(third.join("manifest.txt")).unwrap().contains("seed=18"));
    assert_ne!(without_seconds(&first.join("quotient-g3.csv")), without_seconds(&third.join("quotient-g3.csv")));
}

#[test]
fn thread_cap_does_not_change_results() {
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let out = scratch(&format!("threads{threads}"));
        let o = bin()
            .env("PSDMANOPT_THREADS", threads)
            .args(SMALL_EIG)
            .args(["--set", "methods=g2,g3,embedded", "--quiet", "--out"])
            .arg(&out)
            .arg("run")
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        texts.push(["quotient-g2.csv", "quotient-g3.csv", "embedded.csv"].map(|f| without_seconds(&out.join(f))));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn plot_accepts_files_and_directories() {
    let out = scratch("plot");
    let o = bin()
        .args(SMALL_EIG)
        .args(["--set", "methods=g2,g3", "--quiet", "--out"])
        .arg(&out)
        .arg("run")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);

    let single = scratch("plot-single");
    let o = bin().arg("--out").arg(&single).arg("plot").arg(out.join("quotient-g2.csv")).output().unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let script = fs::read_to_string(single.join("plot.gp")).unwrap();
    assert!(script.contains("set logscale y"));
    assert!(script.contains("$trace0"));

    let multi = scratch("plot-multi");
    let o = bin()
        .args(["--set", "x=both", "--set", "y=tangent_gradnorm", "--out"])
        .arg(&multi)
        .arg("plot")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let script = fs::read_to_string(multi.join("plot.gp")).unwrap();
    assert!(script.contains("multiplot"));
    assert!(script.contains("quotient-g2") && script.contains("quotient-g3"));

    let o = bin().args(["--set", "y=nonsense", "plot"]).arg(out.join("quotient-g2.csv")).output().unwrap();
    assert_eq!(code(&o), 2);

    let o = run(&["plot", "/no/such/trace.csv"]);
    assert_ne!(code(&o), 0);
    assert!(stderr(&o).contains("/no/such/trace.csv"));
}
