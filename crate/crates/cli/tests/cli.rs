use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn nettopo(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nettopo"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Relative path to contents for every file below `dir`.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, acc: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, acc);
            } else {
                acc.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut acc = BTreeMap::new();
    walk(dir, dir, &mut acc);
    acc
}

fn corpus(tmp: &TempDir) {
    let out = nettopo(
        &[
            "generate",
            "--out",
            "corpus",
            "--per-domain",
            "4",
            "--seed",
            "3",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn generate_then_run() {
    let tmp = TempDir::new().unwrap();
    corpus(&tmp);
    let out = nettopo(
        &[
            "run",
            "--manifest",
            "corpus/manifest.csv",
            "--out",
            "out",
            "--k-max",
            "4",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let root = tmp.path().join("out");
    for file in [
        "networks.csv",
        "distances.csv",
        "distances.bin",
        "selection.csv",
        "config.toml",
    ] {
        assert!(root.join(file).is_file(), "{file} missing");
    }
    for report in [
        "anova.csv",
        "posthoc.csv",
        "method_ari.csv",
        "crosstab_pam.csv",
    ] {
        assert!(
            root.join("reports").join(report).is_file(),
            "{report} missing"
        );
    }
    // The written configuration reproduces the run.
    let config = fs::read_to_string(root.join("config.toml")).unwrap();
    assert!(config.contains("k_max = 4"));
}

#[test]
fn staged_commands_match_run() {
    let tmp = TempDir::new().unwrap();
    corpus(&tmp);
    let common = ["--out", "staged", "--format", "json", "--seed", "5"];
    let with = |cmd: &str, extra: &[&str]| -> Vec<String> {
        std::iter::once(cmd)
            .chain(extra.iter().copied())
            .chain(common)
            .map(String::from)
            .collect()
    };
    for args in [
        with("measures", &["--manifest", "corpus/manifest.csv"]),
        with("distances", &[]),
        with("cluster", &[]),
        with("stats", &[]),
        with("report", &[]),
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = nettopo(&args, tmp.path());
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
    }
    let out = nettopo(
        &[
            "run",
            "--manifest",
            "corpus/manifest.csv",
            "--out",
            "full",
            "--format",
            "json",
            "--seed",
            "5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let staged = snapshot(&tmp.path().join("staged"));
    let mut full = snapshot(&tmp.path().join("full"));
    full.remove(Path::new("config.toml"));
    assert_eq!(
        staged.keys().collect::<Vec<_>>(),
        full.keys().collect::<Vec<_>>()
    );
    assert!(staged == full);
    assert!(full.contains_key(Path::new("reports/anova.json")));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = TempDir::new().unwrap();
    corpus(&tmp);
    fs::write(
        tmp.path().join("run.toml"),
        "bins = 10\nk_max = 3\nformat = \"json\"\n",
    )
    .unwrap();
    let out = nettopo(
        &[
            "run",
            "--manifest",
            "corpus/manifest.csv",
            "--config",
            "run.toml",
            "--out",
            "o",
            "--k-max",
            "5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let written = fs::read_to_string(tmp.path().join("o/config.toml")).unwrap();
    assert!(written.contains("bins = 10"));
    assert!(written.contains("k_max = 5"));
    assert!(tmp.path().join("o/reports/anova.json").is_file());
}

#[test]
fn help_and_version_succeed() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&nettopo(&["--help"], tmp.path())), 0);
    assert_eq!(code(&nettopo(&["--version"], tmp.path())), 0);
}

#[test]
fn usage_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    for args in [
        &["run", "--bogus"][..],
        &["frobnicate"],
        &["run", "--out", "o"],
        &["cluster", "--linkage", "ward"],
        &["cluster", "--bins", "1"],
        &["cluster", "--k-min", "5", "--k-max", "3"],
        &["cluster", "--min-pts", "two"],
        &["cluster", "--eps-grid", "-0.5"],
        &["generate", "--out", "c", "--kind", "nope"],
    ] {
        let out = nettopo(args, tmp.path());
        assert_eq!(code(&out), 1, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn bad_data_exits_2() {
    let tmp = TempDir::new().unwrap();
    corpus(&tmp);
    fs::write(
        tmp.path().join("dup.csv"),
        "name,path,domain\na,corpus/x.txt,d\na,corpus/y.txt,d\n",
    )
    .unwrap();
    let out = nettopo(&["run", "--manifest", "dup.csv", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("duplicate"));

    let out = nettopo(
        &["measures", "--manifest", "absent.csv", "--out", "o"],
        tmp.path(),
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("absent.csv"));

    // Fail-fast turns a skipped network into a data error.
    let manifest = fs::read_to_string(tmp.path().join("corpus/manifest.csv")).unwrap();
    fs::write(tmp.path().join("corpus/broken.txt"), "0 1\nnot an edge\n").unwrap();
    fs::write(
        tmp.path().join("corpus/manifest.csv"),
        format!("{manifest}broken,broken.txt,modular\n"),
    )
    .unwrap();
    let out = nettopo(
        &[
            "run",
            "--manifest",
            "corpus/manifest.csv",
            "--out",
            "o",
            "--fail-fast",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("broken"));

    // Without it the network is skipped and reported.
    let out = nettopo(
        &["run", "--manifest", "corpus/manifest.csv", "--out", "o"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let failures = fs::read_to_string(tmp.path().join("o/failures.csv")).unwrap();
    assert!(failures.lines().any(|l| l.starts_with("broken,")));
}

#[test]
fn unwritable_output_exits_3() {
    let tmp = TempDir::new().unwrap();
    corpus(&tmp);
    fs::write(tmp.path().join("blocker"), "a regular file").unwrap();
    let out = nettopo(
        &[
            "run",
            "--manifest",
            "corpus/manifest.csv",
            "--out",
            "blocker/out",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}
