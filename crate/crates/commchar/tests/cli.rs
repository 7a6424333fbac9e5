use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use commchar::pipeline::{self, report_file};
use commchar::PipelineConfig;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn commchar(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_commchar"));
    cmd.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("COMMCHAR_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn fig1(out: &Path, extra: &[&str]) -> Output {
    let config = data("fig1/config.toml");
    let mut args = vec!["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&mut commchar(&args))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Every file under `dir` except the manifest, which carries timings.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != pipeline::MANIFEST {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn pipeline_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig1(dir.path(), &["pipeline"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in [
        pipeline::COMMUNITIES,
        pipeline::MEASURES,
        pipeline::DATABASE,
        pipeline::PATTERNS,
        pipeline::SUMMARY,
        pipeline::CONFIG,
        pipeline::MANIFEST,
    ] {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }
    let report = dir.path().join(pipeline::REPORTS).join(report_file(0));
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(report).unwrap()).unwrap();
    assert_eq!(doc["community"], 0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join(pipeline::MANIFEST)).unwrap()).unwrap();
    assert_eq!(manifest["network"]["nodes"], 7);
    assert_eq!(manifest["stages"].as_array().unwrap().len(), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("community 0"));
}

#[test]
fn bad_min_sup_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig1(dir.path(), &["--min-sup", "1.5", "pipeline"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("min_sup"), "{}", stderr(&o));

    let config = data("fig1/config.toml");
    let o = run(commchar(&["--config", config.to_str().unwrap(), "validate"]).env("COMMCHAR_MIN_SUP", "1.5"));
    assert_eq!(code(&o), 1);
    let o = run(commchar(&["--config", config.to_str().unwrap(), "validate"]).env("COMMCHAR_MIN_SUP", "0.5"));
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("min_sup = 0.5"));
}

#[test]
fn command_line_beats_environment() {
    let config = data("fig1/config.toml");
    let o = run(commchar(&["--config", config.to_str().unwrap(), "--min-sup", "0.4", "validate"])
        .env("COMMCHAR_MIN_SUP", "1.5"));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("min_sup = 0.4"));
}

#[test]
fn unreadable_input_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let o = fig1(dir.path(), &["--edges", missing.to_str().unwrap(), "pipeline"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nope.csv"));
}

#[test]
fn unknown_flag_and_help() {
    assert_eq!(code(&run(&mut commchar(&["--bogus", "pipeline"]))), 1);
    assert_eq!(code(&run(&mut commchar(&["--help"]))), 0);
    assert_eq!(code(&run(&mut commchar(&["--version"]))), 0);
}

#[test]
fn malformed_data_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("e.csv");
    fs::write(&edges, "t,u,v\n1,a,b\n1,a\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&mut commchar(&[
        "--edges",
        edges.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "pipeline",
    ]));
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("e.csv:3:"), "{}", stderr(&o));
}

#[test]
fn candidate_limit_exits_3_without_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig1(dir.path(), &["--max-candidates", "1", "pipeline"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(dir.path().join(pipeline::MEASURES).is_file());
    for name in [pipeline::DATABASE, pipeline::PATTERNS, pipeline::SUMMARY] {
        assert!(!dir.path().join(name).exists(), "{name} written");
    }
    for entry in fs::read_dir(dir.path()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(!name.ends_with(".partial"), "leftover {name}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&fig1(a.path(), &["--threads", "1", "pipeline"])), 0);
    assert_eq!(code(&fig1(b.path(), &["--threads", "4", "pipeline"])), 0);
    let strip = |s: Vec<(String, Vec<u8>)>| -> Vec<_> {
        // the config echo names its own output directory
        s.into_iter().filter(|(n, _)| n != pipeline::CONFIG).collect()
    };
    assert_eq!(strip(snapshot(a.path())), strip(snapshot(b.path())));
}

#[test]
fn stages_resume_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    for stage in ["communities", "measures", "mine", "characterize"] {
        let o = fig1(dir.path(), &[stage]);
        assert_eq!(code(&o), 0, "{stage}: {}", stderr(&o));
    }
    let separate = snapshot(dir.path());

    let whole = tempfile::tempdir().unwrap();
    assert_eq!(code(&fig1(whole.path(), &["pipeline"])), 0);
    let strip = |s: Vec<(String, Vec<u8>)>| -> Vec<_> {
        s.into_iter().filter(|(n, _)| n != pipeline::CONFIG).collect()
    };
    assert_eq!(strip(separate.clone()), strip(snapshot(whole.path())));

    let o = fig1(dir.path(), &["--resume", "pipeline"]);
    assert_eq!(code(&o), 0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join(pipeline::MANIFEST)).unwrap()).unwrap();
    for s in manifest["stages"].as_array().unwrap() {
        assert_eq!(s["status"], "resumed", "{s}");
    }
    assert_eq!(snapshot(dir.path()), separate);
}

#[test]
fn echoed_config_revalidates_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = fig1(dir.path(), &["--min-sup", "0.4", "--seed", "7", "validate"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let echoed = String::from_utf8(o.stdout).unwrap();
    let cfg = PipelineConfig::parse(&echoed).unwrap();
    assert_eq!(cfg.min_sup, 0.4);
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.out, dir.path());

    // the echo written by a run loads from its own directory unchanged
    assert_eq!(code(&fig1(dir.path(), &["--min-sup", "0.4", "--seed", "7", "pipeline"])), 0);
    let written = dir.path().join(pipeline::CONFIG);
    assert_eq!(fs::read_to_string(&written).unwrap(), echoed);
    assert_eq!(PipelineConfig::load(&written).unwrap(), cfg);
}

#[test]
fn external_communities_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let comm = dir.path().join("c.csv");
    fs::write(&comm, "node,community\n1,x\n2,x\n3,x\n4,x\n5,y\n6,y\n7,y\n").unwrap();
    let out = dir.path().join("out");
    let o = fig1(&out, &["--communities", comm.to_str().unwrap(), "pipeline"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join(pipeline::MANIFEST)).unwrap()).unwrap();
    assert_eq!(manifest["communities"], 2);
    let doc: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join(pipeline::REPORTS).join(report_file(0))).unwrap()).unwrap();
    assert_eq!(doc["size"], 4);
}

#[test]
fn sample_writes_a_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&mut commchar(&["--out", dir.path().to_str().unwrap(), "sample"]));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let net = commchar::io::load_network(&dir.path().join("edges.csv"), Some(&dir.path().join("attrs.csv"))).unwrap();
    assert_eq!(net.n(), 40);
}
