use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_datacrunch");

fn squares(a: f64, b: f64) -> String {
    format!(
        r#"{{"type":"FeatureCollection","features":[
{{"type":"Feature","properties":{{"id":"a","statistic":{a}}},"geometry":{{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}}},
{{"type":"Feature","properties":{{"id":"b","statistic":{b}}},"geometry":{{"type":"Polygon","coordinates":[[[1,0],[2,0],[2,1],[1,1],[1,0]]]}}}}]}}"#
    )
}

fn prices() -> String {
    let mut s = String::from("AAA,BBB,CCC,DDD\n");
    for t in 0..40 {
        let x = t as f64;
        let row = [
            100.0 + x + (x * 0.7).sin() * 3.0,
            50.0 + 0.5 * x + (x * 0.7).sin() * 1.4,
            80.0 + (x * 1.3).cos() * 4.0,
            20.0 + (x * 0.4).sin() * 2.0 + 0.1 * x,
        ];
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn stances() -> String {
    let mut s = String::new();
    for (actor, sign) in [("ann", 1), ("bob", 1), ("cid", -1), ("dee", -1)] {
        for (topic, lean) in [("tax", 1), ("roads", -1), ("health", 1)] {
            s.push_str(&format!(r#"{{"actor":"{actor}","topic":"{topic}","polarity":{}}}"#, sign * lean));
            s.push('\n');
        }
    }
    s
}

fn events() -> String {
    let mut s = String::new();
    let mut push = |a: &str, b: &str, topic: &str, pol: i8, ts: i64| {
        s.push_str(&format!(
            r#"{{"source":"{a}","target":"{b}","kind":"reply","topics":["{topic}"],"polarity":{pol},"timestamp":{ts}}}"#
        ));
        s.push('\n');
    };
    let mut ts = 0;
    for cluster in 0..3 {
        let names: Vec<String> = (0..3).map(|i| format!("u{cluster}{i}")).collect();
        for i in 0..3 {
            for j in i + 1..3 {
                ts += 1;
                push(&names[i], &names[j], "alpha", 1, ts);
            }
        }
    }
    for (a, b) in [("v1", "v2"), ("v2", "v3"), ("v1", "v3")] {
        ts += 1;
        push(a, b, "beta", 1, ts);
    }
    push("w1", "w2", "beta", -1, ts + 1);
    s
}

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let sb = Sandbox { dir };
        sb.write("two.geojson", &squares(1.0, 3.0));
        sb.write("empty_half.geojson", &squares(1.0, 0.0));
        sb.write("prices.csv", &prices());
        sb.write("stances.jsonl", &stances());
        sb.write("events.jsonl", &events());
        sb
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) {
        fs::write(self.path(name), text).unwrap();
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(BIN)
            .args(args)
            .current_dir(self.dir.path())
            .env("SOURCE_DATE_EPOCH", "1700000000")
            .output()
            .unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let out = Sandbox::new().run(&[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = Sandbox::new().run(&["cartogram", "--in", "two.geojson", "--out", "o", "--frobnicate"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn help_and_version_succeed() {
    let sb = Sandbox::new();
    assert_eq!(code(&sb.run(&["--help"])), 0);
    let v = sb.run(&["--version"]);
    assert_eq!(code(&v), 0);
    let text = String::from_utf8(v.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")) && text.contains("schema 1"), "{text}");
}

#[test]
fn exclusive_series_flags() {
    let out = Sandbox::new().run(&["taxonomy", "--in", "prices.csv", "--out", "o", "--prices", "--raw"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn cartogram_writes_map_svg_and_report() {
    let sb = Sandbox::new();
    let out = sb.run(&["cartogram", "--in", "two.geojson", "--grid", "256", "--tol", "1e-3", "--out", "out/"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let names = listing(&sb.path("out"));
    for want in ["cartogram.geojson", "cartogram.svg", "area_report.json", "run_report.json"] {
        assert!(names.iter().any(|n| n == want), "{want} missing from {names:?}");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(sb.path("out/area_report.json")).unwrap()).unwrap();
    assert!(report["max_err"].as_f64().unwrap() < 0.02);
}

#[test]
fn empty_half_at_tight_tolerance_exhausts_budget() {
    // an unpopulated half with no sea around it has to be squeezed against the
    // wall, which takes far more capped steps than the budget allows
    let sb = Sandbox::new();
    let out = sb.run(&[
        "cartogram", "--in", "empty_half.geojson", "--pad", "1", "--tol", "1e-12", "--out", "out",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("residual"), "{}", stderr(&out));
    assert!(!sb.path("out").exists());
}

#[test]
fn missing_input_fails_without_output() {
    let sb = Sandbox::new();
    let out = sb.run(&["sentiment", "--in", "nope.jsonl", "--out", "out"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("nope.jsonl"));
    assert!(!sb.path("out").exists());
}

#[test]
fn bad_parameter_is_a_validation_error() {
    let sb = Sandbox::new();
    assert_eq!(code(&sb.run(&["cartogram", "--in", "two.geojson", "--out", "o", "--grid", "100"])), 1);
    assert_eq!(code(&sb.run(&["cartogram", "--in", "two.geojson", "--out", "o", "--tol", "2"])), 1);
    assert_eq!(code(&sb.run(&["community", "--in", "events.jsonl", "--out", "o", "--polarity", "up"])), 1);
    assert_eq!(code(&sb.run(&["sentiment", "--in", "stances.jsonl", "--out", "o", "--threads", "0"])), 1);
}

#[test]
fn config_file_with_flag_override() {
    let sb = Sandbox::new();
    sb.write("run.toml", "input = \"events.jsonl\"\noutput = \"from_file\"\npolarity = \"any\"\n");
    let out = sb.run(&["community", "--config", "run.toml", "--out", "from_flag"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(sb.path("from_flag/ranking.json").exists());
    assert!(!sb.path("from_file").exists());
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(sb.path("from_flag/run_report.json")).unwrap()).unwrap();
    assert_eq!(report["parameters"]["polarity"], "any");
}

#[test]
fn unknown_config_key_is_rejected() {
    let sb = Sandbox::new();
    sb.write("run.toml", "input = \"events.jsonl\"\ncolour = \"red\"\n");
    assert_eq!(code(&sb.run(&["community", "--config", "run.toml", "--out", "o"])), 1);
}

#[test]
fn every_pipeline_is_identical_across_thread_counts() {
    let sb = Sandbox::new();
    let runs: [(&str, &str, &[&str]); 4] = [
        ("cartogram", "two.geojson", &["--grid", "128"]),
        ("taxonomy", "prices.csv", &[]),
        ("sentiment", "stances.jsonl", &[]),
        ("community", "events.jsonl", &["--polarity", "any"]),
    ];
    for (cmd, input, extra) in runs {
        let mut dirs = Vec::new();
        for threads in ["1", "4", "4"] {
            let dir = format!("{cmd}-{threads}-{}", dirs.len());
            let mut args = vec![cmd, "--in", input, "--out", &dir, "--threads", threads];
            args.extend_from_slice(extra);
            let out = sb.run(&args);
            assert_eq!(code(&out), 0, "{cmd}: {}", stderr(&out));
            dirs.push(sb.path(&dir));
        }
        let names = listing(&dirs[0]);
        for d in &dirs[1..] {
            assert_eq!(listing(d), names);
            for n in &names {
                assert_eq!(fs::read(dirs[0].join(n)).unwrap(), fs::read(d.join(n)).unwrap(), "{cmd}/{n} differs");
            }
        }
    }
}

#[test]
fn inspect_summarizes_each_format() {
    let sb = Sandbox::new();
    for (file, expect) in [
        ("two.geojson", "regions: 2"),
        ("prices.csv", "series: 4"),
        ("stances.jsonl", "actors: 4"),
        ("events.jsonl", "events: 13"),
    ] {
        let out = sb.run(&["inspect", "--in", file]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(expect), "{file}: {text}");
    }
    assert_eq!(code(&sb.run(&["inspect", "--in", "two.geojson", "--kind", "series"])), 1);
}
