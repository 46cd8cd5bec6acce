use std::fs;
use std::path::{Path, PathBuf};

use attnpath::cli::run;

fn attnpath(args: &[&str]) -> i32 {
    let mut argv = vec!["attnpath"];
    argv.extend_from_slice(args);
    run(argv)
}

fn p(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

/// A small synthetic corpus: 6 speakers per class, one session each.
fn small_corpus(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus");
    let code = attnpath(&["synth", "--out", &p(&corpus), "--speakers-per-class", "6", "--sessions-per-speaker", "1", "--seed", "7"]);
    assert_eq!(code, 0);
    corpus
}

fn inputs(corpus: &Path) -> Vec<String> {
    vec![
        "--manifest".into(),
        p(&corpus.join("manifest.csv")),
        "--registry".into(),
        p(&corpus.join("registry.tsv")),
        "--wv".into(),
        p(&corpus.join("vectors.txt")),
    ]
}

fn with_inputs<'a>(head: &[&'a str], inputs: &'a [String], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(inputs.iter().map(String::as_str)).chain(tail.iter().copied()).collect()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(attnpath(&["frobnicate"]), 2);
    assert_eq!(attnpath(&["cv", "--bogus"]), 2);
    assert_eq!(attnpath(&[]), 2);
    assert_eq!(attnpath(&["cv", "--manifest", "/nonexistent/m.csv", "--out", "/tmp/x"]), 2);
}

#[test]
fn help_exits_0() {
    assert_eq!(attnpath(&["--help"]), 0);
    for sub in ["synth", "features", "cv", "scanpath", "heatmap", "report"] {
        assert_eq!(attnpath(&[sub, "--help"]), 0, "{sub}");
    }
}

#[test]
fn synth_writes_parseable_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    assert_eq!(attnpath(&["synth", "--out", &p(&corpus), "--speakers-per-class", "4", "--sessions-per-speaker", "1"]), 0);
    let sessions = attnpath::corpus::load_corpus(&corpus.join("manifest.csv")).unwrap();
    assert_eq!(sessions.len(), 8);
    assert_eq!(fs::read_dir(corpus.join("ctm")).unwrap().count(), 8);
    let echo: serde_json::Value = serde_json::from_str(&fs::read_to_string(corpus.join("synth.json")).unwrap()).unwrap();
    assert_eq!(echo["seed"], 42);
    assert_eq!(echo["sessions"], 8);
    // No staging directory left behind.
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn cv_echoes_config_and_scores_every_session() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("cv");
    let ins = inputs(&corpus);
    let args = with_inputs(&["cv"], &ins, &["--k", "3", "--seed", "9", "--lambda", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(attnpath(&args), 0);

    let metrics: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["config"]["k"], 3);
    assert_eq!(metrics["config"]["seed"], 9);
    assert_eq!(metrics["config"]["lambda"], 0.5);
    assert_eq!(metrics["config"]["mask"], "all");
    assert_eq!(metrics["per_fold"].as_array().unwrap().len(), 3);
    let f1 = metrics["f1"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f1));

    let preds = fs::read_to_string(out.join("predictions.csv")).unwrap();
    let mut lines = preds.lines();
    assert!(lines.next().unwrap().starts_with("# attnpath cv k=3 seed=9"));
    assert_eq!(lines.next().unwrap(), "session_id,speaker_id,fold,truth,predicted,probability");
    assert_eq!(lines.count(), 12);
}

#[test]
fn json_numbers_have_six_decimals() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("cv");
    let ins = inputs(&corpus);
    assert_eq!(attnpath(&with_inputs(&["cv"], &ins, &["--k", "3", "--out", out.to_str().unwrap()])), 0);
    let text = fs::read_to_string(out.join("metrics.json")).unwrap();
    let accuracy = text.lines().find(|l| l.trim_start().starts_with("\"accuracy\"")).unwrap();
    let value = accuracy.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    assert_eq!(value.split('.').nth(1).unwrap().len(), 6, "{value}");
}

#[test]
fn too_many_folds_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("cv");
    let ins = inputs(&corpus);
    assert_eq!(attnpath(&with_inputs(&["cv"], &ins, &["--k", "50", "--out", out.to_str().unwrap()])), 2);
    assert!(!out.exists());
}

#[test]
fn report_has_one_row_per_mask() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("report");
    let ins = inputs(&corpus);
    let args = with_inputs(&["report"], &ins, &["--k", "3", "--masks", "aoi,aoa,wv,all", "--out", out.to_str().unwrap()]);
    assert_eq!(attnpath(&args), 0);
    let table = fs::read_to_string(out.join("report.txt")).unwrap();
    let rows: Vec<&str> = table.lines().skip(2).collect();
    assert_eq!(rows.len(), 4);
    for (row, mask) in rows.iter().zip(["aoi", "aoa", "wv", "all"]) {
        assert!(row.starts_with(mask), "{row}");
        assert_eq!(row.split_whitespace().count(), 5);
    }
    assert_eq!(attnpath(&with_inputs(&["report"], &ins, &["--masks", "aoi,eyes"])), 2);
}

#[test]
fn features_csv_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("feat");
    let ins = inputs(&corpus);
    assert_eq!(attnpath(&with_inputs(&["features"], &ins, &["--mask", "aoi+wv", "--out", out.to_str().unwrap()])), 0);
    let text = fs::read_to_string(out.join("features.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# attnpath features mask=aoi+wv"));
    assert_eq!(lines[1].split(',').count(), 3 + 68);
    assert!(lines[1].starts_with("session_id,speaker_id,label,aoi_x_coordinate_mean"));
    assert_eq!(lines.len(), 2 + 12);
    for row in &lines[2..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 71);
        // AoA block is masked out.
        assert!(cells[3 + 32..3 + 40].iter().all(|c| *c == "0.000000"));
    }
}

#[test]
fn heatmap_by_label_writes_groups_and_difference() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("heat");
    let args = [
        "heatmap", "--manifest", &p(&corpus.join("manifest.csv")), "--registry", &p(&corpus.join("registry.tsv")),
        "--group-by", "label", "--out", &p(&out),
    ];
    assert_eq!(attnpath(&args), 0);
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names, ["AD-minus-HC.neg.pgm", "AD-minus-HC.pos.pgm", "AD.heat.pgm", "HC.heat.pgm"]);
    let pgm = fs::read_to_string(out.join("AD.heat.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n# attnpath heatmap group_by=label cell_size=10"));
    let dims = pgm.lines().find(|l| !l.starts_with('#') && *l != "P2").unwrap();
    assert_eq!(dims, "75 58");
    let pixels: Vec<u32> = pgm.lines().filter(|l| !l.starts_with('#')).skip(3).flat_map(|l| l.split_whitespace()).map(|v| v.parse().unwrap()).collect();
    assert_eq!(pixels.len(), 75 * 58);
    assert_eq!(pixels.iter().max(), Some(&255));
}

#[test]
fn scanpath_per_session_and_filter() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let out = tmp.path().join("svg");
    let manifest = p(&corpus.join("manifest.csv"));
    assert_eq!(attnpath(&["scanpath", "--manifest", &manifest, "--out", &p(&out), "--session", "hc-002-1"]), 0);
    let names: Vec<_> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["hc-002-1.scanpath.svg"]);
    let svg = fs::read_to_string(out.join("hc-002-1.scanpath.svg")).unwrap();
    assert!(svg.contains("<circle"));
    assert_eq!(attnpath(&["scanpath", "--manifest", &manifest, "--out", &p(&out), "--session", "nobody"]), 2);
}

#[test]
fn inputs_are_not_modified() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = small_corpus(tmp.path());
    let snapshot = |dir: &Path| -> Vec<(PathBuf, Vec<u8>)> {
        let mut files: Vec<_> = walk(dir).into_iter().map(|f| { let b = fs::read(&f).unwrap(); (f, b) }).collect();
        files.sort();
        files
    };
    let before = snapshot(&corpus);
    let ins = inputs(&corpus);
    assert_eq!(attnpath(&with_inputs(&["cv"], &ins, &["--k", "3", "--out", &p(&tmp.path().join("cv"))])), 0);
    assert_eq!(attnpath(&["heatmap", "--manifest", &p(&corpus.join("manifest.csv")), "--out", &p(&tmp.path().join("h"))]), 0);
    assert_eq!(snapshot(&corpus), before);
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

#[test]
fn malformed_ctm_names_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.ctm"), "s1 1 0.5 0.2 boy\ns1 1 oops 0.2 girl\n").unwrap();
    fs::write(tmp.path().join("m.csv"), "session_id,speaker_id,label,ctm_path\ns1,spk1,AD,bad.ctm\n").unwrap();
    let err = attnpath::corpus::load_corpus(&tmp.path().join("m.csv")).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("bad.ctm") && msg.contains("line 2"), "{msg}");
    assert_eq!(err.exit_code(), 2);
    let out = tmp.path().join("svg");
    assert_eq!(attnpath(&["scanpath", "--manifest", &p(&tmp.path().join("m.csv")), "--out", &p(&out)]), 2);
    assert!(!out.exists());
}
