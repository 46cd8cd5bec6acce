#![allow(clippy::needless_range_loop, clippy::type_complexity)]
//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Each check is timed against its budget; a slow pass is a fail.
//!
//! Reference values come from independent oracles written here (a cyclic
//! Jacobi eigensolver, central differences, hand-computed fixture stats)
//! rather than from the implementation under test.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use attnpath::assets::{default_aoa, default_registry};
use attnpath::cli;
use attnpath::core::classifier::{logistic_loss_and_gradient, run_cross_validation, CvConfig};
use attnpath::core::features::{assemble_feature_vector, aoi_feature_block, FeatureContext, AOI_BLOCK};
use attnpath::core::heatmap::{accumulate_heatmap, diff_heatmap};
use attnpath::core::pca::{fit_pca, PcaModel};
use attnpath::core::rng::SplitMix64;
use attnpath::core::scanpath::build_scanpath;
use attnpath::core::synth::{generate_corpus, synthetic_word_vectors, CorpusSpec, FILLER_WORDS};
use attnpath::core::{FeatureMask, Scanpath, SessionRecord, FEATURE_DIM};
use attnpath::ctm::parse_ctm;
use attnpath::registry_io::load_registry;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const TOY_REGISTRY: &str = "canvas 750 575\n\
boy 150 170 60 boy|kid\n\
fall 140 330 50 fall|falling|fell\n\
water 470 420 55 water|tap|faucet\n";

const TOY_CTM: &str = "toy-1 1 0.50 0.40 the 0.99\n\
toy-1 1 0.90 0.60 Boy 0.98\n\
toy-1 1 2.00 0.50 falling 0.95\n\
toy-1 1 3.10 0.45 water 0.97\n\
toy-1 1 4.00 0.45 water 0.96\n";

/// Toy-1 AOI block against stats worked by hand from the fixture:
/// time spent {0.60, 0.50, 0.45, 0.45}, visit index {1, 1, 1, 2}.
fn feature_oracle() -> Check {
    let registry = load_registry(TOY_REGISTRY).map_err(|e| e.to_string())?;
    let tokens = parse_ctm(TOY_CTM, "toy-1").map_err(|e| e.to_string())?;
    let path = build_scanpath("toy-1", &tokens, &registry);
    let block = aoi_feature_block(&path);

    let spent_var: f64 = [0.60f64, 0.50, 0.45, 0.45].iter().map(|t| (t - 0.5).powi(2)).sum::<f64>() / 4.0;
    let visit_var: f64 = [1.0f64, 1.0, 1.0, 2.0].iter().map(|v| (v - 1.25).powi(2)).sum::<f64>() / 4.0;
    ensure((spent_var.sqrt() - 0.061237).abs() < 5e-7, || "hand oracle disagrees with 0.061237".into())?;
    ensure((visit_var.sqrt() - 0.433013).abs() < 5e-7, || "hand oracle disagrees with 0.433013".into())?;
    let expected = [
        ("time_spent", 12, [0.5, spent_var.sqrt(), 0.45, 0.6]),
        ("visit_index", 20, [1.25, visit_var.sqrt(), 1.0, 2.0]),
    ];
    let mut worst = 0.0f64;
    for (name, offset, want) in expected {
        for (i, w) in want.iter().enumerate() {
            let err = (block[offset + i] - w).abs();
            worst = worst.max(err);
            ensure(err <= 1e-9, || format!("{name} stat {i}: got {} want {w}", block[offset + i]))?;
        }
    }

    let aoa = default_aoa();
    let vectors = synthetic_word_vectors(&registry, &FILLER_WORDS, 8, 1).map_err(|e| e.to_string())?;
    let pca = PcaModel::zeros(8, 7);
    let ctx = FeatureContext { registry: &registry, aoa: &aoa, vectors: &vectors, pca: &pca, mask: FeatureMask::ALL };
    let session = SessionRecord::new("toy-1", "spk", attnpath::core::Label::Ad, tokens).map_err(|e| e.to_string())?;
    let full = assemble_feature_vector(&session, &ctx).map_err(|e| e.to_string())?;
    ensure(full.values.len() == FEATURE_DIM, || format!("assembled width {}", full.values.len()))?;
    ensure(full.values[AOI_BLOCK] == block[..], || "assembled AOI block differs".into())?;
    Ok(format!("max abs error {worst:.1e}"))
}

/// Cyclic Jacobi rotations; returns eigenvalues (descending) and unit
/// eigenvectors as rows.
fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

fn pca_oracle() -> Check {
    let mut rng = SplitMix64::new(2024);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..8).map(|_| rng.next_f64() * 6.0 - 3.0).collect()).collect();
        let mean: Vec<f64> = (0..8).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / 20.0).collect();
        let cov: Vec<Vec<f64>> = (0..8)
            .map(|i| (0..8).map(|j| rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / 20.0).collect())
            .collect();
        let (values, vectors) = jacobi_eigen(&cov);
        let model = fit_pca(&rows, 8).map_err(|e| e.to_string())?;

        for i in 0..8 {
            for j in 0..8 {
                let gram: f64 = (0..8).map(|k| model.components[i][k] * model.components[j][k]).sum();
                let err = (gram - f64::from(u8::from(i == j))).abs();
                worst = worst.max(err);
                ensure(err <= 1e-8, || format!("trial {trial}: gram[{i}][{j}] = {gram}"))?;
            }
            let err = (model.explained_variance[i] - values[i]).abs();
            worst = worst.max(err);
            ensure(err <= 1e-8, || format!("trial {trial}: eigenvalue {i} {} vs {}", model.explained_variance[i], values[i]))?;
            let align: f64 = (0..8).map(|k| model.components[i][k] * vectors[i][k]).sum::<f64>().abs();
            ensure((align - 1.0).abs() <= 1e-8, || format!("trial {trial}: component {i} alignment {align}"))?;
        }
        ensure(model.explained_variance.windows(2).all(|w| w[0] >= w[1]), || format!("trial {trial}: eigenvalues increase"))?;
    }
    Ok(format!("10 matrices 20x8, max deviation {worst:.1e}"))
}

fn gradient_check() -> Check {
    let mut rng = SplitMix64::new(77);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for trial in 0..5 {
        let (n, d) = (25 + 5 * trial, 4 + trial);
        let mut u = || rng.next_f64() * 2.0 - 1.0;
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| 2.0 * u()).collect()).collect();
        let y: Vec<bool> = (0..n).map(|_| u() > 0.0).collect();
        let w: Vec<f64> = (0..d).map(|_| u()).collect();
        let (b, lambda) = (u(), 0.1 + u().abs());
        let f = |w: &[f64], b: f64| logistic_loss_and_gradient(&x, &y, w, b, lambda).0;
        let (_, grad, grad_b) = logistic_loss_and_gradient(&x, &y, &w, b, lambda);
        let mut pairs = Vec::new();
        for j in 0..d {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            pairs.push((grad[j], (f(&up, b) - f(&down, b)) / (2.0 * h)));
        }
        pairs.push((grad_b, (f(&w, b + h) - f(&w, b - h)) / (2.0 * h)));
        for (i, (analytic, numeric)) in pairs.into_iter().enumerate() {
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
            ensure(rel <= 1e-5, || format!("problem {trial} coord {i}: {analytic} vs {numeric}"))?;
        }
    }
    Ok(format!("5 problems, max relative error {worst:.1e}"))
}

fn synthetic_corpus() -> Result<Vec<SessionRecord>, String> {
    generate_corpus(&CorpusSpec::default(), &default_registry()).map_err(|e| e.to_string())
}

/// The fold property does not depend on the embedding width, so 16-dim
/// stand-in vectors keep 50 full runs inside the budget.
fn cv_integrity() -> Check {
    let registry = default_registry();
    let sessions = synthetic_corpus()?;
    let aoa = default_aoa();
    let vectors = synthetic_word_vectors(&registry, &FILLER_WORDS, 16, 3).map_err(|e| e.to_string())?;
    let speaker_of: BTreeMap<&str, &str> = sessions.iter().map(|s| (s.session_id.as_str(), s.speaker_id.as_str())).collect();
    let mut rng = SplitMix64::new(4242);
    for _ in 0..50 {
        let seed = rng.next_u64();
        let config = CvConfig { seed, ..CvConfig::default() };
        let report = run_cross_validation(&sessions, &registry, &aoa, &vectors, &config).map_err(|e| e.to_string())?;
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &report.predictions {
            *seen.entry(p.session_id.as_str()).or_default() += 1;
        }
        ensure(seen.len() == sessions.len() && seen.values().all(|&c| c == 1), || {
            format!("seed {seed}: {} sessions scored, counts not all 1", seen.len())
        })?;
        for fold in 0..config.k {
            let test: BTreeSet<&str> = report.predictions.iter().filter(|p| p.fold == fold).map(|p| p.speaker_id.as_str()).collect();
            let train: BTreeSet<&str> = sessions
                .iter()
                .filter(|s| report.plan.fold_of(&s.speaker_id) != Some(fold))
                .map(|s| s.speaker_id.as_str())
                .collect();
            ensure(test.is_disjoint(&train), || format!("seed {seed} fold {fold}: speaker in train and test"))?;
            let reported: BTreeSet<&str> = report.per_fold[fold].test_speakers.iter().map(String::as_str).collect();
            ensure(reported == test, || format!("seed {seed} fold {fold}: reported test speakers differ"))?;
            ensure(report.per_fold[fold].train_sessions + report.per_fold[fold].test_sessions == sessions.len(), || {
                format!("seed {seed} fold {fold}: train + test != sessions")
            })?;
        }
        for p in &report.predictions {
            ensure(speaker_of[p.session_id.as_str()] == p.speaker_id, || format!("{} speaker mismatch", p.session_id))?;
        }
    }
    Ok(format!("50 seeds x {} sessions", sessions.len()))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["attnpath"];
    argv.extend_from_slice(args);
    match cli::run(argv) {
        0 => Ok(()),
        code => Err(format!("`attnpath {}` exited {code}", args.join(" "))),
    }
}

fn read_f1(path: &Path) -> Result<f64, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    json["f1"].as_f64().ok_or_else(|| "metrics.json has no f1".to_string())
}

fn end_to_end(work: &Path) -> Check {
    let corpus = work.join("corpus");
    let c = |p: &str| corpus.join(p).to_string_lossy().into_owned();
    run_cli(&["synth", "--out", &c(""), "--seed", "42", "--speakers-per-class", "20"])?;
    let common = ["--manifest", &c("manifest.csv"), "--registry", &c("registry.tsv"), "--aoa", &c("aoa.tsv"), "--wv", &c("vectors.txt")];
    let mut f1 = BTreeMap::new();
    for mask in ["all", "aoi"] {
        let out = work.join(format!("cv-{mask}"));
        let mut args = vec!["cv"];
        args.extend_from_slice(&common);
        args.extend_from_slice(&["--k", "10", "--seed", "42", "--mask", mask, "--out", out.to_str().unwrap()]);
        run_cli(&args)?;
        f1.insert(mask, read_f1(&out.join("metrics.json"))?);
    }
    ensure(f1["all"] >= 0.90, || format!("macro F1 (all) {:.6} < 0.90", f1["all"]))?;
    ensure(f1["all"] >= f1["aoi"], || format!("all {:.6} < aoi-only {:.6}", f1["all"], f1["aoi"]))?;
    Ok(format!("macro F1 all {:.6}, aoi-only {:.6}", f1["all"], f1["aoi"]))
}

fn heatmap_conservation() -> Check {
    let registry = default_registry();
    let sessions = synthetic_corpus()?;
    let paths: Vec<Scanpath> = sessions.iter().map(|s| build_scanpath(&s.session_id, &s.tokens, &registry)).collect();
    let grid = |p: &[Scanpath]| accumulate_heatmap(p, &registry, 10, 0.5).map_err(|e| e.to_string());

    let mut worst = 0.0f64;
    let mut groups = Vec::new();
    for label in attnpath::core::Label::ALL {
        let group: Vec<Scanpath> = sessions.iter().zip(&paths).filter(|(s, _)| s.label == label).map(|(_, p)| p.clone()).collect();
        let g = grid(&group)?;
        let want: f64 = group.iter().flat_map(|p| &p.fixations).map(|f| f.time_spent_s).sum();
        let rel = (g.total() - want).abs() / want;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("{label:?}: mass {} vs durations {want}", g.total()))?;
        groups.push(g);
    }
    let diff = diff_heatmap(&groups[0], &groups[1]).map_err(|e| e.to_string())?;
    ensure(diff.total().abs() <= 1e-9, || format!("difference sums to {:e}", diff.total()))?;

    let whole = grid(&paths)?;
    let mut rng = SplitMix64::new(606);
    for trial in 0..10 {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for p in &paths {
            if rng.chance(0.5) { left.push(p.clone()) } else { right.push(p.clone()) }
        }
        let mut sum = grid(&left)?;
        sum.add(&grid(&right)?).map_err(|e| e.to_string())?;
        ensure(sum == whole, || format!("partition {trial}: union differs from sum"))?;
    }
    Ok(format!("mass rel error {worst:.1e}, diff sum {:.1e}, 10 partitions exact", diff.total().abs()))
}

fn pipeline(root: &Path) -> Result<(), String> {
    let s = |p: &str| root.join(p).to_string_lossy().into_owned();
    run_cli(&["synth", "--out", &s("corpus")])?;
    let inputs = ["--manifest", &s("corpus/manifest.csv"), "--registry", &s("corpus/registry.tsv"), "--aoa", &s("corpus/aoa.tsv"), "--wv", &s("corpus/vectors.txt")];
    let with = |head: &[&str], tail: &[&str]| -> Vec<String> {
        head.iter().chain(inputs.iter()).chain(tail).map(|x| x.to_string()).collect()
    };
    for args in [with(&["features"], &["--out", &s("features")]), with(&["cv"], &["--k", "10", "--out", &s("cv")])] {
        run_cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
    }
    run_cli(&["heatmap", "--manifest", &s("corpus/manifest.csv"), "--registry", &s("corpus/registry.tsv"), "--group-by", "label", "--out", &s("heat")])?;
    run_cli(&["scanpath", "--manifest", &s("corpus/manifest.csv"), "--registry", &s("corpus/registry.tsv"), "--out", &s("svg")])?;
    Ok(())
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn determinism(work: &Path) -> Check {
    let (a, b) = (work.join("run-a"), work.join("run-b"));
    pipeline(&a)?;
    pipeline(&b)?;
    let (fa, fb) = (files_under(&a), files_under(&b));
    ensure(fa.keys().eq(fb.keys()), || "runs produced different file sets".into())?;
    for (path, bytes) in &fa {
        ensure(fb[path] == *bytes, || format!("{} differs", path.display()))?;
    }
    let kinds: BTreeSet<String> = fa.keys().filter_map(|p| p.extension()).map(|e| e.to_string_lossy().into_owned()).collect();
    for ext in ["csv", "json", "svg", "pgm"] {
        ensure(kinds.contains(ext), || format!("no .{ext} artifact produced"))?;
    }
    Ok(format!("{} files identical", fa.len()))
}

fn registry_filtering() -> Check {
    let registry = default_registry();
    let pool: Vec<String> = registry.lemma_union().into_iter().chain(FILLER_WORDS.iter().map(|w| w.to_string())).collect();
    let strategy = proptest::sample::subsequence(pool.clone(), 0..=pool.len());
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |words| {
            let vocab: BTreeSet<String> = words.into_iter().collect();
            let filtered = registry.filter(&vocab);
            let union = filtered.lemma_union();
            if !union.is_subset(&vocab) || !union.is_subset(&registry.lemma_union()) {
                return Err(TestCaseError::fail("filtered lemmas escape the vocabulary"));
            }
            if filtered.filter(&vocab) != filtered {
                return Err(TestCaseError::fail("filter is not idempotent"));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(registry.filter(&BTreeSet::new()).is_empty(), || "empty vocabulary left AOIs".into())?;
    Ok("256 vocabularies".into())
}

fn main() {
    let work = tempfile::tempdir().expect("temp dir");
    let e2e = work.path().join("e2e");
    let det = work.path().join("det");
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Check>)> = vec![
        ("toy-1 AOI block stats", Duration::from_secs(1), Box::new(feature_oracle)),
        ("PCA vs Jacobi oracle", Duration::from_secs(5), Box::new(pca_oracle)),
        ("gradient vs central differences", Duration::from_secs(5), Box::new(gradient_check)),
        ("CV speaker independence and pooling", Duration::from_secs(10), Box::new(cv_integrity)),
        ("synthetic corpus F1 and ablation order", Duration::from_secs(60), Box::new(move || end_to_end(&e2e))),
        ("heatmap mass conservation and linearity", Duration::from_secs(10), Box::new(heatmap_conservation)),
        ("byte-identical pipeline reruns", Duration::from_secs(120), Box::new(move || determinism(&det))),
        ("registry filtering properties", Duration::from_secs(2), Box::new(registry_filtering)),
    ];

    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(_) if elapsed > *budget => ("FAIL", format!("took {elapsed:.2?}, budget {budget:?}")),
            Ok(detail) => ("PASS", detail),
            Err(why) => ("FAIL", why),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} {}. {name} [{elapsed:.2?} / {budget:?}] {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
