//! Command-line front end.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use attnpath_core::classifier::{
    extract_fold_features, plan_folds, run_fold, Averaging, CvConfig, CvReport, TrainConfig,
};
use attnpath_core::features::{AoaTable, FeatureMask, WordVectorTable};
use attnpath_core::heatmap::{accumulate_heatmap, diff_heatmap, HeatGrid};
use attnpath_core::scanpath::build_scanpath;
use attnpath_core::synth::{generate_corpus, CorpusSpec};
use attnpath_core::{AoiRegistry, Scanpath, SessionRecord};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assets::{default_aoa, default_registry, default_word_vectors};
use crate::corpus::{load_corpus, read_text, stage_corpus};
use crate::error::{Error, Result};
use crate::formats::{
    ablation_table, features_csv, fixed6, metrics_json, predictions_csv, to_fixed_json, ConfigEcho,
};
use crate::output::StagedDir;
use crate::parallel::{par_map, thread_count};
use crate::pgm::{heat_pgm, signed_pgms};
use crate::registry_io::load_registry;
use crate::svg::{render_scanpath_svg, SvgStyle};
use crate::tables::{parse_aoa, parse_word_vectors};

#[derive(Debug, Parser)]
#[command(name = "attnpath", version, about = "Pseudo eye-tracking from timed picture descriptions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic AD/HC corpus directory.
    Synth(SynthArgs),
    /// Write the 68-column feature matrix for every session.
    Features(FeaturesArgs),
    /// Speaker-independent k-fold cross-validation.
    Cv(CvArgs),
    /// One SVG scanpath per session.
    Scanpath(ScanpathArgs),
    /// Group heatmaps and their difference as PGM images.
    Heatmap(HeatmapArgs),
    /// Cross-validated ablation table over feature masks.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    /// AOI registry to describe (bundled default if omitted).
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    speakers_per_class: usize,
    #[arg(long, default_value_t = 2)]
    sessions_per_speaker: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    hc_extra_aois: usize,
    #[arg(long, default_value_t = 2.5)]
    ad_pause_multiplier: f64,
    #[arg(long, default_value_t = 0.5)]
    ad_visit_drop_prob: f64,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// AOI registry TSV (bundled default if omitted).
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Age-of-acquisition TSV (bundled default if omitted).
    #[arg(long)]
    aoa: Option<PathBuf>,
    /// Word vectors in text format (synthetic stand-ins if omitted).
    #[arg(long)]
    wv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "all")]
    mask: String,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value = "macro")]
    averaging: String,
    /// Train only on sessions of this corpus (repeatable).
    #[arg(long = "train-corpus")]
    train_corpus: Vec<String>,
    /// Score only sessions of this corpus.
    #[arg(long)]
    test_corpus: Option<String>,
}

#[derive(Debug, Args)]
struct CvArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = "all")]
    mask: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated feature masks, one table row each.
    #[arg(long, default_value = "wv,aoa,aoi,aoi+aoa,aoi+wv,all")]
    masks: String,
    /// Also write report.txt into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanpathArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 6.0)]
    base_px: f64,
    #[arg(long, default_value_t = 40.0)]
    scale_px: f64,
    /// Image referenced (not embedded) under each scanpath.
    #[arg(long)]
    background: Option<String>,
    /// Render only these sessions (repeatable).
    #[arg(long)]
    session: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupBy {
    Label,
    Corpus,
}

#[derive(Debug, Args)]
struct HeatmapArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = GroupBy::Label)]
    group_by: GroupBy,
    /// Grid cell edge in canvas pixels.
    #[arg(long, default_value_t = 10)]
    cell_size: u32,
    /// Gaussian sigma as a fraction of the AOI radius.
    #[arg(long, default_value_t = 0.5)]
    sigma_scale: f64,
    /// Difference pair `A:B` (defaults to AD:HC when grouping by label).
    #[arg(long)]
    diff: Option<String>,
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Features(a) => features(a),
        Command::Cv(a) => cv(a),
        Command::Scanpath(a) => scanpath(a),
        Command::Heatmap(a) => heatmap(a),
        Command::Report(a) => report(a),
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Usage(format!("{what} {} is not a readable file", path.display())))
    }
}

fn check_out_dir(out: &Path) -> Result<()> {
    if out.exists() && !out.is_dir() {
        return Err(Error::Usage(format!("output {} exists and is not a directory", out.display())));
    }
    Ok(())
}

fn load_registry_arg(path: Option<&Path>) -> Result<AoiRegistry> {
    match path {
        Some(p) => load_registry(&read_text(p)?).map_err(|e| Error::in_file(p, e)),
        None => Ok(default_registry()),
    }
}

struct Inputs {
    sessions: Vec<SessionRecord>,
    registry: AoiRegistry,
    aoa: AoaTable,
    vectors: WordVectorTable,
}

impl InputArgs {
    fn validate(&self) -> Result<()> {
        require_file(&self.manifest, "manifest")?;
        for (path, what) in [(&self.registry, "registry"), (&self.aoa, "aoa table"), (&self.wv, "word vectors")] {
            if let Some(p) = path {
                require_file(p, what)?;
            }
        }
        Ok(())
    }

    fn load(&self) -> Result<Inputs> {
        let registry = load_registry_arg(self.registry.as_deref())?;
        let aoa = match &self.aoa {
            Some(p) => parse_aoa(&read_text(p)?).map_err(|e| Error::in_file(p, e))?,
            None => default_aoa(),
        };
        let vectors = match &self.wv {
            Some(p) => parse_word_vectors(&read_text(p)?).map_err(|e| Error::in_file(p, e))?,
            None => default_word_vectors(&registry)?,
        };
        Ok(Inputs {
            sessions: load_corpus(&self.manifest)?,
            registry,
            aoa,
            vectors,
        })
    }
}

fn parse_mask(s: &str) -> Result<FeatureMask> {
    s.parse().map_err(|e: attnpath_core::Error| Error::Usage(e.to_string()))
}

impl ModelArgs {
    fn config(&self, mask: FeatureMask) -> Result<CvConfig> {
        let averaging: Averaging = self
            .averaging
            .parse()
            .map_err(|e: attnpath_core::Error| Error::Usage(e.to_string()))?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Usage(format!("--lambda {} must be >= 0", self.lambda)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Usage(format!("--tol {} must be > 0", self.tol)));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Usage(format!("--threshold {} must lie in [0, 1]", self.threshold)));
        }
        Ok(CvConfig {
            k: self.k,
            seed: self.seed,
            train: TrainConfig {
                lambda: self.lambda,
                max_iter: self.max_iter,
                tol: self.tol,
            },
            threshold: self.threshold,
            mask,
            averaging,
            train_corpora: (!self.train_corpus.is_empty())
                .then(|| self.train_corpus.iter().cloned().collect::<BTreeSet<_>>()),
            test_corpus: self.test_corpus.clone(),
        })
    }
}

#[derive(Serialize)]
struct SynthEcho {
    n_speakers_per_class: usize,
    sessions_per_speaker: usize,
    seed: u64,
    hc_extra_aois: usize,
    ad_pause_multiplier: f64,
    ad_visit_drop_prob: f64,
    sessions: usize,
}

fn synth(a: SynthArgs) -> Result<()> {
    if let Some(p) = &a.registry {
        require_file(p, "registry")?;
    }
    check_out_dir(&a.out)?;
    let registry = load_registry_arg(a.registry.as_deref())?;
    let spec = CorpusSpec {
        n_speakers_per_class: a.speakers_per_class,
        sessions_per_speaker: a.sessions_per_speaker,
        seed: a.seed,
        hc_extra_aois: a.hc_extra_aois,
        ad_pause_multiplier: a.ad_pause_multiplier,
        ad_visit_drop_prob: a.ad_visit_drop_prob,
    };
    let sessions = generate_corpus(&spec, &registry)?;
    let vectors = default_word_vectors(&registry)?;
    let out = StagedDir::new(&a.out)?;
    stage_corpus(&out, &sessions, &registry, &default_aoa(), &vectors)?;
    let echo = SynthEcho {
        n_speakers_per_class: spec.n_speakers_per_class,
        sessions_per_speaker: spec.sessions_per_speaker,
        seed: spec.seed,
        hc_extra_aois: spec.hc_extra_aois,
        ad_pause_multiplier: spec.ad_pause_multiplier,
        ad_visit_drop_prob: spec.ad_visit_drop_prob,
        sessions: sessions.len(),
    };
    out.write("synth.json", to_fixed_json(&echo)?)?;
    let dir = out.commit()?;
    println!("wrote {} sessions to {}", sessions.len(), dir.display());
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    a.input.validate()?;
    check_out_dir(&a.out)?;
    let mask = parse_mask(&a.mask)?;
    let inputs = a.input.load()?;
    let all: Vec<&SessionRecord> = inputs.sessions.iter().collect();
    let (rows, aois) = extract_fold_features(&all, &all, &inputs.registry, &inputs.aoa, &inputs.vectors, mask)?;
    let comment = format!(
        "attnpath features mask={mask} sessions={} aois_after_filter={aois} vocabulary=manifest",
        rows.len()
    );
    let out = StagedDir::new(&a.out)?;
    out.write("features.csv", features_csv(&comment, &rows)?)?;
    let dir = out.commit()?;
    println!("wrote {} feature rows to {}", rows.len(), dir.join("features.csv").display());
    Ok(())
}

/// Cross-validation with folds spread over worker threads and pooled in
/// fold order.
fn cross_validate(inputs: &Inputs, config: &CvConfig, threads: usize) -> Result<CvReport> {
    let ids: BTreeSet<&str> = inputs.sessions.iter().map(|s| s.session_id.as_str()).collect();
    if ids.len() != inputs.sessions.len() {
        return Err(Error::Usage("manifest has duplicate session ids".into()));
    }
    let plan = plan_folds(&inputs.sessions, config.k, config.seed)?;
    let folds: Vec<usize> = (0..config.k).collect();
    let outcomes = par_map(&folds, threads, |&fold| {
        run_fold(&inputs.sessions, &plan, fold, &inputs.registry, &inputs.aoa, &inputs.vectors, config)
    })
    .into_iter()
    .collect::<attnpath_core::Result<Vec<_>>>()?;
    Ok(CvReport::from_outcomes(plan, inputs.sessions.len(), outcomes, config.averaging)?)
}

fn cv(a: CvArgs) -> Result<()> {
    a.input.validate()?;
    check_out_dir(&a.out)?;
    let config = a.model.config(parse_mask(&a.mask)?)?;
    let inputs = a.input.load()?;
    let report = cross_validate(&inputs, &config, thread_count())?;
    let echo = ConfigEcho::from(&config);
    let out = StagedDir::new(&a.out)?;
    out.write("metrics.json", metrics_json(&report, &config)?)?;
    out.write(
        "predictions.csv",
        predictions_csv(&format!("attnpath cv {}", echo.inline()), &report)?,
    )?;
    let dir = out.commit()?;
    let m = report.metrics;
    println!(
        "accuracy {} recall {} precision {} f1 {} ({} sessions, {} folds) -> {}",
        fixed6(m.accuracy),
        fixed6(m.recall),
        fixed6(m.precision),
        fixed6(m.f1),
        report.predictions.len(),
        config.k,
        dir.display()
    );
    Ok(())
}

fn report(a: ReportArgs) -> Result<()> {
    a.input.validate()?;
    if let Some(out) = &a.out {
        check_out_dir(out)?;
    }
    let masks = a
        .masks
        .split(',')
        .map(|m| parse_mask(m).map(|mask| (m.trim().to_string(), mask)))
        .collect::<Result<Vec<_>>>()?;
    if masks.is_empty() {
        return Err(Error::Usage("--masks is empty".into()));
    }
    let base = a.model.config(FeatureMask::ALL)?;
    let inputs = a.input.load()?;
    let threads = thread_count();
    let mut rows = Vec::with_capacity(masks.len());
    for (name, mask) in masks {
        let config = CvConfig { mask, ..base.clone() };
        rows.push((name, cross_validate(&inputs, &config, threads)?.metrics));
    }
    let mut echo = ConfigEcho::from(&base);
    echo.mask = "per-row".into();
    let table = ablation_table(&format!("attnpath report {}", echo.inline()), &rows);
    print!("{table}");
    if let Some(out) = &a.out {
        let staged = StagedDir::new(out)?;
        staged.write("report.txt", &table)?;
        staged.commit()?;
    }
    Ok(())
}

fn scanpaths(sessions: &[SessionRecord], registry: &AoiRegistry) -> Vec<Scanpath> {
    par_map(sessions, thread_count(), |s| build_scanpath(&s.session_id, &s.tokens, registry))
}

fn scanpath(a: ScanpathArgs) -> Result<()> {
    require_file(&a.manifest, "manifest")?;
    if let Some(p) = &a.registry {
        require_file(p, "registry")?;
    }
    check_out_dir(&a.out)?;
    let registry = load_registry_arg(a.registry.as_deref())?;
    let mut sessions = load_corpus(&a.manifest)?;
    if !a.session.is_empty() {
        let known: BTreeSet<&str> = sessions.iter().map(|s| s.session_id.as_str()).collect();
        if let Some(missing) = a.session.iter().find(|s| !known.contains(s.as_str())) {
            return Err(Error::Usage(format!("session {missing:?} is not in the manifest")));
        }
        sessions.retain(|s| a.session.contains(&s.session_id));
    }
    let style = SvgStyle {
        base_px: a.base_px,
        scale_px_per_s: a.scale_px,
        background: a.background.clone(),
    };
    let paths = scanpaths(&sessions, &registry);
    let svgs = par_map(&paths, thread_count(), |p| render_scanpath_svg(p, &registry, &style));
    let out = StagedDir::new(&a.out)?;
    for (path, svg) in paths.iter().zip(&svgs) {
        out.write(format!("{}.scanpath.svg", path.session_id), svg)?;
    }
    let dir = out.commit()?;
    println!("wrote {} scanpaths to {}", svgs.len(), dir.display());
    Ok(())
}

fn heatmap(a: HeatmapArgs) -> Result<()> {
    require_file(&a.manifest, "manifest")?;
    if let Some(p) = &a.registry {
        require_file(p, "registry")?;
    }
    check_out_dir(&a.out)?;
    if a.cell_size == 0 {
        return Err(Error::Usage("--cell-size must be >= 1".into()));
    }
    let diff_pair = match (&a.diff, a.group_by) {
        (Some(spec), _) => {
            let (x, y) = spec
                .split_once(':')
                .ok_or_else(|| Error::Usage(format!("--diff {spec:?} must look like A:B")))?;
            Some((x.to_string(), y.to_string()))
        }
        (None, GroupBy::Label) => Some(("AD".to_string(), "HC".to_string())),
        (None, GroupBy::Corpus) => None,
    };
    let registry = load_registry_arg(a.registry.as_deref())?;
    let sessions = load_corpus(&a.manifest)?;
    let paths = scanpaths(&sessions, &registry);

    let mut groups: BTreeMap<String, Vec<Scanpath>> = BTreeMap::new();
    for (s, p) in sessions.iter().zip(paths) {
        let key = match a.group_by {
            GroupBy::Label => s.label.as_str().to_string(),
            GroupBy::Corpus => s.corpus.clone(),
        };
        groups.entry(key).or_default().push(p);
    }
    let threads = thread_count();
    let names: Vec<&String> = groups.keys().collect();
    let grids: BTreeMap<&String, HeatGrid> = names
        .iter()
        .zip(par_map(&names, threads, |n| {
            accumulate_heatmap(&groups[*n], &registry, a.cell_size, a.sigma_scale)
        }))
        .map(|(n, g)| g.map(|g| (*n, g)))
        .collect::<attnpath_core::Result<_>>()?;

    let config = format!(
        "attnpath heatmap group_by={} cell_size={} sigma_scale={} canvas={}x{}",
        match a.group_by {
            GroupBy::Label => "label",
            GroupBy::Corpus => "corpus",
        },
        a.cell_size,
        fixed6(a.sigma_scale),
        fixed6(registry.canvas_w()),
        fixed6(registry.canvas_h()),
    );
    let out = StagedDir::new(&a.out)?;
    for (name, grid) in &grids {
        let comment = format!(
            "{config}\ngroup={name} sessions={} total_mass_s={}",
            groups[*name].len(),
            fixed6(grid.total())
        );
        out.write(format!("{name}.heat.pgm"), heat_pgm(grid, &comment))?;
    }
    if let Some((x, y)) = diff_pair {
        let lookup = |n: &str| {
            grids
                .iter()
                .find(|(k, _)| k.as_str() == n)
                .map(|(_, g)| g)
                .ok_or_else(|| Error::Usage(format!("no sessions in group {n:?} for --diff")))
        };
        let signed = diff_heatmap(lookup(&x)?, lookup(&y)?)?;
        let comment = format!("{config}\ndiff={x}-minus-{y} normalized=unit_mass");
        let (pos, neg) = signed_pgms(&signed, &comment);
        out.write(format!("{x}-minus-{y}.pos.pgm"), pos)?;
        out.write(format!("{x}-minus-{y}.neg.pgm"), neg)?;
    }
    let dir = out.commit()?;
    println!("wrote {} group heatmaps to {}", grids.len(), dir.display());
    Ok(())
}
