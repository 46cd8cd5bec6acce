//! Text artifacts: feature and prediction CSVs, metrics JSON, and the
//! ablation table. Every number is written with six decimals.

use std::fmt::Write as _;
use std::io;

use attnpath_core::classifier::{CvConfig, CvReport, FoldReport, Metrics};
use attnpath_core::features::{feature_names, FeatureVector};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Result;

/// `{:.6}` without a negative sign on zero.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn features_csv(header_comment: &str, rows: &[FeatureVector]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["session_id".to_string(), "speaker_id".into(), "label".into()];
    header.extend(feature_names());
    writer.write_record(&header)?;
    for fv in rows {
        let mut record = vec![fv.session_id.clone(), fv.speaker_id.clone(), fv.label.as_str().to_string()];
        record.extend(fv.values.iter().map(|&v| fixed6(v)));
        writer.write_record(&record)?;
    }
    with_comment(header_comment, writer)
}

pub fn predictions_csv(header_comment: &str, report: &CvReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["session_id", "speaker_id", "fold", "truth", "predicted", "probability"])?;
    for p in &report.predictions {
        writer.write_record([
            p.session_id.as_str(),
            p.speaker_id.as_str(),
            &p.fold.to_string(),
            p.truth.as_str(),
            p.predicted.as_str(),
            &fixed6(p.probability),
        ])?;
    }
    with_comment(header_comment, writer)
}

fn with_comment(comment: &str, writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    let body = String::from_utf8(bytes).expect("csv output is utf-8");
    Ok(format!("# {comment}\n{body}"))
}

/// Pretty JSON whose floats are always fixed six-decimal literals.
struct FixedFloats(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fixed6(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

pub fn to_fixed_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("json output is utf-8"))
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub seed: u64,
    pub lambda: f64,
    pub mask: String,
    pub averaging: String,
    pub threshold: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub train_corpora: Option<Vec<String>>,
    pub test_corpus: Option<String>,
}

impl From<&CvConfig> for ConfigEcho {
    fn from(c: &CvConfig) -> Self {
        Self {
            k: c.k,
            seed: c.seed,
            lambda: c.train.lambda,
            mask: c.mask.to_string(),
            averaging: c.averaging.to_string(),
            threshold: c.threshold,
            max_iter: c.train.max_iter,
            tol: c.train.tol,
            train_corpora: c.train_corpora.as_ref().map(|s| s.iter().cloned().collect()),
            test_corpus: c.test_corpus.clone(),
        }
    }
}

impl ConfigEcho {
    /// One-line `key=value` form for file header comments.
    pub fn inline(&self) -> String {
        let mut s = format!(
            "k={} seed={} lambda={} mask={} averaging={} threshold={} max_iter={} tol={}",
            self.k,
            self.seed,
            fixed6(self.lambda),
            self.mask,
            self.averaging,
            fixed6(self.threshold),
            self.max_iter,
            self.tol
        );
        if let Some(c) = &self.train_corpora {
            let _ = write!(s, " train_corpora={}", c.join("+"));
        }
        if let Some(c) = &self.test_corpus {
            let _ = write!(s, " test_corpus={c}");
        }
        s
    }
}

#[derive(Debug, Serialize)]
struct FoldJson<'a> {
    fold: usize,
    train_sessions: usize,
    test_sessions: usize,
    test_speakers: &'a [String],
    aois_after_filter: usize,
    converged: bool,
    iterations: usize,
    metrics: Option<Metrics>,
}

impl<'a> From<&'a FoldReport> for FoldJson<'a> {
    fn from(f: &'a FoldReport) -> Self {
        Self {
            fold: f.fold,
            train_sessions: f.train_sessions,
            test_sessions: f.test_sessions,
            test_speakers: &f.test_speakers,
            aois_after_filter: f.aois_after_filter,
            converged: f.converged,
            iterations: f.iterations,
            metrics: f.metrics,
        }
    }
}

#[derive(Debug, Serialize)]
struct MetricsJson<'a> {
    accuracy: f64,
    recall: f64,
    precision: f64,
    f1: f64,
    sessions: usize,
    per_fold: Vec<FoldJson<'a>>,
    config: ConfigEcho,
}

pub fn metrics_json(report: &CvReport, config: &CvConfig) -> Result<String> {
    let m = report.metrics;
    to_fixed_json(&MetricsJson {
        accuracy: m.accuracy,
        recall: m.recall,
        precision: m.precision,
        f1: m.f1,
        sessions: report.predictions.len(),
        per_fold: report.per_fold.iter().map(FoldJson::from).collect(),
        config: config.into(),
    })
}

/// Plain-text ablation table, one row per feature mask.
pub fn ablation_table(header_comment: &str, rows: &[(String, Metrics)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max("features".len());
    let mut out = format!("# {header_comment}\n");
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>8}  {:>8}  {:>8}",
        "features", "Ac", "Rc", "Pr", "F1"
    );
    for (name, m) in rows {
        let _ = writeln!(
            out,
            "{name:<width$}  {:>8}  {:>8}  {:>8}  {:>8}",
            fixed6(m.accuracy),
            fixed6(m.recall),
            fixed6(m.precision),
            fixed6(m.f1)
        );
    }
    out
}
