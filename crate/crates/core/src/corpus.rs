//! Corpus-level statistics: per-song metric tables, shared-edge histograms,
//! KL divergence of a generated corpus against a reference, checkpoint
//! ranking and five-number summaries.
//!
//! Divergences are `KL(reference || generated)` in nats over 32 equal-width
//! bins shared by both corpora, with every bin smoothed by a small epsilon.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::metrics::{compute_all_with_step, MetricId, MetricVector};
use crate::score::{Score, DEFAULT_STEP_TICKS};

pub const DEFAULT_BINS: usize = 32;
pub const DEFAULT_EPSILON: f64 = 1e-10;

/// Metric vectors keyed by song id, always iterated in sorted id order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusTable {
    corpus_id: String,
    rows: BTreeMap<String, MetricVector>,
}

impl CorpusTable {
    pub fn new(corpus_id: impl Into<String>, rows: BTreeMap<String, MetricVector>) -> Result<Self, Error> {
        if rows.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(CorpusTable { corpus_id: corpus_id.into(), rows })
    }

    pub fn corpus_id(&self) -> &str {
        &self.corpus_id
    }

    pub fn rows(&self) -> &BTreeMap<String, MetricVector> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Defined values of one metric in song-id order.
    pub fn values(&self, metric: MetricId) -> Vec<f64> {
        self.rows.values().filter_map(|v| v.get(metric)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec!["song_id"];
        header.extend(MetricId::ALL.map(MetricId::key));
        w.write_record(&header).expect("in-memory write");
        for (id, v) in &self.rows {
            let mut record = vec![id.clone()];
            record.extend(v.iter().map(|(_, x)| x.map(|x| x.to_string()).unwrap_or_default()));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Read a table written by [`CorpusTable::to_csv`]. Note counts are not
    /// stored in the CSV and come back as zero.
    pub fn from_csv(corpus_id: impl Into<String>, text: &str) -> Result<Self, Error> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
        if header.get(0) != Some("song_id") {
            return Err(Error::Format("first column must be song_id".into()));
        }
        let columns = metric_columns(&header, 1)?;
        let mut rows = BTreeMap::new();
        for record in r.records() {
            let record = record.map_err(|e| Error::Format(e.to_string()))?;
            let id = record.get(0).unwrap_or_default().to_string();
            let mut v = MetricVector::undefined();
            for &(i, metric) in &columns {
                v.set(metric, parse_cell(record.get(i).unwrap_or_default())?);
            }
            if rows.insert(id.clone(), v).is_some() {
                return Err(Error::DuplicateId(id));
            }
        }
        CorpusTable::new(corpus_id, rows)
    }
}

fn metric_columns(header: &csv::StringRecord, skip: usize) -> Result<Vec<(usize, MetricId)>, Error> {
    header
        .iter()
        .enumerate()
        .skip(skip)
        .map(|(i, name)| name.trim().parse::<MetricId>().map(|m| (i, m)).map_err(|e| Error::Format(e.to_string())))
        .collect()
}

fn parse_cell(cell: &str) -> Result<Option<f64>, Error> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    let x: f64 = cell.parse().map_err(|_| Error::Format(format!("`{cell}` is not a number")))?;
    Ok(x.is_finite().then_some(x))
}

/// Metric vector for every song. Song ids must be unique.
pub fn corpus_metrics(corpus_id: &str, songs: &[(String, Score)]) -> Result<CorpusTable, Error> {
    corpus_metrics_with_step(corpus_id, songs, DEFAULT_STEP_TICKS)
}

/// [`corpus_metrics`] with a custom polyphony timeline step.
pub fn corpus_metrics_with_step(
    corpus_id: &str,
    songs: &[(String, Score)],
    step_ticks: u64,
) -> Result<CorpusTable, Error> {
    if songs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let computed: Vec<(String, MetricVector)> = songs
        .par_iter()
        .map(|(id, score)| compute_all_with_step(score, step_ticks).map(|v| (id.clone(), v)))
        .collect::<Result<_, Error>>()?;
    let mut rows = BTreeMap::new();
    for (id, v) in computed {
        if rows.insert(id.clone(), v).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }
    CorpusTable::new(corpus_id, rows)
}

/// Bin edges shared by two samples.
#[derive(Debug, Clone, PartialEq)]
pub enum Edges {
    /// `bins + 1` ascending edges.
    Regular(Vec<f64>),
    /// Every pooled value equals this constant; one degenerate bin.
    Constant(f64),
}

impl Edges {
    pub fn bins(&self) -> usize {
        match self {
            Edges::Regular(e) => e.len() - 1,
            Edges::Constant(_) => 1,
        }
    }

    fn bin_of(&self, x: f64) -> usize {
        match self {
            Edges::Constant(_) => 0,
            Edges::Regular(e) => {
                let (lo, hi) = (e[0], e[e.len() - 1]);
                let bins = e.len() - 1;
                let i = ((x - lo) / (hi - lo) * bins as f64).floor();
                (i.max(0.0) as usize).min(bins - 1)
            }
        }
    }
}

/// Equal-width edges over the pooled `[min, max]` of both samples.
pub fn shared_edges(reference: &[f64], generated: &[f64], bins: usize) -> Result<Edges, Error> {
    if reference.is_empty() || generated.is_empty() {
        return Err(Error::NoDefinedValues);
    }
    if bins == 0 {
        return Err(Error::OutOfRange("bin count must be positive".into()));
    }
    let pooled = reference.iter().chain(generated);
    let lo = pooled.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(Edges::Constant(lo));
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    Ok(Edges::Regular(edges))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Edges,
    masses: Vec<f64>,
}

impl Histogram {
    /// Normalized bin counts of `values`. Values outside the edges fall in
    /// the nearest end bin.
    pub fn from_values(values: &[f64], edges: &Edges) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::NoDefinedValues);
        }
        let mut counts = vec![0.0; edges.bins()];
        for &x in values {
            counts[edges.bin_of(x)] += 1.0;
        }
        Histogram::from_masses(edges.clone(), counts)
    }

    /// Histogram from raw nonnegative weights, normalized to sum to one.
    pub fn from_masses(edges: Edges, masses: Vec<f64>) -> Result<Self, Error> {
        if masses.len() != edges.bins() {
            return Err(Error::MismatchedEdges);
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::OutOfRange("masses must be finite and nonnegative".into()));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::NoDefinedValues);
        }
        let masses = masses.into_iter().map(|m| m / total).collect();
        Ok(Histogram { edges, masses })
    }

    pub fn edges(&self) -> &Edges {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Add `epsilon` to every bin and renormalize.
    pub fn smoothed(&self, epsilon: f64) -> Vec<f64> {
        let total: f64 = self.masses.iter().map(|m| m + epsilon).sum();
        self.masses.iter().map(|m| (m + epsilon) / total).collect()
    }
}

/// `sum p ln(p / q)` after epsilon smoothing of both histograms.
pub fn kld(p: &Histogram, q: &Histogram, epsilon: f64) -> Result<f64, Error> {
    if p.edges != q.edges {
        return Err(Error::MismatchedEdges);
    }
    if let Edges::Constant(_) = p.edges {
        return Ok(0.0);
    }
    let ps = p.smoothed(epsilon);
    let qs = q.smoothed(epsilon);
    let d: f64 = ps.iter().zip(&qs).map(|(p, q)| p * (p / q).ln()).sum();
    // rounding can leave a few ulps below zero for near-identical inputs
    Ok(d.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KldReport {
    pub checkpoint_id: String,
    pub kld: BTreeMap<MetricId, Option<f64>>,
    pub reference_songs: usize,
    pub generated_songs: usize,
}

impl KldReport {
    pub fn get(&self, metric: MetricId) -> Option<f64> {
        self.kld.get(&metric).copied().flatten()
    }

    pub fn to_json(&self) -> String {
        let doc = KldReportDoc {
            checkpoint_id: self.checkpoint_id.clone(),
            kld: ordered_metric_map(&self.kld),
            song_counts: SongCounts { reference: self.reference_songs, generated: self.generated_songs },
        };
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let doc: KldReportDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let mut kld = BTreeMap::new();
        for (key, value) in doc.kld {
            let metric: MetricId =
                key.parse().map_err(|e: crate::metrics::UnknownMetric| Error::Format(e.to_string()))?;
            if !value.is_null() && !value.is_number() {
                return Err(Error::Format(format!("kld.{key} must be a number or null")));
            }
            kld.insert(metric, value.as_f64().filter(|v| v.is_finite()));
        }
        Ok(KldReport {
            checkpoint_id: doc.checkpoint_id,
            kld,
            reference_songs: doc.song_counts.reference,
            generated_songs: doc.song_counts.generated,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct KldReportDoc {
    checkpoint_id: String,
    kld: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    song_counts: SongCounts,
}

#[derive(Serialize, Deserialize, Default)]
struct SongCounts {
    reference: usize,
    generated: usize,
}

fn ordered_metric_map<T: Serialize>(map: &BTreeMap<MetricId, T>) -> serde_json::Map<String, serde_json::Value> {
    map.iter().map(|(m, v)| (m.key().to_string(), serde_json::to_value(v).expect("serializable"))).collect()
}

/// Rows of `checkpoint_id,<metric keys...>`, one per report, undefined
/// divergences as empty cells.
pub fn reports_to_csv(reports: &[KldReport]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["checkpoint_id"];
    header.extend(MetricId::ALL.map(MetricId::key));
    w.write_record(&header).expect("in-memory write");
    for r in reports {
        let mut record = vec![r.checkpoint_id.clone()];
        record.extend(MetricId::ALL.map(|m| r.get(m).map(|x| x.to_string()).unwrap_or_default()));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Inverse of [`reports_to_csv`]; metric columns may appear in any order.
pub fn reports_from_csv(text: &str) -> Result<Vec<KldReport>, Error> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if header.get(0) != Some("checkpoint_id") {
        return Err(Error::Format("first column must be checkpoint_id".into()));
    }
    let columns = metric_columns(&header, 1)?;
    let mut reports = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        let mut kld = BTreeMap::new();
        for &(i, metric) in &columns {
            kld.insert(metric, parse_cell(record.get(i).unwrap_or_default())?);
        }
        reports.push(KldReport {
            checkpoint_id: record.get(0).unwrap_or_default().to_string(),
            kld,
            reference_songs: 0,
            generated_songs: 0,
        });
    }
    Ok(reports)
}

/// Per-metric divergence of `generated` from `reference`. A metric with no
/// defined value on either side is reported as undefined.
pub fn compare(
    reference: &CorpusTable,
    generated: &CorpusTable,
    bins: usize,
    epsilon: f64,
) -> Result<KldReport, Error> {
    if reference.is_empty() || generated.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut kld_map = BTreeMap::new();
    for metric in MetricId::ALL {
        let ref_values = reference.values(metric);
        let gen_values = generated.values(metric);
        let value = if ref_values.is_empty() || gen_values.is_empty() {
            None
        } else {
            let edges = shared_edges(&ref_values, &gen_values, bins)?;
            let p = Histogram::from_values(&ref_values, &edges)?;
            let q = Histogram::from_values(&gen_values, &edges)?;
            Some(kld(&p, &q, epsilon)?)
        };
        kld_map.insert(metric, value);
    }
    Ok(KldReport {
        checkpoint_id: generated.corpus_id().to_string(),
        kld: kld_map,
        reference_songs: reference.len(),
        generated_songs: generated.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub per_metric_winner: BTreeMap<MetricId, Option<String>>,
    pub overall_winner: Option<String>,
    pub overall_means: BTreeMap<String, f64>,
}

impl RankReport {
    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "per_metric_winner": ordered_metric_map(&self.per_metric_winner),
            "overall_winner": self.overall_winner,
            "overall_means": self.overall_means,
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }

    /// Two columns: `metric,winner`, with the overall winner on the last row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["metric", "winner", "mean_kld"]).expect("in-memory write");
        for (m, winner) in &self.per_metric_winner {
            w.write_record([m.key(), winner.as_deref().unwrap_or(""), ""]).expect("in-memory write");
        }
        let overall = self.overall_winner.as_deref().unwrap_or("");
        let mean = self.overall_means.get(overall).map(|m| m.to_string()).unwrap_or_default();
        w.write_record(["overall", overall, mean.as_str()]).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Argmin per metric and argmin of the mean divergence over each
/// checkpoint's defined metrics. Ties go to the lexicographically smallest
/// checkpoint id.
pub fn rank_checkpoints(reports: &[KldReport]) -> Result<RankReport, Error> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports(reports.len()));
    }
    let mut sorted: Vec<&KldReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.checkpoint_id.cmp(&b.checkpoint_id));
    if let Some(w) = sorted.windows(2).find(|w| w[0].checkpoint_id == w[1].checkpoint_id) {
        return Err(Error::DuplicateId(w[0].checkpoint_id.clone()));
    }

    let argmin = |scores: &mut dyn Iterator<Item = (&str, f64)>| {
        let mut best: Option<(&str, f64)> = None;
        for (id, x) in scores {
            if best.is_none_or(|(_, b)| x < b) {
                best = Some((id, x));
            }
        }
        best.map(|(id, _)| id.to_string())
    };

    let per_metric_winner = MetricId::ALL
        .into_iter()
        .map(|m| {
            let mut scores = sorted.iter().filter_map(|r| r.get(m).map(|x| (r.checkpoint_id.as_str(), x)));
            (m, argmin(&mut scores))
        })
        .collect();

    let overall_means: BTreeMap<String, f64> = sorted
        .iter()
        .filter_map(|r| {
            let defined: Vec<f64> = MetricId::ALL.iter().filter_map(|&m| r.get(m)).collect();
            (!defined.is_empty()).then(|| (r.checkpoint_id.clone(), defined.iter().sum::<f64>() / defined.len() as f64))
        })
        .collect();
    let overall_winner = argmin(&mut overall_means.iter().map(|(id, x)| (id.as_str(), *x)));

    Ok(RankReport { per_metric_winner, overall_winner, overall_means })
}

/// Minimum, quartiles and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quartiles by linear interpolation between order statistics at rank
/// `q * (n - 1)` (the inclusive method).
pub fn box_stats(values: &[f64]) -> Result<FiveNumber, Error> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let rank = q * (v.len() - 1) as f64;
        let lo = rank.floor() as usize;
        let hi = rank.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (rank - lo as f64)
    };
    Ok(FiveNumber { min: v[0], q1: at(0.25), median: at(0.5), q3: at(0.75), max: v[v.len() - 1] })
}
