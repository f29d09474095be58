//! Per-song symbolic metrics.
//!
//! Pitch metrics pool every pitched (non-drum) track and count each note
//! once regardless of duration. Polyphony metrics sample the active-pitch
//! timeline instead. Entropies are in bits. A metric whose input is empty is
//! undefined (`None`) rather than zero.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::score::{active_pitch_timeline, Score, DEFAULT_STEP_TICKS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricId {
    Pce,
    Pe,
    Npc,
    Np,
    Pr,
    Sc,
    Pol,
    PolR,
    Dpc,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::Pce,
        MetricId::Pe,
        MetricId::Npc,
        MetricId::Np,
        MetricId::Pr,
        MetricId::Sc,
        MetricId::Pol,
        MetricId::PolR,
        MetricId::Dpc,
    ];

    /// Lower-case column key used in CSV and JSON.
    pub fn key(self) -> &'static str {
        match self {
            MetricId::Pce => "pce",
            MetricId::Pe => "pe",
            MetricId::Npc => "npc",
            MetricId::Np => "np",
            MetricId::Pr => "pr",
            MetricId::Sc => "sc",
            MetricId::Pol => "pol",
            MetricId::PolR => "polr",
            MetricId::Dpc => "dpc",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricId::Pce => "PCE",
            MetricId::Pe => "PE",
            MetricId::Npc => "NPC",
            MetricId::Np => "NP",
            MetricId::Pr => "PR",
            MetricId::Sc => "SC",
            MetricId::Pol => "Pol",
            MetricId::PolR => "PolR",
            MetricId::Dpc => "DPC",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric `{0}`")]
pub struct UnknownMetric(pub String);

impl FromStr for MetricId {
    type Err = UnknownMetric;

    /// Accepts the column key or the label, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        MetricId::ALL.into_iter().find(|m| m.key() == lower).ok_or_else(|| UnknownMetric(s.to_string()))
    }
}

/// The nine metric values of one song, plus the note counts they came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricVector {
    values: [Option<f64>; 9],
    pub pitched_notes: usize,
    pub drum_onsets: usize,
}

impl MetricVector {
    pub fn get(&self, metric: MetricId) -> Option<f64> {
        self.values[metric.index()]
    }

    pub fn set(&mut self, metric: MetricId, value: Option<f64>) {
        self.values[metric.index()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (MetricId, Option<f64>)> + '_ {
        MetricId::ALL.into_iter().map(|m| (m, self.get(m)))
    }

    /// Vector with every metric undefined and zero counts.
    pub fn undefined() -> Self {
        MetricVector { values: [None; 9], pitched_notes: 0, drum_onsets: 0 }
    }
}

pub fn pitch_class_histogram(score: &Score) -> [u64; 12] {
    let mut hist = [0u64; 12];
    for e in score.pitched_events() {
        hist[(e.pitch % 12) as usize] += 1;
    }
    hist
}

fn pitch_histogram(score: &Score) -> [u64; 128] {
    let mut hist = [0u64; 128];
    for e in score.pitched_events() {
        hist[e.pitch as usize] += 1;
    }
    hist
}

/// Shannon entropy in bits, summed over sorted counts so that permuting the
/// bins gives a bit-identical result.
fn entropy_bits(counts: &[u64]) -> Option<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return None;
    }
    let mut nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    nonzero.sort_unstable();
    let total = total as f64;
    Some(
        nonzero
            .iter()
            .map(|&c| {
                let p = c as f64 / total;
                p * (total / c as f64).log2()
            })
            .sum(),
    )
}

pub fn pitch_class_entropy(score: &Score) -> Option<f64> {
    entropy_bits(&pitch_class_histogram(score))
}

pub fn pitch_entropy(score: &Score) -> Option<f64> {
    entropy_bits(&pitch_histogram(score))
}

pub fn n_pitch_classes(score: &Score) -> Option<usize> {
    let hist = pitch_class_histogram(score);
    let n = hist.iter().filter(|&&c| c > 0).count();
    (n > 0).then_some(n)
}

pub fn n_pitches(score: &Score) -> Option<usize> {
    let hist = pitch_histogram(score);
    let n = hist.iter().filter(|&&c| c > 0).count();
    (n > 0).then_some(n)
}

/// Highest minus lowest pitch, in semitones.
pub fn pitch_range(score: &Score) -> Option<u8> {
    let (lo, hi) = score.pitched_events().fold(None, |acc: Option<(u8, u8)>, e| match acc {
        None => Some((e.pitch, e.pitch)),
        Some((lo, hi)) => Some((lo.min(e.pitch), hi.max(e.pitch))),
    })?;
    Some(hi - lo)
}

const MAJOR: [u8; 7] = [0, 2, 4, 5, 7, 9, 11];
const NATURAL_MINOR: [u8; 7] = [0, 2, 3, 5, 7, 8, 10];

/// Best fraction of notes inside one of the 24 major / natural-minor scales.
/// The minor family is a rotation of the major one, so only 12 pitch-class
/// sets are distinct.
pub fn scale_consistency(score: &Score) -> Option<f64> {
    let hist = pitch_class_histogram(score);
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return None;
    }
    let best = (0..12u8)
        .flat_map(|root| [MAJOR, NATURAL_MINOR].map(|scale| (root, scale)))
        .map(|(root, scale)| scale.iter().map(|&d| hist[((root + d) % 12) as usize]).sum::<u64>())
        .max()
        .unwrap_or(0);
    Some(best as f64 / total as f64)
}

/// (mean sounding count, fraction with two or more) over non-silent steps.
fn polyphony_stats(score: &Score, step_ticks: u64) -> Result<Option<(f64, f64)>, Error> {
    let timeline = active_pitch_timeline(score, step_ticks)?;
    let sounding: Vec<usize> = timeline.iter().map(|s| s.len()).filter(|&n| n > 0).collect();
    if sounding.is_empty() {
        return Ok(None);
    }
    let steps = sounding.len() as f64;
    let voices: usize = sounding.iter().sum();
    let poly = sounding.iter().filter(|&&n| n >= 2).count();
    Ok(Some((voices as f64 / steps, poly as f64 / steps)))
}

pub fn polyphony(score: &Score) -> Option<f64> {
    polyphony_stats(score, DEFAULT_STEP_TICKS).ok().flatten().map(|(pol, _)| pol)
}

pub fn polyphony_rate(score: &Score) -> Option<f64> {
    polyphony_stats(score, DEFAULT_STEP_TICKS).ok().flatten().map(|(_, rate)| rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Meter {
    /// Eighth-note grid, 480 ticks.
    Duple,
    /// Triplet-eighth grid, 320 ticks.
    Triple,
}

impl Meter {
    pub fn grid_ticks(self) -> u64 {
        match self {
            Meter::Duple => 480,
            Meter::Triple => 320,
        }
    }
}

/// Fraction of drum hits whose onset lies on the meter's grid.
pub fn drum_in_pattern_rate(score: &Score, meter: Meter) -> Option<f64> {
    let drums = score.drum_events();
    if drums.is_empty() {
        return None;
    }
    let grid = meter.grid_ticks();
    let on_grid = drums.iter().filter(|e| e.onset % grid == 0).count();
    Some(on_grid as f64 / drums.len() as f64)
}

pub fn drum_pattern_consistency(score: &Score) -> Option<f64> {
    let duple = drum_in_pattern_rate(score, Meter::Duple)?;
    let triple = drum_in_pattern_rate(score, Meter::Triple)?;
    Some(duple.max(triple))
}

pub fn compute_all(score: &Score) -> MetricVector {
    compute_all_with_step(score, DEFAULT_STEP_TICKS).expect("default step divides 960")
}

/// All nine metrics, sampling polyphony every `step_ticks`.
pub fn compute_all_with_step(score: &Score, step_ticks: u64) -> Result<MetricVector, Error> {
    let poly = polyphony_stats(score, step_ticks)?;
    let mut v = MetricVector::undefined();
    v.set(MetricId::Pce, pitch_class_entropy(score));
    v.set(MetricId::Pe, pitch_entropy(score));
    v.set(MetricId::Npc, n_pitch_classes(score).map(|n| n as f64));
    v.set(MetricId::Np, n_pitches(score).map(|n| n as f64));
    v.set(MetricId::Pr, pitch_range(score).map(f64::from));
    v.set(MetricId::Sc, scale_consistency(score));
    v.set(MetricId::Pol, poly.map(|(p, _)| p));
    v.set(MetricId::PolR, poly.map(|(_, r)| r));
    v.set(MetricId::Dpc, drum_pattern_consistency(score));
    v.pitched_notes = score.pitched_events().count();
    v.drum_onsets = score.drum_events().len();
    Ok(v)
}
