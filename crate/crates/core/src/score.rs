//! Timed score built from a token stream.
//!
//! Time starts at tick 0 and only `wait` advances it; every note between two
//! waits sounds at the same onset. A note sustains until the next onset on
//! the same string (for drums, the same key) or the end of its measure,
//! whichever comes first.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;
use crate::instrument::InstrumentId;
use crate::token::{validate_with, Diagnostic, Token, TokenStream, MAX_TEMPO, MIN_TEMPO, TICKS_PER_QUARTER};
use crate::tuning::{resolve_with_downtune, TuningSet};

pub const DEFAULT_STEP_TICKS: u64 = 40;
pub const KICK: u8 = 36;
pub const CRASH: u8 = 49;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteEvent {
    pub instrument: InstrumentId,
    pub onset: u64,
    pub duration: u64,
    /// MIDI pitch, or the percussion key for drums.
    pub pitch: u8,
    pub course: Option<u32>,
    pub fret: Option<u32>,
    pub effects: Vec<String>,
}

impl NoteEvent {
    pub fn end(&self) -> u64 {
        self.onset + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measure {
    pub index: usize,
    pub start_tick: u64,
    pub end_tick: u64,
    pub time_signature: (u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    tempo_bpm: u32,
    measures: Vec<Measure>,
    events: BTreeMap<InstrumentId, Vec<NoteEvent>>,
    source_instruments: BTreeSet<InstrumentId>,
    source: TokenStream,
}

impl Score {
    /// A score with no measures and no events.
    pub fn empty(tempo_bpm: u32) -> Self {
        Score {
            tempo_bpm,
            measures: Vec::new(),
            events: BTreeMap::new(),
            source_instruments: BTreeSet::new(),
            source: TokenStream::default(),
        }
    }

    pub fn tempo_bpm(&self) -> u32 {
        self.tempo_bpm
    }

    pub fn ticks_per_quarter(&self) -> u64 {
        TICKS_PER_QUARTER
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn events(&self) -> &BTreeMap<InstrumentId, Vec<NoteEvent>> {
        &self.events
    }

    pub fn track(&self, instrument: InstrumentId) -> &[NoteEvent] {
        self.events.get(&instrument).map_or(&[], Vec::as_slice)
    }

    pub fn source_instruments(&self) -> &BTreeSet<InstrumentId> {
        &self.source_instruments
    }

    pub fn source(&self) -> &TokenStream {
        &self.source
    }

    pub fn end_tick(&self) -> u64 {
        self.measures.last().map_or(0, |m| m.end_tick)
    }

    pub fn all_events(&self) -> impl Iterator<Item = &NoteEvent> {
        self.events.values().flatten()
    }

    pub fn pitched_events(&self) -> impl Iterator<Item = &NoteEvent> {
        self.all_events().filter(|e| e.instrument.is_pitched())
    }

    pub fn drum_events(&self) -> &[NoteEvent] {
        self.track(InstrumentId::Drums)
    }
}

/// Build a score. The stream must validate without errors under `tunings`.
/// A `downtune` token in the header replaces the downtune of every tuning.
pub fn build_score(stream: &TokenStream, tunings: &TuningSet) -> Result<Score, Error> {
    let errors: Vec<Diagnostic> = validate_with(stream, tunings).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(Error::InvalidStream(errors));
    }

    let mut downtune = None;
    let mut tempo_bpm = 0;
    let mut measures: Vec<Measure> = Vec::new();
    let mut events: Vec<NoteEvent> = Vec::new();
    let mut source_instruments = BTreeSet::new();
    let mut now: u64 = 0;
    let mut signature = (4, 4);

    for token in stream.tokens() {
        if let Some(instrument) = token.instrument() {
            source_instruments.insert(instrument);
        }
        match token {
            Token::Tempo(bpm) => tempo_bpm = *bpm,
            Token::Downtune(d) => downtune = Some(*d),
            Token::NewMeasure => {
                if let Some(last) = measures.last_mut() {
                    last.end_tick = now;
                }
                measures.push(Measure {
                    index: measures.len(),
                    start_tick: now,
                    end_tick: now,
                    time_signature: signature,
                });
            }
            Token::TimeSignature { numerator, denominator } => {
                signature = (*numerator, *denominator);
                if let Some(last) = measures.last_mut() {
                    last.time_signature = signature;
                }
            }
            Token::Wait(ticks) => now = now.checked_add(*ticks).ok_or(Error::TickOverflow)?,
            Token::Note { instrument, course, fret } => {
                let tuning = tunings
                    .get(*instrument)
                    .ok_or_else(|| Error::InvalidTuning(format!("no tuning for {instrument}")))?;
                events.push(NoteEvent {
                    instrument: *instrument,
                    onset: now,
                    duration: 0,
                    pitch: resolve_with_downtune(tuning, *course, *fret, downtune.unwrap_or(tuning.downtune()))?,
                    course: Some(*course),
                    fret: Some(*fret),
                    effects: Vec::new(),
                });
            }
            Token::DrumNote { key } => events.push(NoteEvent {
                instrument: InstrumentId::Drums,
                onset: now,
                duration: 0,
                pitch: *key,
                course: None,
                fret: None,
                effects: Vec::new(),
            }),
            Token::Effect { name, .. } => {
                // validation guarantees the previous token was this note
                if let Some(last) = events.last_mut() {
                    last.effects.push(name.clone());
                }
            }
            Token::End => break,
            Token::Artist(_) | Token::Start | Token::Rest(_) => {}
        }
    }
    if let Some(last) = measures.last_mut() {
        last.end_tick = now;
    }

    // next onset per (instrument, string-or-key)
    let mut onsets: BTreeMap<(InstrumentId, u32), Vec<u64>> = BTreeMap::new();
    for e in &events {
        onsets.entry(voice_key(e)).or_default().push(e.onset);
    }
    for e in &mut events {
        let measure_end = measure_at(&measures, e.onset).map_or(e.onset, |m| m.end_tick);
        let voice = &onsets[&voice_key(e)];
        let next = voice[voice.partition_point(|&t| t <= e.onset)..].first().copied();
        let end = next.map_or(measure_end, |n| n.min(measure_end));
        e.duration = end - e.onset;
    }

    let mut by_instrument: BTreeMap<InstrumentId, Vec<NoteEvent>> = BTreeMap::new();
    for e in events {
        by_instrument.entry(e.instrument).or_default().push(e);
    }
    Ok(Score { tempo_bpm, measures, events: by_instrument, source_instruments, source: stream.clone() })
}

fn voice_key(e: &NoteEvent) -> (InstrumentId, u32) {
    (e.instrument, e.course.unwrap_or(e.pitch as u32))
}

fn measure_at(measures: &[Measure], tick: u64) -> Option<&Measure> {
    let i = measures.partition_point(|m| m.start_tick <= tick);
    measures[..i].last().filter(|m| tick < m.end_tick)
}

/// Sounding pitched (non-drum) pitches at every `step_ticks` step from 0 up
/// to the end of the song.
pub fn active_pitch_timeline(score: &Score, step_ticks: u64) -> Result<Vec<BTreeSet<u8>>, Error> {
    if step_ticks == 0 || !TICKS_PER_QUARTER.is_multiple_of(step_ticks) {
        return Err(Error::InvalidStep(step_ticks));
    }
    let steps = score.end_tick().div_ceil(step_ticks) as usize;
    let mut timeline = vec![BTreeSet::new(); steps];
    for e in score.pitched_events() {
        let first = e.onset.div_ceil(step_ticks) as usize;
        let last = (e.end().div_ceil(step_ticks) as usize).min(steps);
        for slot in &mut timeline[first.min(last)..last] {
            slot.insert(e.pitch);
        }
    }
    Ok(timeline)
}

/// Header plus the first `n_measures` measure blocks of the score's source.
pub fn extract_prompt(score: &Score, n_measures: usize) -> Result<TokenStream, Error> {
    if n_measures == 0 {
        return Err(Error::OutOfRange("a prompt needs at least one measure".into()));
    }
    let tokens = score.source().tokens();
    let body_end = tokens.iter().position(|t| *t == Token::End).unwrap_or(tokens.len());
    let openings: Vec<usize> =
        tokens[..body_end].iter().enumerate().filter(|(_, t)| **t == Token::NewMeasure).map(|(i, _)| i).collect();
    if n_measures > openings.len() {
        return Err(Error::PromptTooLong { requested: n_measures, available: openings.len() });
    }
    let cut = openings.get(n_measures).copied().unwrap_or(body_end);
    Ok(TokenStream::from_tokens(tokens[..cut].to_vec()))
}

/// One low E on guitar and bass with a kick and crash hit, held for a 4/4 bar.
pub fn canonical_prompt(tempo_bpm: u32) -> Result<TokenStream, Error> {
    canonical_prompt_with_cymbal(tempo_bpm, CRASH)
}

pub fn canonical_prompt_with_cymbal(tempo_bpm: u32, cymbal_key: u8) -> Result<TokenStream, Error> {
    if !(MIN_TEMPO..=MAX_TEMPO).contains(&tempo_bpm) {
        return Err(Error::OutOfRange(format!("tempo {tempo_bpm}")));
    }
    Token::parse(&format!("drums:note:{cymbal_key}")).map_err(|(_, msg)| Error::OutOfRange(msg))?;
    Ok(TokenStream::from_tokens(vec![
        Token::Tempo(tempo_bpm),
        Token::Start,
        Token::NewMeasure,
        Token::TimeSignature { numerator: 4, denominator: 4 },
        Token::Note { instrument: InstrumentId::Distorted0, course: 6, fret: 0 },
        Token::Note { instrument: InstrumentId::Bass, course: 4, fret: 0 },
        Token::DrumNote { key: KICK },
        Token::DrumNote { key: cymbal_key },
        Token::Wait(4 * TICKS_PER_QUARTER),
    ]))
}

/// Measure count per time signature.
pub fn time_signature_profile(score: &Score) -> BTreeMap<(u32, u32), usize> {
    let mut profile = BTreeMap::new();
    for m in score.measures() {
        *profile.entry(m.time_signature).or_insert(0) += 1;
    }
    profile
}
