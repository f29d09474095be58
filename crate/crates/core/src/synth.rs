//! Seeded synthetic songs: a power-chord riff on `distorted0`, a bass line
//! on the riff roots, kick/snare/hat drums, and a spread of tempos and
//! meters. Used as a stand-in training and reference corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instrument::InstrumentId;
use crate::token::{measure_ticks, Token, TokenStream};

const NATURAL_MINOR: [u32; 7] = [0, 2, 3, 5, 7, 8, 10];
const PHRYGIAN: [u32; 7] = [0, 1, 3, 5, 7, 8, 10];
const MINOR_PENTATONIC: [u32; 5] = [0, 3, 5, 7, 10];

/// Size and master seed of the checked-in `fixtures/corpus`.
pub const FIXTURE_CORPUS_SIZE: usize = 20;
pub const FIXTURE_CORPUS_SEED: u64 = 7;

const SNARE: u8 = 38;
const HAT: u8 = 42;
const RIDE: u8 = 51;
const CRASH: u8 = 49;
const KICK: u8 = 36;

#[derive(Debug, Clone, Copy)]
struct Slot {
    /// Semitone offset above the riff root, `None` for a rest.
    degree: Option<u32>,
    chord: bool,
    split: bool,
}

fn meters(triplet: bool) -> &'static [(u32, u32)] {
    if triplet {
        &[(4, 4), (6, 4), (5, 4), (3, 4)]
    } else {
        &[(4, 4), (5, 4), (7, 8), (6, 4), (3, 4)]
    }
}

fn riff<R: Rng>(rng: &mut R, len: usize, scale: &[u32]) -> Vec<Slot> {
    (0..len)
        .map(|i| {
            let degree = if i == 0 || rng.gen_bool(0.4) {
                Some(0)
            } else if rng.gen_bool(0.15) {
                None
            } else {
                Some(*scale.choose(rng).expect("non-empty scale"))
            };
            Slot { degree, chord: rng.gen_bool(0.6), split: rng.gen_bool(0.12) }
        })
        .collect()
}

/// Low-string position of `root + degree`: course 6 up to fret 7, else course 5.
fn position(root: u32, degree: u32) -> (u32, u32) {
    let fret = root + degree;
    if fret <= 7 {
        (6, fret)
    } else {
        (5, fret - 5)
    }
}

fn note(instrument: InstrumentId, course: u32, fret: u32) -> Token {
    Token::Note { instrument, course, fret }
}

/// One synthetic song. Identical seeds give identical streams.
pub fn synthetic_song(seed: u64) -> TokenStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triplet = rng.gen_bool(0.25);
    let grid: u64 = if triplet { 320 } else { 480 };
    let tempo = rng.gen_range(80..=220);
    let root = rng.gen_range(0..=5);
    let scale: &[u32] = match rng.gen_range(0..3) {
        0 => &NATURAL_MINOR,
        1 => &PHRYGIAN,
        _ => &MINOR_PENTATONIC,
    };
    let with_bass = rng.gen_bool(0.85);
    let with_drums = rng.gen_bool(0.9);
    let with_double = rng.gen_bool(0.3);
    let with_lead = rng.gen_bool(0.35);
    let measures = rng.gen_range(4..=10);
    let downtune = if rng.gen_bool(0.3) { -rng.gen_range(1..=2) } else { 0 };

    let mut tokens =
        vec![Token::Artist(format!("synth{seed}")), Token::Downtune(downtune), Token::Tempo(tempo), Token::Start];
    let meter_pool = meters(triplet);
    let mut meter = (4, 4);
    let mut pattern: Vec<Slot> = Vec::new();
    for m in 0..measures {
        let section_start = m % 2 == 0;
        if section_start {
            meter = if rng.gen_bool(0.55) { (4, 4) } else { *meter_pool.choose(&mut rng).expect("meters") };
        }
        let bar = measure_ticks(meter.0, meter.1);
        let slots = (bar / grid) as usize;
        if section_start || pattern.len() != slots {
            pattern = riff(&mut rng, slots, scale);
        } else {
            for slot in pattern.iter_mut() {
                if rng.gen_bool(0.15) {
                    slot.degree = Some(*scale.choose(&mut rng).expect("non-empty scale"));
                }
            }
        }
        tokens.push(Token::NewMeasure);
        if section_start || m == 0 {
            tokens.push(Token::TimeSignature { numerator: meter.0, denominator: meter.1 });
        }
        let beat_slots = (960 / grid) as usize;
        for (i, slot) in pattern.iter().enumerate() {
            match slot.degree {
                Some(d) => {
                    let (course, fret) = position(root, d);
                    tokens.push(note(InstrumentId::Distorted0, course, fret));
                    if slot.chord {
                        tokens.push(note(InstrumentId::Distorted0, course - 1, fret + 2));
                    }
                    if rng.gen_bool(0.2) {
                        tokens.push(Token::Effect { instrument: InstrumentId::Distorted0, name: "palm_mute".into() });
                    }
                    if with_double {
                        tokens.push(note(InstrumentId::Distorted1, course, fret));
                    }
                    if with_bass && (i % 2 == 0 || d == 0) {
                        tokens.push(note(InstrumentId::Bass, course - 2, fret));
                    }
                }
                None => tokens.push(Token::Rest(InstrumentId::Distorted0)),
            }
            if with_lead && i % beat_slots == 0 && rng.gen_bool(0.5) {
                let d = *scale.choose(&mut rng).expect("non-empty scale");
                let course = rng.gen_range(1..=2);
                tokens.push(note(InstrumentId::Leads0, course, 12 + root + d));
                if rng.gen_bool(0.3) {
                    tokens.push(Token::Effect { instrument: InstrumentId::Leads0, name: "vibrato".into() });
                }
            }
            if with_drums {
                if i == 0 && section_start {
                    tokens.push(Token::DrumNote { key: CRASH });
                }
                let beat = i / beat_slots;
                let on_beat = i % beat_slots == 0;
                if i == 0 || (slot.degree == Some(0) && rng.gen_bool(0.7)) {
                    tokens.push(Token::DrumNote { key: KICK });
                }
                if on_beat && beat % 2 == 1 {
                    tokens.push(Token::DrumNote { key: SNARE });
                }
                tokens.push(Token::DrumNote { key: if triplet { RIDE } else { HAT } });
            }
            if slot.split {
                tokens.push(Token::Wait(grid / 2));
                if with_drums {
                    tokens.push(Token::DrumNote { key: KICK });
                }
                tokens.push(Token::Wait(grid / 2));
            } else {
                tokens.push(Token::Wait(grid));
            }
        }
    }
    tokens.push(Token::End);
    TokenStream::from_tokens(tokens)
}

/// `n` songs named `synth_00` .. with per-song seeds drawn from `master_seed`.
pub fn synthetic_corpus(n: usize, master_seed: u64) -> Vec<(String, TokenStream)> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    (0..n).map(|i| (format!("synth_{i:02}"), synthetic_song(rng.gen()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{compute_all, MetricId};
    use crate::score::build_score;
    use crate::token::{validate, Severity};
    use crate::tuning::TuningSet;

    #[test]
    fn songs_validate_cleanly() {
        for (id, song) in synthetic_corpus(60, 3) {
            let diags = validate(&song);
            assert!(diags.iter().all(|d| d.severity != Severity::Error), "{id}: {diags:?}");
            assert!(diags.is_empty(), "{id}: {diags:?}");
            build_score(&song, &TuningSet::default()).unwrap();
        }
    }

    #[test]
    fn deterministic_and_varied() {
        assert_eq!(synthetic_corpus(5, 11), synthetic_corpus(5, 11));
        let corpus = synthetic_corpus(20, 11);
        let tempos: std::collections::BTreeSet<_> = corpus.iter().map(|(_, s)| s.tempo()).collect();
        assert!(tempos.len() > 5);
        let pce: Vec<_> = corpus
            .iter()
            .map(|(_, s)| compute_all(&build_score(s, &TuningSet::default()).unwrap()).get(MetricId::Pce).unwrap())
            .collect();
        assert!(pce.iter().any(|&v| (v - pce[0]).abs() > 1e-6));
    }
}
