#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use riffgauge::score::Score;
use riffgauge::token::{measure_ticks, Token, TokenStream};
use riffgauge::InstrumentId;

const PITCHED: [(InstrumentId, u32); 5] = [
    (InstrumentId::Distorted0, 6),
    (InstrumentId::Distorted1, 6),
    (InstrumentId::Clean0, 6),
    (InstrumentId::Leads0, 6),
    (InstrumentId::Bass, 4),
];
const METERS: [(u32, u32); 5] = [(4, 4), (3, 4), (5, 4), (7, 8), (6, 8)];
const WAITS: [u64; 8] = [40, 120, 160, 240, 320, 480, 960, 1920];

/// A valid random stream: 1..=4 measures whose waits fill each bar, notes
/// with frets up to 20 so that a shift of up to 10 stays in range.
pub fn random_stream<R: Rng>(rng: &mut R) -> TokenStream {
    let mut t = vec![Token::Tempo(rng.gen_range(40..=260)), Token::Start];
    let mut meter = (4, 4);
    for m in 0..rng.gen_range(1..=4) {
        t.push(Token::NewMeasure);
        if m == 0 || rng.gen_bool(0.5) {
            meter = METERS[rng.gen_range(0..METERS.len())];
            t.push(Token::TimeSignature { numerator: meter.0, denominator: meter.1 });
        }
        fill_bar(rng, &mut t, measure_ticks(meter.0, meter.1));
    }
    t.push(Token::End);
    TokenStream::from_tokens(t)
}

fn fill_bar<R: Rng>(rng: &mut R, t: &mut Vec<Token>, bar: u64) {
    let mut left = bar;
    while left > 0 {
        for _ in 0..rng.gen_range(0..=3) {
            if rng.gen_bool(0.25) {
                t.push(Token::DrumNote { key: rng.gen_range(35..=59) });
            } else {
                let (instrument, courses) = PITCHED[rng.gen_range(0..PITCHED.len())];
                t.push(Token::Note { instrument, course: rng.gen_range(1..=courses), fret: rng.gen_range(0..=20) });
            }
        }
        let options: Vec<u64> = WAITS.iter().copied().filter(|&w| w <= left).collect();
        let wait = options[rng.gen_range(0..options.len())];
        t.push(Token::Wait(wait));
        left -= wait;
    }
}

/// Every pitched note moved up `shift` frets.
pub fn shift_frets(stream: &TokenStream, shift: u32) -> TokenStream {
    stream
        .tokens()
        .iter()
        .map(|t| match t {
            Token::Note { instrument, course, fret } => {
                Token::Note { instrument: *instrument, course: *course, fret: fret + shift }
            }
            other => other.clone(),
        })
        .collect()
}

/// Per-step scan: at tick `i * step`, every pitched event with
/// `onset <= tick < onset + duration`.
pub fn brute_force_timeline(score: &Score, step: u64) -> Vec<BTreeSet<u8>> {
    let end = score.end_tick();
    let mut out = Vec::new();
    let mut tick = 0;
    while tick < end {
        let set = score
            .pitched_events()
            .filter(|e| e.onset <= tick && tick < e.onset + e.duration)
            .map(|e| e.pitch)
            .collect();
        out.push(set);
        tick += step;
    }
    out
}
