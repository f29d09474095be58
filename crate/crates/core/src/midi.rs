//! Standard MIDI File (format 1) export.
//!
//! Track 0 carries the tempo; every requested instrument gets its own track.
//! Drums play on channel 9 (0-indexed), pitched instruments on channels
//! 0, 1, 2, ... in instrument order. Velocity is fixed.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::instrument::InstrumentId;
use crate::score::Score;
use crate::token::TICKS_PER_QUARTER;

pub const VELOCITY: u8 = 96;
pub const RELEASE_VELOCITY: u8 = 64;
pub const DRUM_CHANNEL: u8 = 9;
const MAX_DELTA: u64 = 0x0FFF_FFFF;

/// Append `value` as a variable-length quantity (7 bits per byte, high bit
/// set on all but the last byte).
pub fn write_vlq(value: u32, buf: &mut Vec<u8>) {
    debug_assert!(value as u64 <= MAX_DELTA);
    let mut shift = 21;
    while shift > 0 && value >> shift == 0 {
        shift -= 7;
    }
    while shift > 0 {
        buf.push(((value >> shift) & 0x7f) as u8 | 0x80);
        shift -= 7;
    }
    buf.push((value & 0x7f) as u8);
}

/// Microseconds per quarter note, rounded to the nearest integer.
pub fn tempo_micros(bpm: u32) -> u32 {
    (60_000_000 + bpm / 2) / bpm
}

pub fn export_midi(score: &Score, instruments: &[InstrumentId]) -> Result<Vec<u8>, Error> {
    let selected: BTreeSet<InstrumentId> = instruments.iter().copied().collect();
    if selected.is_empty() {
        return Err(Error::EmptyInstrumentSelection);
    }
    if let Some(missing) = selected.iter().find(|i| !score.source_instruments().contains(i)) {
        return Err(Error::InstrumentNotInScore(missing.to_string()));
    }

    let mut out = Vec::new();
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&(selected.len() as u16 + 1).to_be_bytes());
    out.extend_from_slice(&(TICKS_PER_QUARTER as u16).to_be_bytes());

    let mut tempo = Vec::new();
    tempo.extend_from_slice(&[0x00, 0xFF, 0x51, 0x03]);
    tempo.extend_from_slice(&tempo_micros(score.tempo_bpm()).to_be_bytes()[1..]);
    tempo.extend_from_slice(&[0x00, 0xFF, 0x2F, 0x00]);
    write_chunk(&mut out, &tempo);

    let mut next_channel = 0u8;
    for instrument in selected {
        let channel = if instrument.is_pitched() {
            next_channel += 1;
            next_channel - 1
        } else {
            DRUM_CHANNEL
        };
        write_chunk(&mut out, &instrument_track(score, instrument, channel)?);
    }
    Ok(out)
}

fn instrument_track(score: &Score, instrument: InstrumentId, channel: u8) -> Result<Vec<u8>, Error> {
    // (tick, off-before-on, pitch)
    let mut messages: Vec<(u64, u8, u8)> = Vec::new();
    for e in score.track(instrument) {
        messages.push((e.onset, 1, e.pitch));
        messages.push((e.end(), 0, e.pitch));
    }
    messages.sort_unstable();

    let mut track = Vec::new();
    let name = instrument.as_str().as_bytes();
    track.extend_from_slice(&[0x00, 0xFF, 0x03, name.len() as u8]);
    track.extend_from_slice(name);

    let mut now = 0u64;
    for (tick, kind, pitch) in messages {
        write_delta(&mut track, tick - now)?;
        now = tick;
        if kind == 1 {
            track.extend_from_slice(&[0x90 | channel, pitch, VELOCITY]);
        } else {
            track.extend_from_slice(&[0x80 | channel, pitch, RELEASE_VELOCITY]);
        }
    }
    write_delta(&mut track, score.end_tick().saturating_sub(now))?;
    track.extend_from_slice(&[0xFF, 0x2F, 0x00]);
    Ok(track)
}

fn write_delta(buf: &mut Vec<u8>, delta: u64) -> Result<(), Error> {
    if delta > MAX_DELTA {
        return Err(Error::OutOfRange(format!("delta time {delta} exceeds the SMF limit")));
    }
    write_vlq(delta as u32, buf);
    Ok(())
}

fn write_chunk(out: &mut Vec<u8>, body: &[u8]) {
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
}
