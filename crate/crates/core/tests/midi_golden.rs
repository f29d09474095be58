use riffgauge::midi::export_midi;
use riffgauge::score::{build_score, canonical_prompt};
use riffgauge::token::parse;
use riffgauge::tuning::TuningSet;
use riffgauge::InstrumentId;

const HEADER_3_TRACKS: [u8; 14] = [b'M', b'T', b'h', b'd', 0, 0, 0, 6, 0, 1, 0, 3, 0x03, 0xC0];
const HEADER_2_TRACKS: [u8; 14] = [b'M', b'T', b'h', b'd', 0, 0, 0, 6, 0, 1, 0, 2, 0x03, 0xC0];
const TEMPO_120: [u8; 19] = [
    b'M', b'T', b'r', b'k', 0, 0, 0, 11, //
    0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20, //
    0x00, 0xFF, 0x2F, 0x00,
];

fn golden(parts: &[&[u8]]) -> Vec<u8> {
    parts.concat()
}

#[test]
fn one_note() {
    let stream = parse("tempo:120 start new_measure time_signature:1:4 distorted0:note:s6:f0 wait:960 end").unwrap();
    let score = build_score(&stream, &TuningSet::default()).unwrap();
    let track: &[u8] = &[
        b'M', b'T', b'r', b'k', 0, 0, 0, 0x1B, //
        0x00, 0xFF, 0x03, 0x0A, b'd', b'i', b's', b't', b'o', b'r', b't', b'e', b'd', b'0', //
        0x00, 0x90, 0x28, 0x60, //
        0x87, 0x40, 0x80, 0x28, 0x40, //
        0x00, 0xFF, 0x2F, 0x00,
    ];
    let expected = golden(&[&HEADER_2_TRACKS, &TEMPO_120, track]);
    assert_eq!(export_midi(&score, &[InstrumentId::Distorted0]).unwrap(), expected);
}

#[test]
fn canonical_prompt_bass_and_drums() {
    let score = build_score(&canonical_prompt(120).unwrap(), &TuningSet::default()).unwrap();
    let bass: &[u8] = &[
        b'M', b'T', b'r', b'k', 0, 0, 0, 0x15, //
        0x00, 0xFF, 0x03, 0x04, b'b', b'a', b's', b's', //
        0x00, 0x90, 0x1C, 0x60, //
        0x9E, 0x00, 0x80, 0x1C, 0x40, //
        0x00, 0xFF, 0x2F, 0x00,
    ];
    let drums: &[u8] = &[
        b'M', b'T', b'r', b'k', 0, 0, 0, 0x1E, //
        0x00, 0xFF, 0x03, 0x05, b'd', b'r', b'u', b'm', b's', //
        0x00, 0x99, 0x24, 0x60, //
        0x00, 0x99, 0x31, 0x60, //
        0x9E, 0x00, 0x89, 0x24, 0x40, //
        0x00, 0x89, 0x31, 0x40, //
        0x00, 0xFF, 0x2F, 0x00,
    ];
    let expected = golden(&[&HEADER_3_TRACKS, &TEMPO_120, bass, drums]);
    let bytes = export_midi(&score, &[InstrumentId::Drums, InstrumentId::Bass]).unwrap();
    assert_eq!(bytes, expected);
}
