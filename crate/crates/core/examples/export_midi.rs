// Export the bass and drums of a song to a format-1 Standard MIDI File.

use riffgauge::midi::export_midi;
use riffgauge::score::build_score;
use riffgauge::token::parse;
use riffgauge::tuning::TuningSet;
use riffgauge::InstrumentId;

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/songs/four_measures.tokens.txt");
    let stream = parse(&std::fs::read_to_string(path)?).map_err(|d| anyhow::anyhow!("{d:?}"))?;
    let score = build_score(&stream, &TuningSet::default())?;

    let bytes = export_midi(&score, &[InstrumentId::Bass, InstrumentId::Drums])?;
    let tracks = u16::from_be_bytes([bytes[10], bytes[11]]);
    println!("{} bytes, {tracks} tracks, division {}", bytes.len(), u16::from_be_bytes([bytes[12], bytes[13]]));
    let head: Vec<String> = bytes.iter().take(14).map(|b| format!("{b:02x}")).collect();
    println!("header: {}", head.join(" "));

    if let Some(out) = std::env::args_os().nth(1) {
        std::fs::write(out, &bytes)?;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
