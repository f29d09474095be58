// Resolve a tablature stream into timed pitches and sample the sounding
// notes on a fixed grid.

use riffgauge::score::{active_pitch_timeline, build_score, time_signature_profile};
use riffgauge::token::parse;
use riffgauge::tuning::{Tuning, TuningSet};
use riffgauge::InstrumentId;

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/songs/odd_meter_section.tokens.txt");
    let stream = parse(&std::fs::read_to_string(path)?).map_err(|d| anyhow::anyhow!("{d:?}"))?;

    let score = build_score(&stream, &TuningSet::default())?;
    println!("tempo {} bpm, {} ticks", score.tempo_bpm(), score.end_tick());
    for m in score.measures() {
        println!("  measure {} at {}..{} in {:?}", m.index, m.start_tick, m.end_tick, m.time_signature);
    }
    println!("meters: {:?}", time_signature_profile(&score));
    for e in score.track(InstrumentId::Bass).iter().take(4) {
        println!("  bass pitch {} at {} for {}", e.pitch, e.onset, e.duration);
    }

    // Same song on a seven-string: pitches of course 1..6 are unchanged.
    let mut seven = TuningSet::default();
    seven.set(InstrumentId::Distorted0, Tuning::guitar7())?;
    let alt = build_score(&stream, &seven)?;
    anyhow::ensure!(alt.track(InstrumentId::Distorted0) == score.track(InstrumentId::Distorted0));

    let timeline = active_pitch_timeline(&score, 480)?;
    let busiest = timeline.iter().map(|s| s.len()).max().unwrap_or(0);
    println!("{} eighth-note steps, at most {busiest} pitches at once", timeline.len());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
