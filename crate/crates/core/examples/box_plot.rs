// SVG box plot of pitch class entropy for two corpora.

use riffgauge::corpus::{box_stats, corpus_metrics};
use riffgauge::metrics::MetricId;
use riffgauge::plot::render_box_plot;
use riffgauge::score::build_score;
use riffgauge::synth::synthetic_corpus;
use riffgauge::tuning::TuningSet;

pub fn run_example() -> anyhow::Result<()> {
    let mut series = Vec::new();
    for (label, seed) in [("corpus-a", 1), ("corpus-b", 2)] {
        let mut songs = Vec::new();
        for (id, stream) in synthetic_corpus(15, seed) {
            songs.push((id, build_score(&stream, &TuningSet::default())?));
        }
        let table = corpus_metrics(label, &songs)?;
        series.push((label.to_string(), box_stats(&table.values(MetricId::Pce))?));
    }
    let svg = render_box_plot("Pitch class entropy", "bits", &series);
    match std::env::args_os().nth(1) {
        Some(out) => std::fs::write(out, &svg)?,
        None => println!("{} bytes of SVG, {} boxes", svg.len(), svg.matches("class=\"box\"").count()),
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
