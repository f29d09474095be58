// Split the synthetic corpus in two and measure how far each half's metric
// distributions sit from the other.

use riffgauge::corpus::{compare, corpus_metrics, DEFAULT_BINS, DEFAULT_EPSILON};
use riffgauge::metrics::MetricId;
use riffgauge::score::build_score;
use riffgauge::synth::synthetic_corpus;
use riffgauge::tuning::TuningSet;

pub fn run_example() -> anyhow::Result<()> {
    let mut songs = Vec::new();
    for (id, stream) in synthetic_corpus(40, 99) {
        songs.push((id, build_score(&stream, &TuningSet::default())?));
    }
    let (left, right) = songs.split_at(20);
    let reference = corpus_metrics("left", left)?;
    let generated = corpus_metrics("right", right)?;

    let report = compare(&reference, &generated, DEFAULT_BINS, DEFAULT_EPSILON)?;
    let self_report = compare(&reference, &reference, DEFAULT_BINS, DEFAULT_EPSILON)?;
    for m in MetricId::ALL {
        println!(
            "{:<5} left|right {:>10.4}   left|left {:.1e}",
            m.key(),
            report.get(m).unwrap_or(f64::NAN),
            self_report.get(m).unwrap_or(0.0)
        );
    }
    print!("{}", report.to_json());
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
