// Build the seeded synthetic corpus. With a directory argument the songs are
// written there as `<id>.tokens.txt`; `fixtures/corpus` was produced this way.

use std::path::PathBuf;

use riffgauge::synth::{synthetic_corpus, FIXTURE_CORPUS_SEED, FIXTURE_CORPUS_SIZE};
use riffgauge::token::{serialize, validate};

pub fn run_example() -> anyhow::Result<()> {
    let corpus = synthetic_corpus(FIXTURE_CORPUS_SIZE, FIXTURE_CORPUS_SEED);
    for (id, song) in &corpus {
        let meters: std::collections::BTreeSet<String> = song
            .tokens()
            .iter()
            .filter(|t| matches!(t, riffgauge::token::Token::TimeSignature { .. }))
            .map(|t| t.to_string())
            .collect();
        println!(
            "{id}: {} tokens, tempo {}, {} diagnostics, {}",
            song.len(),
            song.tempo().unwrap_or_default(),
            validate(song).len(),
            meters.into_iter().collect::<Vec<_>>().join(" ")
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match std::env::args_os().nth(1).map(PathBuf::from) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            for (id, song) in synthetic_corpus(FIXTURE_CORPUS_SIZE, FIXTURE_CORPUS_SEED) {
                std::fs::write(dir.join(format!("{id}.tokens.txt")), serialize(&song))?;
            }
            Ok(())
        }
        None => run_example(),
    }
}
