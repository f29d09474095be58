// Train a trigram-context model on the synthetic corpus and continue the
// canonical one-bar prompt at two temperatures.

use riffgauge::ngram::{continue_sequence, tempo_inheritance, train, GeneratorConfig};
use riffgauge::score::canonical_prompt;
use riffgauge::synth::{synthetic_corpus, FIXTURE_CORPUS_SEED, FIXTURE_CORPUS_SIZE};
use riffgauge::token::{serialize, validate, Severity};

pub fn run_example() -> anyhow::Result<()> {
    let corpus: Vec<_> =
        synthetic_corpus(FIXTURE_CORPUS_SIZE, FIXTURE_CORPUS_SEED).into_iter().map(|(_, s)| s).collect();
    let model = train(&corpus, 3)?;
    println!("{} contexts over {} token types", model.contexts().len(), model.vocabulary().len());

    let prompt = canonical_prompt(140)?;
    for temperature in [0.0, 0.9] {
        let config = GeneratorConfig { temperature, seed: 5, max_tokens: 120, ..GeneratorConfig::default() };
        let song = continue_sequence(&model, &prompt, &config)?;
        tempo_inheritance(&prompt, &song)?;
        let errors = validate(&song).iter().filter(|d| d.severity == Severity::Error).count();
        println!("temperature {temperature}: {} tokens, {errors} errors", song.len());
        println!("{}", serialize(&song).lines().skip(9).take(12).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
