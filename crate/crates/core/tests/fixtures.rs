use std::fs;
use std::path::{Path, PathBuf};

use riffgauge::score::{build_score, extract_prompt, time_signature_profile};
use riffgauge::synth::{synthetic_corpus, FIXTURE_CORPUS_SEED, FIXTURE_CORPUS_SIZE};
use riffgauge::token::{parse, serialize, tokenize, validate, TokenStream};
use riffgauge::tuning::TuningSet;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn load(rel: &str) -> TokenStream {
    parse(&fs::read_to_string(fixture(rel)).unwrap()).unwrap()
}

#[test]
fn corpus_matches_generator() {
    let expected = synthetic_corpus(FIXTURE_CORPUS_SIZE, FIXTURE_CORPUS_SEED);
    let mut files: Vec<_> = fs::read_dir(fixture("corpus")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), expected.len());
    for (path, (id, song)) in files.iter().zip(&expected) {
        assert_eq!(path.file_name().unwrap().to_str().unwrap(), format!("{id}.tokens.txt"));
        assert_eq!(fs::read_to_string(path).unwrap(), serialize(song), "{id}");
    }
}

#[test]
fn valid_fixtures_have_no_diagnostics() {
    for dir in ["songs", "corpus"] {
        for entry in fs::read_dir(fixture(dir)).unwrap() {
            let path = entry.unwrap().path();
            let t = tokenize(&fs::read_to_string(&path).unwrap());
            assert!(t.diagnostics.is_empty(), "{path:?}");
            assert!(validate(&t.stream).is_empty(), "{path:?}: {:?}", validate(&t.stream));
        }
    }
}

#[test]
fn invalid_fixtures_are_rejected() {
    let codes = |rel: &str| -> Vec<&'static str> {
        parse(&fs::read_to_string(fixture(rel)).unwrap()).unwrap_err().iter().map(|d| d.code).collect()
    };
    assert_eq!(codes("invalid/two_tempos.tokens.txt"), ["E010"]);
    assert_eq!(codes("invalid/bad_lexemes.tokens.txt"), ["E001", "E002", "E003"]);
}

#[test]
fn four_measure_prompts() {
    let stream = load("songs/four_measures.tokens.txt");
    let score = build_score(&stream, &TuningSet::default()).unwrap();
    let whole = extract_prompt(&score, 4).unwrap();
    assert_eq!(whole.tokens(), &stream.tokens()[..stream.len() - 1]);
    let one = extract_prompt(&score, 1).unwrap();
    let second = stream.tokens().iter().enumerate().filter(|(_, t)| t.to_string() == "new_measure").nth(1).unwrap().0;
    assert_eq!(one.tokens(), &stream.tokens()[..second]);
    assert_eq!(extract_prompt(&score, 5).unwrap_err().code(), "E030");
    assert_eq!(time_signature_profile(&score), [((4, 4), 4)].into());
}

#[test]
fn odd_meter_section_profile() {
    let score = build_score(&load("songs/odd_meter_section.tokens.txt"), &TuningSet::default()).unwrap();
    assert_eq!(time_signature_profile(&score), [((4, 4), 6), ((5, 4), 1), ((6, 4), 1)].into());
}
