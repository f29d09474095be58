mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riffgauge::corpus::{box_stats, kld, Edges, Histogram};
use riffgauge::metrics::{compute_all, MetricId};
use riffgauge::midi::write_vlq;
use riffgauge::ngram::{continue_sequence, train, GeneratorConfig, NGramModel};
use riffgauge::score::{active_pitch_timeline, build_score, canonical_prompt};
use riffgauge::synth::{synthetic_corpus, FIXTURE_CORPUS_SEED, FIXTURE_CORPUS_SIZE};
use riffgauge::token::{serialize, tokenize, validate, Severity, Token, TokenStream};
use riffgauge::tuning::TuningSet;
use riffgauge::InstrumentId;

fn instrument() -> impl Strategy<Value = InstrumentId> {
    prop::sample::select(InstrumentId::ALL.to_vec())
}

fn pitched() -> impl Strategy<Value = InstrumentId> {
    prop::sample::select(InstrumentId::PITCHED.to_vec())
}

fn token() -> impl Strategy<Value = Token> {
    prop_oneof![
        "[A-Za-z0-9_.:-]{1,12}".prop_map(Token::Artist),
        (-24i32..=0).prop_map(Token::Downtune),
        (30u32..=300).prop_map(Token::Tempo),
        Just(Token::Start),
        Just(Token::NewMeasure),
        (1u32..=32, prop::sample::select(vec![1u32, 2, 4, 8, 16, 32]))
            .prop_map(|(numerator, denominator)| Token::TimeSignature { numerator, denominator }),
        (pitched(), 1u32..=7, 0u32..=30).prop_map(|(instrument, course, fret)| Token::Note {
            instrument,
            course,
            fret
        }),
        (27u8..=87).prop_map(|key| Token::DrumNote { key }),
        instrument().prop_map(Token::Rest),
        (1u64..=100_000).prop_map(Token::Wait),
        (instrument(), "[a-z_]{1,10}(:[a-z0-9]{1,4})?")
            .prop_map(|(instrument, name)| Token::Effect { instrument, name }),
        Just(Token::End),
    ]
}

fn separator() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec![" ", "\t", "\n", "\r\n", "  "]), 1..3).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn serialize_then_tokenize_is_identity(tokens in prop::collection::vec(token(), 0..60)) {
        let stream = TokenStream::from_tokens(tokens);
        let text = serialize(&stream);
        let back = tokenize(&text);
        prop_assert!(back.diagnostics.is_empty());
        prop_assert_eq!(back.stream.tokens(), stream.tokens());
        prop_assert_eq!(serialize(&back.stream), text);
    }

    #[test]
    fn any_whitespace_layout_tokenizes_the_same(tokens in prop::collection::vec(token(), 1..40), seps in prop::collection::vec(separator(), 40)) {
        let mut text = String::new();
        for (t, sep) in tokens.iter().zip(seps.iter().cycle()) {
            text.push_str(sep);
            text.push_str(&t.to_string());
        }
        let back = tokenize(&text);
        prop_assert!(back.diagnostics.is_empty());
        prop_assert_eq!(back.stream.tokens(), &tokens[..]);
    }

    #[test]
    fn tokenize_is_total(text in "\\PC{0,200}") {
        let t = tokenize(&text);
        prop_assert_eq!(t.stream.len() + t.diagnostics.len(), text.split_whitespace().count());
        prop_assert!(t.diagnostics.iter().all(|d| d.severity == Severity::Error));
        let mut positions: Vec<_> = t.stream.positions().iter().chain(t.diagnostics.iter().map(|d| &d.position)).collect();
        positions.sort();
        positions.dedup();
        prop_assert_eq!(positions.len(), t.stream.len() + t.diagnostics.len());
    }

    #[test]
    fn metric_bounds_and_transposition(seed in any::<u64>(), shift in 1u32..=10) {
        let stream = common::random_stream(&mut ChaCha8Rng::seed_from_u64(seed));
        let tunings = TuningSet::default();
        let score = build_score(&stream, &tunings).unwrap();
        let m = compute_all(&score);
        if let (Some(pce), Some(pe)) = (m.get(MetricId::Pce), m.get(MetricId::Pe)) {
            prop_assert!((0.0..=12f64.log2() + 1e-12).contains(&pce));
            prop_assert!(pce <= pe + 1e-12);
            prop_assert!(m.get(MetricId::Sc).unwrap() >= 7.0 / 12.0 - 1e-12);
        }
        if let Some(pol) = m.get(MetricId::Pol) {
            prop_assert!(pol >= 1.0);
            prop_assert_eq!(pol > 1.0, m.get(MetricId::PolR).unwrap() > 0.0);
        }
        let shifted = compute_all(&build_score(&common::shift_frets(&stream, shift), &tunings).unwrap());
        for metric in MetricId::ALL {
            match (m.get(metric), shifted.get(metric)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-12, "{metric:?}: {a} vs {b}"),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn timeline_matches_scan(seed in any::<u64>(), step in prop::sample::select(vec![20u64, 40, 60, 120, 240, 480])) {
        let stream = common::random_stream(&mut ChaCha8Rng::seed_from_u64(seed));
        let score = build_score(&stream, &TuningSet::default()).unwrap();
        prop_assert_eq!(active_pitch_timeline(&score, step).unwrap(), common::brute_force_timeline(&score, step));
    }

    #[test]
    fn kld_matches_direct_sum(p in prop::collection::vec(0.0f64..10.0, 8), q in prop::collection::vec(0.0f64..10.0, 8)) {
        prop_assume!(p.iter().sum::<f64>() > 0.0 && q.iter().sum::<f64>() > 0.0);
        let edges = Edges::Regular((0..=8).map(f64::from).collect());
        let hp = Histogram::from_masses(edges.clone(), p.clone()).unwrap();
        let hq = Histogram::from_masses(edges, q.clone()).unwrap();
        let smooth = |v: &[f64]| {
            let s: f64 = v.iter().sum();
            let w: Vec<f64> = v.iter().map(|x| x / s + 1e-10).collect();
            let t: f64 = w.iter().sum();
            w.into_iter().map(|x| x / t).collect::<Vec<_>>()
        };
        let direct: f64 = smooth(&p).iter().zip(smooth(&q)).map(|(a, b)| a * (a / b).ln()).sum();
        prop_assert!(direct >= -1e-12);
        let d = kld(&hp, &hq, 1e-10).unwrap();
        prop_assert!((d - direct.max(0.0)).abs() <= 1e-9 * (1.0 + direct.abs()));
        prop_assert!(kld(&hp, &hp, 1e-10).unwrap() <= 1e-9);
    }

    #[test]
    fn five_number_summary_is_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..50)) {
        let f = box_stats(&values).unwrap();
        prop_assert!(f.min <= f.q1 && f.q1 <= f.median && f.median <= f.q3 && f.q3 <= f.max);
        prop_assert_eq!(f.min, values.iter().copied().fold(f64::INFINITY, f64::min));
        prop_assert_eq!(f.max, values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    #[test]
    fn vlq_decodes_back(value in 0u32..0x1000_0000) {
        let mut buf = Vec::new();
        write_vlq(value, &mut buf);
        prop_assert!(!buf.is_empty() && buf.len() <= 4);
        prop_assert!(buf[..buf.len() - 1].iter().all(|b| b & 0x80 != 0));
        prop_assert_eq!(buf[buf.len() - 1] & 0x80, 0);
        let decoded = buf.iter().fold(0u32, |acc, b| (acc << 7) | u32::from(b & 0x7f));
        prop_assert_eq!(decoded, value);
    }
}

fn fixture_model() -> &'static NGramModel {
    static MODEL: OnceLock<NGramModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let corpus: Vec<_> =
            synthetic_corpus(FIXTURE_CORPUS_SIZE, FIXTURE_CORPUS_SEED).into_iter().map(|(_, s)| s).collect();
        train(&corpus, 3).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_streams_validate(seed in any::<u64>(), temperature in 0.0f64..2.0, max_tokens in 1usize..300, closure in any::<bool>()) {
        let config = GeneratorConfig { temperature, seed, max_tokens, instrument_closure: closure };
        let prompt = canonical_prompt(120).unwrap();
        let song = continue_sequence(fixture_model(), &prompt, &config).unwrap();
        prop_assert_eq!(&song.tokens()[..prompt.len()], prompt.tokens());
        let errors: Vec<_> = validate(&song).into_iter().filter(|d| d.severity == Severity::Error).collect();
        prop_assert!(errors.is_empty(), "{:?}", errors);
        prop_assert_eq!(song.tempo(), Some(120));
        build_score(&song, &TuningSet::default()).unwrap();
    }
}
