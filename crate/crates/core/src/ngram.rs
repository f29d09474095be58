//! Order-k n-gram model over canonical token text, used as a small stand-in
//! generator that continues prompts.
//!
//! Sampling looks up the longest context (up to `order` tokens) whose
//! candidate table still has an admissible token and backs off to shorter
//! contexts, ending at the unigram table. Candidates are weighted by
//! `count^(1/temperature)`; temperature 0 takes the most frequent candidate,
//! ties going to the smallest token text.
//!
//! Admissible means the token keeps the stream structurally valid: no header
//! tokens after `start` (so the tempo always comes from the prompt),
//! `time_signature` only right after `new_measure`, effects only on the note
//! they follow, and with instrument closure on, no instrument outside the
//! prompt's. Measures left open are closed with a wait.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::instrument::InstrumentId;
use crate::token::{measure_ticks, validate, Diagnostic, Token, TokenStream, TICKS_PER_QUARTER};
use crate::tuning::TuningSet;

pub type CountTable = BTreeMap<String, u64>;

pub const DEFAULT_MAX_TOKENS: usize = 512;
const MODEL_FORMAT: &str = "riffgauge-ngram";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramModel {
    order: usize,
    /// Keyed by context, oldest token first. The empty context holds the
    /// unigram counts.
    contexts: BTreeMap<Vec<String>, CountTable>,
}

impl NGramModel {
    /// Count every (context of length 0..=order, next token) pair inside
    /// each sequence; contexts never span two sequences.
    pub fn from_sequences<S: AsRef<str>>(sequences: &[Vec<S>], order: usize) -> Result<Self, Error> {
        if order == 0 {
            return Err(Error::InvalidConfig("order must be at least 1".into()));
        }
        if sequences.iter().all(|s| s.is_empty()) {
            return Err(Error::EmptyTrainingCorpus);
        }
        let mut contexts: BTreeMap<Vec<String>, CountTable> = BTreeMap::new();
        for seq in sequences {
            let seq: Vec<&str> = seq.iter().map(AsRef::as_ref).collect();
            for j in 0..seq.len() {
                for len in 0..=order.min(j) {
                    let context = seq[j - len..j].iter().map(|s| s.to_string()).collect();
                    *contexts.entry(context).or_default().entry(seq[j].to_string()).or_insert(0) += 1;
                }
            }
        }
        Ok(NGramModel { order, contexts })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contexts(&self) -> &BTreeMap<Vec<String>, CountTable> {
        &self.contexts
    }

    pub fn table(&self, context: &[&str]) -> Option<&CountTable> {
        let key: Vec<String> = context.iter().map(|s| s.to_string()).collect();
        self.contexts.get(&key)
    }

    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.contexts.iter().flat_map(|(ctx, table)| ctx.iter().chain(table.keys())).map(String::as_str).collect()
    }

    /// Longest-context candidate table after `keep` filters it, backing off
    /// to shorter contexts while the filtered table is empty.
    pub fn backoff<F>(&self, history: &[String], keep: F) -> Option<CountTable>
    where
        F: Fn(&str) -> bool,
    {
        let longest = self.order.min(history.len());
        (0..=longest).rev().find_map(|len| {
            let table = self.contexts.get(&history[history.len() - len..])?;
            let filtered: CountTable = table.iter().filter(|(t, _)| keep(t)).map(|(t, c)| (t.clone(), *c)).collect();
            (!filtered.is_empty()).then_some(filtered)
        })
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            order: self.order,
            contexts: self
                .contexts
                .iter()
                .map(|(context, next)| ContextDoc { context: context.clone(), next: next.clone() })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!("unsupported format {} v{}", doc.format, doc.version)));
        }
        if doc.order == 0 {
            return Err(Error::ModelFormat("order must be at least 1".into()));
        }
        let mut contexts = BTreeMap::new();
        for ContextDoc { context, next } in doc.contexts {
            if context.len() > doc.order {
                return Err(Error::ModelFormat(format!("context longer than order {}", doc.order)));
            }
            if next.is_empty() || next.values().any(|&c| c == 0) {
                return Err(Error::ModelFormat("count tables must hold positive counts".into()));
            }
            if contexts.insert(context, next).is_some() {
                return Err(Error::ModelFormat("duplicate context".into()));
            }
        }
        if contexts.is_empty() {
            return Err(Error::EmptyTrainingCorpus);
        }
        Ok(NGramModel { order: doc.order, contexts })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    format: String,
    version: u32,
    order: usize,
    contexts: Vec<ContextDoc>,
}

#[derive(Serialize, Deserialize)]
struct ContextDoc {
    context: Vec<String>,
    next: CountTable,
}

/// Train on valid token streams.
pub fn train(corpus: &[TokenStream], order: usize) -> Result<NGramModel, Error> {
    if corpus.is_empty() {
        return Err(Error::EmptyTrainingCorpus);
    }
    for stream in corpus {
        ensure_valid(stream)?;
    }
    let sequences: Vec<Vec<String>> =
        corpus.iter().map(|s| s.tokens().iter().map(Token::to_string).collect()).collect();
    NGramModel::from_sequences(&sequences, order)
}

fn ensure_valid(stream: &TokenStream) -> Result<(), Error> {
    let errors: Vec<Diagnostic> = validate(stream).into_iter().filter(Diagnostic::is_error).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidStream(errors))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub temperature: f64,
    pub seed: u64,
    pub max_tokens: usize,
    pub instrument_closure: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { temperature: 1.0, seed: 0, max_tokens: DEFAULT_MAX_TOKENS, instrument_closure: true }
    }
}

impl GeneratorConfig {
    fn check(&self) -> Result<(), Error> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(Error::InvalidConfig(format!("temperature {}", self.temperature)));
        }
        if self.max_tokens == 0 {
            return Err(Error::InvalidConfig("max_tokens must be positive".into()));
        }
        Ok(())
    }
}

/// Drop note, rest and effect candidates of instruments outside `allowed`.
/// Every other candidate is kept.
pub fn apply_instrument_closure(candidates: &CountTable, allowed: &BTreeSet<InstrumentId>) -> CountTable {
    candidates
        .iter()
        .filter(|(text, _)| match Token::parse(text) {
            Ok(token) => token.instrument().is_none_or(|i| allowed.contains(&i)),
            Err(_) => true,
        })
        .map(|(t, c)| (t.clone(), *c))
        .collect()
}

/// Draw one candidate. Temperature 0 is argmax with ties to the smallest
/// text; otherwise weights are `count^(1/temperature)`.
pub fn sample_candidate<R: Rng>(table: &CountTable, temperature: f64, rng: &mut R) -> Option<String> {
    let max = *table.values().max()?;
    if temperature == 0.0 {
        return table.iter().find(|(_, &c)| c == max).map(|(t, _)| t.clone());
    }
    let log_max = (max as f64).ln();
    let weights: Vec<f64> = table.values().map(|&c| (((c as f64).ln() - log_max) / temperature).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for ((text, _), w) in table.iter().zip(&weights) {
        if u < *w {
            return Some(text.clone());
        }
        u -= w;
    }
    table.keys().next_back().cloned()
}

/// Running structural state of the stream being generated.
struct Grammar {
    tunings: TuningSet,
    allowed: Option<BTreeSet<InstrumentId>>,
    previous: Option<Token>,
    anchor: Option<Token>,
    signature: (u32, u32),
    elapsed: u64,
    pending: bool,
    in_measure: bool,
}

impl Grammar {
    fn new(prompt: &TokenStream, closure: bool) -> Self {
        let mut g = Grammar {
            tunings: TuningSet::default(),
            allowed: closure.then(|| prompt.instruments()),
            previous: None,
            anchor: None,
            signature: (4, 4),
            elapsed: 0,
            pending: false,
            in_measure: false,
        };
        for token in prompt.tokens() {
            g.push(token);
        }
        g
    }

    fn admits(&self, token: &Token) -> bool {
        if let (Some(allowed), Some(i)) = (&self.allowed, token.instrument()) {
            if !allowed.contains(&i) {
                return false;
            }
        }
        match token {
            Token::Artist(_) | Token::Downtune(_) | Token::Tempo(_) | Token::Start => false,
            Token::TimeSignature { .. } => self.previous == Some(Token::NewMeasure),
            Token::Effect { instrument, .. } => {
                self.previous.as_ref().and_then(Token::instrument) == Some(*instrument)
                    && matches!(self.anchor, Some(Token::Note { .. } | Token::DrumNote { .. }))
                    && self.anchor.as_ref().and_then(Token::instrument) == Some(*instrument)
            }
            Token::Note { instrument, course, .. } => {
                self.in_measure && self.tunings.get(*instrument).is_some_and(|t| *course as usize <= t.course_count())
            }
            Token::DrumNote { .. } | Token::Rest(_) | Token::Wait(_) => self.in_measure,
            Token::NewMeasure | Token::End => true,
        }
    }

    fn needs_closing(&self) -> bool {
        self.in_measure && (self.pending || self.elapsed == 0)
    }

    /// Wait that fills the rest of the bar, or an eighth note when the bar
    /// is already full.
    fn closing_wait(&self) -> Token {
        let bar = measure_ticks(self.signature.0, self.signature.1);
        Token::Wait(if self.elapsed < bar { bar - self.elapsed } else { TICKS_PER_QUARTER / 2 })
    }

    fn push(&mut self, token: &Token) {
        match token {
            Token::NewMeasure => {
                self.in_measure = true;
                self.elapsed = 0;
                self.pending = false;
            }
            Token::TimeSignature { numerator, denominator } => self.signature = (*numerator, *denominator),
            Token::Wait(t) => {
                self.elapsed = self.elapsed.saturating_add(*t);
                self.pending = false;
            }
            Token::Note { .. } | Token::DrumNote { .. } | Token::Rest(_) => self.pending = true,
            _ => {}
        }
        if !matches!(token, Token::Effect { .. }) {
            self.anchor = Some(token.clone());
        }
        self.previous = Some(token.clone());
    }
}

/// Continue `prompt` with up to `config.max_tokens` sampled tokens. The
/// output always starts with the prompt and validates without errors.
pub fn continue_sequence(
    model: &NGramModel,
    prompt: &TokenStream,
    config: &GeneratorConfig,
) -> Result<TokenStream, Error> {
    config.check()?;
    ensure_valid(prompt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut grammar = Grammar::new(prompt, config.instrument_closure);
    let mut tokens: Vec<Token> = prompt.tokens().to_vec();
    let mut history: Vec<String> = tokens.iter().map(Token::to_string).collect();

    fn push(token: Token, tokens: &mut Vec<Token>, history: &mut Vec<String>, grammar: &mut Grammar) {
        grammar.push(&token);
        history.push(token.to_string());
        tokens.push(token);
    }

    for _ in 0..config.max_tokens {
        let table = model
            .backoff(&history, |text| Token::parse(text).is_ok_and(|t| grammar.admits(&t)))
            .ok_or_else(|| Error::NoDistribution(history.last().cloned().unwrap_or_default()))?;
        let text = sample_candidate(&table, config.temperature, &mut rng).expect("non-empty table");
        let token = Token::parse(&text).expect("admitted tokens parse");
        if matches!(token, Token::NewMeasure | Token::End) && grammar.needs_closing() {
            let wait = grammar.closing_wait();
            push(wait, &mut tokens, &mut history, &mut grammar);
        }
        let done = token == Token::End;
        push(token, &mut tokens, &mut history, &mut grammar);
        if done {
            break;
        }
    }
    if tokens.last() != Some(&Token::End) && grammar.needs_closing() {
        let wait = grammar.closing_wait();
        push(wait, &mut tokens, &mut history, &mut grammar);
    }

    let out = TokenStream::from_tokens(tokens);
    debug_assert!(validate(&out).iter().all(|d| !d.is_error()), "{:?}", validate(&out));
    Ok(out)
}

/// Check that `generated` carries the prompt's tempo and no tempo token
/// after `start`.
pub fn tempo_inheritance(prompt: &TokenStream, generated: &TokenStream) -> Result<(), Error> {
    let mut started = false;
    let mut tempi = Vec::new();
    for token in generated.tokens() {
        match token {
            Token::Start => started = true,
            Token::Tempo(_) if started => return Err(Error::TempoAfterStart),
            Token::Tempo(bpm) => tempi.push(*bpm),
            _ => {}
        }
    }
    if tempi.len() != 1 || prompt.tempo() != tempi.first().copied() {
        return Err(Error::TempoAfterStart);
    }
    Ok(())
}

/// A named generator configuration, standing in for a training checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointSpec {
    pub checkpoint_id: String,
    pub order: usize,
    pub temperature: f64,
    pub songs_to_generate: usize,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of song `index` of a checkpoint:
/// `splitmix64(splitmix64(master ^ fnv1a64(checkpoint_id)) ^ index)`.
pub fn derive_seed(master: u64, checkpoint_id: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a64(checkpoint_id.as_bytes())) ^ index)
}

/// Train one model per distinct order and generate each checkpoint's songs
/// from `prompt`. `defaults` supplies the master seed, token budget and
/// closure flag; each spec supplies its temperature.
pub fn sweep(
    corpus: &[TokenStream],
    specs: &[CheckpointSpec],
    prompt: &TokenStream,
    defaults: &GeneratorConfig,
) -> Result<BTreeMap<String, Vec<TokenStream>>, Error> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("no checkpoints to sweep".into()));
    }
    let mut models: BTreeMap<usize, NGramModel> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for spec in specs {
        if out.contains_key(&spec.checkpoint_id) {
            return Err(Error::DuplicateId(spec.checkpoint_id.clone()));
        }
        let model = match models.entry(spec.order) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(train(corpus, spec.order)?),
        };
        let model = &*model;
        let songs = (0..spec.songs_to_generate)
            .into_par_iter()
            .map(|i| {
                let config = GeneratorConfig {
                    temperature: spec.temperature,
                    seed: derive_seed(defaults.seed, &spec.checkpoint_id, i as u64),
                    ..defaults.clone()
                };
                continue_sequence(model, prompt, &config)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        out.insert(spec.checkpoint_id.clone(), songs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::canonical_prompt;
    use crate::token::{serialize, tokenize};

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn bigram_counts() {
        let m = NGramModel::from_sequences(&[words("x y x y x")], 1).unwrap();
        assert_eq!(m.table(&["x"]).unwrap(), &CountTable::from([("y".into(), 2)]));
        assert_eq!(m.table(&["y"]).unwrap(), &CountTable::from([("x".into(), 2)]));
        assert_eq!(m.table(&[]).unwrap(), &CountTable::from([("x".into(), 3), ("y".into(), 2)]));
    }

    #[test]
    fn trigram_counts() {
        let m = NGramModel::from_sequences(&[words("x y x y x")], 2).unwrap();
        assert_eq!(m.table(&["x", "y"]).unwrap(), &CountTable::from([("x".into(), 2)]));
        assert_eq!(m.table(&["y", "x"]).unwrap(), &CountTable::from([("y".into(), 1)]));
    }

    #[test]
    fn no_context_spans_songs() {
        let m = NGramModel::from_sequences(&[words("a b"), words("c d")], 2).unwrap();
        assert!(m.table(&["b"]).is_none());
        assert!(m.table(&["b", "c"]).is_none());
        assert_eq!(m.table(&[]).unwrap().len(), 4);
        assert_eq!(m.vocabulary(), BTreeSet::from(["a", "b", "c", "d"]));
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(train(&[], 2).unwrap_err().code(), "E060");
        assert_eq!(NGramModel::from_sequences::<String>(&[vec![]], 2).unwrap_err().code(), "E060");
        assert!(NGramModel::from_sequences(&[words("a")], 0).is_err());
    }

    #[test]
    fn backoff_prefers_longest_admissible() {
        let m = NGramModel::from_sequences(&[words("a b c"), words("z b d")], 2).unwrap();
        let hist = words("a b");
        assert_eq!(m.backoff(&hist, |_| true).unwrap(), CountTable::from([("c".into(), 1)]));
        // c filtered out: back off to context [b]
        assert_eq!(m.backoff(&hist, |t| t != "c").unwrap(), CountTable::from([("d".into(), 1)]));
        // unseen history falls to the unigram table
        assert_eq!(m.backoff(&words("q"), |t| t == "z").unwrap(), CountTable::from([("z".into(), 1)]));
        assert!(m.backoff(&hist, |_| false).is_none());
    }

    #[test]
    fn argmax_ties_by_text() {
        let table = CountTable::from([("b".into(), 2), ("a".into(), 2), ("c".into(), 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_candidate(&table, 0.0, &mut rng).as_deref(), Some("a"));
        assert!(sample_candidate(&CountTable::new(), 1.0, &mut rng).is_none());
    }

    #[test]
    fn closure_examples() {
        let table = CountTable::from([
            ("bass:note:s4:f0".into(), 2),
            ("distorted0:note:s6:f0".into(), 1),
            ("drums:note:36".into(), 1),
            ("nfx:bass:slide".into(), 1),
            ("wait:480".into(), 3),
            ("new_measure".into(), 1),
            ("end".into(), 1),
        ]);
        let allowed = BTreeSet::from([InstrumentId::Distorted0, InstrumentId::Drums]);
        let kept = apply_instrument_closure(&table, &allowed);
        assert!(!kept.contains_key("bass:note:s4:f0") && !kept.contains_key("nfx:bass:slide"));
        assert_eq!(kept.len(), 5);

        let all: BTreeSet<_> = InstrumentId::ALL.into();
        assert_eq!(apply_instrument_closure(&table, &all), table);

        let only_bass = CountTable::from([("bass:note:s4:f0".into(), 2), ("wait:480".into(), 3)]);
        let kept = apply_instrument_closure(&only_bass, &allowed);
        assert_eq!(kept, CountTable::from([("wait:480".into(), 3)]));
    }

    fn corpus() -> Vec<TokenStream> {
        [
            "tempo:90 start new_measure distorted0:note:s6:f0 bass:note:s4:f0 drums:note:36 wait:960
             distorted0:note:s6:f3 drums:note:38 wait:960 distorted0:note:s6:f5 wait:1920
             new_measure distorted0:note:s5:f2 nfx:distorted0:vibrato drums:note:36 wait:3840 end",
            "tempo:200 start new_measure time_signature:7:8 leads0:note:s1:f12 drums:note:42 wait:480
             leads0:note:s1:f15 wait:2880 new_measure bass:note:s3:f2 wait:3360 end",
        ]
        .iter()
        .map(|t| tokenize(t).stream)
        .collect()
    }

    #[test]
    fn generation_is_valid_and_closed() {
        let model = train(&corpus(), 3).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        for seed in 0..30 {
            let config = GeneratorConfig { seed, max_tokens: 64, ..Default::default() };
            let out = continue_sequence(&model, &prompt, &config).unwrap();
            assert!(serialize(&out).starts_with(&serialize(&prompt)));
            assert!(validate(&out).iter().all(|d| !d.is_error()), "{:?}", validate(&out));
            assert!(out.instruments().is_subset(&prompt.instruments()));
            tempo_inheritance(&prompt, &out).unwrap();
            assert_eq!(out.tempo(), Some(120));
            let vocab = model.vocabulary();
            let prompt_text: BTreeSet<String> = prompt.tokens().iter().map(Token::to_string).collect();
            for t in &out.tokens()[prompt.len()..] {
                let text = t.to_string();
                let repair = matches!(t, Token::Wait(_));
                assert!(vocab.contains(text.as_str()) || prompt_text.contains(&text) || repair, "{text}");
            }
        }
    }

    #[test]
    fn closure_off_reaches_other_instruments() {
        let song =
            tokenize("tempo:120 start new_measure drums:note:36 wait:3840 new_measure leads0:note:s1:f0 wait:3840")
                .stream;
        let model = train(&[song], 1).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        let reached = |closure: bool| -> BTreeSet<InstrumentId> {
            (0..20)
                .flat_map(|seed| {
                    let config =
                        GeneratorConfig { seed, max_tokens: 16, instrument_closure: closure, ..Default::default() };
                    continue_sequence(&model, &prompt, &config).unwrap().instruments()
                })
                .collect()
        };
        assert!(reached(false).contains(&InstrumentId::Leads0));
        assert!(!reached(true).contains(&InstrumentId::Leads0));
    }

    #[test]
    fn zero_temperature_ignores_seed() {
        let model = train(&corpus(), 2).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        let runs: Vec<_> = (0..5)
            .map(|seed| {
                let config = GeneratorConfig { seed, temperature: 0.0, max_tokens: 40, ..Default::default() };
                continue_sequence(&model, &prompt, &config).unwrap()
            })
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn chain_model_has_unique_continuation() {
        let text = "tempo:100 start new_measure bass:note:s4:f0 wait:1920 bass:note:s4:f2 wait:1920 end";
        let song = tokenize(text).stream;
        let model = train(std::slice::from_ref(&song), 8).unwrap();
        let prompt = TokenStream::from_tokens(song.tokens()[..5].to_vec());
        for seed in [1, 2, 99] {
            let config = GeneratorConfig { seed, ..Default::default() };
            assert_eq!(continue_sequence(&model, &prompt, &config).unwrap(), song.canonicalized());
        }
    }

    #[test]
    fn budget_and_repair() {
        let model = train(&corpus(), 2).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        let config = GeneratorConfig { seed: 3, max_tokens: 1, ..Default::default() };
        let out = continue_sequence(&model, &prompt, &config).unwrap();
        assert!(out.len() <= prompt.len() + 3);
        assert!(validate(&out).iter().all(|d| !d.is_error()));
    }

    #[test]
    fn config_errors() {
        let model = train(&corpus(), 2).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        let bad = GeneratorConfig { temperature: -1.0, ..Default::default() };
        assert_eq!(continue_sequence(&model, &prompt, &bad).unwrap_err().code(), "E064");
        let bad = GeneratorConfig { max_tokens: 0, ..Default::default() };
        assert!(continue_sequence(&model, &prompt, &bad).is_err());
        let invalid = tokenize("tempo:120 start").stream;
        assert_eq!(continue_sequence(&model, &invalid, &GeneratorConfig::default()).unwrap_err().code(), "E024");
    }

    #[test]
    fn no_distribution() {
        // only header and structural tokens the grammar cannot place
        let model = NGramModel::from_sequences(&[words("tempo:120 start")], 1).unwrap();
        let prompt = canonical_prompt(120).unwrap();
        assert_eq!(continue_sequence(&model, &prompt, &GeneratorConfig::default()).unwrap_err().code(), "E061");
    }

    #[test]
    fn tempo_checker() {
        let prompt = canonical_prompt(120).unwrap();
        let bad = tokenize("tempo:120 start new_measure tempo:90 wait:3840").stream;
        assert_eq!(tempo_inheritance(&prompt, &bad).unwrap_err().code(), "E062");
        let other = canonical_prompt(90).unwrap();
        assert_eq!(tempo_inheritance(&prompt, &other).unwrap_err().code(), "E062");
        assert!(tempo_inheritance(&prompt, &prompt).is_ok());
    }

    #[test]
    fn varied_tempo_corpus_keeps_prompt_tempo() {
        let model = train(&corpus(), 1).unwrap();
        assert!(model.vocabulary().contains("tempo:200"));
        let prompt = canonical_prompt(150).unwrap();
        let out = continue_sequence(&model, &prompt, &GeneratorConfig { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(out.tokens().iter().filter(|t| matches!(t, Token::Tempo(_))).count(), 1);
        assert_eq!(out.tempo(), Some(150));
    }

    #[test]
    fn model_json_round_trip() {
        let model = train(&corpus(), 3).unwrap();
        let json = model.to_json();
        assert_eq!(NGramModel::from_json(&json).unwrap(), model);
        assert!(NGramModel::from_json("{\"format\":\"x\",\"version\":1,\"order\":1,\"contexts\":[]}").is_err());
        let zero = r#"{"format":"riffgauge-ngram","version":1,"order":1,"contexts":[{"context":[],"next":{"a":0}}]}"#;
        assert_eq!(NGramModel::from_json(zero).unwrap_err().code(), "E065");
        let long =
            r#"{"format":"riffgauge-ngram","version":1,"order":1,"contexts":[{"context":["a","b"],"next":{"a":1}}]}"#;
        assert!(NGramModel::from_json(long).is_err());
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(derive_seed(7, "epoch-15", 0), derive_seed(7, "epoch-15", 0));
        let seeds: BTreeSet<u64> =
            ["a", "b"].iter().flat_map(|id| (0..50).map(move |i| derive_seed(7, id, i))).collect();
        assert_eq!(seeds.len(), 100);
        // fnv1a64 reference value for the empty input
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn sweep_shapes() {
        let specs = vec![
            CheckpointSpec { checkpoint_id: "k1".into(), order: 1, temperature: 1.0, songs_to_generate: 5 },
            CheckpointSpec { checkpoint_id: "k3".into(), order: 3, temperature: 0.7, songs_to_generate: 5 },
        ];
        let prompt = canonical_prompt(120).unwrap();
        let defaults = GeneratorConfig { seed: 11, max_tokens: 48, ..Default::default() };
        let a = sweep(&corpus(), &specs, &prompt, &defaults).unwrap();
        let b = sweep(&corpus(), &specs, &prompt, &defaults).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().map(Vec::len).sum::<usize>(), 10);
        assert!(a.values().flatten().all(|s| validate(s).iter().all(|d| !d.is_error())));

        let dup = vec![specs[0].clone(), specs[0].clone()];
        assert_eq!(sweep(&corpus(), &dup, &prompt, &defaults).unwrap_err().code(), "E055");
        assert!(sweep(&corpus(), &[], &prompt, &defaults).is_err());
    }
}
