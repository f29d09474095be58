//! Textual token format for multi-instrument tablature: lexing, canonical
//! serialization and structural validation.
//!
//! Grammar, one lexeme per whitespace-separated word:
//!
//! ```text
//! artist:<text>  downtune:<int<=0>  tempo:<30..=300>  start  new_measure
//! time_signature:<num>:<den>
//! <inst>:note:s<course>:f<fret>      (pitched instruments)
//! drums:note:<27..=87>
//! <inst>:rest  wait:<ticks>  nfx:<inst>:<name>  end
//! ```
//!
//! Ticks are counted at 960 per quarter note.

use std::fmt;

use crate::instrument::InstrumentId;
use crate::tuning::{TuningSet, MAX_FRET};

pub const TICKS_PER_QUARTER: u64 = 960;

pub const MIN_TEMPO: u32 = 30;
pub const MAX_TEMPO: u32 = 300;
pub const MIN_DRUM_KEY: u8 = 27;
pub const MAX_DRUM_KEY: u8 = 87;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    Artist(String),
    Downtune(i32),
    Tempo(u32),
    Start,
    NewMeasure,
    TimeSignature { numerator: u32, denominator: u32 },
    Note { instrument: InstrumentId, course: u32, fret: u32 },
    DrumNote { key: u8 },
    Rest(InstrumentId),
    Wait(u64),
    Effect { instrument: InstrumentId, name: String },
    End,
}

impl Token {
    /// Parse one lexeme. Errors carry the diagnostic code and a message.
    pub fn parse(lexeme: &str) -> Result<Token, (&'static str, String)> {
        let parts: Vec<&str> = lexeme.split(':').collect();
        let unknown = || ("E001", format!("unrecognized token `{lexeme}`"));
        match parts.as_slice() {
            ["start"] => Ok(Token::Start),
            ["new_measure"] => Ok(Token::NewMeasure),
            ["end"] => Ok(Token::End),
            ["artist", _, ..] => match lexeme.strip_prefix("artist:") {
                Some(name) if !name.is_empty() => Ok(Token::Artist(name.to_string())),
                _ => Err(unknown()),
            },
            ["downtune", v] => {
                let v = integer(v, "downtune")?;
                if v > 0 || v < i32::MIN as i128 {
                    return Err(("E002", format!("downtune {v} must be <= 0")));
                }
                Ok(Token::Downtune(v as i32))
            }
            ["tempo", v] => {
                let v = integer(v, "tempo")?;
                if v < MIN_TEMPO as i128 || v > MAX_TEMPO as i128 {
                    return Err(("E002", format!("tempo {v} outside {MIN_TEMPO}..={MAX_TEMPO}")));
                }
                Ok(Token::Tempo(v as u32))
            }
            ["time_signature", n, d] => {
                let n = integer(n, "time signature numerator")?;
                let d = integer(d, "time signature denominator")?;
                if !(1..=32).contains(&n) {
                    return Err(("E002", format!("time signature numerator {n} outside 1..=32")));
                }
                if ![1, 2, 4, 8, 16, 32].contains(&d) {
                    return Err(("E002", format!("time signature denominator {d} not a power of two up to 32")));
                }
                Ok(Token::TimeSignature { numerator: n as u32, denominator: d as u32 })
            }
            ["wait", v] => {
                let v = integer(v, "wait")?;
                if v <= 0 || v > u64::MAX as i128 {
                    return Err(("E002", format!("wait {v} must be a positive tick count")));
                }
                Ok(Token::Wait(v as u64))
            }
            ["nfx", inst, name @ ..] if !name.is_empty() => {
                let instrument = inst.parse().map_err(|_| unknown())?;
                let name = name.join(":");
                if name.is_empty() {
                    return Err(unknown());
                }
                Ok(Token::Effect { instrument, name })
            }
            ["drums", "note", key] => {
                let key = integer(key, "drum key")?;
                if key < MIN_DRUM_KEY as i128 || key > MAX_DRUM_KEY as i128 {
                    return Err(("E002", format!("drum key {key} outside {MIN_DRUM_KEY}..={MAX_DRUM_KEY}")));
                }
                Ok(Token::DrumNote { key: key as u8 })
            }
            [inst, "note", course, fret] => {
                let instrument: InstrumentId = inst.parse().map_err(|_| unknown())?;
                if !instrument.is_pitched() {
                    return Err(unknown());
                }
                let (Some(course), Some(fret)) = (course.strip_prefix('s'), fret.strip_prefix('f')) else {
                    return Err(unknown());
                };
                let course = integer(course, "course")?;
                let fret = integer(fret, "fret")?;
                if course < 1 || course > u32::MAX as i128 {
                    return Err(("E002", format!("course {course} must be >= 1")));
                }
                if fret < 0 || fret > MAX_FRET as i128 {
                    return Err(("E002", format!("fret {fret} outside 0..={MAX_FRET}")));
                }
                Ok(Token::Note { instrument, course: course as u32, fret: fret as u32 })
            }
            [inst, "rest"] => {
                let instrument = inst.parse().map_err(|_| unknown())?;
                Ok(Token::Rest(instrument))
            }
            _ => Err(unknown()),
        }
    }

    /// Instrument a note, rest or effect token belongs to.
    pub fn instrument(&self) -> Option<InstrumentId> {
        match self {
            Token::Note { instrument, .. } | Token::Rest(instrument) | Token::Effect { instrument, .. } => {
                Some(*instrument)
            }
            Token::DrumNote { .. } => Some(InstrumentId::Drums),
            _ => None,
        }
    }

    /// Tokens that belong before `start`.
    pub fn is_header(&self) -> bool {
        matches!(self, Token::Artist(_) | Token::Downtune(_) | Token::Tempo(_) | Token::Start)
    }
}

fn integer(text: &str, what: &str) -> Result<i128, (&'static str, String)> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(("E003", format!("{what} `{text}` is not an integer")));
    }
    text.parse::<i128>().map_err(|_| ("E002", format!("{what} `{text}` is out of range")))
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Artist(name) => write!(f, "artist:{name}"),
            Token::Downtune(v) => write!(f, "downtune:{v}"),
            Token::Tempo(v) => write!(f, "tempo:{v}"),
            Token::Start => f.write_str("start"),
            Token::NewMeasure => f.write_str("new_measure"),
            Token::TimeSignature { numerator, denominator } => {
                write!(f, "time_signature:{numerator}:{denominator}")
            }
            Token::Note { instrument, course, fret } => write!(f, "{instrument}:note:s{course}:f{fret}"),
            Token::DrumNote { key } => write!(f, "drums:note:{key}"),
            Token::Rest(instrument) => write!(f, "{instrument}:rest"),
            Token::Wait(ticks) => write!(f, "wait:{ticks}"),
            Token::Effect { instrument, name } => write!(f, "nfx:{instrument}:{name}"),
            Token::End => f.write_str("end"),
        }
    }
}

/// 1-based line and column (in characters) of a lexeme's first character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: u32,
    pub column: u32,
}

impl Position {
    pub const fn new(line: u32, column: u32) -> Self {
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub position: Position,
    pub message: String,
}

impl Diagnostic {
    fn error(code: &'static str, position: Position, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, position, message: message.into() }
    }

    fn warning(code: &'static str, position: Position, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, position, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {severity} {}: {}", self.position, self.code, self.message)
    }
}

/// Ordered tokens with the source position of each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    tokens: Vec<Token>,
    positions: Vec<Position>,
}

impl TokenStream {
    /// Stream with canonical positions: token `i` on line `i + 1`, column 1.
    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        let positions = (0..tokens.len()).map(|i| Position::new(i as u32 + 1, 1)).collect();
        TokenStream { tokens, positions }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.tokens
    }

    /// Same stream re-positioned as if read back from [`serialize`].
    pub fn canonicalized(&self) -> Self {
        TokenStream::from_tokens(self.tokens.clone())
    }

    pub fn tempo(&self) -> Option<u32> {
        self.tokens.iter().find_map(|t| match t {
            Token::Tempo(bpm) => Some(*bpm),
            _ => None,
        })
    }

    /// Instruments named by any note, rest or effect token.
    pub fn instruments(&self) -> std::collections::BTreeSet<InstrumentId> {
        self.tokens.iter().filter_map(Token::instrument).collect()
    }

    fn push(&mut self, token: Token, position: Position) {
        self.tokens.push(token);
        self.positions.push(position);
    }
}

impl FromIterator<Token> for TokenStream {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenStream::from_tokens(iter.into_iter().collect())
    }
}

/// Output of [`tokenize`]: every classified lexeme plus one diagnostic per
/// rejected lexeme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenized {
    pub stream: TokenStream,
    pub diagnostics: Vec<Diagnostic>,
}

impl Tokenized {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Classify every whitespace-delimited lexeme. Rejected lexemes are left out
/// of the stream and reported instead; this never fails.
pub fn tokenize(text: &str) -> Tokenized {
    let mut stream = TokenStream::default();
    let mut diagnostics = Vec::new();
    for (line_index, line) in text.split('\n').enumerate() {
        let mut start: Option<(usize, usize)> = None;
        let mut chars = line.char_indices().enumerate().peekable();
        while let Some((column, (byte, ch))) = chars.next() {
            if !ch.is_whitespace() && start.is_none() {
                start = Some((column, byte));
            }
            let at_end = chars.peek().is_none();
            let boundary = ch.is_whitespace() || at_end;
            if let (true, Some((col, from))) = (boundary, start) {
                let to = if ch.is_whitespace() { byte } else { byte + ch.len_utf8() };
                let position = Position::new(line_index as u32 + 1, col as u32 + 1);
                match Token::parse(&line[from..to]) {
                    Ok(token) => stream.push(token, position),
                    Err((code, message)) => diagnostics.push(Diagnostic::error(code, position, message)),
                }
                start = None;
            }
        }
    }
    Tokenized { stream, diagnostics }
}

/// Canonical text: one token per line, each line LF-terminated.
pub fn serialize(stream: &TokenStream) -> String {
    let mut out = String::new();
    for token in stream.tokens() {
        out.push_str(&token.to_string());
        out.push('\n');
    }
    out
}

/// Ticks a measure of the given signature spans.
pub fn measure_ticks(numerator: u32, denominator: u32) -> u64 {
    numerator as u64 * TICKS_PER_QUARTER * 4 / denominator as u64
}

/// [`validate_with`] under the default tunings.
pub fn validate(stream: &TokenStream) -> Vec<Diagnostic> {
    validate_with(stream, &TuningSet::default())
}

/// Structural checks. Codes:
///
/// * E010 missing or duplicated `tempo` / `start`
/// * E011 `new_measure` before `start`
/// * E012 effect not directly after a note of the same instrument
/// * E013 course beyond the instrument's tuning
/// * E014 no measures
/// * E015 token out of place (header token in the body, note before the
///   first measure, `time_signature` not right after `new_measure`,
///   anything after `end`)
/// * E016 measure that does not advance time, or notes after its last wait
/// * W001 wait total disagrees with the time signature
pub fn validate_with(stream: &TokenStream, tunings: &TuningSet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let tokens = stream.tokens();
    let positions = stream.positions();
    let first = positions.first().copied().unwrap_or(Position::new(1, 1));

    let mut tempo_count = 0;
    let mut start_count = 0;
    let mut artist_seen = false;
    let mut downtune_seen = false;
    let mut measures = 0usize;
    let mut ended = false;
    let mut signature = (4u32, 4u32);
    let mut measure: Option<OpenMeasure> = None;

    for (i, token) in tokens.iter().enumerate() {
        let pos = positions[i];
        let started = start_count > 0;
        if ended {
            out.push(Diagnostic::error("E015", pos, format!("`{token}` after end")));
            continue;
        }
        match token {
            Token::Tempo(_) => {
                tempo_count += 1;
                if tempo_count > 1 {
                    out.push(Diagnostic::error("E010", pos, "duplicated tempo"));
                } else if started {
                    out.push(Diagnostic::error("E015", pos, "tempo after start"));
                }
            }
            Token::Start => {
                start_count += 1;
                if start_count > 1 {
                    out.push(Diagnostic::error("E010", pos, "duplicated start"));
                }
            }
            Token::Artist(_) | Token::Downtune(_) => {
                let seen = match token {
                    Token::Artist(_) => &mut artist_seen,
                    _ => &mut downtune_seen,
                };
                if started {
                    out.push(Diagnostic::error("E015", pos, format!("`{token}` after start")));
                } else if *seen {
                    out.push(Diagnostic::error("E015", pos, format!("repeated `{token}`")));
                }
                *seen = true;
            }
            Token::NewMeasure => {
                if !started {
                    out.push(Diagnostic::error("E011", pos, "new_measure before start"));
                    continue;
                }
                if let Some(m) = measure.take() {
                    m.close(&mut out);
                }
                measures += 1;
                measure = Some(OpenMeasure::new(pos, signature));
            }
            Token::TimeSignature { numerator, denominator } => {
                let after_measure = i > 0 && tokens[i - 1] == Token::NewMeasure;
                match measure.as_mut() {
                    Some(m) if after_measure => {
                        signature = (*numerator, *denominator);
                        m.signature = signature;
                    }
                    _ => out.push(Diagnostic::error("E015", pos, "time_signature must directly follow new_measure")),
                }
            }
            Token::End => {
                ended = true;
            }
            Token::Wait(ticks) => match measure.as_mut() {
                Some(m) => {
                    m.ticks = m.ticks.saturating_add(*ticks);
                    m.pending = None;
                }
                None => out.push(Diagnostic::error("E015", pos, "wait outside a measure")),
            },
            Token::Note { .. } | Token::DrumNote { .. } | Token::Rest(_) | Token::Effect { .. } => {
                let Some(m) = measure.as_mut() else {
                    out.push(Diagnostic::error("E015", pos, format!("`{token}` outside a measure")));
                    continue;
                };
                m.pending.get_or_insert(pos);
                match token {
                    Token::Effect { instrument, .. } => {
                        // several effects may stack on one note
                        let anchor = tokens[..i].iter().rev().find(|t| !matches!(t, Token::Effect { .. }));
                        let follows_note = tokens[i - 1].instrument() == Some(*instrument)
                            && matches!(anchor, Some(Token::Note { .. } | Token::DrumNote { .. }))
                            && anchor.and_then(Token::instrument) == Some(*instrument);
                        if !follows_note {
                            out.push(Diagnostic::error(
                                "E012",
                                pos,
                                format!("effect on {instrument} does not follow a {instrument} note"),
                            ));
                        }
                    }
                    Token::Note { instrument, course, .. } => {
                        let courses = tunings.get(*instrument).map_or(0, |t| t.course_count());
                        if *course as usize > courses {
                            out.push(Diagnostic::error(
                                "E013",
                                pos,
                                format!("course {course} exceeds the {courses} courses of {instrument}"),
                            ));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    if let Some(m) = measure.take() {
        m.close(&mut out);
    }
    if tempo_count == 0 {
        out.push(Diagnostic::error("E010", first, "missing tempo"));
    }
    if start_count == 0 {
        out.push(Diagnostic::error("E010", first, "missing start"));
    }
    if measures == 0 {
        out.push(Diagnostic::error("E014", first, "song has no measures"));
    }
    out
}

struct OpenMeasure {
    opened: Position,
    signature: (u32, u32),
    ticks: u64,
    pending: Option<Position>,
}

impl OpenMeasure {
    fn new(opened: Position, signature: (u32, u32)) -> Self {
        OpenMeasure { opened, signature, ticks: 0, pending: None }
    }

    fn close(self, out: &mut Vec<Diagnostic>) {
        if let Some(pos) = self.pending {
            out.push(Diagnostic::error("E016", pos, "notes after the last wait of the measure"));
        } else if self.ticks == 0 {
            out.push(Diagnostic::error("E016", self.opened, "measure does not advance time"));
        }
        let (num, den) = self.signature;
        let expected = measure_ticks(num, den);
        if self.ticks != expected {
            out.push(Diagnostic::warning(
                "W001",
                self.opened,
                format!("waits total {} ticks but {num}/{den} needs {expected}", self.ticks),
            ));
        }
    }
}

/// Tokenize and validate; any error diagnostic rejects the document.
pub fn parse(text: &str) -> Result<TokenStream, Vec<Diagnostic>> {
    let Tokenized { stream, mut diagnostics } = tokenize(text);
    diagnostics.extend(validate(&stream));
    if diagnostics.iter().any(Diagnostic::is_error) {
        diagnostics.retain(Diagnostic::is_error);
        Err(diagnostics)
    } else {
        Ok(stream)
    }
}
