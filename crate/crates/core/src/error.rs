use crate::token::Diagnostic;

/// Failures of the score, metric, corpus and generator operations. Each
/// variant carries a stable code (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("fret {0} outside 0..=30")]
    FretOutOfRange(u32),
    #[error("course {course} outside the tuning's {courses} courses")]
    CourseOutOfRange { course: u32, courses: usize },
    #[error("resolved pitch {0} outside 0..=127")]
    PitchOutOfRange(i64),
    #[error("wait overflows the tick counter")]
    TickOverflow,
    #[error("timeline step {0} does not divide 960")]
    InvalidStep(u64),
    #[error("invalid tuning: {0}")]
    InvalidTuning(String),
    #[error("stream has {} error diagnostic(s), first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    InvalidStream(Vec<Diagnostic>),
    #[error("requested {requested} measures but the song has {available}")]
    PromptTooLong { requested: usize, available: usize },
    #[error("no instruments selected for export")]
    EmptyInstrumentSelection,
    #[error("instrument {0} is not present in the score")]
    InstrumentNotInScore(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no defined values to bin")]
    NoDefinedValues,
    #[error("histograms do not share edges")]
    MismatchedEdges,
    #[error("ranking needs at least 2 reports, got {0}")]
    TooFewReports(usize),
    #[error("summary of an empty sequence")]
    EmptyInput,
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("training corpus is empty")]
    EmptyTrainingCorpus,
    #[error("no candidate distribution for context ending in `{0}`")]
    NoDistribution(String),
    #[error("tempo token after start (tempo must come from the prompt)")]
    TempoAfterStart,
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed model document: {0}")]
    ModelFormat(String),
    #[error("malformed table or report: {0}")]
    Format(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::OutOfRange(_) | Error::FretOutOfRange(_) => "E002",
            Error::CourseOutOfRange { .. } => "E013",
            Error::PitchOutOfRange(_) => "E020",
            Error::TickOverflow => "E021",
            Error::InvalidStep(_) => "E022",
            Error::InvalidTuning(_) => "E023",
            Error::InvalidStream(_) => "E024",
            Error::PromptTooLong { .. } => "E030",
            Error::EmptyInstrumentSelection => "E040",
            Error::InstrumentNotInScore(_) => "E041",
            Error::EmptyCorpus => "E050",
            Error::NoDefinedValues => "E051",
            Error::MismatchedEdges => "E052",
            Error::TooFewReports(_) => "E053",
            Error::EmptyInput => "E054",
            Error::DuplicateId(_) => "E055",
            Error::EmptyTrainingCorpus => "E060",
            Error::NoDistribution(_) => "E061",
            Error::TempoAfterStart => "E062",
            Error::InvalidConfig(_) => "E064",
            Error::ModelFormat(_) => "E065",
            Error::Format(_) => "E070",
        }
    }
}
