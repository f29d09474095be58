pub mod cli;
pub mod corpus;
pub mod error;
pub mod instrument;
pub mod metrics;
pub mod midi;
pub mod ngram;
pub mod plot;
pub mod score;
pub mod synth;
pub mod token;
pub mod tuning;

pub use error::Error;
pub use instrument::InstrumentId;
