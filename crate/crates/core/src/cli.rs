//! The `riffgauge` command line. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | invalid input (diagnostics with errors, malformed tables, empty corpora) |
//! | 2 | usage error |
//! | 3 | I/O error |
//!
//! Machine output goes to `--out` (standard output when omitted, except for
//! binary and multi-file outputs); human summaries go to standard output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use rayon::prelude::*;

use crate::corpus::{
    box_stats, compare, corpus_metrics_with_step, rank_checkpoints, reports_from_csv, CorpusTable, KldReport,
    DEFAULT_BINS, DEFAULT_EPSILON,
};
use crate::error::Error;
use crate::instrument::InstrumentId;
use crate::metrics::MetricId;
use crate::midi::export_midi;
use crate::ngram::{continue_sequence, derive_seed, train, GeneratorConfig, NGramModel, DEFAULT_MAX_TOKENS};
use crate::plot::render_box_plot;
use crate::score::{build_score, canonical_prompt_with_cymbal, extract_prompt, Score, CRASH, DEFAULT_STEP_TICKS};
use crate::token::{serialize, tokenize, validate, Diagnostic, TokenStream};
use crate::tuning::TuningSet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Caps the worker threads used for per-song work.
pub const THREADS_ENV: &str = "RIFFGAUGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "riffgauge", version, about = "Tablature token tools, song metrics and corpus divergence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check token files (or directories of them) and list diagnostics.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Per-song metric table of a directory of token files.
    Metrics {
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STEP_TICKS)]
        step_ticks: u64,
    },
    /// KL divergence of a generated corpus from a reference corpus. Each side
    /// is a directory of token files or a metrics CSV.
    Compare {
        reference: PathBuf,
        generated: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report id; defaults to the generated corpus name.
        #[arg(long)]
        checkpoint: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_STEP_TICKS)]
        step_ticks: u64,
    },
    /// Rank checkpoints from KLD reports (JSON) or KLD tables (CSV).
    Rank {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// JSON, or CSV when the path ends in `.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continue a prompt with an n-gram model.
    #[command(group(ArgGroup::new("source").required(true).args(["model", "corpus"])))]
    #[command(group(ArgGroup::new("seed_prompt").required(true).args(["prompt", "canonical"])))]
    Generate {
        /// Saved model JSON.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Directory of token files to train on.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        save_model: Option<PathBuf>,
        #[arg(long)]
        prompt: Option<PathBuf>,
        #[arg(long)]
        canonical: bool,
        #[arg(long, default_value_t = 120)]
        tempo: u32,
        #[arg(long, default_value_t = CRASH)]
        cymbal: u8,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "ngram")]
        checkpoint: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_TOKENS)]
        max_tokens: usize,
        #[arg(long)]
        no_instrument_closure: bool,
    },
    /// Write the canonical prompt, or the first measures of a song.
    Prompt {
        #[arg(long, default_value_t = 120)]
        tempo: u32,
        #[arg(long, default_value_t = CRASH)]
        cymbal: u8,
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = 1, requires = "from")]
        measures: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export selected instruments of a song to a format-1 MIDI file.
    ExportMidi {
        song: PathBuf,
        /// Comma-separated; defaults to every instrument in the song.
        #[arg(long, value_delimiter = ',')]
        instruments: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// SVG box plot of one metric across metrics CSVs, one box per file.
    Plot {
        #[arg(required = true)]
        tables: Vec<PathBuf>,
        #[arg(long)]
        metric: String,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let text = format!("error {}: {e}", e.code());
        match e {
            Error::TooFewReports(_) => Failure::Usage(text),
            _ => Failure::Invalid(text),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parse `args` (program name first), run the command and return its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let mut summary = Vec::new();
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| dispatch(cli.command, &mut summary)),
        Ok(None) => dispatch(cli.command, &mut summary),
        Err(f) => Err(f),
    };
    let _ = stdout.write_all(&summary);
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message());
            f.exit_code()
        }
    }
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Failure::Usage(format!("cannot build thread pool: {e}")))
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { paths } => cmd_validate(&paths, stdout),
        Command::Metrics { corpus, out, step_ticks } => cmd_metrics(&corpus, out.as_deref(), step_ticks, stdout),
        Command::Compare { reference, generated, out, checkpoint, bins, epsilon, step_ticks } => {
            let reference = load_table(&reference, None, step_ticks)?;
            let generated = load_table(&generated, checkpoint, step_ticks)?;
            let report = compare(&reference, &generated, bins, epsilon)?;
            emit(out.as_deref(), report.to_json().as_bytes(), stdout)?;
            if out.is_some() {
                let defined = report.kld.values().filter(|v| v.is_some()).count();
                say(stdout, &format!("{}: {defined} of {} metrics defined", report.checkpoint_id, report.kld.len()));
            }
            Ok(())
        }
        Command::Rank { reports, out } => cmd_rank(&reports, out.as_deref(), stdout),
        Command::Generate {
            model,
            corpus,
            save_model,
            prompt,
            canonical: _,
            tempo,
            cymbal,
            out,
            count,
            checkpoint,
            seed,
            order,
            temperature,
            max_tokens,
            no_instrument_closure,
        } => {
            if checkpoint.is_empty() || checkpoint.contains(['/', '\\']) {
                return Err(Failure::Usage(format!("checkpoint id `{checkpoint}` is not a valid file name part")));
            }
            let model = match (model, corpus) {
                (Some(path), _) => NGramModel::from_json(&read_text(&path)?)?,
                (None, Some(dir)) => {
                    let streams: Vec<TokenStream> = load_streams(&dir)?.into_iter().map(|(_, s)| s).collect();
                    train(&streams, order)?
                }
                (None, None) => return Err(Failure::Usage("one of --model or --corpus is required".into())),
            };
            if let Some(path) = save_model {
                write_file(&path, model.to_json().as_bytes())?;
            }
            let prompt = match prompt {
                Some(path) => load_stream(&path)?,
                None => canonical_prompt_with_cymbal(tempo, cymbal)?,
            };
            let base = GeneratorConfig { temperature, seed, max_tokens, instrument_closure: !no_instrument_closure };
            let songs = (0..count)
                .into_par_iter()
                .map(|i| {
                    let config = GeneratorConfig { seed: derive_seed(seed, &checkpoint, i as u64), ..base.clone() };
                    continue_sequence(&model, &prompt, &config)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            fs::create_dir_all(&out).map_err(|e| io_failure(&out, e))?;
            for (i, song) in songs.iter().enumerate() {
                write_file(&out.join(format!("gen_{checkpoint}_{i}.tokens.txt")), serialize(song).as_bytes())?;
            }
            say(stdout, &format!("wrote {count} song(s) to {}", out.display()));
            Ok(())
        }
        Command::Prompt { tempo, cymbal, from, measures, out } => {
            let prompt = match from {
                Some(path) => extract_prompt(&load_score(&path)?, measures)?,
                None => canonical_prompt_with_cymbal(tempo, cymbal)?,
            };
            emit(out.as_deref(), serialize(&prompt).as_bytes(), stdout)
        }
        Command::ExportMidi { song, instruments, out } => {
            let score = load_score(&song)?;
            let selection: Vec<InstrumentId> = if instruments.is_empty() {
                score.source_instruments().iter().copied().collect()
            } else {
                instruments
                    .iter()
                    .map(|name| name.trim().parse().map_err(|e| Failure::Usage(format!("{e}"))))
                    .collect::<Result<_, _>>()?
            };
            let bytes = export_midi(&score, &selection)?;
            write_file(&out, &bytes)?;
            say(stdout, &format!("wrote {} track(s) to {}", selection.len() + 1, out.display()));
            Ok(())
        }
        Command::Plot { tables, metric, title, out } => {
            let metric: MetricId = metric.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            let mut series = Vec::with_capacity(tables.len());
            for path in &tables {
                let table = CorpusTable::from_csv(file_id(path), &read_text(path)?)?;
                let stats = box_stats(&table.values(metric))
                    .map_err(|e| Failure::Invalid(format!("{}: error {}: {e}", path.display(), e.code())))?;
                series.push((table.corpus_id().to_string(), stats));
            }
            let title = title.unwrap_or_else(|| metric.label().to_string());
            emit(out.as_deref(), render_box_plot(&title, metric.key(), &series).as_bytes(), stdout)
        }
    }
}

fn cmd_validate(paths: &[PathBuf], stdout: &mut dyn Write) -> Outcome {
    let mut files = Vec::new();
    for path in paths {
        files.extend(song_files(path)?);
    }
    let (mut errors, mut warnings) = (0, 0);
    for file in &files {
        for d in diagnostics(&read_text(file)?) {
            if d.is_error() {
                errors += 1;
            } else {
                warnings += 1;
            }
            say(stdout, &format!("{}:{d}", file.display()));
        }
    }
    say(stdout, &format!("{} file(s), {errors} error(s), {warnings} warning(s)", files.len()));
    if errors > 0 {
        Err(Failure::Invalid(format!("{errors} error(s)")))
    } else {
        Ok(())
    }
}

fn cmd_metrics(corpus: &Path, out: Option<&Path>, step_ticks: u64, stdout: &mut dyn Write) -> Outcome {
    let table = load_table(corpus, None, step_ticks)?;
    emit(out, table.to_csv().as_bytes(), stdout)?;
    if out.is_some() {
        say(stdout, &format!("{}: {} song(s)", table.corpus_id(), table.len()));
    }
    Ok(())
}

fn cmd_rank(paths: &[PathBuf], out: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    let mut reports: Vec<KldReport> = Vec::new();
    for path in paths {
        let text = read_text(path)?;
        let with_path = |e: Error| Failure::Invalid(format!("{}: error {}: {e}", path.display(), e.code()));
        if has_extension(path, "csv") {
            reports.extend(reports_from_csv(&text).map_err(with_path)?);
        } else {
            reports.push(KldReport::from_json(&text).map_err(with_path)?);
        }
    }
    let ranking = rank_checkpoints(&reports)?;
    let body = match out {
        Some(p) if has_extension(p, "csv") => ranking.to_csv(),
        _ => ranking.to_json(),
    };
    emit(out, body.as_bytes(), stdout)?;
    if out.is_some() {
        for (metric, winner) in &ranking.per_metric_winner {
            say(stdout, &format!("{:<5} {}", metric.key(), winner.as_deref().unwrap_or("-")));
        }
        let overall = ranking.overall_winner.as_deref().unwrap_or("-");
        let mean = ranking.overall_means.get(overall).map(|m| format!(" (mean {m:.4})")).unwrap_or_default();
        say(stdout, &format!("overall {overall}{mean}"));
    }
    Ok(())
}

fn diagnostics(text: &str) -> Vec<Diagnostic> {
    let tokenized = tokenize(text);
    let mut all = tokenized.diagnostics;
    all.extend(validate(&tokenized.stream));
    all.sort_by_key(|d| d.position);
    all
}

fn say(w: &mut dyn Write, line: &str) {
    let _ = writeln!(w, "{line}");
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_failure(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Outcome {
    match out {
        Some(path) => write_file(path, bytes),
        None => stdout.write_all(bytes).map_err(|e| Failure::Io(format!("standard output: {e}"))),
    }
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// File name without `.tokens.txt`, `.txt`, `.csv` or `.json`.
pub fn file_id(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for suffix in [".tokens.txt", ".txt", ".csv", ".json"] {
        if let Some(stem) = name.strip_suffix(suffix) {
            return stem.to_string();
        }
    }
    name
}

/// `path` itself, or the `.txt` files directly inside it, sorted.
fn song_files(path: &Path) -> Result<Vec<PathBuf>, Failure> {
    let meta = fs::metadata(path).map_err(|e| io_failure(path, e))?;
    if !meta.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| io_failure(path, e))? {
        let p = entry.map_err(|e| io_failure(path, e))?.path();
        if p.is_file() && has_extension(&p, "txt") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

fn load_stream(path: &Path) -> Result<TokenStream, Failure> {
    let text = read_text(path)?;
    let tokenized = tokenize(&text);
    let errors: Vec<String> = diagnostics(&text)
        .into_iter()
        .filter(Diagnostic::is_error)
        .map(|d| format!("{}:{d}", path.display()))
        .collect();
    if errors.is_empty() {
        Ok(tokenized.stream)
    } else {
        Err(Failure::Invalid(errors.join("\n")))
    }
}

fn load_score(path: &Path) -> Result<Score, Failure> {
    let stream = load_stream(path)?;
    build_score(&stream, &TuningSet::default())
        .map_err(|e| Failure::Invalid(format!("{}: error {}: {e}", path.display(), e.code())))
}

/// Every song of a directory; all parse failures are reported together.
fn load_streams(dir: &Path) -> Result<Vec<(String, TokenStream)>, Failure> {
    let mut songs = Vec::new();
    let mut problems = Vec::new();
    for path in song_files(dir)? {
        match load_stream(&path) {
            Ok(s) => songs.push((file_id(&path), s)),
            Err(Failure::Invalid(m)) => problems.push(m),
            Err(f) => return Err(f),
        }
    }
    if !problems.is_empty() {
        return Err(Failure::Invalid(problems.join("\n")));
    }
    Ok(songs)
}

/// A metrics CSV as-is, or the metrics of a directory of songs.
fn load_table(path: &Path, id: Option<String>, step_ticks: u64) -> Result<CorpusTable, Failure> {
    let id = id.unwrap_or_else(|| file_id(path));
    if path.is_file() && has_extension(path, "csv") {
        return CorpusTable::from_csv(id, &read_text(path)?)
            .map_err(|e| Failure::Invalid(format!("{}: error {}: {e}", path.display(), e.code())));
    }
    let mut scores = Vec::new();
    for (song_id, stream) in load_streams(path)? {
        let score = build_score(&stream, &TuningSet::default())
            .map_err(|e| Failure::Invalid(format!("{song_id}: error {}: {e}", e.code())))?;
        scores.push((song_id, score));
    }
    Ok(corpus_metrics_with_step(&id, &scores, step_ticks)?)
}
