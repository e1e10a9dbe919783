//! Command-line front end for the matching statistics index.
//!
//! One subcommand per task: `build` creates an index file, `ms`, `mems`,
//! and `locate` answer batch queries against it, `stream` answers
//! push-based queries with per-byte latency, and `stats` and `bench`
//! report structure sizes and per-variant work counters. Exit codes
//! distinguish validation failures (2), unreadable index files (3), and
//! I/O errors (4).

use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use msidx::{
    BuildParams, IndexError, InputMode, MsEntry, MsError, MsIndex, MsStats, Pattern, TextError,
    Variant,
};

#[derive(Parser)]
#[command(name = "msidx", version, about = "Matching statistics index over repetitive texts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an index file from a text.
    Build {
        /// Input text file.
        text: PathBuf,
        /// How to interpret the input bytes.
        #[arg(long, value_enum, default_value_t = ModeArg::Raw)]
        mode: ModeArg,
        /// Parsing window width.
        #[arg(long = "w", default_value_t = 10)]
        window: usize,
        /// Trigger modulus of the parsing hash.
        #[arg(long = "p", default_value_t = 100)]
        modulus: usize,
        /// Index the reversed text (enables `stream`).
        #[arg(long)]
        reversed: bool,
        /// Also store occurrence-listing samples (enables `locate`).
        #[arg(long)]
        with_locate: bool,
        /// Also store threshold tables (enables `--variant twopass`).
        #[arg(long)]
        with_thresholds: bool,
        /// Output index file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Matching statistics for each pattern in a file ('-' for stdin).
    Ms {
        index: PathBuf,
        /// Pattern file, one pattern per line.
        patterns: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Std)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
        format: FormatArg,
        /// Process patterns on this many threads; output order is
        /// unaffected.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Per-byte matching statistics over stdin; one flushed line per byte.
    Stream { index: PathBuf },
    /// All occurrences of the pattern window `[i, j]` (defaults: whole
    /// pattern), one sorted position per line.
    Locate {
        index: PathBuf,
        pattern: String,
        i: Option<usize>,
        j: Option<usize>,
    },
    /// Maximal exact matches per pattern as "i<TAB>pos<TAB>len" lines.
    Mems {
        index: PathBuf,
        /// Pattern file, one pattern per line.
        patterns: String,
        #[arg(long, default_value_t = 25)]
        min_len: usize,
    },
    /// Structure sizes; optionally query-derived figures for a pattern
    /// file.
    Stats {
        index: PathBuf,
        #[arg(long)]
        with_query: Option<String>,
    },
    /// Per-variant timing and work counters as CSV.
    Bench {
        index: PathBuf,
        /// Pattern file, one pattern per line.
        patterns: String,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "std")]
        variants: Vec<VariantArg>,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Raw,
    Fasta,
}

impl ModeArg {
    fn to_mode(self) -> InputMode {
        match self {
            ModeArg::Raw => InputMode::Raw,
            ModeArg::Fasta => InputMode::Fasta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Std,
    Naive,
    Heur,
    Twopass,
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::Std => "std",
            VariantArg::Naive => "naive",
            VariantArg::Heur => "heur",
            VariantArg::Twopass => "twopass",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Tsv,
    Lens,
}

#[derive(Debug)]
enum CliError {
    Index(IndexError),
    Ms(MsError),
    Text(TextError),
    Io(io::Error),
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Index(IndexError::Format(_)) => 3,
            CliError::Index(IndexError::Io(_)) | CliError::Io(_) => 4,
            CliError::Index(_) | CliError::Ms(_) | CliError::Text(_) | CliError::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Index(e) => e.fmt(f),
            CliError::Ms(e) => e.fmt(f),
            CliError::Text(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
            CliError::Usage(msg) => f.write_str(msg),
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> CliError {
        CliError::Index(e)
    }
}

impl From<MsError> for CliError {
    fn from(e: MsError) -> CliError {
        CliError::Ms(e)
    }
}

impl From<TextError> for CliError {
    fn from(e: TextError) -> CliError {
        CliError::Text(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> CliError {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Build {
            text,
            mode,
            window,
            modulus,
            reversed,
            with_locate,
            with_thresholds,
            output,
        } => {
            let raw = fs::read(&text)?;
            let params = BuildParams {
                window,
                modulus,
                reversed,
                with_locate,
                with_thresholds,
            };
            let idx = MsIndex::build_from_bytes(&raw, mode.to_mode(), &params)?;
            idx.save_to_path(&output)?;
            print_sizes(&idx);
            Ok(())
        }
        Cmd::Ms {
            index,
            patterns,
            variant,
            format,
            threads,
        } => cmd_ms(&index, &patterns, variant, format, threads),
        Cmd::Stream { index } => cmd_stream(&index),
        Cmd::Locate { index, pattern, i, j } => cmd_locate(&index, &pattern, i, j),
        Cmd::Mems {
            index,
            patterns,
            min_len,
        } => cmd_mems(&index, &patterns, min_len),
        Cmd::Stats { index, with_query } => cmd_stats(&index, with_query.as_deref()),
        Cmd::Bench {
            index,
            patterns,
            variants,
            repeat,
        } => cmd_bench(&index, &patterns, &variants, repeat),
    }
}

fn print_sizes(idx: &MsIndex) {
    println!("n\t{}", idx.text_len());
    println!("r\t{}", idx.num_runs());
    println!("rules\t{}", idx.rule_count());
}

/// Reads one pattern per line from a file or stdin (`-`); blank lines are
/// skipped, trailing carriage returns stripped.
fn read_patterns(source: &str) -> Result<Vec<Pattern>, CliError> {
    let bytes = if source == "-" {
        let mut buf = Vec::new();
        io::stdin().lock().read_to_end(&mut buf)?;
        buf
    } else {
        fs::read(source)?
    };
    let mut out = Vec::new();
    for line in bytes.split(|&b| b == b'\n') {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        out.push(Pattern::new(line.to_vec())?);
    }
    Ok(out)
}

fn entries_for(
    idx: &MsIndex,
    pattern: &Pattern,
    variant: VariantArg,
) -> Result<(Vec<MsEntry>, MsStats), CliError> {
    Ok(match variant {
        VariantArg::Std => idx.matching_statistics(pattern, Variant::Std),
        VariantArg::Naive => idx.matching_statistics(pattern, Variant::Naive),
        VariantArg::Heur => idx.matching_statistics(pattern, Variant::Heur),
        VariantArg::Twopass => idx.matching_statistics_two_pass(pattern)?,
    })
}

fn render_block(idx: &MsIndex, pattern: &Pattern, variant: VariantArg, format: FormatArg) -> Result<String, CliError> {
    let (entries, _) = entries_for(idx, pattern, variant)?;
    Ok(match format {
        FormatArg::Lens => {
            let mut line = entries
                .iter()
                .map(|e| e.len.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            line.push('\n');
            line
        }
        FormatArg::Tsv => {
            let mut block = String::new();
            for (i, e) in entries.iter().enumerate() {
                match e.pos {
                    Some(p) => block.push_str(&format!("{i}\t{p}\t{}\n", e.len)),
                    None => block.push_str(&format!("{i}\t\t{}\n", e.len)),
                }
            }
            block
        }
    })
}

fn cmd_ms(
    index: &PathBuf,
    patterns: &str,
    variant: VariantArg,
    format: FormatArg,
    threads: usize,
) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    if variant == VariantArg::Twopass && idx.threshold_table().is_none() {
        return Err(MsError::ThresholdsRequired.into());
    }
    let pats = read_patterns(patterns)?;
    let blocks = if threads > 1 && pats.len() > 1 {
        render_blocks_parallel(&idx, &pats, variant, format, threads)?
    } else {
        let mut blocks = Vec::with_capacity(pats.len());
        for p in &pats {
            blocks.push(render_block(&idx, p, variant, format)?);
        }
        blocks
    };
    let mut out = io::stdout().lock();
    for (k, block) in blocks.iter().enumerate() {
        if k > 0 && format == FormatArg::Tsv {
            writeln!(out)?;
        }
        out.write_all(block.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Renders pattern blocks on contiguous chunks of worker threads and
/// stitches the results back together in input order.
fn render_blocks_parallel(
    idx: &MsIndex,
    pats: &[Pattern],
    variant: VariantArg,
    format: FormatArg,
    threads: usize,
) -> Result<Vec<String>, CliError> {
    let workers = threads.min(pats.len());
    let chunk = pats.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = pats
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|p| render_block(idx, p, variant, format))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut blocks = Vec::with_capacity(pats.len());
        for handle in handles {
            blocks.extend(handle.join().expect("worker panicked")?);
        }
        Ok(blocks)
    })
}

fn cmd_stream(index: &PathBuf) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    let mut session = idx.stream(Variant::Std)?;
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut byte = [0u8; 1];
    loop {
        match input.read(&mut byte) {
            Ok(0) => break,
            Ok(_) => {
                // Line endings frame the interactive protocol and are not
                // part of the streamed pattern.
                if byte[0] == b'\n' || byte[0] == b'\r' {
                    continue;
                }
                let e = session.push(byte[0])?;
                match e.pos {
                    Some(p) => writeln!(out, "{p}\t{}", e.len)?,
                    None => writeln!(out, "\t{}", e.len)?,
                }
                out.flush()?;
            }
            Err(ref e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn cmd_locate(
    index: &PathBuf,
    pattern: &str,
    i: Option<usize>,
    j: Option<usize>,
) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    let Some(locator) = idx.locator() else {
        return Err(CliError::Usage(
            "index lacks locate samples; rebuild with --with-locate".into(),
        ));
    };
    let pattern = Pattern::new(pattern.as_bytes().to_vec())?;
    let i = i.unwrap_or(0);
    let j = j.unwrap_or(pattern.len() - 1);
    if i > j || j >= pattern.len() {
        return Err(CliError::Usage(format!(
            "window [{i}, {j}] does not fit a pattern of length {}",
            pattern.len()
        )));
    }
    let (entries, _) = idx.matching_statistics(&pattern, Variant::Std);
    let mut out = io::stdout().lock();
    for pos in locator.locate(&entries, i, j) {
        writeln!(out, "{pos}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_mems(index: &PathBuf, patterns: &str, min_len: usize) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    let pats = read_patterns(patterns)?;
    let mut out = io::stdout().lock();
    for (k, p) in pats.iter().enumerate() {
        if k > 0 {
            writeln!(out)?;
        }
        for mem in idx.mems(p, min_len) {
            writeln!(out, "{}\t{}\t{}", mem.pattern_pos, mem.text_pos, mem.len)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_stats(index: &PathBuf, with_query: Option<&str>) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    print_sizes(&idx);
    let Some(source) = with_query else {
        return Ok(());
    };
    let pats = read_patterns(source)?;
    let mut chars = 0u64;
    let mut lf_hits = 0u64;
    let mut len_sum = 0u64;
    let mut max_len = 0usize;
    for p in &pats {
        let (entries, stats) = idx.matching_statistics(p, Variant::Std);
        chars += entries.len() as u64;
        lf_hits += stats.lf_hits;
        for e in &entries {
            len_sum += e.len as u64;
            max_len = max_len.max(e.len);
        }
    }
    let pct = if chars == 0 {
        100.0
    } else {
        lf_hits as f64 / chars as f64 * 100.0
    };
    let mean = if chars == 0 {
        0.0
    } else {
        len_sum as f64 / chars as f64
    };
    println!("lf_hit_pct\t{pct:.2}");
    println!("mean_len\t{mean:.2}");
    println!("max_len\t{max_len}");
    Ok(())
}

fn cmd_bench(
    index: &PathBuf,
    patterns: &str,
    variants: &[VariantArg],
    repeat: usize,
) -> Result<(), CliError> {
    let idx = MsIndex::load_from_path(index)?;
    if variants.contains(&VariantArg::Twopass) && idx.threshold_table().is_none() {
        return Err(MsError::ThresholdsRequired.into());
    }
    let pats = read_patterns(patterns)?;
    let mut out = io::stdout().lock();
    writeln!(out, "variant,pattern_id,micros,lce_calls,lce_skips,lf_hits")?;
    for &variant in variants {
        for (pattern_id, p) in pats.iter().enumerate() {
            for _ in 0..repeat {
                let start = Instant::now();
                let (_, stats) = entries_for(&idx, p, variant)?;
                let micros = start.elapsed().as_micros();
                writeln!(
                    out,
                    "{},{pattern_id},{micros},{},{},{}",
                    variant.name(),
                    stats.lce_calls,
                    stats.subtree_skips,
                    stats.lf_hits
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
