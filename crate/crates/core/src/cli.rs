//! Command-line front end and the text format for cycle files.
//!
//! A cycle file looks like
//!
//! ```text
//! hamcycle v1
//! group d=3 e=1 n=2
//! # provenance block-d12
//! t*2 r1 t*2 r1 t*2 r1 t*2 r1 t*2 r1 t*2 r1
//! ```
//!
//! The word is read from the identity. Tokens are `t`, `t-`, `s` and `r1` up
//! to `r{n-1}`, separated by whitespace; `x*k` stands for `k` copies of `x`
//! and lines starting with `#` are comments.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::construct::build_hamiltonian;
use crate::error::{GroupError, ParseError};
use crate::group::{check_relations, identity, EdgeLabel, GroupParams, DEFAULT_ORDER_CAP};
use crate::verify::{brute_force_cycle, verify_hamiltonian, BruteOutcome, CycleReport};
use crate::words::Word;

pub const FORMAT_HEADER: &str = "hamcycle v1";
const TOKENS_PER_LINE: usize = 64;
/// `brute` refuses larger groups unless forced.
pub const BRUTE_ORDER_LIMIT: u64 = 1000;

/// A cycle word together with the group it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleFile {
    pub params: GroupParams,
    pub word: Word,
}

impl CycleFile {
    /// Renders the file; `comments` go after the header, one per line.
    pub fn emit(&self, rle: bool, comments: &[String]) -> String {
        let p = &self.params;
        let mut out = format!("{FORMAT_HEADER}\ngroup d={} e={} n={}\n", p.d(), p.e(), p.n());
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        let mut tokens = Vec::new();
        if rle {
            for run in self.word.chunk_by(|a, b| a == b) {
                tokens.push(match run.len() {
                    1 => run[0].to_string(),
                    k => format!("{}*{k}", run[0]),
                });
            }
        } else {
            tokens.extend(self.word.iter().map(|l| l.to_string()));
        }
        for line in tokens.chunks(TOKENS_PER_LINE) {
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a cycle file; groups above `cap` are rejected.
    ///
    /// Words longer than [`max_word_len`] are treated as malformed so that
    /// run-length counts cannot force huge allocations.
    pub fn parse(bytes: &[u8], cap: u128) -> Result<CycleFile, ParseError> {
        let text = std::str::from_utf8(bytes).map_err(|err| {
            let good = &bytes[..err.valid_up_to()];
            let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = good.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            // valid prefix of the line, counted in characters
            let column = std::str::from_utf8(&good[line_start..]).map_or(1, |s| s.chars().count() + 1);
            fail(line, column, "invalid UTF-8")
        })?;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        match lines.next() {
            Some((_, FORMAT_HEADER)) => {}
            Some(_) | None => return Err(fail(1, 1, format!("expected `{FORMAT_HEADER}`"))),
        }
        let params = match lines.next() {
            Some((_, l)) => parse_group_line(l, cap)?,
            None => return Err(fail(2, 1, "missing `group d=<d> e=<e> n=<n>` line")),
        };

        let limit = max_word_len(&params);
        let mut word = Vec::new();
        for (line, text) in lines {
            if text.trim_start().starts_with('#') {
                continue;
            }
            for (column, token) in tokens_with_columns(text) {
                let (label, count) = parse_token(token, &params).map_err(|m| fail(line, column, m))?;
                if word.len() as u64 + count > limit {
                    return Err(fail(
                        line,
                        column,
                        format!("word exceeds {limit} labels, the limit for {params}"),
                    ));
                }
                word.extend(std::iter::repeat(label).take(count as usize));
            }
        }
        Ok(CycleFile {
            params,
            word: word.into(),
        })
    }
}

/// Twice the group order, but never less than 2^20.
pub fn max_word_len(params: &GroupParams) -> u64 {
    params.order().saturating_mul(2).max(1 << 20)
}

fn fail(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, c)) in line.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((sc, si))) => {
                out.push((sc, &line[si..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((sc, si)) = start {
        out.push((sc, &line[si..]));
    }
    out.into_iter()
}

fn parse_group_line(line: &str, cap: u128) -> Result<GroupParams, ParseError> {
    let fields: Vec<(usize, &str)> = tokens_with_columns(line).collect();
    let shape = "expected `group d=<d> e=<e> n=<n>`";
    if fields.len() != 4 || fields[0].1 != "group" || line.trim() != line {
        return Err(fail(2, 1, shape));
    }
    let mut values = [0u64; 3];
    for (slot, (key, &(column, field))) in ["d=", "e=", "n="].iter().zip(&fields[1..]).enumerate() {
        let digits = field
            .strip_prefix(key)
            .filter(|v| !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| fail(2, column, shape))?;
        values[slot] = digits
            .parse()
            .map_err(|_| fail(2, column, format!("{field} is out of range")))?;
    }
    let [d, e, n] = values;
    let (d, e) = match (u32::try_from(d), u32::try_from(e)) {
        (Ok(d), Ok(e)) => (d, e),
        _ => return Err(fail(2, 1, "d or e is out of range")),
    };
    GroupParams::with_cap(d, e, n.min(usize::MAX as u64) as usize, cap)
        .map_err(|err| fail(2, 1, err.to_string()))
}

/// A label and its repeat count.
fn parse_token(token: &str, params: &GroupParams) -> Result<(EdgeLabel, u64), String> {
    let (name, count) = match token.split_once('*') {
        Some((name, k)) => {
            let count = k
                .parse::<u64>()
                .ok()
                .filter(|&c| c >= 1 && k.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| format!("bad repeat count in `{token}`"))?;
            (name, count)
        }
        None => (token, 1),
    };
    let label = match name {
        "t" => EdgeLabel::T,
        "t-" => EdgeLabel::T_INV,
        "s" => EdgeLabel::S,
        // `r` alone is accepted for r1
        "r" => EdgeLabel::r(1),
        _ => name
            .strip_prefix('r')
            .filter(|i| i.bytes().all(|b| b.is_ascii_digit()) && !i.starts_with('0'))
            .and_then(|i| i.parse::<u8>().ok())
            .map(EdgeLabel::r)
            .ok_or_else(|| format!("unknown token `{name}`"))?,
    }
    .normalized(params);
    if !label.is_available(params) {
        return Err(format!("`{name}` is not a generator of {params}"));
    }
    Ok((label, count))
}

#[derive(Parser, Debug)]
#[command(name = "hamcycle", version, about = "Hamiltonian cycles in Cayley graphs of G(de,e,n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a Hamiltonian cycle and write it as a cycle file
    Gen(GenArgs),
    /// Check that a cycle file holds a Hamiltonian cycle
    Verify(VerifyArgs),
    /// Search for a Hamiltonian cycle exhaustively
    Brute(BruteArgs),
    /// Check the defining relations of the generators
    Relations(GroupArgs),
    /// Construct and verify cycles for a whole parameter grid
    GenGrid(GridArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// d in G(de,e,n)
    #[arg(short = 'd')]
    d: u32,
    /// e in G(de,e,n)
    #[arg(short = 'e')]
    e: u32,
    /// Rank n: number of coordinates
    #[arg(short = 'n')]
    n: usize,
    /// Refuse groups of larger order
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    max_order: u128,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Output file; without it the cycle goes to stdout and stats to stderr
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run-length encode repeated labels
    #[arg(long)]
    rle: bool,
    /// Print stats as one line of key=value pairs
    #[arg(long)]
    kv: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Cycle file, or `-` for stdin
    path: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
    max_order: u128,
    #[arg(long)]
    kv: bool,
}

#[derive(Args, Debug)]
struct BruteArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Seconds before giving up
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    /// Allow groups of order above 1000
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rle: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = 8)]
    max_d: u32,
    #[arg(long, default_value_t = 8)]
    max_e: u32,
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long, default_value_t = 100_000)]
    max_order: u128,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write one cycle file per group into this directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    rle: bool,
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Brute(a) => cmd_brute(&a, out, err),
        Command::Relations(a) => cmd_relations(&a, out, err),
        Command::GenGrid(a) => cmd_gen_grid(&a, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        1
    })
}

fn group_params(g: &GroupArgs, err: &mut dyn Write) -> io::Result<Result<GroupParams, i32>> {
    match GroupParams::with_cap(g.d, g.e, g.n, g.max_order) {
        Ok(p) => Ok(Ok(p)),
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(Err(match e {
                GroupError::OrderCap { .. } => 3,
                _ => 2,
            }))
        }
    }
}

fn millis(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let params = match group_params(&a.group, err)? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    let began = Instant::now();
    let cycle = match build_hamiltonian(&params) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(match e {
                crate::ConstructError::Unsupported(_) => 2,
                _ => 1,
            });
        }
    };
    let built = began.elapsed();
    let report = verify_hamiltonian(&params, &cycle.start(), &cycle.word)
        .expect("constructed labels are generators")
        .with_provenance(&cycle.provenance);
    let file = CycleFile {
        params,
        word: cycle.word,
    };
    let text = file.emit(a.rle, &[format!("provenance {}", cycle.provenance)]);
    // stats go wherever the cycle does not
    let stats: &mut dyn Write = if a.out.is_some() {
        write_output(a.out.as_deref(), &text, out)?;
        out
    } else {
        write_output(None, &text, out)?;
        err
    };
    write_stats(stats, &params, &report, built, a.kv)?;
    Ok(if report.valid { 0 } else { 1 })
}

fn write_stats(
    w: &mut dyn Write,
    params: &GroupParams,
    report: &CycleReport,
    built: Duration,
    kv: bool,
) -> io::Result<()> {
    let provenance = report.provenance.as_deref().unwrap_or("-");
    if kv {
        writeln!(
            w,
            "group={params} d={} e={} n={} order={} tokens={} provenance={provenance} valid={} elapsed_ms={} verify_ms={}",
            params.d(),
            params.e(),
            params.n(),
            params.order(),
            report.length,
            report.valid,
            millis(built),
            millis(report.elapsed),
        )
    } else {
        writeln!(w, "group       {params} (d={} e={} n={})", params.d(), params.e(), params.n())?;
        writeln!(w, "order       {}", params.order())?;
        writeln!(w, "tokens      {}", report.length)?;
        writeln!(w, "provenance  {provenance}")?;
        writeln!(w, "verified    {report}")?;
        writeln!(w, "elapsed     {} ms (verify {} ms)", millis(built), millis(report.elapsed))
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let bytes = if a.path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        buf
    } else {
        match std::fs::read(&a.path) {
            Ok(b) => b,
            Err(e) => {
                writeln!(err, "error: {}: {e}", a.path.display())?;
                return Ok(2);
            }
        }
    };
    let file = match CycleFile::parse(&bytes, a.max_order) {
        Ok(f) => f,
        Err(e) => {
            writeln!(err, "error: {}: {e}", a.path.display())?;
            return Ok(2);
        }
    };
    let p = &file.params;
    let report = verify_hamiltonian(p, &identity(p), &file.word).expect("parsed labels are generators");
    if a.kv {
        let step = report.first_violation.as_ref().map_or("-".to_string(), |v| v.step.to_string());
        writeln!(
            out,
            "group={p} tokens={} order={} closed={} first_repeat_step={step} valid={} verify_ms={}",
            report.length,
            p.order(),
            report.closed,
            report.valid,
            millis(report.elapsed)
        )?;
    } else {
        writeln!(out, "{p}: {report}")?;
    }
    Ok(if report.valid { 0 } else { 1 })
}

fn cmd_brute(a: &BruteArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let params = match group_params(&a.group, err)? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    if params.order() > BRUTE_ORDER_LIMIT && !a.force {
        writeln!(
            err,
            "error: {params} has order {}; searching above {BRUTE_ORDER_LIMIT} needs --force",
            params.order()
        )?;
        return Ok(2);
    }
    let limit = match Duration::try_from_secs_f64(a.time_limit) {
        Ok(d) => d,
        Err(_) => {
            writeln!(err, "error: bad --time-limit {}", a.time_limit)?;
            return Ok(2);
        }
    };
    let began = Instant::now();
    match brute_force_cycle(&params, limit) {
        BruteOutcome::Found(word) => {
            let file = CycleFile { params, word };
            let note = format!("found by exhaustive search in {} ms", millis(began.elapsed()));
            write_output(a.out.as_deref(), &file.emit(a.rle, &[note]), out)?;
            Ok(0)
        }
        BruteOutcome::NoneWithinLimit => {
            writeln!(out, "none-within-limit")?;
            Ok(1)
        }
        BruteOutcome::ProvenNonexistent => {
            writeln!(out, "no Hamiltonian cycle exists")?;
            Ok(1)
        }
    }
}

fn cmd_relations(a: &GroupArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let params = match group_params(a, err)? {
        Ok(p) => p,
        Err(code) => return Ok(code),
    };
    let report = check_relations(&params);
    for c in &report.checks {
        writeln!(out, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

/// Admissible groups with `d <= max_d`, `e <= max_e`, `n <= max_n` and order
/// at most `max_order`, skipping the trivial groups G(e,e,1).
pub fn parameter_grid(max_d: u32, max_e: u32, max_n: usize, max_order: u128) -> Vec<GroupParams> {
    let mut grid = Vec::new();
    for n in 1..=max_n {
        for d in 1..=max_d {
            for e in 1..=max_e {
                match GroupParams::with_cap(d, e, n, max_order) {
                    Ok(p) if p.order() >= 2 => grid.push(p),
                    _ => {}
                }
            }
        }
    }
    grid
}

fn cmd_gen_grid(a: &GridArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let grid = parameter_grid(a.max_d, a.max_e, a.max_n, a.max_order);
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(io::Error::other)?;
    let lines: Vec<(bool, String)> = pool.install(|| {
        grid.par_iter()
            .map(|p| {
                let began = Instant::now();
                let cycle = match build_hamiltonian(p) {
                    Ok(c) => c,
                    Err(e) => return (false, format!("{p} error={e}")),
                };
                let elapsed = began.elapsed();
                let mut line = format!(
                    "{p} d={} e={} n={} order={} tokens={} provenance={} valid=true elapsed_ms={}",
                    p.d(),
                    p.e(),
                    p.n(),
                    p.order(),
                    cycle.word.len(),
                    cycle.provenance,
                    millis(elapsed)
                );
                if let Some(dir) = &a.out_dir {
                    let path = dir.join(format!("g_d{}_e{}_n{}.cyc", p.d(), p.e(), p.n()));
                    let file = CycleFile {
                        params: *p,
                        word: cycle.word,
                    };
                    let text = file.emit(a.rle, &[format!("provenance {}", cycle.provenance)]);
                    if let Err(e) = std::fs::write(&path, text) {
                        let _ = write!(line, " write_error={e}");
                        return (false, line);
                    }
                }
                (true, line)
            })
            .collect()
    });
    let mut failures = 0;
    for (ok, line) in &lines {
        writeln!(out, "{line}")?;
        failures += usize::from(!ok);
    }
    writeln!(err, "{} groups, {failures} failed", lines.len())?;
    Ok(if failures == 0 { 0 } else { 1 })
}
