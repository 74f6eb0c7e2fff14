//! cantor: Cantor series expansions, digit-block statistics, divergence
//! classification, construction streaming, and reproducible experiments.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 domain or configuration error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigUint, One, ToPrimitive};

use cantor_core::{
    build_cbw, expand_rational, normality_report, paper_spec, prefix_interval, ratio_report,
    run_lil_experiment, run_omission_experiment, scaled_spec, strided_report,
    strong_normality_report, verify_bias_analytic, verify_cbw, wgood_ratios, BasicSequence,
    Block, ConstructionSpec, DigitPrefix, DigitSource, Error as CoreError, LilConfig,
    OmissionConfig, StatReport, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(name = "cantor", version, about = "Cantor series expansion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Master seed for anything randomized
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for experiments (0 = library default); never changes results
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Digits,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a rational x = p/q in [0,1) into its first n digits
    Expand {
        /// The rational, written as `p/q`
        x: String,
        /// Sequence descriptor (e.g. const:10, affine:1,1, powfloor:0.5,2)
        #[arg(long)]
        seq: String,
        /// Number of digits
        #[arg(short, long)]
        n: u64,
    },
    /// Count block occurrences in a digit file
    Count {
        /// Digit file produced by `expand` or `construct`
        #[arg(long)]
        file: PathBuf,
        /// Semicolon-separated blocks, e.g. "0,1;1,0"
        #[arg(long, default_value = "")]
        blocks: String,
        /// Count starting positions up to n
        #[arg(short, long)]
        n: u64,
        /// Block length / order of the report
        #[arg(short, long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_enum, default_value_t = CountMode::Plain)]
        mode: CountMode,
        /// Alphabet size for strong mode enumeration
        #[arg(long)]
        alphabet: Option<u64>,
    },
    /// Stream digits of a staged construction
    Construct {
        /// `paper` or an inline `scaled:l,b,w;...` descriptor
        #[arg(long)]
        spec: String,
        /// First position to emit (1-based, unbounded decimal)
        #[arg(long, default_value = "1")]
        start: String,
        /// Number of digits to emit
        #[arg(long)]
        count: String,
    },
    /// Classify k-divergence of a sequence at a horizon
    Classify {
        #[arg(long)]
        seq: String,
        #[arg(short, long)]
        k: u32,
        #[arg(long)]
        horizon: u64,
        /// Also classify every stride phase
        #[arg(long)]
        strong: bool,
    },
    /// Run a reproducible Monte Carlo experiment
    Experiment {
        #[command(subcommand)]
        kind: ExperimentCommand,
    },
    /// Build, verify, or analytically check C(b, w) words
    Cbw {
        #[command(subcommand)]
        action: CbwCommand,
    },
    /// Growth-condition diagnostics for a construction schedule
    Wgood {
        /// `paper` or an inline `scaled:l,b,w;...` descriptor
        #[arg(long)]
        spec: String,
        #[arg(short, long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long, default_value_t = 4)]
        to: u64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum CountMode {
    Plain,
    Strided,
    Strong,
    Ratio,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Occurrence counts against the sqrt(2 t log log t) envelope
    Lil(LilArgs),
    /// Zero-block omission frequency in the convergent regime
    Omission(OmissionArgs),
}

#[derive(Args)]
struct LilArgs {
    #[arg(long)]
    seq: String,
    /// The block, e.g. "0" or "0,1"
    #[arg(long)]
    block: String,
    #[arg(short, long)]
    n: u64,
    #[arg(long)]
    trials: u64,
    /// Envelope constant C
    #[arg(long, default_value_t = 3.0)]
    bound_constant: f64,
    /// Adversarial control: every digit is this constant
    #[arg(long)]
    inject_constant: Option<u64>,
}

#[derive(Args)]
struct OmissionArgs {
    #[arg(long)]
    seq: String,
    #[arg(short, long, default_value_t = 1)]
    k: u32,
    #[arg(short, long)]
    n: u64,
    #[arg(long)]
    trials: u64,
}

#[derive(Subcommand)]
enum CbwCommand {
    /// Materialize the canonical word as a digit file
    Build {
        #[arg(short)]
        b: u64,
        #[arg(short)]
        w: u64,
    },
    /// Verify completeness and bias of a materialized word
    Verify {
        #[arg(long)]
        file: PathBuf,
        #[arg(short)]
        b: u64,
        #[arg(short)]
        w: u64,
    },
    /// Exact odd-position counts without materialization
    Analytic {
        #[arg(short)]
        b: u64,
        #[arg(short)]
        w: u64,
    },
}

/// Errors carrying the exit code distinction: I/O (1) vs domain/config (2).
enum CliError {
    Io(String),
    Domain(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Io(err) => CliError::Io(err.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(msg)) => {
            eprintln!("cantor: I/O error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("cantor: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open_output(cli: &Cli) -> CliResult<Box<dyn Write>> {
    match &cli.out {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn echo_config(cli: &Cli, detail: &str) {
    let out = cli
        .out
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "-".into());
    let format = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Digits => "digits",
    };
    eprintln!(
        "cantor: {detail} format={format} seed={} threads={} out={out}",
        cli.seed, cli.threads
    );
}

fn parse_rational(s: &str) -> CliResult<(BigUint, BigUint)> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| CliError::Domain(format!("rational must be `p/q`, got `{s}`")))?;
    let numer = BigUint::from_str(p.trim())
        .map_err(|_| CliError::Domain(format!("bad numerator `{p}`")))?;
    let denom = BigUint::from_str(q.trim())
        .map_err(|_| CliError::Domain(format!("bad denominator `{q}`")))?;
    Ok((numer, denom))
}

fn parse_blocks(s: &str) -> CliResult<Vec<Block>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|part| Block::parse(part.trim()).map_err(CliError::from))
        .collect()
}

fn parse_spec(s: &str) -> CliResult<ConstructionSpec> {
    if s == "paper" || s == "paperconstruction" {
        return Ok(paper_spec());
    }
    let Some(rest) = s.strip_prefix("scaled:") else {
        return Err(CliError::Domain(format!(
            "spec must be `paper` or `scaled:l,b,w;...`, got `{s}`"
        )));
    };
    let mut triples = Vec::new();
    for stage in rest.split(';') {
        let parts: Vec<&str> = stage.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::Domain(format!("bad stage `{stage}`")));
        }
        let l = BigUint::from_str(parts[0].trim())
            .map_err(|_| CliError::Domain(format!("bad repeat count `{}`", parts[0])))?;
        let b: u64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| CliError::Domain(format!("bad base `{}`", parts[1])))?;
        let w: u64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Domain(format!("bad width `{}`", parts[2])))?;
        triples.push((l, b, w));
    }
    let (spec, violations) = scaled_spec(&triples)?;
    for v in violations {
        eprintln!("cantor: schedule shape violation: {v}");
    }
    Ok(spec)
}

fn write_report(cli: &Cli, report: &StatReport) -> CliResult<()> {
    let mut out = open_output(cli)?;
    match cli.format {
        Format::Csv => report.write_csv(&mut out)?,
        _ => writeln!(out, "{}", report.to_json())?,
    }
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Expand { x, seq, n } => {
            echo_config(cli, &format!("expand x={x} seq={seq} n={n}"));
            let (numer, denom) = parse_rational(x)?;
            let sequence = BasicSequence::parse(seq)?;
            let prefix = expand_rational(&numer, &denom, &sequence, *n)?;
            let mut out = open_output(cli)?;
            match cli.format {
                Format::Json => {
                    let (low, high) = prefix_interval(&prefix)?;
                    let digits: Vec<String> =
                        (1..=prefix.len()).map(|m| prefix.digit(m).to_string()).collect();
                    let value = serde_json::json!({
                        "schema_version": SCHEMA_VERSION,
                        "x": format!("{numer}/{denom}"),
                        "seq": sequence.descriptor(),
                        "n": n,
                        "digits": digits,
                        "interval_low": low.to_string(),
                        "interval_high": high.to_string(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
                }
                _ => prefix.write_digit_file(&mut out)?,
            }
            out.flush()?;
            Ok(())
        }

        Command::Count {
            file,
            blocks,
            n,
            k,
            mode,
            alphabet,
        } => {
            echo_config(
                cli,
                &format!("count file={} n={n} k={k}", file.display()),
            );
            let mut reader = BufReader::new(File::open(file)?);
            let prefix = DigitPrefix::read_digit_file(&mut reader)?;
            let block_list = parse_blocks(blocks)?;
            let report = match mode {
                CountMode::Plain => normality_report(&prefix, *n, *k, &block_list)?,
                CountMode::Strided => strided_report(&prefix, *n, &block_list)?,
                CountMode::Strong => {
                    let alphabet = alphabet.ok_or_else(|| {
                        CliError::Domain("strong mode needs --alphabet".into())
                    })?;
                    strong_normality_report(&prefix, *n, *k, alphabet, 10_000_000)?
                }
                CountMode::Ratio => ratio_report(&prefix, *n, &block_list)?,
            };
            write_report(cli, &report)
        }

        Command::Construct { spec, start, count } => {
            echo_config(cli, &format!("construct spec={spec} start={start} count={count}"));
            let construction = parse_spec(spec)?;
            let start = BigUint::from_str(start)
                .map_err(|_| CliError::Domain(format!("bad start `{start}`")))?;
            if start < BigUint::one() {
                return Err(CliError::Domain("start must be >= 1".into()));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| CliError::Domain(format!("bad count `{count}`")))?;
            let mut out = open_output(cli)?;
            cantor_core::expansion::write_digit_file_header(
                &mut out,
                &construction.descriptor(),
                count,
                Some(&start),
            )?;
            let mut stream = construction.stream(start);
            for i in 0..count {
                let (digit, _q) = stream.next_digit()?;
                if i > 0 {
                    if i % 32 == 0 {
                        writeln!(out)?;
                    } else {
                        write!(out, " ")?;
                    }
                }
                write!(out, "{digit}")?;
            }
            if count > 0 {
                writeln!(out)?;
            }
            out.flush()?;
            Ok(())
        }

        Command::Classify {
            seq,
            k,
            horizon,
            strong,
        } => {
            echo_config(cli, &format!("classify seq={seq} k={k} horizon={horizon}"));
            let sequence = BasicSequence::parse(seq)?;
            let report = sequence.classify_divergence(*k, *horizon, *strong)?;
            let mut out = open_output(cli)?;
            let value = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "report": report,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
            out.flush()?;
            Ok(())
        }

        Command::Experiment { kind } => {
            let result = match kind {
                ExperimentCommand::Lil(args) => {
                    echo_config(
                        cli,
                        &format!(
                            "experiment lil seq={} block={} n={} trials={}",
                            args.seq, args.block, args.n, args.trials
                        ),
                    );
                    let config = LilConfig {
                        seq: BasicSequence::parse(&args.seq)?,
                        block: Block::parse(&args.block)?,
                        n: args.n,
                        trials: args.trials,
                        seed: cli.seed,
                        bound_constant: args.bound_constant,
                        threads: cli.threads,
                        source: match args.inject_constant {
                            Some(d) => DigitSource::ConstantDigit(d),
                            None => DigitSource::Uniform,
                        },
                    };
                    run_lil_experiment(&config)?
                }
                ExperimentCommand::Omission(args) => {
                    echo_config(
                        cli,
                        &format!(
                            "experiment omission seq={} k={} n={} trials={}",
                            args.seq, args.k, args.n, args.trials
                        ),
                    );
                    let config = OmissionConfig {
                        seq: BasicSequence::parse(&args.seq)?,
                        k: args.k,
                        n: args.n,
                        trials: args.trials,
                        seed: cli.seed,
                        threads: cli.threads,
                    };
                    run_omission_experiment(&config)?
                }
            };
            let mut out = open_output(cli)?;
            match cli.format {
                Format::Csv => {
                    writeln!(out, "trial,count")?;
                    for record in &result.per_trial {
                        writeln!(out, "{},{}", record.trial, record.count)?;
                    }
                }
                _ => writeln!(out, "{}", result.to_json())?,
            }
            out.flush()?;
            Ok(())
        }

        Command::Cbw { action } => match action {
            CbwCommand::Build { b, w } => {
                echo_config(cli, &format!("cbw build b={b} w={w}"));
                let word = build_cbw(*b, *w)?;
                let seq = BasicSequence::constant(*b)?;
                let prefix = DigitPrefix::from_digits(seq, word.entries().to_vec())?;
                let mut out = open_output(cli)?;
                prefix.write_digit_file(&mut out)?;
                out.flush()?;
                Ok(())
            }
            CbwCommand::Verify { file, b, w } => {
                echo_config(cli, &format!("cbw verify b={b} w={w}"));
                let mut reader = BufReader::new(File::open(file)?);
                let mut header = String::new();
                use std::io::BufRead;
                reader.read_line(&mut header)?;
                let mut body = String::new();
                reader.read_to_string(&mut body)?;
                let word: Vec<u64> = body
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<u64>()
                            .map_err(|_| CliError::Domain(format!("bad digit `{t}`")))
                    })
                    .collect::<CliResult<_>>()?;
                let verdict = verify_cbw(&word, *b, *w)?;
                let mut out = open_output(cli)?;
                let value = serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "b": b,
                    "w": w,
                    "complete": verdict.complete,
                    "zeros_odd": verdict.zeros_odd,
                    "ones_odd": verdict.ones_odd,
                    "bias_ok": verdict.bias_ok,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
                out.flush()?;
                Ok(())
            }
            CbwCommand::Analytic { b, w } => {
                echo_config(cli, &format!("cbw analytic b={b} w={w}"));
                let report = verify_bias_analytic(*b, *w)?;
                let mut out = open_output(cli)?;
                let value = serde_json::json!({
                    "schema_version": SCHEMA_VERSION,
                    "b": b,
                    "w": w,
                    "zeros_odd": report.zeros_odd.to_string(),
                    "ones_odd": report.ones_odd.to_string(),
                    "bias_ok": report.bias_ok,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
                out.flush()?;
                Ok(())
            }
        },

        Command::Wgood { spec, k, from, to } => {
            echo_config(cli, &format!("wgood spec={spec} k={k} i={from}..{to}"));
            let construction = parse_spec(spec)?;
            let report = wgood_ratios(&construction, *k, *from..=*to)?;
            match cli.format {
                Format::Csv => write_report(cli, &report.to_stat_report()),
                _ => {
                    let mut out = open_output(cli)?;
                    let rows: Vec<serde_json::Value> = report
                        .rows
                        .iter()
                        .map(|row| {
                            serde_json::json!({
                                "i": row.i,
                                "r1": row.r1.to_f64(),
                                "r2": row.r2.to_f64(),
                                "r3": row.r3.to_f64(),
                                "r1_log10": cantor_core::construct::rational_log10(&row.r1),
                                "r2_log10": cantor_core::construct::rational_log10(&row.r2),
                                "r3_log10": cantor_core::construct::rational_log10(&row.r3),
                            })
                        })
                        .collect();
                    let value = serde_json::json!({
                        "schema_version": SCHEMA_VERSION,
                        "k": k,
                        "rows": rows,
                        "r1_strictly_decreasing": report.r1_strictly_decreasing,
                        "r2_strictly_decreasing": report.r2_strictly_decreasing,
                        "r3_strictly_decreasing": report.r3_strictly_decreasing,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
                    out.flush()?;
                    Ok(())
                }
            }
        }
    }
}

