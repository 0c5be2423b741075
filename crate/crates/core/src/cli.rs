//! Command-line front end. Exit status: 0 on success or a PASS verdict, 1 on a
//! FAIL verdict, 2 on any error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::digits::{self, Alpha, ConstructionSchedule, DigitSeq, SetDescriptor};
use crate::dimension;
use crate::error::{param, Error, Result};
use crate::harness::{self, ExperimentConfig, Verdict};
use crate::matcher::{self, Algorithm};
use crate::sft;

#[derive(Debug, Parser)]
#[command(name = "shiftlcs", version, about = "Shifted longest common substrings of b-ary expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a digit sequence from a set.
    Gen {
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[arg(long, value_enum, default_value_t = SetKind::Uniform)]
        set: SetKind,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Growth rate for f-image, a nonnegative real or "inf".
        #[arg(long, default_value = "1")]
        alpha: Alpha,
        /// Set fed through the insertion map for f-image.
        #[arg(long, value_enum, default_value_t = InnerKind::Ep)]
        inner: InnerKind,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aligned and shifted longest common substrings of two sequences.
    Match {
        /// Sequence file, or "-" for stdin.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Single prefix length; prints the witnesses as JSON.
        #[arg(long, conflicts_with = "curve", required_unless_present = "curve")]
        n: Option<usize>,
        /// Comma-separated increasing prefix lengths; prints a CSV growth curve.
        #[arg(long, value_delimiter = ',')]
        curve: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = AlgoArg::Fast)]
        algo: AlgoArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transfer-matrix spectra of the subshift forbidding 0^(p+1).
    Spectra {
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = sft::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cylinder-count dimension estimates.
    Dim {
        #[arg(long, value_enum, default_value_t = SetKind::Ep)]
        set: SetKind,
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value = "1")]
        alpha: Alpha,
        #[arg(long, value_enum, default_value_t = InnerKind::Ep)]
        inner: InnerKind,
        /// Comma-separated generations.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a JSON-configured experiment. With --out, the report goes there and
    /// its main table next to it with a .csv extension.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Uniform,
    Ep,
    Fp,
    FImage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InnerKind {
    Uniform,
    Ep,
    Fp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Fast,
    Brute,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Fast => Algorithm::Fast,
            AlgoArg::Brute => Algorithm::Brute,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { &mut *stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdin, stdout) {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<Verdict> {
    match command {
        Command::Gen { base, set, p, alpha, inner, length, seed, format, out } => {
            let desc = descriptor(set, base, p, alpha, inner, length)?;
            let seq = digits::sample_member(&desc, length, seed)?;
            let text = match format {
                Format::Json => seq.to_json() + "\n",
                Format::Raw => seq.to_raw_text(),
            };
            emit(out.as_deref(), &text, stdout)?;
        }
        Command::Match { x, y, n, curve, algo, out } => {
            if x == "-" && y == "-" {
                return param("at most one of --x and --y may read stdin");
            }
            let x = load_seq(&x, stdin)?;
            let y = load_seq(&y, stdin)?;
            let algo = Algorithm::from(algo);
            let text = match (n, curve) {
                (Some(n), None) => {
                    let report = MatchReport {
                        n,
                        aligned: matcher::aligned_match(&x, &y, n)?,
                        shifted: matcher::shifted_match_with(algo, &x, &y, n)?,
                    };
                    serde_json::to_string_pretty(&report)? + "\n"
                }
                (None, Some(points)) => matcher::growth_curve_with(algo, &x, &y, &points)?.to_csv(),
                _ => return param("exactly one of --n and --curve is required"),
            };
            emit(out.as_deref(), &text, stdout)?;
        }
        Command::Spectra { base, p, tol, out } => {
            let summary = sft::spectra_summary(base, p, tol)?;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&summary)? + "\n"), stdout)?;
        }
        Command::Dim { set, base, p, alpha, inner, m, out } => {
            let longest = m.iter().copied().max().unwrap_or(1);
            let desc = descriptor(set, base, p, alpha, inner, longest)?;
            let rows = m.iter().map(|&g| dimension::dim_estimate(&desc, g)).collect::<Result<Vec<_>>>()?;
            emit(out.as_deref(), &dimension::to_csv(&rows), stdout)?;
        }
        Command::Experiment { config, out, threads } => {
            let config = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
            let report = match threads {
                Some(0) => return param("--threads must be at least 1"),
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?
                    .install(|| harness::run(&config))?,
                None => harness::run(&config)?,
            };
            let json = report.to_json() + "\n";
            match out {
                Some(path) => {
                    fs::write(&path, json)?;
                    fs::write(path.with_extension("csv"), report.to_csv())?;
                }
                None => stdout.write_all(json.as_bytes())?,
            }
            return Ok(report.verdict);
        }
    }
    Ok(Verdict::Pass)
}

#[derive(serde::Serialize)]
struct MatchReport {
    n: usize,
    aligned: matcher::MatchResult,
    shifted: matcher::MatchResult,
}

fn descriptor(set: SetKind, base: u32, p: u32, alpha: Alpha, inner: InnerKind, length: usize) -> Result<SetDescriptor> {
    let simple = |kind: InnerKind| match kind {
        InnerKind::Uniform => SetDescriptor::Uniform { base },
        InnerKind::Ep => SetDescriptor::Ep { base, p },
        InnerKind::Fp => SetDescriptor::Fp { base, p },
    };
    let desc = match set {
        SetKind::Uniform => simple(InnerKind::Uniform),
        SetKind::Ep => simple(InnerKind::Ep),
        SetKind::Fp => simple(InnerKind::Fp),
        SetKind::FImage => SetDescriptor::FImage {
            schedule: ConstructionSchedule::covering(p, base, alpha, length)?,
            inner: Box::new(simple(inner)),
        },
    };
    desc.validate()?;
    Ok(desc)
}

fn load_seq(source: &str, stdin: &mut dyn Read) -> Result<DigitSeq> {
    let text = if source == "-" {
        let mut buf = String::new();
        stdin.read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(source)?
    };
    DigitSeq::parse(&text)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
