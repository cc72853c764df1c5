use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use tcamsplit::*;

/// Split an address space among targets with few prefix rules.
#[derive(Parser)]
#[command(name = "tcamsplit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the minimal rule count of an integer partition.
    Complexity {
        file: PathBuf,
        /// Also print the shortest transaction sequence.
        #[arg(long)]
        sequence: bool,
    },
    /// Closest partition reachable with a rule budget.
    Approx {
        file: PathBuf,
        #[arg(long = "rules", short = 'n')]
        rules: usize,
        #[arg(long, default_value = "linf")]
        kind: DistanceKind,
    },
    /// Exact rule table for an integer partition.
    Synth { file: PathBuf },
    /// Run a randomized study and write CSV.
    Study(StudyArgs),
    /// Compare the solvers against exhaustive search on small instances.
    OracleCheck {
        #[arg(long, default_value_t = 4)]
        max_w: u32,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Predicted mean L∞ error from the fitted model.
    Predict {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        w: u32,
        /// Use the unrounded coefficients.
        #[arg(long)]
        unrounded: bool,
    },
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    study: Study,
    /// Widths, e.g. `32` or `8..32` or `16,32`.
    #[arg(long = "w", default_value = "32")]
    widths: String,
    #[arg(long = "k", default_value = "10")]
    ks: String,
    #[arg(long = "n", default_value = "1..65")]
    ns: String,
    /// Rules per target for fixed-ratio, e.g. `0.5,1,1.5`.
    #[arg(long, default_value = "1,2,3,4")]
    ratios: String,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "linf")]
    kind: DistanceKind,
    /// Per-frame counts, for real-data.
    #[arg(long)]
    counts: Option<PathBuf>,
    /// Rule fractions for real-data.
    #[arg(long, default_value = "1/10,1/4,1/2,3/4,1")]
    fractions: String,
    /// Write here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Comma-separated items, each a value or an inclusive range `a..b`.
fn parse_list<T: TryFrom<u64>>(text: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b): (u64, u64) = match item.split_once("..") {
            Some((a, b)) => (a.trim().parse()?, b.trim_start_matches('=').trim().parse()?),
            None => (item.parse()?, item.parse()?),
        };
        if a > b {
            bail!("empty range `{item}`");
        }
        for v in a..=b {
            out.push(T::try_from(v).map_err(|_| anyhow::anyhow!("`{v}` out of range"))?);
        }
    }
    Ok(out)
}

fn read_input(path: &Path) -> Result<PartitionInput> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.parse()?)
}

fn read_integer(path: &Path) -> Result<Partition> {
    match read_input(path)? {
        PartitionInput::Integer(p) => Ok(p),
        PartitionInput::Real(_) => bail!("{} holds a non-integer partition", path.display()),
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn study(args: StudyArgs) -> Result<()> {
    let out = sink(&args.out)?;
    if args.study == Study::RealData {
        let path = args.counts.context("real-data needs --counts")?;
        let widths: Vec<u32> = parse_list(&args.widths)?;
        let [width] = widths[..] else { bail!("real-data takes a single width") };
        let fractions = parse_fractions(&args.fractions)?;
        let input = BufReader::new(File::open(&path).with_context(|| format!("opening {}", path.display()))?);
        let rows = real_data_pipeline(input, width, &fractions, out)?;
        info!("{rows} rows");
        return Ok(());
    }
    let mut cfg = ExperimentConfig::new(args.study, parse_list(&args.widths)?, parse_list(&args.ks)?, parse_list(&args.ns)?);
    cfg.ratios = args
        .ratios
        .split(',')
        .map(|r| r.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .context("bad --ratios")?;
    cfg.samples = args.samples.unwrap_or(args.study.default_samples());
    cfg.seed = args.seed;
    cfg.kind = args.kind;
    let rows = run_study(&cfg)?;
    write_study_csv(&rows, out)?;
    Ok(())
}

/// Returns the number of disagreements found.
fn oracle_check(max_w: u32, max_k: usize) -> Result<usize> {
    let budget = OracleBudget::default();
    let mut bad = 0;
    for w in 1..=max_w {
        for k in 1..=max_k {
            let space = match CompositionSpace::new(k, w, &budget) {
                Ok(s) => s,
                Err(e) => {
                    println!("W={w} k={k}: skipped ({e})");
                    continue;
                }
            };
            let mut triples = 0;
            for idx in 0..space.len() {
                let p = space.partition(idx);
                let len = complexity(&p);
                if w <= COMPLEXITY_GUARD.0 && k <= COMPLEXITY_GUARD.1 && brute_force_complexity(&p)? != len {
                    println!("rule count mismatch on {:?}", p.parts());
                    bad += 1;
                }
                for kind in DistanceKind::OPTIMIZABLE {
                    if kind.is_relative() && p.is_degenerate() {
                        continue;
                    }
                    let profile = space.profile(&p, kind)?;
                    for n in 1..=len {
                        let fast = closest(&p, n, kind)?.error;
                        let slow = &profile[n.min(profile.len()) - 1].0;
                        if fast != *slow {
                            println!("{:?} n={n} {kind}: solver {fast}, exhaustive {slow}", p.parts());
                            bad += 1;
                        }
                        triples += 1;
                    }
                }
            }
            println!("W={w} k={k}: {} partitions, {triples} checks", space.len());
        }
    }
    Ok(bad)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Complexity { file, sequence } => {
            let p = read_integer(&file)?;
            println!("{}", complexity(&p));
            if sequence {
                print!("{}", bit_matcher(&p));
            }
        }
        Cmd::Approx { file, rules, kind } => {
            let r = match read_input(&file)? {
                PartitionInput::Integer(p) => closest(&p, rules, kind)?,
                PartitionInput::Real(p) => closest_real(&p, rules, kind)?,
            };
            print!("{}", r.approx);
            println!("error {} {}", kind, r.error);
            println!("rules {}", r.rule_count);
            if r.is_degenerate() {
                println!("degenerate {} targets unreached", r.approx.zero_parts());
            }
            print!("{}", r.table);
        }
        Cmd::Synth { file } => {
            let p = read_integer(&file)?;
            let table = sequence_to_table(&bit_matcher(&p), p.k())?;
            print!("{table}");
        }
        Cmd::Study(args) => study(args)?,
        Cmd::OracleCheck { max_w, max_k } => {
            let bad = oracle_check(max_w, max_k)?;
            if bad > 0 {
                println!("{bad} disagreements");
                return Ok(ExitCode::FAILURE);
            }
            println!("all agree");
        }
        Cmd::Predict { n, k, w, unrounded } => {
            if n == 0 || k == 0 {
                bail!("n and k must be positive");
            }
            let params = if unrounded { EmpiricalModelParams::UNROUNDED } else { EmpiricalModelParams::default() };
            println!("{}", params.predict(n, k, w));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
