use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use citemap::ego::{Dimension, Threshold};
use citemap::error::{Error, Result};
use citemap::exec::Schedule;
use citemap::export::render_json;
use citemap::factors::{FactorRule, ProfileMode};
use citemap::genmodel::{simulate_cumulative_advantage, synthesize_environment_fixture, CumAdvConfig, FixtureConfig};
use citemap::ingest::{aggregate, parse_citation_csv, CitationTensor};
use citemap::pipeline::{parse_formats, run_map_pipeline, run_trend, write_artifacts, MapConfig, TrendConfig};

#[derive(Parser, Debug)]
#[command(name = "citemap", version, about = "Journal citation-environment maps, trends and synthetic citation data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and aggregate a citation CSV and print a summary.
    IngestCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Factor-analyze and map an ego journal's citation environment.
    Map(MapArgs),
    /// Pairwise citation counts and moving averages between two journals.
    Trend(TrendArgs),
    /// Generate synthetic citation data.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ego: String,
    /// Year to analyze; repeat for several years (outputs go to OUT/<year>/).
    #[arg(long, required = true)]
    year: Vec<i32>,
    #[arg(long, default_value = "citing")]
    direction: Dimension,
    #[arg(long, default_value = "0.01")]
    threshold: Threshold,
    /// `kaiser` or a fixed number of factors.
    #[arg(long, default_value = "kaiser")]
    factors: FactorRule,
    #[arg(long, value_enum, default_value_t = Profiles::Citing)]
    profiles: Profiles,
    #[arg(long, default_value_t = 2)]
    dims: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    zero_diagonal: bool,
    /// Accepted for a uniform flag set; echoed into the report.
    #[arg(long, default_value_t = 3)]
    window: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long = "format", default_value = "csv,json,svg")]
    format: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profiles {
    Citing,
    Cited,
}

#[derive(Args, Debug)]
struct TrendArgs {
    #[arg(long)]
    input: PathBuf,
    /// First journal (A).
    #[arg(long)]
    ego: String,
    /// Second journal (B).
    #[arg(long)]
    partner: String,
    #[arg(long)]
    from: Option<i32>,
    #[arg(long)]
    to: Option<i32>,
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Divide counts by the citing journal's yearly total.
    #[arg(long)]
    share: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long = "format", default_value = "csv,svg")]
    format: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    CumulativeAdvantage,
    TwoBlock,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Model::CumulativeAdvantage)]
    model: Model,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 10)]
    seed_journals: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    new_target_prob: f64,
    /// Two-block fixture coupling; pair each value with a --year.
    #[arg(long)]
    inter_block_rate: Vec<f64>,
    #[arg(long)]
    year: Vec<i32>,
    #[arg(long, default_value_t = 10)]
    block_size: usize,
    #[arg(long, default_value_t = 100.0)]
    base_rate: f64,
    /// Output directory; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(path: &Path) -> Result<CitationTensor> {
    let file = File::open(path)?;
    Ok(aggregate(parse_citation_csv(BufReader::new(file))?))
}

fn ingest_check(input: &Path) -> Result<()> {
    let tensor = load(input)?;
    let years: Vec<i32> = tensor.years().collect();
    let summary = json!({
        "input": input.display().to_string(),
        "keys": tensor.len(),
        "total": tensor.total(),
        "journals": tensor.journals().len(),
        "years": years,
    });
    print!("{}", render_json(&summary));
    Ok(())
}

fn map(args: MapArgs) -> Result<()> {
    let tensor = load(&args.input)?;
    let formats = parse_formats(&args.format)?;
    if !(1..=2).contains(&args.dims) {
        return Err(Error::Parameter(format!("--dims must be 1 or 2, got {}", args.dims)));
    }
    let multi = args.year.len() > 1;
    for &year in &args.year {
        let ego = citemap::ingest::normalize_journal_name(&args.ego)?;
        let mut cfg = MapConfig::new(args.input.display().to_string(), ego, year);
        cfg.direction = args.direction;
        cfg.threshold = args.threshold;
        cfg.factors = args.factors;
        cfg.profiles = match args.profiles {
            Profiles::Citing => ProfileMode::CitingProfiles,
            Profiles::Cited => ProfileMode::CitedProfiles,
        };
        cfg.dims = args.dims;
        cfg.seed = args.seed;
        cfg.restarts = args.restarts;
        cfg.zero_diagonal = args.zero_diagonal;
        cfg.window = args.window;
        cfg.formats = formats.clone();
        if cfg.direction == Dimension::Both {
            eprintln!("warning: --direction both (union of cited and citing members) is experimental");
        }
        let result = run_map_pipeline(&tensor, &cfg, Schedule::Parallel)?;
        for w in &result.analysis.profiles.dropped {
            eprintln!("warning: dropped {w}: zero-variance profile");
        }
        let dir = if multi { args.out.join(year.to_string()) } else { args.out.clone() };
        for path in write_artifacts(&dir, &result.artifacts(&tensor))? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn trend(args: TrendArgs) -> Result<()> {
    let tensor = load(&args.input)?;
    let cfg = TrendConfig {
        input: args.input.display().to_string(),
        journal_a: citemap::ingest::normalize_journal_name(&args.ego)?,
        journal_b: citemap::ingest::normalize_journal_name(&args.partner)?,
        from: args.from,
        to: args.to,
        window: args.window,
        share: args.share,
        formats: parse_formats(&args.format)?,
    };
    let result = run_trend(&tensor, &cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    for path in write_artifacts(&args.out, &result.artifacts())? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (name, body) = match args.model {
        Model::CumulativeAdvantage => {
            let counts = simulate_cumulative_advantage(&CumAdvConfig {
                n_steps: args.steps,
                n_seed: args.seed_journals,
                alpha: args.alpha,
                new_target_prob: args.new_target_prob,
                seed: args.seed,
            })?;
            let mut body = String::with_capacity(counts.len() * 4);
            for c in counts {
                body.push_str(&c.to_string());
                body.push('\n');
            }
            ("counts.txt", body)
        }
        Model::TwoBlock => {
            let (rates, years) = match (args.inter_block_rate.as_slice(), args.year.as_slice()) {
                ([], []) => (vec![0.05], vec![1994]),
                (r, []) if r.len() == 1 => (r.to_vec(), vec![1994]),
                (r, y) if r.len() == y.len() => (r.to_vec(), y.to_vec()),
                _ => return Err(Error::Parameter("give one --inter-block-rate per --year".into())),
            };
            let mut records = Vec::new();
            for (rate, year) in rates.iter().zip(&years) {
                let cfg = FixtureConfig {
                    blocks: 2,
                    block_size: args.block_size,
                    inter_block_rate: *rate,
                    base_rate: args.base_rate,
                    year: *year,
                    seed: args.seed.wrapping_add(*year as u64),
                };
                records.extend(synthesize_environment_fixture(&cfg)?.records());
            }
            let mut body = Vec::new();
            aggregate(records).write_csv(&mut body)?;
            ("fixture.csv", String::from_utf8(body).expect("ascii"))
        }
    };
    match args.out {
        Some(dir) => {
            for path in write_artifacts(&dir, &[(name, body)])? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::IngestCheck { input } => ingest_check(&input),
        Command::Map(args) => map(args),
        Command::Trend(args) => trend(args),
        Command::Simulate(args) => simulate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let report = json!({ "error": { "code": err.code(), "message": err.to_string() } });
            eprint!("{}", render_json(&report));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
