use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use commchar::pipeline::{self, SUMMARY};
use commchar::{sample, Error, PipelineConfig, Result, Stage};

/// Characterize communities of a dynamic attributed network with emerging
/// sequential patterns.
///
/// Every option can also be set through an environment variable named
/// COMMCHAR_<OPTION>, e.g. COMMCHAR_MIN_SUP=0.05. Command-line values win
/// over the environment, which wins over the config file.
#[derive(Parser)]
#[command(name = "commchar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// TOML configuration file
    #[arg(long, global = true, env = "COMMCHAR_CONFIG")]
    config: Option<PathBuf>,
    /// Edge list CSV (`t,u,v`)
    #[arg(long, global = true, env = "COMMCHAR_EDGES")]
    edges: Option<PathBuf>,
    /// Attribute CSV (`t,node,attr,value`)
    #[arg(long, global = true, env = "COMMCHAR_ATTRS")]
    attrs: Option<PathBuf>,
    /// External `node,community` assignment used instead of detection
    #[arg(long, global = true, env = "COMMCHAR_COMMUNITIES")]
    communities: Option<PathBuf>,
    /// Minimum relative support in (0, 1]
    #[arg(long, global = true, env = "COMMCHAR_MIN_SUP")]
    min_sup: Option<f64>,
    /// Seed of the community detection
    #[arg(long, global = true, env = "COMMCHAR_SEED")]
    seed: Option<u64>,
    /// Smallest community that gets a report
    #[arg(long, global = true, env = "COMMCHAR_MIN_COMMUNITY_SIZE")]
    min_community_size: Option<usize>,
    /// Cap on representative patterns per community
    #[arg(long, global = true, env = "COMMCHAR_MAX_PATTERNS")]
    max_patterns: Option<usize>,
    /// Cap on explored pattern candidates; exceeding it exits with status 3
    #[arg(long, global = true, env = "COMMCHAR_MAX_CANDIDATES")]
    max_candidates: Option<usize>,
    /// Output directory
    #[arg(long, global = true, env = "COMMCHAR_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "COMMCHAR_THREADS")]
    threads: Option<usize>,
    /// Skip stages whose outputs already exist
    #[arg(long, global = true, env = "COMMCHAR_RESUME")]
    resume: bool,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities on the aggregated network (or import --communities)
    Communities,
    /// Compute per-slice topological measures
    Measures,
    /// Build the sequence database and mine closed patterns
    Mine,
    /// Rank patterns, select representatives and report anomalies
    Characterize,
    /// Run the stages listed in the config (all by default)
    Pipeline,
    /// Validate the configuration and print it fully resolved
    Validate,
    /// Write the synthetic planted two-community dataset to --out
    Sample,
}

impl Options {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(p) = &self.edges {
            cfg.edges = Some(p.clone());
        }
        if let Some(p) = &self.attrs {
            cfg.attrs = Some(p.clone());
        }
        if let Some(p) = &self.communities {
            cfg.communities = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.out = p.clone();
        }
        if let Some(x) = self.min_sup {
            cfg.min_sup = x;
        }
        if let Some(x) = self.seed {
            cfg.seed = x;
        }
        if let Some(x) = self.min_community_size {
            cfg.min_community_size = x;
        }
        if let Some(x) = self.max_patterns {
            cfg.max_patterns = x;
        }
        if let Some(x) = self.max_candidates {
            cfg.max_candidates = x;
        }
        if let Some(x) = self.threads {
            cfg.threads = Some(x);
        }
        // absolute paths keep the echoed config valid from any directory
        let abs = |p: &PathBuf| std::path::absolute(p).map_err(|e| Error::io(p, e));
        for p in [&mut cfg.edges, &mut cfg.attrs, &mut cfg.communities].into_iter().flatten() {
            *p = abs(p)?;
        }
        cfg.out = abs(&cfg.out)?;
        cfg.check()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = cli.opts.config()?;
    let stages = match cli.command {
        Command::Validate => {
            print!("{}", cfg.to_toml());
            return Ok(());
        }
        Command::Sample => {
            let p = sample::write_planted(&cfg.out, cfg.seed)?;
            println!(
                "wrote {} edges and {} attribute rows to {}",
                p.edges.len(),
                p.attributes.len(),
                cfg.out.display()
            );
            return Ok(());
        }
        Command::Communities => vec![Stage::Communities],
        Command::Measures => vec![Stage::Measures],
        Command::Mine => vec![Stage::Mine],
        Command::Characterize => vec![Stage::Characterize],
        Command::Pipeline => cfg.stages.clone(),
    };
    let manifest = pipeline::run(&cfg, &stages, cli.opts.resume)?;
    for s in &manifest.stages {
        println!("{:<13} {:<8} {:>8.3}s", s.name, s.status, s.seconds);
    }
    if stages.contains(&Stage::Characterize) {
        let path = cfg.out.join(SUMMARY);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path, source: e })?;
        print!("\n{text}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.opts.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("COMMCHAR_LOG")
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
