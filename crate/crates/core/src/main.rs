use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use revmine::pipeline;
use revmine::{Error, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "revmine",
    version,
    about = "Mine sentence revisions from multi-version LaTeX corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract every paper into the document cache.
    Extract(Opts),
    /// Align first and last versions and write classified pairs.
    Pairs(Opts),
    /// Compute figure tables from the pair files.
    Stats(Opts),
    /// Draw a seeded sample of labelable pairs.
    Sample(Opts),
    /// Report annotator agreement for a label CSV.
    Agreement {
        /// CSV with header `pair_id,labeler_id,label`.
        labels: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus_root: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mismatch_penalty: Option<f64>,
    #[arg(long)]
    sim_threshold: Option<f64>,
    #[arg(long)]
    typo_edit_distance: Option<usize>,
    #[arg(long)]
    majority: Option<usize>,
    #[arg(long)]
    sample_n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    dump_alignment: bool,
}

impl Opts {
    fn resolve(&self) -> revmine::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.corpus_root {
            cfg.corpus_root = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.mismatch_penalty {
            cfg.mismatch_penalty = v;
        }
        if let Some(v) = self.sim_threshold {
            cfg.sim_threshold = v;
        }
        if let Some(v) = self.typo_edit_distance {
            cfg.typo_edit_distance = v;
        }
        if let Some(v) = self.majority {
            cfg.majority = v;
        }
        if let Some(v) = self.sample_n {
            cfg.sample_n = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = Some(v);
        }
        cfg.dump_alignment |= self.dump_alignment;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> revmine::Result<()> {
    match cli.command {
        Command::Extract(o) => {
            let r = pipeline::run_extract(&o.resolve()?)?;
            println!(
                "extracted {} papers ({} cached), {} failed",
                r.succeeded(),
                r.cached,
                r.failed.len()
            );
        }
        Command::Pairs(o) => {
            let r = pipeline::run_pairs(&o.resolve()?)?;
            println!(
                "{} pairs from {} aligned papers, {} labelable",
                r.pairs, r.aligned_papers, r.labelable
            );
        }
        Command::Stats(o) => {
            let cfg = o.resolve()?;
            let stats = pipeline::run_stats(&cfg)?;
            print!("{}", stats.to_tsv(cfg.top_k));
        }
        Command::Sample(o) => {
            let s = pipeline::run_sample(&o.resolve()?)?;
            println!("sampled {} pairs", s.len());
        }
        Command::Agreement { labels, opts } => {
            let r = pipeline::run_agreement(&opts.resolve()?, &labels)?;
            print!("{}", r.to_tsv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::AllPapersFailed(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
