use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use klinear::boolfn::{parse_indices, FunctionOracle};
use klinear::harness::{
    query_scaling_report, run_bench, summary_path, DistSpec, ExperimentConfig, FunctionSpec,
    GEN_STREAM,
};
use klinear::lab::{check_good, hamming_lower_bound, lemma_sweep, BitMatrix, GoodnessSpec};
use klinear::learner::build_bch_matrix;
use klinear::rng::stream_rng;
use klinear::tester::{run_tester, TestMode, TesterConfig};

#[derive(Parser)]
#[command(
    name = "klinear",
    version,
    about = "Testers for k-sparse parities under arbitrary distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one tester on one function.
    Run(RunArgs),
    /// Run an experiment grid and write trial and summary CSVs.
    Bench(BenchArgs),
    /// Learner query matrices.
    Matrix {
        #[command(subcommand)]
        cmd: MatrixCmd,
    },
    /// Lower-bound tools.
    Lab {
        #[command(subcommand)]
        cmd: LabCmd,
    },
    /// Planned query totals per (k, epsilon).
    Scaling {
        #[arg(long, default_value = "8,16,32,64")]
        k_list: String,
        #[arg(long, default_value = "0.25")]
        epsilon_list: String,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "star")]
    mode: TestMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// parity:1,4,7 | const:0 | const:1 | table:<file> | noisy-parity:<support>:<rate>
    #[arg(long)]
    function: FunctionSpec,
    /// uniform | product:<p> | file:<path> | mass:<point>:<w>,... | random-mixture:<count>
    #[arg(long, default_value = "uniform")]
    dist: DistSpec,
    /// Print a detailed JSON report after the summary line.
    #[arg(long)]
    json: bool,
    /// Answer every planned query even after a stage rejects.
    #[arg(long)]
    no_early_exit: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// Print the (N, K) query matrix.
    Dump {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LabCmd {
    /// Hamming lower bound on the query count.
    Hamming {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Check (L, slack)-goodness of a matrix file.
    Goodcheck {
        #[arg(long)]
        matrix: PathBuf,
        /// Comma separated subset sizes.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        slack: usize,
    },
    /// Exhaustive checks of the lemma implementations.
    Lemmas {
        #[arg(long)]
        sweep: bool,
    },
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = TesterConfig::new(args.n, args.k, args.epsilon, args.mode, args.seed)?
        .with_early_exit(!args.no_early_exit);
    let f = args.function.build(args.n, args.seed)?;
    let d = args
        .dist
        .realize(args.n, &mut stream_rng(args.seed, GEN_STREAM))?;
    let verdict = run_tester(&FunctionOracle::planned(f), &d, &cfg)?;
    println!(
        "verdict={} stage={} f_queries={} d_samples={}",
        verdict.decision.as_str(),
        verdict.rejecting_stage,
        verdict.stats.f_queries(),
        verdict.stats.d_samples()
    );
    if args.json {
        let report = serde_json::json!({
            "config": cfg,
            "params": cfg.params(),
            "function": args.function.to_string(),
            "dist": args.dist.to_string(),
            "verdict": verdict,
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(t) = args.threads {
        cfg.threads = t;
        cfg.validate()?;
    }
    let out = run_bench(&cfg, &args.out)?;
    eprintln!(
        "{} trials over {} cells -> {} and {}",
        out.records.len(),
        out.summary.len(),
        args.out.display(),
        summary_path(&args.out).display()
    );
    Ok(())
}

fn lab(cmd: LabCmd) -> Result<()> {
    match cmd {
        LabCmd::Hamming { n, k } => println!("{}", hamming_lower_bound(n, k)?),
        LabCmd::Goodcheck {
            matrix,
            sizes,
            slack,
        } => {
            let m = BitMatrix::from_file(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let spec = GoodnessSpec {
                sizes: parse_indices(&sizes)?,
                slack,
            };
            println!(
                "{}",
                if check_good(&m, &spec)? {
                    "good"
                } else {
                    "bad"
                }
            );
        }
        LabCmd::Lemmas { sweep } => {
            if !sweep {
                bail!("nothing to do; pass --sweep");
            }
            let report = lemma_sweep();
            println!("{report}");
            if report.failures() > 0 {
                bail!("{} lemma checks failed", report.failures());
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
        Command::Matrix {
            cmd: MatrixCmd::Dump { n, k, out },
        } => {
            let text = build_bch_matrix(n, k)?.dump();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Lab { cmd } => lab(cmd),
        Command::Scaling {
            k_list,
            epsilon_list,
        } => {
            let ks = parse_indices(&k_list)?;
            let eps = epsilon_list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .context("bad epsilon list")?;
            print!("{}", query_scaling_report(&ks, &eps)?);
            Ok(())
        }
    }
}
