use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use lmdp::descriptor::{Method, DEFAULT_BLOCK_SIZE};
use lmdp::filter_bank::GaborParams;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "lmdp", version, about = "Line multi-direction palmprint descriptors")]
struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for every random choice (synthetic noise and layouts).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GaborArgs {
    /// Gabor frequency in cycles per pixel.
    #[arg(long, default_value_t = 0.11)]
    mu: f64,
    /// Gaussian envelope scale in pixels.
    #[arg(long, default_value_t = 5.6179)]
    sigma: f64,
    /// Odd kernel side length.
    #[arg(long = "size", default_value_t = 35)]
    kernel_size: usize,
    #[arg(long, default_value_t = 12)]
    orientations: usize,
    /// Keep the raw kernels instead of removing their mean.
    #[arg(long)]
    no_normalize: bool,
}

impl GaborArgs {
    pub fn params(&self) -> GaborParams {
        GaborParams {
            mu: self.mu,
            sigma: self.sigma,
            kernel_size: self.kernel_size,
            n_orientations: self.orientations,
            zero_mean: !self.no_normalize,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ExtractArgs {
    #[arg(long, default_value = "lmdp", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    /// Bits set in LDP codes.
    #[arg(long, default_value_t = 3)]
    ldp_k: usize,
    #[command(flatten)]
    gabor: GaborArgs,
}

/// Where evaluation reads descriptors from: a descriptor file, or a dataset
/// that is extracted on the fly.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct EvalInput {
    /// Descriptor file written by `extract`.
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// Directory of `<palm>_<sample>.pgm` images.
    #[arg(long)]
    dataset: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write every kernel of the filter bank as a CSV matrix.
    Bank {
        #[command(flatten)]
        gabor: GaborArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract one descriptor per image of a dataset directory.
    Extract {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        extract: ExtractArgs,
    },
    /// Chi-square distance between two stored descriptors.
    Match {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Record identity in the first file (default: its first record).
        #[arg(long)]
        id_a: Option<String>,
        #[arg(long)]
        id_b: Option<String>,
    },
    /// All-pairs verification: EER report and ROC curve.
    EvalVerify {
        #[command(flatten)]
        input: EvalInput,
        #[command(flatten)]
        extract: ExtractArgs,
        /// ROC CSV output.
        #[arg(long)]
        roc: Option<PathBuf>,
        /// Keep at most this many ROC points (0 keeps all).
        #[arg(long, default_value_t = 0)]
        thresholds: usize,
        /// Report file (default: standard output).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Nearest-neighbour identification with the first k samples as templates.
    EvalIdentify {
        #[command(flatten)]
        input: EvalInput,
        #[command(flatten)]
        extract: ExtractArgs,
        /// Comma-separated template counts. Without it, 1,2,3 are tried and
        /// counts that leave some palm without queries are skipped.
        #[arg(long, value_delimiter = ',')]
        train_k: Option<Vec<usize>>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Per-image share of pixels with 0, 1, 2 and 3+ dominant directions.
    DpnStats {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        gabor: GaborArgs,
        /// CSV output (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render synthetic line images with known angles.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SynthArgs {
    /// Line angles in degrees, counter-clockwise from horizontal.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Vec<f64>,
    /// Output PGM; a `.txt` ground-truth file is written next to it.
    #[arg(long, required_unless_present = "identities", conflicts_with = "identities")]
    out: Option<PathBuf>,
    /// Render a dataset of this many identities (random line pairs) instead.
    #[arg(long, requires = "out_dir")]
    identities: Option<usize>,
    #[arg(long, default_value_t = 6)]
    samples: usize,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Maximum shift of the crossing point per sample, in pixels.
    #[arg(long, default_value_t = 2.0)]
    jitter: f64,
    #[arg(long = "image-size", default_value_t = 128)]
    image_size: usize,
    /// Line full width at half depth, in pixels.
    #[arg(long, default_value_t = 8.0)]
    width: f64,
    #[arg(long, default_value_t = 80.0)]
    depth: f64,
    #[arg(long, default_value_t = 180.0)]
    background: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: lmdp::Error| e.to_string())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Bank { gabor, out } => commands::bank(&gabor, &out),
        Command::Extract { dataset, out, extract } => commands::extract(&dataset, &out, &extract),
        Command::Match { file_a, file_b, id_a, id_b } => {
            commands::match_files(&file_a, &file_b, id_a.as_deref(), id_b.as_deref())
        }
        Command::EvalVerify {
            input,
            extract,
            roc,
            thresholds,
            report,
        } => commands::eval_verify(&input, &extract, roc.as_deref(), thresholds, report.as_deref()),
        Command::EvalIdentify {
            input,
            extract,
            train_k,
            report,
        } => commands::eval_identify(&input, &extract, train_k, report.as_deref()),
        Command::DpnStats { dataset, gabor, out } => commands::dpn_stats(&dataset, &gabor, out.as_deref()),
        Command::Synth(args) => commands::synth(&args, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = (|| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = cli.jobs {
            if jobs == 0 {
                bail!("--jobs must be at least 1");
            }
            pool = pool.num_threads(jobs);
        }
        let pool = pool.build().context("cannot start worker pool")?;
        pool.install(|| run(cli))
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
