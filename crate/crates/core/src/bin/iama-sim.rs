use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use iama::experiment::{run_experiment, RunManifest};
use iama::scheme::parse_scheme_list;
use iama::{Precoder, SimulationConfig};

/// Runs paired access-scheme comparisons and writes results.csv and summary.csv.
#[derive(Debug, Parser)]
#[command(name = "iama-sim", version)]
struct Args {
    /// key=value config file; omitted keys keep their defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma list of iarmin,iarsum,scalable,greedy,random
    #[arg(long, default_value = "iarmin,iarsum,scalable,greedy,random")]
    schemes: String,
    /// mr, lpmmse or both
    #[arg(long, default_value = "both")]
    precoder: String,
    /// Overrides n_setups
    #[arg(long)]
    setups: Option<usize>,
    /// Overrides the master seed
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn run(args: Args) -> Result<(), iama::Error> {
    let mut config = match &args.config {
        Some(path) => SimulationConfig::from_file(path)?,
        None => SimulationConfig::default(),
    };
    if let Some(n) = args.setups {
        config.n_setups = n;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    let precoders = match args.precoder.trim().to_ascii_lowercase().as_str() {
        "both" => Precoder::ALL.to_vec(),
        one => vec![one.parse()?],
    };
    let manifest = RunManifest {
        config,
        schemes: parse_scheme_list(&args.schemes)?,
        precoders,
        out_dir: args.out,
    };
    let out = run_experiment(&manifest)?;
    println!("scheme,precoder,avg_se,se90,count");
    for s in &out.summary {
        println!(
            "{},{},{:.4},{:.4},{}",
            s.scheme, s.precoder, s.avg_se, s.se90, s.count
        );
    }
    eprintln!(
        "wrote {} and {}",
        out.results_path.display(),
        out.summary_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
