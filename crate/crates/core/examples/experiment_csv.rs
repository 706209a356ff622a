// A small multi-setup run writing results.csv and summary.csv.

use iama::experiment::{read_results, run_experiment, RunManifest};
use iama::{Precoder, Scheme, SimulationConfig};

pub fn run_example() -> Result<(), iama::Error> {
    let manifest = RunManifest {
        config: SimulationConfig {
            l: 16,
            k: 16,
            n_setups: 3,
            n_channel_reals: 100,
            ..SimulationConfig::default()
        },
        schemes: Scheme::ALL.to_vec(),
        precoders: vec![Precoder::Mr],
        out_dir: std::env::temp_dir().join("iama-example-run"),
    };
    let out = run_experiment(&manifest)?;
    println!(
        "wrote {} rows to {}",
        out.rows.len(),
        out.results_path.display()
    );
    for s in &out.summary {
        println!(
            "{:<9} {:<6} avg {:.3} se90 {:.3}",
            s.scheme, s.precoder, s.avg_se, s.se90
        );
    }
    let back = read_results(&out.results_path)?;
    assert_eq!(back.len(), out.rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
