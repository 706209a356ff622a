// Downlink SE of two schemes with both precoders on shared channel blocks.

use iama::se::summarize;
use iama::simulate::{evaluate, Setup};
use iama::{Precoder, Scheme, SimulationConfig};

pub fn run_example() -> Result<(), iama::Error> {
    let config = SimulationConfig {
        l: 20,
        k: 20,
        n_channel_reals: 100,
        ..SimulationConfig::default()
    };
    let schemes = [Scheme::IarSum, Scheme::Scalable];
    let setup = Setup::generate(&config, 0)?;
    let states = schemes
        .iter()
        .map(|&s| setup.access(s, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let table = evaluate(&setup, &config, &states, &Precoder::ALL)?;

    for (scheme, per_scheme) in schemes.iter().zip(&table) {
        for (precoder, per_ue) in Precoder::ALL.iter().zip(per_scheme) {
            let se: Vec<f64> = per_ue
                .iter()
                .filter_map(|r| r.as_ref().ok().copied())
                .collect();
            let s = summarize(&se)?;
            println!(
                "{:<9} {:<6} average {:.3}  90%-likely {:.3} bit/s/Hz",
                scheme.label(),
                precoder.label(),
                s.average,
                s.se90
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
