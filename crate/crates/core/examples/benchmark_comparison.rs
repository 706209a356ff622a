// Every access scheme on the same large-scale fading: how many APs serve
// each UE and how much pilot contamination it sees at its master.

use iama::simulate::Setup;
use iama::{Scheme, SimulationConfig};

pub fn run_example() -> Result<(), iama::Error> {
    let config = SimulationConfig {
        l: 25,
        k: 40,
        ..SimulationConfig::default()
    };
    let setup = Setup::generate(&config, 0)?;
    let beta = setup.beta();

    println!("scheme    mean APs/UE  worst contamination ratio");
    for scheme in Scheme::ALL {
        let state = setup.access(scheme, &config)?;
        let aps = (0..config.k)
            .map(|k| state.serving_aps(k).len())
            .sum::<usize>() as f64
            / config.k as f64;
        // co-pilot gain at the master relative to the UE's own gain
        let worst = (0..config.k)
            .map(|k| {
                let m = state.masters[k];
                let others: f64 = (0..config.k)
                    .filter(|&i| i != k && state.pilots[i] == state.pilots[k])
                    .map(|i| beta[(i, m)])
                    .sum();
                others / beta[(k, m)]
            })
            .fold(0.0, f64::max);
        println!("{:<9} {aps:>11.2}  {:>25.2e}", scheme.label(), worst);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
