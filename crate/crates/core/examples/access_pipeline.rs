// The interference-aware access pipeline, one stage at a time, on one setup.

use iama::access::{
    assign_pilots, gain_over_noise, iama, iar_table, repair_master_conflicts, select_masters, Goal,
    IamaOptions, PilotOptions,
};
use iama::rng::SimRng;
use iama::simulate::Setup;
use iama::SimulationConfig;
use rand::SeedableRng;

pub fn run_example() -> Result<(), iama::Error> {
    let config = SimulationConfig {
        l: 20,
        k: 30,
        ..SimulationConfig::default()
    };
    let setup = Setup::generate(&config, 0)?;
    let beta = setup.beta();
    let gain = gain_over_noise(beta, config.noise_power);

    let (masters, a, _) = select_masters(beta, config.tau_p)?;
    let max_load = (0..config.l)
        .map(|l| masters.iter().filter(|&&m| m == l).count())
        .max();
    println!("masters: {masters:?} (largest load {max_load:?})");

    let mut rng = SimRng::seed_from_u64(config.seed);
    let out = assign_pilots(
        &gain,
        &masters,
        config.tau_p,
        config.kappa,
        config.mu,
        PilotOptions::default(),
        &mut rng,
    );
    let history: Vec<String> = out.history.iter().map(|s| format!("{s:.4e}")).collect();
    println!("sum reward per sweep: {}", history.join(" -> "));
    let mut pilots = out.pilots;
    let repaired = repair_master_conflicts(beta, &masters, &mut pilots, config.tau_p);
    println!("pilots: {pilots:?} ({repaired} repaired)");

    let table = iar_table(&gain, &pilots, &a, config.kappa, config.mu);
    let positive = table.iter().filter(|&&v| v > 0.0).count();
    println!("{positive} of {} rewards are positive", config.k * config.l);

    for goal in [Goal::Sum, Goal::Min] {
        let state = iama(
            beta,
            &config,
            IamaOptions::new(goal),
            &mut SimRng::seed_from_u64(config.seed),
        )?;
        let per_ue: Vec<usize> = (0..config.k).map(|k| state.serving_aps(k).len()).collect();
        println!(
            "{goal:?}: serving APs per UE {per_ue:?}, violations {}",
            state.violations(config.tau_p).len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
