// MMSE estimation with two UEs contaminating each other's pilot at one AP.

use iama::estimation::{received_pilots, MmseEstimator};
use iama::grid::{Grid, VectorGrid};
use iama::network::{spatial_correlation_matrix, ChannelSampler, ChannelStatistics};
use iama::rng::SimRng;
use iama::SimulationConfig;
use rand::SeedableRng;

pub fn run_example() -> Result<(), iama::Error> {
    let config = SimulationConfig {
        l: 1,
        k: 2,
        tau_p: 1,
        ..SimulationConfig::default()
    };
    let asd = config.asd_deg.to_radians();
    let betas = [2e-10, 5e-11];
    let stats = ChannelStatistics {
        beta: Grid::from_fn(2, 1, |k, _| betas[k]),
        r: Grid::from_fn(2, 1, |k, _| {
            spatial_correlation_matrix(betas[k], [0.2, 1.0][k], asd, config.n)
        }),
    };
    let pilots = [0, 0];
    let estimator = MmseEstimator::new(&stats, &pilots, &config, &Grid::filled(2, 1, true))?;
    let sampler = ChannelSampler::new(&stats)?;
    let mut rng = SimRng::seed_from_u64(1);

    let blocks = 2000;
    let mut err = [0.0; 2];
    let mut hhat = VectorGrid::zeros(2, 1, config.n);
    for _ in 0..blocks {
        let h = sampler.draw(&mut rng);
        let y = received_pilots(&h, &pilots, &config, &mut rng);
        estimator.estimate_into(&y, &mut hhat);
        for (k, e) in err.iter_mut().enumerate() {
            *e +=
                h.h.get(k, 0)
                    .iter()
                    .zip(hhat.get(k, 0))
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>();
        }
    }
    for (k, total) in err.iter().enumerate() {
        let predicted = estimator
            .error_covariance(k, 0)
            .expect("masked pair")
            .trace()
            .re;
        let nmse = total / blocks as f64 / stats.r[(k, 0)].trace().re;
        println!(
            "UE {k}: empirical NMSE {nmse:.4}, predicted {:.4}",
            predicted / stats.r[(k, 0)].trace().re
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
