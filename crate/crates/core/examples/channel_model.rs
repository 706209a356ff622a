// Drops APs and UEs on the wrapped square, computes large-scale fading and
// spatial correlation, and draws one block of small-scale fading.

use iama::grid::norm_sqr;
use iama::simulate::Setup;
use iama::SimulationConfig;

pub fn run_example() -> Result<(), iama::Error> {
    let config = SimulationConfig {
        l: 16,
        k: 8,
        ..SimulationConfig::default()
    };
    let setup = Setup::generate(&config, 0)?;
    let beta = setup.beta();

    println!("UE  strongest AP  beta [dB]  median beta [dB]");
    for k in 0..config.k {
        let mut row: Vec<(usize, f64)> = beta.row(k).iter().copied().enumerate().collect();
        row.sort_by(|a, b| b.1.total_cmp(&a.1));
        let median = row[row.len() / 2].1;
        println!(
            "{k:>2}  {:>12}  {:>9.1}  {:>16.1}",
            row[0].0,
            10.0 * row[0].1.log10(),
            10.0 * median.log10()
        );
    }

    let r = &setup.stats.r[(0, 0)];
    let eig = r.clone().symmetric_eigenvalues();
    let mut eig: Vec<f64> = eig.iter().map(|e| e / beta[(0, 0)]).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    println!("normalized eigenvalues of R[0][0]: {eig:.3?}");

    let mut h = iama::network::ChannelRealization {
        h: iama::grid::VectorGrid::zeros(config.k, config.l, config.n),
    };
    setup.channel(&config, 0, &mut h);
    let gain = norm_sqr(h.h.get(0, 0)) / (config.n as f64 * beta[(0, 0)]);
    println!("|h[0][0]|^2 / (N beta) in block 0: {gain:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), iama::Error> {
    run_example()
}
