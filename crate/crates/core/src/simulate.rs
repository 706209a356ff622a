//! Per-setup Monte Carlo evaluation of several access schemes on shared
//! randomness.
//!
//! Within a setup every scheme sees the same geometry, shadowing, channel
//! blocks and pilot noise. Each block's randomness comes from its own stream
//! keyed by `(seed, setup, block)`, so the blocks can be regenerated for the
//! second pass (precoder normalization needs the sample energy first).

use crate::access::AccessState;
use crate::estimation::{add_pilot_signal, pilot_noise, MmseEstimator, PilotObservation};
use crate::grid::{Grid, VectorGrid};
use crate::network::{
    generate_statistics, ChannelRealization, ChannelSampler, ChannelStatistics, NetworkRealization,
};
use crate::precoding::{
    apply_scales, fractional_power_allocation, raw_precoders_into, LpMmseBase, Precoder,
    PrecoderEnergy,
};
use crate::rng::{stream, Stream};
use crate::se::{
    accumulate_gains, sinr_hardening, spectral_efficiency, MomentAccumulator, SinrFailure,
};
use crate::{Error, Scheme, SimulationConfig, C64};

/// One network drop with its channel statistics.
#[derive(Debug, Clone)]
pub struct Setup {
    pub index: usize,
    pub network: NetworkRealization,
    pub stats: ChannelStatistics,
    sampler: ChannelSampler,
}

impl Setup {
    /// Draws setup `index` from the config's master seed.
    pub fn generate(config: &SimulationConfig, index: usize) -> Result<Self, Error> {
        let mut geo = stream(config.seed, index as u64, Stream::Geometry, 0);
        let mut shadow = stream(config.seed, index as u64, Stream::Shadowing, 0);
        let (network, stats) = generate_statistics(config, &mut geo, &mut shadow);
        Self::from_statistics(index, network, stats)
    }

    pub fn from_statistics(
        index: usize,
        network: NetworkRealization,
        stats: ChannelStatistics,
    ) -> Result<Self, Error> {
        let sampler = ChannelSampler::new(&stats)?;
        Ok(Self {
            index,
            network,
            stats,
            sampler,
        })
    }

    pub fn beta(&self) -> &Grid<f64> {
        &self.stats.beta
    }

    /// Runs `scheme` with this setup's access stream.
    pub fn access(&self, scheme: Scheme, config: &SimulationConfig) -> Result<AccessState, Error> {
        let mut rng = stream(
            config.seed,
            self.index as u64,
            Stream::Access,
            scheme.stream_index(),
        );
        scheme.access(self.beta(), config, &mut rng)
    }

    /// Small-scale fading of block `block`.
    pub fn channel(&self, config: &SimulationConfig, block: usize, out: &mut ChannelRealization) {
        let mut rng = stream(
            config.seed,
            self.index as u64,
            Stream::Channel,
            block as u64,
        );
        self.sampler.draw_into(&mut rng, &mut out.h);
    }

    /// Pilot noise of block `block`, before any pilot signal is added.
    pub fn noise(&self, config: &SimulationConfig, block: usize) -> VectorGrid {
        let mut rng = stream(
            config.seed,
            self.index as u64,
            Stream::PilotNoise,
            block as u64,
        );
        pilot_noise(
            self.stats.num_aps(),
            config.tau_p,
            self.stats.antennas(),
            config.noise_power,
            &mut rng,
        )
    }
}

/// Everything about one access state that stays fixed across blocks.
struct Prepared<'a> {
    state: &'a AccessState,
    served: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    estimator: MmseEstimator,
    rho: Grid<f64>,
    lpmmse: Option<LpMmseBase>,
}

impl<'a> Prepared<'a> {
    fn new(
        state: &'a AccessState,
        setup: &Setup,
        config: &SimulationConfig,
        precoders: &[Precoder],
    ) -> Result<Self, Error> {
        let served = state.served_per_ap();
        let pairs: Vec<(usize, usize)> = served
            .iter()
            .enumerate()
            .flat_map(|(l, users)| users.iter().map(move |&k| (k, l)))
            .collect();
        let estimator = MmseEstimator::new(&setup.stats, &state.pilots, config, &state.a)?;
        let rho =
            fractional_power_allocation(&setup.stats.beta, &state.a, config.nu, config.rho_dl);
        let lpmmse = precoders.contains(&Precoder::LpMmse).then(|| {
            LpMmseBase::new(
                &served,
                |k, l| estimator.error_covariance(k, l).cloned(),
                setup.stats.antennas(),
                config,
            )
        });
        Ok(Self {
            state,
            served,
            pairs,
            estimator,
            rho,
            lpmmse,
        })
    }
}

/// Per-UE SE outcome, indexed `[state][precoder][ue]`.
pub type SeTable = Vec<Vec<Vec<Result<f64, SinrFailure>>>>;

/// Evaluates the downlink SE of every UE under each access state and
/// precoder, all on the same channel blocks.
pub fn evaluate(
    setup: &Setup,
    config: &SimulationConfig,
    states: &[AccessState],
    precoders: &[Precoder],
) -> Result<SeTable, Error> {
    let (n_ues, n_aps, n) = (
        setup.stats.num_ues(),
        setup.stats.num_aps(),
        setup.stats.antennas(),
    );
    let prepared = states
        .iter()
        .map(|s| Prepared::new(s, setup, config, precoders))
        .collect::<Result<Vec<_>, _>>()?;

    let mut h = ChannelRealization {
        h: VectorGrid::zeros(n_ues, n_aps, n),
    };
    let mut hhat = VectorGrid::zeros(n_ues, n_aps, n);
    let mut w = VectorGrid::zeros(n_ues, n_aps, n);
    let mut obs = PilotObservation {
        y: VectorGrid::zeros(n_aps, config.tau_p, n),
    };
    let blocks = config.n_channel_reals;

    // one block's estimates for state `p`, left in `hhat`
    let estimate = |p: &Prepared,
                    h: &ChannelRealization,
                    noise: &VectorGrid,
                    obs: &mut PilotObservation,
                    hhat: &mut VectorGrid| {
        obs.y.clone_from(noise);
        add_pilot_signal(h, &p.state.pilots, config.pilot_energy(), &mut obs.y);
        p.estimator.estimate_into(obs, hhat);
    };

    let mut energy: Vec<Vec<PrecoderEnergy>> = prepared
        .iter()
        .map(|_| {
            precoders
                .iter()
                .map(|_| PrecoderEnergy::new(n_ues, n_aps))
                .collect()
        })
        .collect();
    for block in 0..blocks {
        setup.channel(config, block, &mut h);
        let noise = setup.noise(config, block);
        for (p, e) in prepared.iter().zip(energy.iter_mut()) {
            estimate(p, &h, &noise, &mut obs, &mut hhat);
            for (&pc, acc) in precoders.iter().zip(e.iter_mut()) {
                raw_precoders_into(pc, &hhat, &p.served, p.lpmmse.as_ref(), &mut w)?;
                acc.add(&w);
            }
        }
    }
    let scales: Vec<Vec<Grid<f64>>> = energy
        .iter()
        .map(|e| e.iter().map(PrecoderEnergy::scales).collect())
        .collect();

    let mut moments: Vec<Vec<MomentAccumulator>> = prepared
        .iter()
        .map(|_| {
            precoders
                .iter()
                .map(|_| MomentAccumulator::new(n_ues))
                .collect()
        })
        .collect();
    let mut g = Grid::filled(n_ues, n_ues, C64::new(0.0, 0.0));
    for block in 0..blocks {
        setup.channel(config, block, &mut h);
        let noise = setup.noise(config, block);
        for (si, p) in prepared.iter().enumerate() {
            estimate(p, &h, &noise, &mut obs, &mut hhat);
            for (pi, &pc) in precoders.iter().enumerate() {
                raw_precoders_into(pc, &hhat, &p.served, p.lpmmse.as_ref(), &mut w)?;
                apply_scales(&mut w, &scales[si][pi]);
                accumulate_gains(&h, &w, &p.rho, &p.pairs, &mut g);
                moments[si][pi].add(&g);
            }
        }
    }

    Ok(moments
        .iter()
        .map(|per_state| {
            per_state
                .iter()
                .map(|acc| {
                    sinr_hardening(acc, config.noise_power)
                        .into_iter()
                        .map(|r| {
                            r.map(|sinr| spectral_efficiency(sinr, config.tau_p, config.tau_c))
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SimulationConfig {
        SimulationConfig {
            l: 6,
            k: 8,
            n: 2,
            tau_p: 3,
            n_channel_reals: 100,
            seed: 17,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn setup_generation_is_reproducible() {
        let config = tiny();
        let a = Setup::generate(&config, 3).unwrap();
        let b = Setup::generate(&config, 3).unwrap();
        assert_eq!(a.stats.beta, b.stats.beta);
        assert_eq!(a.network, b.network);
        assert_ne!(
            Setup::generate(&config, 4).unwrap().stats.beta,
            a.stats.beta
        );
    }

    #[test]
    fn evaluation_is_paired_across_scheme_sets() {
        let config = tiny();
        let setup = Setup::generate(&config, 0).unwrap();
        let s1 = setup.access(Scheme::Scalable, &config).unwrap();
        let s2 = setup.access(Scheme::IarMin, &config).unwrap();
        let alone = evaluate(&setup, &config, std::slice::from_ref(&s1), &Precoder::ALL).unwrap();
        let together = evaluate(&setup, &config, &[s2, s1], &Precoder::ALL).unwrap();
        assert_eq!(alone[0], together[1]);
        for per_ue in &alone[0] {
            assert_eq!(per_ue.len(), config.k);
            assert!(per_ue.iter().all(|r| matches!(r, Ok(se) if *se >= 0.0)));
        }
    }
}
