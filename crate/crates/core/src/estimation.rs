//! Uplink pilot transmission and per-AP MMSE channel estimation under pilot
//! contamination.

use rand::Rng;

use crate::grid::{Grid, VectorGrid};
use crate::linalg::{cholesky, CMatrix};
use crate::network::{ChannelRealization, ChannelStatistics};
use crate::rng::complex_normal;
use crate::{Error, SimulationConfig, C64};

/// Despread pilot signals: `y[l][t]` is what AP `l` receives on pilot `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub y: VectorGrid,
}

/// MMSE estimates and estimation-error covariances.
///
/// Pairs outside the estimator's mask hold a zero estimate and no covariance.
#[derive(Debug, Clone)]
pub struct EstimateSet {
    pub hhat: VectorGrid,
    pub c: Grid<Option<CMatrix>>,
}

impl EstimateSet {
    pub fn error_covariance(&self, k: usize, l: usize) -> Option<&CMatrix> {
        self.c[(k, l)].as_ref()
    }
}

/// Draws the pilot noise for one block and forms `y[l][t]`.
///
/// Noise is drawn for every `(l, t)` in a fixed order whatever the pilot
/// assignment, so two assignments evaluated with equal RNG state see the same
/// noise.
pub fn received_pilots<R: Rng + ?Sized>(
    h: &ChannelRealization,
    pilots: &[usize],
    config: &SimulationConfig,
    rng: &mut R,
) -> PilotObservation {
    let mut y = pilot_noise(
        h.h.cols(),
        config.tau_p,
        h.h.vec_len(),
        config.noise_power,
        rng,
    );
    add_pilot_signal(h, pilots, config.pilot_energy(), &mut y);
    PilotObservation { y }
}

/// `CN(0, noise_power I)` noise for every `(AP, pilot)` observation.
pub fn pilot_noise<R: Rng + ?Sized>(
    n_aps: usize,
    tau_p: usize,
    n: usize,
    noise_power: f64,
    rng: &mut R,
) -> VectorGrid {
    let mut y = VectorGrid::zeros(n_aps, tau_p, n);
    let std = noise_power.sqrt();
    for l in 0..n_aps {
        for t in 0..tau_p {
            for x in y.get_mut(l, t) {
                *x = complex_normal(rng) * std;
            }
        }
    }
    y
}

/// Adds `sqrt(tau_p rho_p) h[i][l]` of every UE onto its pilot's observation.
pub fn add_pilot_signal(
    h: &ChannelRealization,
    pilots: &[usize],
    pilot_energy: f64,
    y: &mut VectorGrid,
) {
    let amp = pilot_energy.sqrt();
    for (i, &t) in pilots.iter().enumerate() {
        for l in 0..h.h.cols() {
            let hi = h.h.get(i, l);
            for (yy, hh) in y.get_mut(l, t).iter_mut().zip(hi) {
                *yy += hh * amp;
            }
        }
    }
}

/// `Psi[t][l] = sum_{i in P_t} tau_p rho_p R[i][l] + sigma^2 I`.
pub fn psi_matrix(
    t: usize,
    l: usize,
    stats: &ChannelStatistics,
    pilots: &[usize],
    config: &SimulationConfig,
) -> CMatrix {
    let n = stats.antennas();
    let mut psi = CMatrix::identity(n, n) * C64::new(config.noise_power, 0.0);
    for (i, _) in pilots.iter().enumerate().filter(|(_, &p)| p == t) {
        psi += &stats.r[(i, l)] * C64::new(config.pilot_energy(), 0.0);
    }
    psi
}

#[derive(Debug, Clone)]
struct PairFilter {
    // sqrt(tau_p rho_p) R Psi^{-1}, column-major N x N
    gain: Vec<C64>,
    error: CMatrix,
}

/// Per-pair MMSE filters for a fixed pilot assignment.
///
/// Built once per (setup, access scheme); applying it to a block is a
/// matrix-vector product per masked pair.
#[derive(Debug, Clone)]
pub struct MmseEstimator {
    n: usize,
    pilots: Vec<usize>,
    filters: Grid<Option<PairFilter>>,
}

impl MmseEstimator {
    /// Filters for every pair with `mask[(k, l)]` set.
    pub fn new(
        stats: &ChannelStatistics,
        pilots: &[usize],
        config: &SimulationConfig,
        mask: &Grid<bool>,
    ) -> Result<Self, Error> {
        let n = stats.antennas();
        let (n_ues, n_aps) = (stats.num_ues(), stats.num_aps());
        let energy = config.pilot_energy();
        let mut filters = Grid::filled(n_ues, n_aps, None);
        for l in 0..n_aps {
            for t in 0..config.tau_p {
                let users: Vec<usize> = (0..n_ues)
                    .filter(|&k| pilots[k] == t && mask[(k, l)])
                    .collect();
                if users.is_empty() {
                    continue;
                }
                let chol = cholesky(psi_matrix(t, l, stats, pilots, config))?;
                for k in users {
                    let r = &stats.r[(k, l)];
                    // Psi^{-1} R, whose adjoint is R Psi^{-1}
                    let psi_inv_r = chol.solve(r);
                    let r_psi_inv = psi_inv_r.adjoint();
                    let gain = &r_psi_inv * C64::new(energy.sqrt(), 0.0);
                    let error = r - (&r_psi_inv * r) * C64::new(energy, 0.0);
                    filters[(k, l)] = Some(PairFilter {
                        gain: gain.iter().copied().collect(),
                        error,
                    });
                }
            }
        }
        Ok(Self {
            n,
            pilots: pilots.to_vec(),
            filters,
        })
    }

    /// Writes `hhat[k][l]` for masked pairs into `out`; other pairs are zeroed.
    pub fn estimate_into(&self, y: &PilotObservation, out: &mut VectorGrid) {
        let n = self.n;
        out.fill_zero();
        for k in 0..self.filters.rows() {
            let t = self.pilots[k];
            for l in 0..self.filters.cols() {
                let Some(f) = &self.filters[(k, l)] else {
                    continue;
                };
                let obs = y.y.get(l, t);
                let dst = out.get_mut(k, l);
                for (i, d) in dst.iter_mut().enumerate() {
                    *d = (0..n).map(|j| f.gain[j * n + i] * obs[j]).sum();
                }
            }
        }
    }

    pub fn error_covariance(&self, k: usize, l: usize) -> Option<&CMatrix> {
        self.filters[(k, l)].as_ref().map(|f| &f.error)
    }

    pub fn error_covariances(&self) -> Grid<Option<CMatrix>> {
        self.filters.map(|f| f.as_ref().map(|f| f.error.clone()))
    }

    pub fn pilots(&self) -> &[usize] {
        &self.pilots
    }
}

/// MMSE estimates of every channel from one block of pilot observations.
pub fn mmse_estimate(
    y: &PilotObservation,
    stats: &ChannelStatistics,
    pilots: &[usize],
    config: &SimulationConfig,
) -> Result<EstimateSet, Error> {
    let mask = Grid::filled(stats.num_ues(), stats.num_aps(), true);
    let est = MmseEstimator::new(stats, pilots, config, &mask)?;
    let mut hhat = VectorGrid::zeros(stats.num_ues(), stats.num_aps(), stats.antennas());
    est.estimate_into(y, &mut hhat);
    Ok(EstimateSet {
        hhat,
        c: est.error_covariances(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ChannelSampler;
    use crate::rng::SimRng;
    use rand::SeedableRng;

    fn scalar_stats(betas: &[f64]) -> ChannelStatistics {
        ChannelStatistics {
            beta: Grid::from_rows(betas.iter().map(|&b| vec![b]).collect()),
            r: Grid::from_rows(
                betas
                    .iter()
                    .map(|&b| vec![CMatrix::from_element(1, 1, C64::new(b, 0.0))])
                    .collect(),
            ),
        }
    }

    fn unit_config(tau_p: usize) -> SimulationConfig {
        SimulationConfig {
            l: 1,
            k: 2,
            n: 1,
            tau_p,
            rho_p: 1.0 / tau_p as f64,
            noise_power: 1.0,
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn psi_examples() {
        let config = unit_config(1);
        let stats = scalar_stats(&[2.0, 3.0]);
        let psi = psi_matrix(0, 0, &stats, &[0, 0], &config);
        assert_eq!(psi[(0, 0)], C64::new(6.0, 0.0));
        let config2 = unit_config(2);
        let empty = psi_matrix(1, 0, &stats, &[0, 0], &config2);
        assert_eq!(empty[(0, 0)], C64::new(1.0, 0.0));
        let single = psi_matrix(0, 0, &stats, &[0, 1], &config2);
        assert_eq!(single[(0, 0)], C64::new(3.0, 0.0));
    }

    #[test]
    fn empty_pilot_is_pure_noise_and_noise_free_limit() {
        let stats = scalar_stats(&[1.0]);
        let h = ChannelSampler::new(&stats)
            .unwrap()
            .draw(&mut SimRng::seed_from_u64(1));
        let mut config = unit_config(2);
        config.k = 1;
        config.noise_power = 1e-30;
        let y = received_pilots(&h, &[0], &config, &mut SimRng::seed_from_u64(2));
        assert!(y.y.get(0, 1)[0].norm() < 1e-13);
        let expected = h.h.get(0, 0)[0] * config.pilot_energy().sqrt();
        assert!((y.y.get(0, 0)[0] - expected).norm() < 1e-13);
    }

    #[test]
    fn co_pilot_observation_mean() {
        let stats = scalar_stats(&[1.0, 1.0]);
        let h = ChannelSampler::new(&stats)
            .unwrap()
            .draw(&mut SimRng::seed_from_u64(4));
        let config = unit_config(1);
        let mut rng = SimRng::seed_from_u64(5);
        let draws = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        for _ in 0..draws {
            mean += received_pilots(&h, &[0, 0], &config, &mut rng).y.get(0, 0)[0];
        }
        mean /= draws as f64;
        let expected = (h.h.get(0, 0)[0] + h.h.get(1, 0)[0]) * config.pilot_energy().sqrt();
        // noise std of the mean is 1/sqrt(1e5) ~ 0.003
        assert!(
            (mean - expected).norm() < 0.02 * expected.norm().max(1.0),
            "{mean} {expected}"
        );
    }

    #[test]
    fn zero_correlation_gives_zero_estimate() {
        let stats = scalar_stats(&[0.0, 1.0]);
        let config = unit_config(1);
        let h = ChannelSampler::new(&stats)
            .unwrap()
            .draw(&mut SimRng::seed_from_u64(1));
        let y = received_pilots(&h, &[0, 0], &config, &mut SimRng::seed_from_u64(2));
        let est = mmse_estimate(&y, &stats, &[0, 0], &config).unwrap();
        assert_eq!(est.hhat.get(0, 0)[0], C64::new(0.0, 0.0));
        assert_eq!(
            est.error_covariance(0, 0).unwrap()[(0, 0)],
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn scalar_uncontaminated_estimate_has_half_power() {
        let stats = scalar_stats(&[1.0]);
        let mut config = unit_config(1);
        config.k = 1;
        let sampler = ChannelSampler::new(&stats).unwrap();
        let mut rng = SimRng::seed_from_u64(7);
        let draws = 100_000;
        let mut power = 0.0;
        let mut c = 0.0;
        for _ in 0..draws {
            let h = sampler.draw(&mut rng);
            let y = received_pilots(&h, &[0], &config, &mut rng);
            let est = mmse_estimate(&y, &stats, &[0], &config).unwrap();
            power += est.hhat.get(0, 0)[0].norm_sqr();
            c = est.error_covariance(0, 0).unwrap()[(0, 0)].re;
        }
        assert!((power / draws as f64 - 0.5).abs() < 0.01);
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_statistics_give_parallel_estimates() {
        let r = crate::network::spatial_correlation_matrix(1.0, 0.4, 0.26, 4);
        let stats = ChannelStatistics {
            beta: Grid::from_rows(vec![vec![1.0], vec![1.0]]),
            r: Grid::from_rows(vec![vec![r.clone()], vec![r]]),
        };
        let config = SimulationConfig {
            l: 1,
            k: 2,
            n: 4,
            tau_p: 1,
            rho_p: 1.0,
            noise_power: 0.1,
            ..SimulationConfig::default()
        };
        let h = ChannelSampler::new(&stats)
            .unwrap()
            .draw(&mut SimRng::seed_from_u64(3));
        let y = received_pilots(&h, &[0, 0], &config, &mut SimRng::seed_from_u64(4));
        let est = mmse_estimate(&y, &stats, &[0, 0], &config).unwrap();
        assert_eq!(est.hhat.get(0, 0), est.hhat.get(1, 0));
    }
}
