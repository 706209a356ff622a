//! Network geometry on a wrap-around square, large-scale fading, spatial
//! correlation, and correlated Rayleigh channel draws.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::grid::{Grid, VectorGrid};
use crate::linalg::{hermitian_sqrt, CMatrix};
use crate::rng::complex_normal;
use crate::{Error, SimulationConfig, C64};

/// Pathloss intercept at 1 m (dB).
pub const PATHLOSS_INTERCEPT_DB: f64 = -30.5;
/// Pathloss slope (dB per decade of distance).
pub const PATHLOSS_SLOPE_DB: f64 = 36.7;
/// AP height above UE height, added in quadrature to the ground distance.
pub const AP_HEIGHT_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub ap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
}

/// Drops `L` APs and `K` UEs uniformly on `[0, area_side)^2`.
pub fn generate_network<R: Rng + ?Sized>(
    config: &SimulationConfig,
    rng: &mut R,
) -> NetworkRealization {
    let side = config.area_side;
    let mut draw = |count: usize| -> Vec<Point> {
        (0..count)
            .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
            .collect()
    };
    let ap_positions = draw(config.l);
    let ue_positions = draw(config.k);
    NetworkRealization {
        ap_positions,
        ue_positions,
    }
}

/// Shortest displacement `q - p` on the torus, per axis.
fn wrapped_offset(p: Point, q: Point, side: f64) -> (f64, f64) {
    let wrap = |d: f64| {
        [d - side, d, d + side]
            .into_iter()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap()
    };
    (wrap(q.x - p.x), wrap(q.y - p.y))
}

/// Minimum distance between `p` and the nine shifted copies of `q`.
pub fn wrapped_distance(p: Point, q: Point, area_side: f64) -> f64 {
    let (dx, dy) = wrapped_offset(p, q, area_side);
    dx.hypot(dy)
}

/// Bearing (radians) of the shortest wrapped path from `from` to `to`.
pub fn wrapped_bearing(from: Point, to: Point, area_side: f64) -> f64 {
    let (dx, dy) = wrapped_offset(from, to, area_side);
    dy.atan2(dx)
}

/// Large-scale gain in dB at ground distance `d` with shadowing `shadow_db`.
pub fn pathloss_db(ground_distance: f64, shadow_db: f64) -> f64 {
    let d3 = ground_distance.hypot(AP_HEIGHT_M);
    PATHLOSS_INTERCEPT_DB - PATHLOSS_SLOPE_DB * d3.log10() + shadow_db
}

/// `K x L` linear large-scale fading coefficients with i.i.d. log-normal
/// shadowing drawn from `rng`.
pub fn large_scale_coefficients<R: Rng + ?Sized>(
    net: &NetworkRealization,
    config: &SimulationConfig,
    rng: &mut R,
) -> Grid<f64> {
    let shadow = Normal::new(0.0, config.shadow_std_db).expect("validated std");
    Grid::from_fn(net.ue_positions.len(), net.ap_positions.len(), |k, l| {
        let d = wrapped_distance(net.ue_positions[k], net.ap_positions[l], config.area_side);
        let f = if config.shadow_std_db > 0.0 {
            shadow.sample(rng)
        } else {
            0.0
        };
        10f64.powf(pathloss_db(d, f) / 10.0)
    })
}

/// Gaussian local-scattering correlation matrix of a half-wavelength ULA.
pub fn spatial_correlation_matrix(beta: f64, nominal_angle: f64, asd: f64, n: usize) -> CMatrix {
    let (sin, cos) = nominal_angle.sin_cos();
    CMatrix::from_fn(n, n, |m, q| {
        let dist = m as f64 - q as f64;
        let phase = C64::from_polar(1.0, PI * dist * sin);
        let spread = (-(asd * asd / 2.0) * (PI * dist * cos).powi(2)).exp();
        phase * (beta * spread)
    })
}

/// Second-order statistics of every UE-AP channel.
#[derive(Debug, Clone)]
pub struct ChannelStatistics {
    pub beta: Grid<f64>,
    pub r: Grid<CMatrix>,
}

impl ChannelStatistics {
    /// Correlation matrices for a realized geometry and coefficient table.
    pub fn from_geometry(
        net: &NetworkRealization,
        beta: Grid<f64>,
        config: &SimulationConfig,
    ) -> Self {
        let asd = config.asd_deg.to_radians();
        let r = Grid::from_fn(beta.rows(), beta.cols(), |k, l| {
            let angle = wrapped_bearing(net.ap_positions[l], net.ue_positions[k], config.area_side);
            spatial_correlation_matrix(beta[(k, l)], angle, asd, config.n)
        });
        Self { beta, r }
    }

    pub fn num_ues(&self) -> usize {
        self.beta.rows()
    }

    pub fn num_aps(&self) -> usize {
        self.beta.cols()
    }

    pub fn antennas(&self) -> usize {
        self.r.iter().next().map_or(0, |m| m.nrows())
    }
}

/// Generates geometry, coefficients and correlation matrices in one go.
pub fn generate_statistics<R: Rng + ?Sized>(
    config: &SimulationConfig,
    geometry_rng: &mut R,
    shadow_rng: &mut R,
) -> (NetworkRealization, ChannelStatistics) {
    let net = generate_network(config, geometry_rng);
    let beta = large_scale_coefficients(&net, config, shadow_rng);
    let stats = ChannelStatistics::from_geometry(&net, beta, config);
    (net, stats)
}

/// One coherence block of small-scale fading, `h[k][l]` per UE-AP pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: VectorGrid,
}

/// Precomputed `R^(1/2)` factors for repeated channel draws.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    n: usize,
    rows: usize,
    cols: usize,
    // column-major N x N blocks, one per (k, l)
    factors: Vec<C64>,
}

impl ChannelSampler {
    pub fn new(stats: &ChannelStatistics) -> Result<Self, Error> {
        let n = stats.antennas();
        let mut factors = Vec::with_capacity(stats.r.iter().count() * n * n);
        for r in stats.r.iter() {
            let s = hermitian_sqrt(r)?;
            factors.extend(s.iter().copied());
        }
        Ok(Self {
            n,
            rows: stats.num_ues(),
            cols: stats.num_aps(),
            factors,
        })
    }

    /// Draws a fresh block into `out`, reusing its allocation.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut VectorGrid) {
        let n = self.n;
        let mut z = vec![C64::new(0.0, 0.0); n];
        for k in 0..self.rows {
            for l in 0..self.cols {
                z.iter_mut().for_each(|x| *x = complex_normal(rng));
                let f = &self.factors[(k * self.cols + l) * n * n..][..n * n];
                let h = out.get_mut(k, l);
                for (i, hi) in h.iter_mut().enumerate() {
                    *hi = (0..n).map(|j| f[j * n + i] * z[j]).sum();
                }
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let mut h = VectorGrid::zeros(self.rows, self.cols, self.n);
        self.draw_into(rng, &mut h);
        ChannelRealization { h }
    }
}

/// Draws `h[k][l] ~ CN(0, R[k][l])` independently for every pair.
pub fn draw_channel<R: Rng + ?Sized>(
    stats: &ChannelStatistics,
    rng: &mut R,
) -> Result<ChannelRealization, Error> {
    Ok(ChannelSampler::new(stats)?.draw(rng))
}
