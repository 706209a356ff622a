//! Downlink spectral efficiency through the hardening bound, with effective
//! channel moments estimated by Monte Carlo.

use crate::grid::{dot_h, Grid, VectorGrid};
use crate::network::ChannelRealization;
use crate::{Error, C64};

/// Minimum number of blocks before moments are trusted.
pub const MIN_REALIZATIONS: usize = 100;

/// Per-UE SE of one scheme in one setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SeReport {
    pub scheme: String,
    pub setup: usize,
    pub se: Vec<Result<f64, SinrFailure>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinrFailure {
    /// Interference-plus-noise estimate came out nonpositive.
    NonPositiveDenominator,
    TooFewSamples,
}

impl SinrFailure {
    pub fn label(self) -> &'static str {
        match self {
            SinrFailure::NonPositiveDenominator => "nonpositive_denominator",
            SinrFailure::TooFewSamples => "too_few_samples",
        }
    }
}

/// `g[k][i] = sum_l sqrt(rho[i][l]) a[i][l] h[k][l]^H w[i][l]` for one block.
pub fn effective_gains(
    h: &ChannelRealization,
    w: &VectorGrid,
    rho: &Grid<f64>,
    assoc: &Grid<bool>,
) -> Grid<C64> {
    let served: Vec<(usize, usize)> = (0..assoc.rows())
        .flat_map(|i| (0..assoc.cols()).map(move |l| (i, l)))
        .filter(|&(i, l)| assoc[(i, l)])
        .collect();
    let mut g = Grid::filled(h.h.rows(), assoc.rows(), C64::new(0.0, 0.0));
    accumulate_gains(h, w, rho, &served, &mut g);
    g
}

/// Gains over an explicit list of served `(ue, ap)` pairs, written into `g`.
pub(crate) fn accumulate_gains(
    h: &ChannelRealization,
    w: &VectorGrid,
    rho: &Grid<f64>,
    served: &[(usize, usize)],
    g: &mut Grid<C64>,
) {
    let n_ues = h.h.rows();
    for r in 0..g.rows() {
        g.row_mut(r).fill(C64::new(0.0, 0.0));
    }
    let mut v = vec![C64::new(0.0, 0.0); w.vec_len()];
    for &(i, l) in served {
        let amp = rho[(i, l)].sqrt();
        for (dst, src) in v.iter_mut().zip(w.get(i, l)) {
            *dst = src * amp;
        }
        for k in 0..n_ues {
            g[(k, i)] += dot_h(h.h.get(k, l), &v);
        }
    }
}

/// Streaming sample moments of the effective gains.
///
/// Merging is associative and commutative up to floating-point rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    sum: Grid<C64>,
    sum_sq: Grid<f64>,
    count: usize,
}

impl MomentAccumulator {
    pub fn new(n_ues: usize) -> Self {
        Self {
            sum: Grid::filled(n_ues, n_ues, C64::new(0.0, 0.0)),
            sum_sq: Grid::filled(n_ues, n_ues, 0.0),
            count: 0,
        }
    }

    pub fn add(&mut self, g: &Grid<C64>) {
        for k in 0..g.rows() {
            for (i, &x) in g.row(k).iter().enumerate() {
                self.sum[(k, i)] += x;
                self.sum_sq[(k, i)] += x.norm_sqr();
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        for k in 0..self.sum.rows() {
            for i in 0..self.sum.cols() {
                self.sum[(k, i)] += other.sum[(k, i)];
                self.sum_sq[(k, i)] += other.sum_sq[(k, i)];
            }
        }
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self, k: usize, i: usize) -> C64 {
        self.sum[(k, i)] / self.count as f64
    }

    pub fn mean_sq(&self, k: usize, i: usize) -> f64 {
        self.sum_sq[(k, i)] / self.count as f64
    }
}

/// Hardening-bound SINR of every UE from accumulated moments.
pub fn sinr_hardening(acc: &MomentAccumulator, noise_power: f64) -> Vec<Result<f64, SinrFailure>> {
    let n_ues = acc.sum.rows();
    if acc.count < MIN_REALIZATIONS {
        return vec![Err(SinrFailure::TooFewSamples); n_ues];
    }
    (0..n_ues)
        .map(|k| {
            let signal = acc.mean(k, k).norm_sqr();
            let total: f64 = (0..n_ues).map(|i| acc.mean_sq(k, i)).sum();
            let denom = total - signal + noise_power;
            if denom > 0.0 {
                Ok(signal / denom)
            } else {
                Err(SinrFailure::NonPositiveDenominator)
            }
        })
        .collect()
}

/// `(1 - tau_p / tau_c) log2(1 + sinr)`.
pub fn spectral_efficiency(sinr: f64, tau_p: usize, tau_c: usize) -> f64 {
    (1.0 - tau_p as f64 / tau_c as f64) * (1.0 + sinr).log2()
}

/// Average SE, 90%-likely SE and the empirical CDF of pooled samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SeSummary {
    pub average: f64,
    pub se90: f64,
    pub count: usize,
    /// Sorted samples paired with plotting positions `(i + 1) / n`.
    pub cdf: Vec<(f64, f64)>,
}

/// Lower nearest-rank percentile: the `max(1, floor(p n))`-th smallest sample.
pub fn lower_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p * sorted.len() as f64 + 1e-9).floor() as usize).max(1);
    sorted[rank.min(sorted.len()) - 1]
}

pub fn summarize(samples: &[f64]) -> Result<SeSummary, Error> {
    if samples.len() < 10 {
        return Err(Error::InsufficientSamples {
            needed: 10,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let average = samples.iter().sum::<f64>() / n as f64;
    let se90 = lower_nearest_rank(&sorted, 0.1);
    let cdf = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n as f64))
        .collect();
    Ok(SeSummary {
        average,
        se90,
        count: n,
        cdf,
    })
}
