//! Distributed downlink precoding (MR and local partial MMSE) and fractional
//! power allocation.

use std::fmt;
use std::str::FromStr;

use crate::estimation::EstimateSet;
use crate::grid::{norm_sqr, Grid, VectorGrid};
use crate::linalg::{cholesky, CMatrix, CVector};
use crate::{Error, SimulationConfig, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precoder {
    Mr,
    LpMmse,
}

impl Precoder {
    pub const ALL: [Precoder; 2] = [Precoder::Mr, Precoder::LpMmse];

    pub fn label(self) -> &'static str {
        match self {
            Precoder::Mr => "mr",
            Precoder::LpMmse => "lpmmse",
        }
    }
}

impl fmt::Display for Precoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Precoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mr" => Ok(Precoder::Mr),
            "lpmmse" | "lp-mmse" => Ok(Precoder::LpMmse),
            other => Err(Error::UnknownName {
                kind: "precoder",
                name: other.to_string(),
            }),
        }
    }
}

/// Normalized precoders of one block together with the per-pair powers.
#[derive(Debug, Clone)]
pub struct PrecodingSolution {
    pub w: VectorGrid,
    pub rho: Grid<f64>,
}

/// Unnormalized MR precoder: the channel estimate itself.
pub fn mr_precoder(est: &EstimateSet, k: usize, l: usize) -> Vec<C64> {
    est.hhat.get(k, l).to_vec()
}

/// Unnormalized LP-MMSE precoder of UE `k` at AP `l`, using only the
/// estimates and error covariances of the UEs that AP `l` serves.
pub fn lpmmse_precoder(
    est: &EstimateSet,
    served: &[usize],
    config: &SimulationConfig,
    k: usize,
    l: usize,
) -> Result<Vec<C64>, Error> {
    let n = est.hhat.vec_len();
    let mut m = CMatrix::identity(n, n) * C64::new(config.noise_power / config.rho_dl, 0.0);
    for &i in served {
        let h = CVector::from_column_slice(est.hhat.get(i, l));
        m += &h * h.adjoint();
        if let Some(c) = est.error_covariance(i, l) {
            m += c;
        }
    }
    let chol = cholesky(m)?;
    let rhs = CVector::from_column_slice(est.hhat.get(k, l));
    Ok(chol.solve(&rhs).iter().copied().collect())
}

/// Per-AP static part of the LP-MMSE matrix: served error covariances plus
/// the `sigma^2 / rho_dl` regularizer.
#[derive(Debug, Clone)]
pub struct LpMmseBase {
    served: Vec<Vec<usize>>,
    base: Vec<CMatrix>,
}

impl LpMmseBase {
    pub fn new(
        served: &[Vec<usize>],
        error_cov: impl Fn(usize, usize) -> Option<CMatrix>,
        n: usize,
        config: &SimulationConfig,
    ) -> Self {
        let reg = C64::new(config.noise_power / config.rho_dl, 0.0);
        let base = served
            .iter()
            .enumerate()
            .map(|(l, users)| {
                let mut m = CMatrix::identity(n, n) * reg;
                for &i in users {
                    if let Some(c) = error_cov(i, l) {
                        m += c;
                    }
                }
                m
            })
            .collect();
        Self {
            served: served.to_vec(),
            base,
        }
    }
}

/// Writes unnormalized precoders for all served pairs of one block.
pub fn raw_precoders_into(
    precoder: Precoder,
    hhat: &VectorGrid,
    served: &[Vec<usize>],
    lpmmse: Option<&LpMmseBase>,
    out: &mut VectorGrid,
) -> Result<(), Error> {
    out.fill_zero();
    match precoder {
        Precoder::Mr => {
            for (l, users) in served.iter().enumerate() {
                for &k in users {
                    out.get_mut(k, l).copy_from_slice(hhat.get(k, l));
                }
            }
        }
        Precoder::LpMmse => {
            let base = lpmmse.expect("LP-MMSE needs its per-AP base matrices");
            debug_assert_eq!(base.served.len(), served.len());
            let n = hhat.vec_len();
            for (l, users) in served.iter().enumerate() {
                if users.is_empty() {
                    continue;
                }
                let mut m = base.base[l].clone();
                let mut rhs = CMatrix::zeros(n, users.len());
                for (col, &i) in users.iter().enumerate() {
                    let h = CVector::from_column_slice(hhat.get(i, l));
                    m += &h * h.adjoint();
                    rhs.set_column(col, &h);
                }
                let sol = cholesky(m)?.solve(&rhs);
                for (col, &k) in users.iter().enumerate() {
                    for (dst, src) in out.get_mut(k, l).iter_mut().zip(sol.column(col).iter()) {
                        *dst = *src;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Running sum of `||w_bar[k][l]||^2` over the blocks of one setup.
#[derive(Debug, Clone)]
pub struct PrecoderEnergy {
    sum: Grid<f64>,
    count: usize,
}

impl PrecoderEnergy {
    pub fn new(n_ues: usize, n_aps: usize) -> Self {
        Self {
            sum: Grid::filled(n_ues, n_aps, 0.0),
            count: 0,
        }
    }

    pub fn add(&mut self, raw: &VectorGrid) {
        for k in 0..raw.rows() {
            for l in 0..raw.cols() {
                self.sum[(k, l)] += norm_sqr(raw.get(k, l));
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &PrecoderEnergy) {
        for k in 0..self.sum.rows() {
            for l in 0..self.sum.cols() {
                self.sum[(k, l)] += other.sum[(k, l)];
            }
        }
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `1 / sqrt(E{||w_bar||^2})` per pair; zero where the sample energy is
    /// zero.
    pub fn scales(&self) -> Grid<f64> {
        let n = self.count.max(1) as f64;
        self.sum
            .map(|&s| if s > 0.0 { (n / s).sqrt() } else { 0.0 })
    }

    /// Pairs that were fed at least once but never carried energy.
    pub fn zero_energy_pairs(&self, mask: &Grid<bool>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in 0..self.sum.rows() {
            for l in 0..self.sum.cols() {
                if mask[(k, l)] && self.sum[(k, l)] == 0.0 {
                    out.push((k, l));
                }
            }
        }
        out
    }
}

/// Scales each block's raw precoders by the common per-pair constant
/// `1 / sqrt(mean ||w_bar||^2)`. Needs at least two blocks.
pub fn normalize_precoders(raw: &[VectorGrid]) -> Result<Vec<VectorGrid>, Error> {
    if raw.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: raw.len(),
        });
    }
    let mut energy = PrecoderEnergy::new(raw[0].rows(), raw[0].cols());
    raw.iter().for_each(|r| energy.add(r));
    let scales = energy.scales();
    Ok(raw
        .iter()
        .map(|r| {
            let mut w = r.clone();
            apply_scales(&mut w, &scales);
            w
        })
        .collect())
}

pub fn apply_scales(w: &mut VectorGrid, scales: &Grid<f64>) {
    for k in 0..w.rows() {
        for l in 0..w.cols() {
            let s = scales[(k, l)];
            w.get_mut(k, l).iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// `rho[k][l] = rho_dl * beta[k][l]^nu / sum_{i served by l} beta[i][l]^nu`.
pub fn fractional_power_allocation(
    beta: &Grid<f64>,
    assoc: &Grid<bool>,
    nu: f64,
    rho_dl: f64,
) -> Grid<f64> {
    let mut rho = Grid::filled(beta.rows(), beta.cols(), 0.0);
    for l in 0..beta.cols() {
        let total: f64 = (0..beta.rows())
            .filter(|&k| assoc[(k, l)])
            .map(|k| beta[(k, l)].powf(nu))
            .sum();
        if total <= 0.0 {
            continue;
        }
        for k in (0..beta.rows()).filter(|&k| assoc[(k, l)]) {
            rho[(k, l)] = rho_dl * beta[(k, l)].powf(nu) / total;
        }
    }
    rho
}
