//! Interference-aware reward (IAR) of a (UE, AP, pilot) tuple.

use crate::grid::Grid;

/// Pilot marker for a UE whose pilot is not fixed yet. Such a UE never
/// counts as an interferer.
pub const UNASSIGNED: usize = usize::MAX;

/// UEs other than `k` holding pilot `t`.
pub fn interfering_ues(t: usize, k: usize, pilots: &[usize]) -> Vec<usize> {
    pilots
        .iter()
        .enumerate()
        .filter(|&(i, &p)| i != k && p == t)
        .map(|(i, _)| i)
        .collect()
}

/// APs serving some interfering UE of `k` on pilot `t`, minus the APs that
/// serve `k` itself.
pub fn interfering_aps(t: usize, k: usize, pilots: &[usize], assoc: &Grid<bool>) -> Vec<usize> {
    let ues = interfering_ues(t, k, pilots);
    (0..assoc.cols())
        .filter(|&l| !assoc[(k, l)] && ues.iter().any(|&i| assoc[(i, l)]))
        .collect()
}

/// `kappa * gain^mu - interferer * interfering_ap`, where a missing
/// interferer (empty set) zeroes the whole product.
#[inline]
pub fn iar_value(
    gain: f64,
    max_interferer: Option<f64>,
    max_interfering_ap: Option<f64>,
    kappa: f64,
    mu: f64,
) -> f64 {
    let interference = match (max_interferer, max_interfering_ap) {
        (Some(x), Some(y)) => x * y,
        _ => 0.0,
    };
    kappa * gain.powf(mu) - interference
}

fn max_over(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |acc, v| Some(acc.map_or(v, |m: f64| m.max(v))))
}

/// IAR of UE `k` at AP `l` if `k` used pilot `t`.
#[allow(clippy::too_many_arguments)]
pub fn iar(
    k: usize,
    l: usize,
    t: usize,
    gain: &Grid<f64>,
    pilots: &[usize],
    assoc: &Grid<bool>,
    kappa: f64,
    mu: f64,
) -> f64 {
    let ues = interfering_ues(t, k, pilots);
    let aps = interfering_aps(t, k, pilots, assoc);
    iar_value(
        gain[(k, l)],
        max_over(ues.iter().map(|&i| gain[(i, l)])),
        max_over(aps.iter().map(|&j| gain[(k, j)])),
        kappa,
        mu,
    )
}

/// `iar[k][l]` for every UE at its own pilot.
///
/// The interfering sets depend on `k` only, so they are built once per UE.
pub fn iar_table(
    gain: &Grid<f64>,
    pilots: &[usize],
    assoc: &Grid<bool>,
    kappa: f64,
    mu: f64,
) -> Grid<f64> {
    let (n_ues, n_aps) = (gain.rows(), gain.cols());
    let mut table = Grid::filled(n_ues, n_aps, 0.0);
    for k in 0..n_ues {
        let ues = interfering_ues(pilots[k], k, pilots);
        let ap_term = max_over(
            (0..n_aps)
                .filter(|&j| !assoc[(k, j)] && ues.iter().any(|&i| assoc[(i, j)]))
                .map(|j| gain[(k, j)]),
        );
        for l in 0..n_aps {
            let ue_term = max_over(ues.iter().map(|&i| gain[(i, l)]));
            table[(k, l)] = iar_value(gain[(k, l)], ue_term, ap_term, kappa, mu);
        }
    }
    table
}
