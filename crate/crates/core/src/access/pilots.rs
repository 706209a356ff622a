//! Neighborhood-wise pilot reassignment driven by the reward.

use rand::Rng;

use super::iar::{iar_value, UNASSIGNED};
use super::musa::musa_assign;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotOptions {
    /// Maximum number of full sweeps over the UEs.
    pub max_iters: usize,
    /// Relative change of the sum reward under which the sweeps stop.
    pub tol: f64,
}

impl Default for PilotOptions {
    fn default() -> Self {
        Self {
            max_iters: 10,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PilotOutcome {
    pub pilots: Vec<usize>,
    /// Sum reward after the random draw, then after each sweep.
    pub history: Vec<f64>,
}

/// UE `k` followed by the `tau_p - 1` other UEs with the largest gain to
/// `k`'s master AP (fewer when `K < tau_p`).
pub fn neighborhood(k: usize, gain: &Grid<f64>, masters: &[usize], tau_p: usize) -> Vec<usize> {
    let m = masters[k];
    let mut others: Vec<usize> = (0..gain.rows()).filter(|&i| i != k).collect();
    others.sort_by(|&x, &y| gain[(y, m)].total_cmp(&gain[(x, m)]).then(x.cmp(&y)));
    others.truncate(tau_p.saturating_sub(1));
    let mut out = Vec::with_capacity(tau_p);
    out.push(k);
    out.extend(others);
    out
}

/// Reward of UE `i` at AP `l` on pilot `t`, with every UE served by its
/// master only. UEs marked [`UNASSIGNED`] are ignored.
#[allow(clippy::too_many_arguments)]
fn master_only_iar(
    i: usize,
    l: usize,
    t: usize,
    gain: &Grid<f64>,
    masters: &[usize],
    pilots: &[usize],
    kappa: f64,
    mu: f64,
) -> f64 {
    let mut ue_term: Option<f64> = None;
    let mut ap_term: Option<f64> = None;
    for (j, &p) in pilots.iter().enumerate() {
        if j == i || p != t {
            continue;
        }
        let v = gain[(j, l)];
        ue_term = Some(ue_term.map_or(v, |m| m.max(v)));
        let ap = masters[j];
        if ap != masters[i] {
            let v = gain[(i, ap)];
            ap_term = Some(ap_term.map_or(v, |m| m.max(v)));
        }
    }
    iar_value(gain[(i, l)], ue_term, ap_term, kappa, mu)
}

/// `sum_k iar(k, master_k, t_k)` with master-only association.
pub fn sum_iar(gain: &Grid<f64>, masters: &[usize], pilots: &[usize], kappa: f64, mu: f64) -> f64 {
    (0..pilots.len())
        .map(|k| master_only_iar(k, masters[k], pilots[k], gain, masters, pilots, kappa, mu))
        .sum()
}

/// Random pilots, then sweeps in UE order: each UE's neighborhood gets the
/// pilot permutation that [`musa_assign`] picks on their potential rewards
/// at the UE's master, the other UEs' pilots held fixed.
pub fn assign_pilots<R: Rng + ?Sized>(
    gain: &Grid<f64>,
    masters: &[usize],
    tau_p: usize,
    kappa: f64,
    mu: f64,
    options: PilotOptions,
    rng: &mut R,
) -> PilotOutcome {
    let n_ues = gain.rows();
    let mut pilots: Vec<usize> = (0..n_ues).map(|_| rng.random_range(0..tau_p)).collect();
    let mut history = vec![sum_iar(gain, masters, &pilots, kappa, mu)];
    if tau_p == 1 {
        return PilotOutcome { pilots, history };
    }

    for _ in 0..options.max_iters {
        for k in 0..n_ues {
            let hood = neighborhood(k, gain, masters, tau_p);
            let l = masters[k];
            let mut frozen = pilots.clone();
            hood.iter().for_each(|&i| frozen[i] = UNASSIGNED);
            let table = Grid::from_fn(hood.len(), tau_p, |row, t| {
                master_only_iar(hood[row], l, t, gain, masters, &frozen, kappa, mu)
            });
            let out = musa_assign(&table, 1).expect("neighborhood never exceeds tau_p");
            for (row, &i) in hood.iter().enumerate() {
                pilots[i] = out.assignment[row];
            }
        }
        let prev = *history.last().expect("nonempty");
        let now = sum_iar(gain, masters, &pilots, kappa, mu);
        history.push(now);
        if (now - prev).abs() <= options.tol * now.abs().max(prev.abs()) {
            break;
        }
    }
    PilotOutcome { pilots, history }
}
