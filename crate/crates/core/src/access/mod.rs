//! Interference-aware massive access: master AP selection, IAR-driven pilot
//! assignment and multi-AP association.
//!
//! The pipeline runs on large-scale quantities only:
//!
//! 1. [`select_masters`] gives each UE one master AP, no AP mastering more
//!    than `tau_p` UEs ([`musa_assign`]).
//! 2. [`assign_pilots`] sweeps UE neighborhoods and reassigns their pilots to
//!    maximize the interference-aware reward ([`iar`]).
//! 3. [`muma_associate`] adds serving APs, either greedily (sum goal) or with
//!    a max-min reallocation loop (min goal).
//!
//! All indices are zero-based. Ties are broken by the lowest UE, then AP,
//! then pilot index.

mod iar;
mod muma;
mod musa;
mod pilots;

pub use iar::{iar, iar_table, iar_value, interfering_aps, interfering_ues, UNASSIGNED};
pub use muma::{muma_associate, Goal, MumaOutcome};
pub use musa::{musa_assign, MusaOutcome};
pub use pilots::{assign_pilots, neighborhood, sum_iar, PilotOptions, PilotOutcome};

use rand::Rng;

use crate::grid::Grid;
use crate::{Error, SimulationConfig};

/// Pilot, association and marking state produced by an access scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessState {
    /// Pilot index of each UE, in `0..tau_p`.
    pub pilots: Vec<usize>,
    /// `a[(k, l)]`: AP `l` serves UE `k`.
    pub a: Grid<bool>,
    /// `b[(k, l)]`: the pair is settled and will not be reconsidered.
    pub b: Grid<bool>,
    pub masters: Vec<usize>,
}

/// A broken [`AccessState`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Uncovered {
        ue: usize,
    },
    PilotOutOfRange {
        ue: usize,
        pilot: usize,
    },
    SharedPilot {
        ap: usize,
        pilot: usize,
        ues: Vec<usize>,
    },
    Overloaded {
        ap: usize,
        served: usize,
    },
    MasterNotServing {
        ue: usize,
        ap: usize,
    },
}

impl AccessState {
    pub fn num_ues(&self) -> usize {
        self.a.rows()
    }

    pub fn num_aps(&self) -> usize {
        self.a.cols()
    }

    /// APs serving UE `k`.
    pub fn serving_aps(&self, k: usize) -> Vec<usize> {
        (0..self.num_aps()).filter(|&l| self.a[(k, l)]).collect()
    }

    /// UEs served by each AP, in UE order.
    pub fn served_per_ap(&self) -> Vec<Vec<usize>> {
        (0..self.num_aps())
            .map(|l| (0..self.num_ues()).filter(|&k| self.a[(k, l)]).collect())
            .collect()
    }

    /// Every invariant violation, empty when the state is admissible.
    pub fn violations(&self, tau_p: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        for k in 0..self.num_ues() {
            if self.pilots[k] >= tau_p {
                out.push(Violation::PilotOutOfRange {
                    ue: k,
                    pilot: self.pilots[k],
                });
            }
            if !self.a.row(k).iter().any(|&x| x) {
                out.push(Violation::Uncovered { ue: k });
            }
            let m = self.masters[k];
            if !self.a[(k, m)] {
                out.push(Violation::MasterNotServing { ue: k, ap: m });
            }
        }
        for (l, users) in self.served_per_ap().into_iter().enumerate() {
            if users.len() > tau_p {
                out.push(Violation::Overloaded {
                    ap: l,
                    served: users.len(),
                });
            }
            for t in 0..tau_p {
                let on_t: Vec<usize> = users
                    .iter()
                    .copied()
                    .filter(|&k| self.pilots[k] == t)
                    .collect();
                if on_t.len() > 1 {
                    out.push(Violation::SharedPilot {
                        ap: l,
                        pilot: t,
                        ues: on_t,
                    });
                }
            }
        }
        out
    }
}

/// Association matrix with only the master links set.
pub fn master_association(masters: &[usize], n_aps: usize) -> Grid<bool> {
    Grid::from_fn(masters.len(), n_aps, |k, l| masters[k] == l)
}

/// Master APs from [`musa_assign`] on the LSFCs with capacity `tau_p`.
///
pub type MasterSelection = (Vec<usize>, Grid<bool>, Grid<bool>);

/// Returns the masters, the master-only association and MUSA's marks.
pub fn select_masters(beta: &Grid<f64>, tau_p: usize) -> Result<MasterSelection, Error> {
    let out = musa_assign(beta, tau_p)?;
    let a = master_association(&out.assignment, beta.cols());
    Ok((out.assignment, a, out.marks))
}

/// Gives every UE that shares a pilot with a stronger co-master UE a pilot
/// unused among its master's UEs, picking the one with least contamination
/// `sum_{i in P_t} beta[i][master]`. Returns the number of UEs moved.
pub fn repair_master_conflicts(
    beta: &Grid<f64>,
    masters: &[usize],
    pilots: &mut [usize],
    tau_p: usize,
) -> usize {
    repair_with(beta, masters, pilots, tau_p, |free, contamination| {
        free.iter().copied().min_by(|&x, &y| {
            contamination[x]
                .total_cmp(&contamination[y])
                .then(x.cmp(&y))
        })
    })
}

/// Like [`repair_master_conflicts`], but the replacement pilot is drawn
/// uniformly among the free ones.
pub fn repair_master_conflicts_random<R: Rng + ?Sized>(
    beta: &Grid<f64>,
    masters: &[usize],
    pilots: &mut [usize],
    tau_p: usize,
    rng: &mut R,
) -> usize {
    repair_with(beta, masters, pilots, tau_p, |free, _| {
        (!free.is_empty()).then(|| free[rng.random_range(0..free.len())])
    })
}

fn repair_with(
    beta: &Grid<f64>,
    masters: &[usize],
    pilots: &mut [usize],
    tau_p: usize,
    mut choose: impl FnMut(&[usize], &[f64]) -> Option<usize>,
) -> usize {
    let mut moved = 0;
    // masters in order of their first UE, so AP labels do not matter
    let mut order: Vec<usize> = Vec::new();
    for &l in masters {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    for l in order {
        let mut group: Vec<usize> = (0..masters.len()).filter(|&k| masters[k] == l).collect();
        if group.len() < 2 {
            continue;
        }
        // strongest first keeps its pilot
        group.sort_by(|&x, &y| beta[(y, l)].total_cmp(&beta[(x, l)]).then(x.cmp(&y)));
        let mut taken = vec![false; tau_p];
        let mut losers = Vec::new();
        for &k in &group {
            if taken[pilots[k]] {
                losers.push(k);
            } else {
                taken[pilots[k]] = true;
            }
        }
        for k in losers {
            let free: Vec<usize> = (0..tau_p).filter(|&t| !taken[t]).collect();
            let mut contamination = vec![0.0; tau_p];
            for (i, &t) in pilots.iter().enumerate() {
                if i != k {
                    contamination[t] += beta[(i, l)];
                }
            }
            let Some(t) = choose(&free, &contamination) else {
                break;
            };
            pilots[k] = t;
            taken[t] = true;
            moved += 1;
        }
    }
    moved
}

/// For every AP and pilot with no UE yet served on it, serves the UE on that
/// pilot with the largest weight. With `positive_only`, slots whose best
/// weight is not positive stay empty.
pub fn fill_pilot_slots(
    weights: &Grid<f64>,
    pilots: &[usize],
    a: &mut Grid<bool>,
    tau_p: usize,
    positive_only: bool,
) {
    let n_ues = weights.rows();
    for l in 0..weights.cols() {
        let mut occupied = vec![false; tau_p];
        for k in 0..n_ues {
            if a[(k, l)] {
                occupied[pilots[k]] = true;
            }
        }
        let mut best: Vec<Option<usize>> = vec![None; tau_p];
        for k in 0..n_ues {
            let t = pilots[k];
            if occupied[t] {
                continue;
            }
            match best[t] {
                Some(j) if weights[(j, l)] >= weights[(k, l)] => {}
                _ => best[t] = Some(k),
            }
        }
        for k in best.into_iter().flatten() {
            if !positive_only || weights[(k, l)] > 0.0 {
                a[(k, l)] = true;
            }
        }
    }
}

/// Options of the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IamaOptions {
    pub goal: Goal,
    pub pilots: PilotOptions,
}

impl IamaOptions {
    pub fn new(goal: Goal) -> Self {
        Self {
            goal,
            pilots: PilotOptions::default(),
        }
    }
}

/// LSFCs divided by the noise power: the link SNRs at unit transmit power,
/// which is the scale the reward is evaluated on.
pub fn gain_over_noise(beta: &Grid<f64>, noise_power: f64) -> Grid<f64> {
    beta.map(|&b| b / noise_power)
}

/// Master selection, pilot assignment and further association.
///
/// `rng` only seeds the random initial pilots.
pub fn iama<R: Rng + ?Sized>(
    beta: &Grid<f64>,
    config: &SimulationConfig,
    options: IamaOptions,
    rng: &mut R,
) -> Result<AccessState, Error> {
    let tau_p = config.tau_p;
    let gain = gain_over_noise(beta, config.noise_power);
    let (masters, a, _) = select_masters(beta, tau_p)?;
    let mut pilots = assign_pilots(
        &gain,
        &masters,
        tau_p,
        config.kappa,
        config.mu,
        options.pilots,
        rng,
    )
    .pilots;
    repair_master_conflicts(beta, &masters, &mut pilots, tau_p);

    let table = iar_table(&gain, &pilots, &a, config.kappa, config.mu);
    let b = a.clone();
    let out = muma_associate(&table, &pilots, a, b, tau_p, options.goal);
    Ok(AccessState {
        pilots,
        a: out.a,
        b: out.b,
        masters,
    })
}
