//! Multi-AP association (MUMA): greedy per-pilot filling, then an optional
//! max-min reallocation loop.

use super::fill_pilot_slots;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    /// Maximize the total reward.
    Sum,
    /// Maximize the smallest per-UE reward sum.
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MumaOutcome {
    pub a: Grid<bool>,
    pub b: Grid<bool>,
    /// Iterations of the max-min loop (zero for [`Goal::Sum`]).
    pub iterations: usize,
    pub takeovers: usize,
}

/// Extends the association `a` using the reward table `iar` (one value per
/// UE and AP at the UE's own pilot).
///
/// Greedy stage: every AP serves, on each pilot it does not serve yet, the
/// UE of that pilot with the largest positive reward. Existing links (the
/// master links) are never dropped.
///
/// Min goal: repeatedly take the UE with the smallest reward sum, probe its
/// best unmarked AP, and take that AP's slot on the same pilot from its
/// current holder if the holder would still not fall below it. Probes with a
/// nonpositive reward only mark the AP. Stops once some UE has every AP
/// marked.
pub fn muma_associate(
    iar: &Grid<f64>,
    pilots: &[usize],
    mut a: Grid<bool>,
    mut b: Grid<bool>,
    tau_p: usize,
    goal: Goal,
) -> MumaOutcome {
    fill_pilot_slots(iar, pilots, &mut a, tau_p, true);
    if goal == Goal::Sum {
        return MumaOutcome {
            a,
            b,
            iterations: 0,
            takeovers: 0,
        };
    }

    let (n_ues, n_aps) = (iar.rows(), iar.cols());
    // holder[l * tau_p + t]: UE served by AP l on pilot t
    let mut holder: Vec<Option<usize>> = vec![None; n_aps * tau_p];
    let mut sums = vec![0.0; n_ues];
    let mut marked = vec![0usize; n_ues];
    for k in 0..n_ues {
        for l in 0..n_aps {
            if a[(k, l)] {
                holder[l * tau_p + pilots[k]] = Some(k);
                sums[k] += iar[(k, l)];
            }
            if b[(k, l)] {
                marked[k] += 1;
            }
        }
    }

    let mut iterations = 0;
    let mut takeovers = 0;
    let mark = |b: &mut Grid<bool>, marked: &mut [usize], k: usize, l: usize| {
        if !b[(k, l)] {
            b[(k, l)] = true;
            marked[k] += 1;
        }
    };

    while marked.iter().all(|&m| m < n_aps) {
        iterations += 1;
        let weakest = (0..n_ues)
            .min_by(|&x, &y| sums[x].total_cmp(&sums[y]).then(x.cmp(&y)))
            .expect("at least one UE");
        let probe = (0..n_aps)
            .filter(|&l| !b[(weakest, l)])
            .max_by(|&x, &y| {
                iar[(weakest, x)]
                    .total_cmp(&iar[(weakest, y)])
                    .then(y.cmp(&x))
            })
            .expect("weakest UE has an unmarked AP");
        mark(&mut b, &mut marked, weakest, probe);
        if a[(weakest, probe)] {
            continue;
        }
        // a nonpositive link cannot raise the weakest sum
        if iar[(weakest, probe)] <= 0.0 {
            continue;
        }

        let t = pilots[weakest];
        let slot = probe * tau_p + t;
        match holder[slot] {
            None => {
                for l in 0..n_aps {
                    if a[(weakest, l)] {
                        mark(&mut b, &mut marked, weakest, l);
                    }
                }
                a[(weakest, probe)] = true;
                holder[slot] = Some(weakest);
                sums[weakest] += iar[(weakest, probe)];
                takeovers += 1;
            }
            Some(other) if !b[(other, probe)] => {
                if sums[other] - iar[(other, probe)] <= sums[weakest] {
                    for l in 0..n_aps {
                        if a[(other, l)] {
                            mark(&mut b, &mut marked, other, l);
                        }
                    }
                    continue;
                }
                for l in 0..n_aps {
                    if a[(weakest, l)] {
                        mark(&mut b, &mut marked, weakest, l);
                    }
                }
                a[(other, probe)] = false;
                sums[other] -= iar[(other, probe)];
                a[(weakest, probe)] = true;
                sums[weakest] += iar[(weakest, probe)];
                holder[slot] = Some(weakest);
                takeovers += 1;
            }
            // the holder's link is settled; status quo
            Some(_) => {}
        }
    }
    MumaOutcome {
        a,
        b,
        iterations,
        takeovers,
    }
}
