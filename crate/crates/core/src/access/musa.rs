//! Capacitated one-resource-per-agent assignment (MUSA).
//!
//! Every agent first takes its best resource. While some resource holds more
//! than `capacity` agents, each overburdened resource evicts the agent whose
//! move to its best unmarked alternative loses the least weight, and marks
//! that (agent, resource) pair so the agent never returns.

use crate::grid::Grid;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct MusaOutcome {
    /// Resource of each agent.
    pub assignment: Vec<usize>,
    /// Pairs an agent was moved away from.
    pub marks: Grid<bool>,
    pub moves: usize,
    /// Set when the loop stopped with some resource still over capacity.
    /// Unreachable when `agents <= resources * capacity`.
    pub residual_overload: bool,
}

fn argmax_row(row: &[f64], skip: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, &w) in row.iter().enumerate() {
        if skip(j) {
            continue;
        }
        if best.is_none_or(|b| w > row[b]) {
            best = Some(j);
        }
    }
    best
}

/// Assigns each row (agent) of `weights` to one column (resource), at most
/// `capacity` agents per resource, trying to keep the total weight high.
pub fn musa_assign(weights: &Grid<f64>, capacity: usize) -> Result<MusaOutcome, Error> {
    let (n_agents, n_res) = (weights.rows(), weights.cols());
    if n_agents > n_res * capacity {
        return Err(Error::Infeasible {
            agents: n_agents,
            resources: n_res,
            capacity,
        });
    }
    let mut assignment: Vec<usize> = (0..n_agents)
        .map(|k| argmax_row(weights.row(k), |_| false).expect("at least one resource"))
        .collect();
    let mut marks = Grid::filled(n_agents, n_res, false);
    let mut loads = vec![0usize; n_res];
    let mut mark_counts = vec![0usize; n_res];
    for &l in &assignment {
        loads[l] += 1;
    }
    let mut moves = 0;

    loop {
        let overloaded: Vec<usize> = (0..n_res).filter(|&l| loads[l] > capacity).collect();
        if overloaded.is_empty() || overloaded.iter().all(|&l| mark_counts[l] >= n_agents) {
            break;
        }
        let mut moved_this_pass = false;
        for &l in &overloaded {
            let mut best: Option<(f64, usize, usize)> = None;
            for k in (0..n_agents).filter(|&k| assignment[k] == l) {
                let row = weights.row(k);
                let Some(alt) = argmax_row(row, |j| j == l || marks[(k, j)]) else {
                    continue;
                };
                let loss = row[l] - row[alt];
                if best.is_none_or(|(b, _, _)| loss < b) {
                    best = Some((loss, k, alt));
                }
            }
            let Some((_, k, alt)) = best else {
                continue;
            };
            assignment[k] = alt;
            loads[l] -= 1;
            loads[alt] += 1;
            marks[(k, l)] = true;
            mark_counts[l] += 1;
            moves += 1;
            moved_this_pass = true;
        }
        if !moved_this_pass {
            break;
        }
    }
    let residual_overload = loads.iter().any(|&x| x > capacity);
    Ok(MusaOutcome {
        assignment,
        marks,
        moves,
        residual_overload,
    })
}
