//! Reference access schemes: random, scalable (master-driven least
//! contamination) and greedy pilot refinement. All of them keep the same
//! service rules as the reward-based pipeline: at most one UE per pilot per
//! AP, masters always served.

use rand::Rng;

use crate::access::{
    fill_pilot_slots, master_association, repair_master_conflicts_random, select_masters,
    AccessState,
};
use crate::grid::Grid;
use crate::Error;

/// Uniform random pilots on top of the master selection. Each AP then serves
/// the strongest UE of every pilot.
///
/// UEs that would share both a master and a pilot redraw uniformly among the
/// pilots still free at that master.
pub fn random_access<R: Rng + ?Sized>(
    beta: &Grid<f64>,
    tau_p: usize,
    rng: &mut R,
) -> Result<AccessState, Error> {
    let (masters, mut a, _) = select_masters(beta, tau_p)?;
    let mut pilots: Vec<usize> = (0..beta.rows())
        .map(|_| rng.random_range(0..tau_p))
        .collect();
    repair_master_conflicts_random(beta, &masters, &mut pilots, tau_p, rng);
    let b = a.clone();
    fill_pilot_slots(beta, &pilots, &mut a, tau_p, false);
    Ok(AccessState {
        pilots,
        a,
        b,
        masters,
    })
}

/// UEs join one at a time in index order. Each takes its strongest AP that
/// still has room as master, and the master hands out the pilot with the
/// least accumulated gain from earlier UEs among those its own UEs do not
/// use. Finally every AP serves the strongest UE of each pilot.
pub fn scalable_access(beta: &Grid<f64>, tau_p: usize) -> Result<AccessState, Error> {
    let (n_ues, n_aps) = (beta.rows(), beta.cols());
    if n_ues > n_aps * tau_p {
        return Err(Error::Infeasible {
            agents: n_ues,
            resources: n_aps,
            capacity: tau_p,
        });
    }
    let mut load = vec![0usize; n_aps];
    let mut masters = Vec::with_capacity(n_ues);
    let mut pilots: Vec<usize> = Vec::with_capacity(n_ues);
    for k in 0..n_ues {
        let m = (0..n_aps)
            .filter(|&l| load[l] < tau_p)
            .max_by(|&x, &y| beta[(k, x)].total_cmp(&beta[(k, y)]).then(y.cmp(&x)))
            .expect("feasibility checked");
        load[m] += 1;
        let mut contamination = vec![0.0; tau_p];
        let mut used = vec![false; tau_p];
        for (i, &t) in pilots.iter().enumerate() {
            contamination[t] += beta[(i, m)];
            if masters[i] == m {
                used[t] = true;
            }
        }
        let t = (0..tau_p)
            .filter(|&t| !used[t])
            .min_by(|&x, &y| {
                contamination[x]
                    .total_cmp(&contamination[y])
                    .then(x.cmp(&y))
            })
            .expect("master has a free pilot");
        masters.push(m);
        pilots.push(t);
    }
    let mut a = master_association(&masters, n_aps);
    let b = a.clone();
    fill_pilot_slots(beta, &pilots, &mut a, tau_p, false);
    Ok(AccessState {
        pilots,
        a,
        b,
        masters,
    })
}

/// Contamination proxy of UE `k` on pilot `t`: the gain of every other
/// UE on `t` summed over the APs serving `k`.
pub fn contamination_proxy(beta: &Grid<f64>, state: &AccessState, k: usize, t: usize) -> f64 {
    let serving = state.serving_aps(k);
    (0..beta.rows())
        .filter(|&i| i != k && state.pilots[i] == t)
        .map(|i| serving.iter().map(|&l| beta[(i, l)]).sum::<f64>())
        .sum()
}

/// One accepted pilot change of [`greedy_access`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyStep {
    pub ue: usize,
    pub from: usize,
    pub to: usize,
    pub proxy_before: f64,
    pub proxy_after: f64,
}

/// Starts from [`random_access`] and, for up to `n_iters` rounds, moves the
/// most contaminated UE to the pilot minimizing its proxy. Stops early when
/// that UE cannot improve.
pub fn greedy_access<R: Rng + ?Sized>(
    beta: &Grid<f64>,
    tau_p: usize,
    n_iters: usize,
    rng: &mut R,
) -> Result<(AccessState, Vec<GreedyStep>), Error> {
    let mut state = random_access(beta, tau_p, rng)?;
    let mut trace = Vec::new();
    let n_ues = beta.rows();
    for _ in 0..n_iters {
        let proxies: Vec<f64> = (0..n_ues)
            .map(|k| contamination_proxy(beta, &state, k, state.pilots[k]))
            .collect();
        let k = (0..n_ues)
            .max_by(|&x, &y| proxies[x].total_cmp(&proxies[y]).then(y.cmp(&x)))
            .expect("at least one UE");
        let m = state.masters[k];
        let blocked: Vec<bool> = (0..tau_p)
            .map(|t| (0..n_ues).any(|i| i != k && state.masters[i] == m && state.pilots[i] == t))
            .collect();
        let Some((best, value)) = (0..tau_p)
            .filter(|&t| !blocked[t])
            .map(|t| (t, contamination_proxy(beta, &state, k, t)))
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
        else {
            break;
        };
        if value >= proxies[k] {
            break;
        }
        trace.push(GreedyStep {
            ue: k,
            from: state.pilots[k],
            to: best,
            proxy_before: proxies[k],
            proxy_after: value,
        });
        state.pilots[k] = best;
        state.a = master_association(&state.masters, beta.cols());
        fill_pilot_slots(beta, &state.pilots, &mut state.a, tau_p, false);
    }
    Ok((state, trace))
}
