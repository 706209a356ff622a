#![allow(dead_code)]

use iama::access::AccessState;
use iama::grid::Grid;
use iama::rng::SimRng;
use iama::simulate::Setup;
use iama::SimulationConfig;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Straight transcription of the MUSA pseudo-code on plain nested vectors.
///
/// Returns the assignment and the final marking matrix. Ties go to the lowest
/// index; an agent without an unmarked alternative is skipped, and a pass
/// over the overburdened set that moves nobody ends the loop.
pub fn musa_reference(beta: &[Vec<f64>], tau: usize) -> (Vec<usize>, Vec<Vec<u8>>) {
    let k_n = beta.len();
    let l_n = beta[0].len();
    let mut a = vec![vec![0u8; l_n]; k_n];
    let mut b = vec![vec![0u8; l_n]; k_n];

    for k in 0..k_n {
        let mut ell = 0;
        for l in 1..l_n {
            if beta[k][l] > beta[k][ell] {
                ell = l;
            }
        }
        a[k][ell] = 1;
    }
    let load = |a: &Vec<Vec<u8>>, l: usize| (0..k_n).map(|k| a[k][l] as usize).sum::<usize>();
    let marked = |b: &Vec<Vec<u8>>, l: usize| (0..k_n).map(|k| b[k][l] as usize).sum::<usize>();
    let mut c_ap: Vec<usize> = (0..l_n).filter(|&l| load(&a, l) > tau).collect();

    while !c_ap.is_empty() && c_ap.iter().any(|&l| marked(&b, l) < k_n) {
        let mut moved = false;
        for l in c_ap.clone() {
            let c_ue: Vec<usize> = (0..k_n).filter(|&k| a[k][l] == 1).collect();
            let mut delta = vec![f64::INFINITY; c_ue.len()];
            let mut alt = vec![usize::MAX; c_ue.len()];
            for (idx, &k) in c_ue.iter().enumerate() {
                for j in 0..l_n {
                    if j == l || b[k][j] == 1 {
                        continue;
                    }
                    if alt[idx] == usize::MAX || beta[k][j] > beta[k][alt[idx]] {
                        alt[idx] = j;
                    }
                }
                if alt[idx] != usize::MAX {
                    delta[idx] = beta[k][l] - beta[k][alt[idx]];
                }
            }
            let mut best = usize::MAX;
            for idx in 0..c_ue.len() {
                if alt[idx] != usize::MAX && (best == usize::MAX || delta[idx] < delta[best]) {
                    best = idx;
                }
            }
            if best == usize::MAX {
                continue;
            }
            let i = c_ue[best];
            a[i][l] = 0;
            a[i][alt[best]] = 1;
            b[i][l] = 1;
            moved = true;
            c_ap = (0..l_n).filter(|&l| load(&a, l) > tau).collect();
        }
        if !moved {
            break;
        }
    }
    let assignment = a
        .iter()
        .map(|row| row.iter().position(|&x| x == 1).unwrap())
        .collect();
    (assignment, b)
}

/// Random feasible MUSA instance: continuous weights, or small integers for
/// every fourth seed so that ties occur.
pub fn random_musa_instance(seed: u64) -> (Vec<Vec<f64>>, usize) {
    let mut r = rng(seed);
    let l = r.random_range(1..=6);
    let cap = r.random_range(1..=3);
    let k = r.random_range(1..=(l * cap).min(12));
    let ties = seed.is_multiple_of(4);
    let w = (0..k)
        .map(|_| {
            (0..l)
                .map(|_| {
                    if ties {
                        r.random_range(0..4) as f64
                    } else {
                        r.random::<f64>()
                    }
                })
                .collect()
        })
        .collect();
    (w, cap)
}

/// Checks an access state and its power allocation without going through
/// the library's own validation. Returns human-readable violations.
pub fn constraint_violations(
    state: &AccessState,
    rho: &Grid<f64>,
    tau_p: usize,
    rho_dl: f64,
) -> Vec<String> {
    let (k_n, l_n) = (state.a.rows(), state.a.cols());
    let mut out = Vec::new();
    for k in 0..k_n {
        if !(0..l_n).any(|l| state.a[(k, l)]) {
            out.push(format!("UE {k} has no AP"));
        }
        if state.pilots[k] >= tau_p {
            out.push(format!("UE {k} pilot {} out of range", state.pilots[k]));
        }
        if !state.a[(k, state.masters[k])] {
            out.push(format!("UE {k} not served by its master"));
        }
    }
    for l in 0..l_n {
        let served: Vec<usize> = (0..k_n).filter(|&k| state.a[(k, l)]).collect();
        if served.len() > tau_p {
            out.push(format!("AP {l} serves {} UEs", served.len()));
        }
        for t in 0..tau_p {
            let n = served.iter().filter(|&&k| state.pilots[k] == t).count();
            if n > 1 {
                out.push(format!("AP {l} serves {n} UEs on pilot {t}"));
            }
        }
        let power: f64 = (0..k_n).map(|k| rho[(k, l)]).sum();
        if power > rho_dl * (1.0 + 1e-12) {
            out.push(format!("AP {l} transmits {power} W"));
        }
        for k in 0..k_n {
            if rho[(k, l)] < 0.0 || (!state.a[(k, l)] && rho[(k, l)] != 0.0) {
                out.push(format!("power {} on pair ({k}, {l})", rho[(k, l)]));
            }
        }
    }
    out
}

pub fn small_config(l: usize, k: usize, tau_p: usize, seed: u64) -> SimulationConfig {
    SimulationConfig {
        l,
        k,
        tau_p,
        seed,
        ..SimulationConfig::default()
    }
}

/// Large-scale coefficients of setup 0 under `config`.
pub fn beta_of(config: &SimulationConfig) -> Grid<f64> {
    Setup::generate(config, 0).unwrap().beta().clone()
}
