//! The access schemes compared by the simulator.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::access::{iama, AccessState, Goal, IamaOptions};
use crate::benchmarks::{greedy_access, random_access, scalable_access};
use crate::grid::Grid;
use crate::{Error, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    IarMin,
    IarSum,
    Scalable,
    Greedy,
    Random,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::IarMin,
        Scheme::IarSum,
        Scheme::Scalable,
        Scheme::Greedy,
        Scheme::Random,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::IarMin => "iarmin",
            Scheme::IarSum => "iarsum",
            Scheme::Scalable => "scalable",
            Scheme::Greedy => "greedy",
            Scheme::Random => "random",
        }
    }

    /// Index of the access RNG stream. Random and greedy share one so greedy
    /// refines exactly the random start; both reward-based variants share
    /// the initial pilot draw.
    pub fn stream_index(self) -> u64 {
        match self {
            Scheme::IarMin | Scheme::IarSum => 1,
            Scheme::Random | Scheme::Greedy => 0,
            Scheme::Scalable => 2,
        }
    }

    /// Runs the scheme on a coefficient table. Greedy gets `K` rounds.
    pub fn access<R: Rng + ?Sized>(
        self,
        beta: &Grid<f64>,
        config: &SimulationConfig,
        rng: &mut R,
    ) -> Result<AccessState, Error> {
        match self {
            Scheme::IarMin => iama(beta, config, IamaOptions::new(Goal::Min), rng),
            Scheme::IarSum => iama(beta, config, IamaOptions::new(Goal::Sum), rng),
            Scheme::Scalable => scalable_access(beta, config.tau_p),
            Scheme::Greedy => Ok(greedy_access(beta, config.tau_p, beta.rows(), rng)?.0),
            Scheme::Random => random_access(beta, config.tau_p, rng),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.trim().to_ascii_lowercase();
        Scheme::ALL
            .into_iter()
            .find(|x| x.label() == name)
            .ok_or(Error::UnknownName {
                kind: "scheme",
                name,
            })
    }
}

/// Parses a comma-separated scheme list, keeping the given order.
pub fn parse_scheme_list(list: &str) -> Result<Vec<Scheme>, Error> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let s: Scheme = part.parse()?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    Ok(out)
}
