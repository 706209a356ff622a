//! Interference-aware massive access for cell-free massive MIMO.
//!
//! The crate has two halves. The access half ([`access`], [`benchmarks`])
//! decides, from large-scale fading alone, which pilot every UE uses and
//! which APs serve it. The simulation half ([`network`], [`estimation`],
//! [`precoding`], [`se`], [`simulate`]) drops APs and UEs on a wrap-around
//! square, draws correlated Rayleigh channels, estimates them from
//! contaminated pilots, precodes with MR or LP-MMSE, and evaluates the
//! downlink SE of every UE through the hardening bound.
//!
//! [`experiment`] ties both together into paired multi-scheme runs that write
//! `results.csv` and `summary.csv`.

pub mod access;
pub mod benchmarks;
pub mod config;
pub mod estimation;
pub mod experiment;
pub mod grid;
pub mod linalg;
pub mod network;
pub mod precoding;
pub mod rng;
pub mod scheme;
pub mod se;
pub mod simulate;

pub use access::{iama, AccessState, Goal, IamaOptions};
pub use config::{ConfigError, SimulationConfig};
pub use grid::Grid;
pub use precoding::Precoder;
pub use scheme::Scheme;

/// Complex baseband sample.
pub type C64 = nalgebra::Complex<f64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("Hermitian solve failed: matrix is not positive definite")]
    SolveFailed,
    #[error("{agents} agents cannot fit {resources} resources of capacity {capacity}")]
    Infeasible {
        agents: usize,
        resources: usize,
        capacity: usize,
    },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("malformed results file: {0}")]
    Malformed(String),
}
