//! Scenario parameters and the flat `key=value` config file format.

use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key=value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("key `{key}`: constraint violated: {constraint}")]
    Constraint {
        key: &'static str,
        constraint: String,
    },
}

/// All parameters of one simulated scenario.
///
/// Powers are in watts, distances in meters. `noise_power` is the receiver
/// noise variance per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Number of APs.
    pub l: usize,
    /// Number of UEs.
    pub k: usize,
    /// Antennas per AP.
    pub n: usize,
    pub tau_p: usize,
    pub tau_c: usize,
    pub area_side: f64,
    pub rho_p: f64,
    pub rho_dl: f64,
    pub noise_power: f64,
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
    pub asd_deg: f64,
    pub shadow_std_db: f64,
    pub n_setups: usize,
    pub n_channel_reals: usize,
    pub seed: u64,
}

/// Converts a power in dBm to watts.
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl Default for SimulationConfig {
    /// The K = 50 evaluation scenario: 50 four-antenna APs on a 500 m square.
    fn default() -> Self {
        Self {
            l: 50,
            k: 50,
            n: 4,
            tau_p: 5,
            tau_c: 200,
            area_side: 500.0,
            rho_p: 0.1,
            rho_dl: 1.0,
            noise_power: dbm_to_watt(-94.0),
            kappa: 10.0,
            mu: 1.8,
            nu: 0.5,
            asd_deg: 15.0,
            shadow_std_db: 4.0,
            n_setups: 30,
            n_channel_reals: 200,
            seed: 1,
        }
    }
}

const KEYS: [&str; 17] = [
    "L",
    "K",
    "N",
    "tau_p",
    "tau_c",
    "area_side",
    "rho_p",
    "rho_dl",
    "noise_power",
    "kappa",
    "mu",
    "nu",
    "asd_deg",
    "shadow_std_db",
    "n_setups",
    "n_channel_reals",
    "seed",
];

fn violated(key: &'static str, constraint: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        key,
        constraint: constraint.into(),
    }
}

impl SimulationConfig {
    /// Checks every field invariant. The first violation found is returned.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.l < 1 {
            return Err(violated("L", "L >= 1"));
        }
        if self.k < 1 {
            return Err(violated("K", "K >= 1"));
        }
        if self.n < 1 {
            return Err(violated("N", "N >= 1"));
        }
        if self.tau_p < 1 {
            return Err(violated("tau_p", "tau_p >= 1"));
        }
        if self.tau_p >= self.tau_c {
            return Err(violated("tau_p", "tau_p < tau_c"));
        }
        if self.k > self.l * self.tau_p {
            return Err(violated(
                "K",
                format!("K <= L*tau_p ({} > {})", self.k, self.l * self.tau_p),
            ));
        }
        let positive = [
            ("area_side", self.area_side),
            ("rho_p", self.rho_p),
            ("rho_dl", self.rho_dl),
            ("noise_power", self.noise_power),
        ];
        for (key, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(violated(key, format!("{key} > 0")));
            }
        }
        if self.kappa.is_nan() || self.kappa < 1.0 {
            return Err(violated("kappa", "kappa >= 1"));
        }
        if !(1.0..=2.0).contains(&self.mu) {
            return Err(violated("mu", "1 <= mu <= 2"));
        }
        if !(self.nu.is_finite()) {
            return Err(violated("nu", "nu finite"));
        }
        if !(self.asd_deg >= 0.0 && self.asd_deg.is_finite()) {
            return Err(violated("asd_deg", "asd_deg >= 0"));
        }
        if !(self.shadow_std_db >= 0.0 && self.shadow_std_db.is_finite()) {
            return Err(violated("shadow_std_db", "shadow_std_db >= 0"));
        }
        if self.n_setups < 1 {
            return Err(violated("n_setups", "n_setups >= 1"));
        }
        if self.n_channel_reals < 2 {
            return Err(violated("n_channel_reals", "n_channel_reals >= 2"));
        }
        Ok(())
    }

    /// Pilot-phase SNR scaling `tau_p * rho_p`.
    pub fn pilot_energy(&self) -> f64 {
        self.tau_p as f64 * self.rho_p
    }

    /// Fraction of each coherence block carrying payload data.
    pub fn prelog(&self) -> f64 {
        1.0 - self.tau_p as f64 / self.tau_c as f64
    }

    /// Parses a config file. Keys absent from the file keep their default value.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "L" => self.l = parse(key, value)?,
            "K" => self.k = parse(key, value)?,
            "N" => self.n = parse(key, value)?,
            "tau_p" => self.tau_p = parse(key, value)?,
            "tau_c" => self.tau_c = parse(key, value)?,
            "area_side" => self.area_side = parse(key, value)?,
            "rho_p" => self.rho_p = parse(key, value)?,
            "rho_dl" => self.rho_dl = parse(key, value)?,
            "noise_power" => self.noise_power = parse(key, value)?,
            "kappa" => self.kappa = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "nu" => self.nu = parse(key, value)?,
            "asd_deg" => self.asd_deg = parse(key, value)?,
            "shadow_std_db" => self.shadow_std_db = parse(key, value)?,
            "n_setups" => self.n_setups = parse(key, value)?,
            "n_channel_reals" => self.n_channel_reals = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => unreachable!("key checked against KEYS"),
        }
        Ok(())
    }
}

impl std::str::FromStr for SimulationConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut config = SimulationConfig::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if seen.contains(&key) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key);
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for SimulationConfig {
    /// Writes the config in the same `key=value` format the parser reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "L={}", self.l)?;
        writeln!(f, "K={}", self.k)?;
        writeln!(f, "N={}", self.n)?;
        writeln!(f, "tau_p={}", self.tau_p)?;
        writeln!(f, "tau_c={}", self.tau_c)?;
        writeln!(f, "area_side={:?}", self.area_side)?;
        writeln!(f, "rho_p={:?}", self.rho_p)?;
        writeln!(f, "rho_dl={:?}", self.rho_dl)?;
        writeln!(f, "noise_power={:?}", self.noise_power)?;
        writeln!(f, "kappa={:?}", self.kappa)?;
        writeln!(f, "mu={:?}", self.mu)?;
        writeln!(f, "nu={:?}", self.nu)?;
        writeln!(f, "asd_deg={:?}", self.asd_deg)?;
        writeln!(f, "shadow_std_db={:?}", self.shadow_std_db)?;
        writeln!(f, "n_setups={}", self.n_setups)?;
        writeln!(f, "n_channel_reals={}", self.n_channel_reals)?;
        writeln!(f, "seed={}", self.seed)
    }
}
