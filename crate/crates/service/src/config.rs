use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use agentcheck_core::kernel::SelectionPolicy;
use thiserror::Error;

pub const BIND_VAR: &str = "AGENTCHECK_BIND";
pub const STORE_VAR: &str = "AGENTCHECK_STORE";
pub const IDLE_VAR: &str = "AGENTCHECK_IDLE_SECS";
pub const EXPLICIT_MAX_VAR: &str = "AGENTCHECK_EXPLICIT_MAX";
pub const IMPLICIT_MAX_VAR: &str = "AGENTCHECK_IMPLICIT_MAX";

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub store_path: PathBuf,
    pub idle_expiry: Duration,
    pub policy: SelectionPolicy,
}

#[derive(Debug, Error, PartialEq)]
#[error("{var}: {message}")]
pub struct ConfigError {
    pub var: &'static str,
    pub message: String,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store_path: PathBuf::from("sessions.json"),
            idle_expiry: Duration::from_secs(24 * 60 * 60),
            policy: SelectionPolicy::default(),
        }
    }
}

fn parsed<T: std::str::FromStr>(var: &'static str, raw: Option<String>) -> Result<Option<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.map(|v| {
        v.trim().parse().map_err(|e: T::Err| ConfigError {
            var,
            message: e.to_string(),
        })
    })
    .transpose()
}

impl ServiceConfig {
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    /// Reads the configuration through `lookup`; unset variables keep defaults.
    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let d = Self::default();
        let explicit = parsed(EXPLICIT_MAX_VAR, lookup(EXPLICIT_MAX_VAR))?
            .unwrap_or(d.policy.explicit_max_states());
        let implicit = parsed(IMPLICIT_MAX_VAR, lookup(IMPLICIT_MAX_VAR))?
            .unwrap_or(d.policy.implicit_max_states());
        let policy = SelectionPolicy::new(explicit, implicit).map_err(|e| ConfigError {
            var: EXPLICIT_MAX_VAR,
            message: e.to_string(),
        })?;
        Ok(Self {
            bind: parsed(BIND_VAR, lookup(BIND_VAR))?.unwrap_or(d.bind),
            store_path: lookup(STORE_VAR).map(PathBuf::from).unwrap_or(d.store_path),
            idle_expiry: parsed(IDLE_VAR, lookup(IDLE_VAR))?
                .map(Duration::from_secs)
                .unwrap_or(d.idle_expiry),
            policy,
        })
    }
}
