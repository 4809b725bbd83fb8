//! Numerical tolerance ledger.
//!
//! All thresholds used for membership, singularity, criticality and
//! clustering decisions live here so they can be reported alongside results
//! and overridden through the `SYMFLOW_TOL` environment variable.
//!
//! `SYMFLOW_TOL` accepts either a single number (replaces the membership
//! tolerance) or a comma-separated list of `key=value` pairs, with keys
//! `membership`, `singular`, `critical`, `kernel_gap`, `kernel_floor`,
//! `cluster_gap`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "SYMFLOW_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Frobenius threshold for membership and equality tests.
    pub membership: f64,
    /// Singularity threshold relative to the Frobenius norm.
    pub singular: f64,
    /// Critical-residual threshold relative to the norm of the generator.
    pub critical: f64,
    /// Hessian kernel threshold relative to the largest |eigenvalue|.
    pub kernel_gap: f64,
    /// Absolute floor under the kernel reference eigenvalue.
    pub kernel_floor: f64,
    /// Relative gap separating singular-value clusters.
    pub cluster_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-9,
            singular: 1e-12,
            critical: 1e-8,
            kernel_gap: 1e-6,
            kernel_floor: 1e-12,
            cluster_gap: 1e-8,
        }
    }
}

impl Tolerances {
    /// Defaults, overridden by `SYMFLOW_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(spec) => Tolerances::default().with_overrides(&spec),
            Err(_) => Ok(Tolerances::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(v) = spec.parse::<f64>() {
            self.membership = positive("membership", v)?;
            return Ok(self);
        }
        for item in spec.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("{ENV_VAR}: expected key=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("{ENV_VAR}: bad number in `{item}`")))?;
            let key = key.trim();
            let slot = match key {
                "membership" => &mut self.membership,
                "singular" => &mut self.singular,
                "critical" => &mut self.critical,
                "kernel_gap" => &mut self.kernel_gap,
                "kernel_floor" => &mut self.kernel_floor,
                "cluster_gap" => &mut self.cluster_gap,
                _ => return Err(Error::Invalid(format!("{ENV_VAR}: unknown key `{key}`"))),
            };
            *slot = positive(key, value)?;
        }
        Ok(self)
    }

    /// Every threshold multiplied by `factor` (`factor < 1` tightens).
    pub fn scaled(self, factor: f64) -> Self {
        Tolerances {
            membership: self.membership * factor,
            singular: self.singular * factor,
            critical: self.critical * factor,
            kernel_gap: self.kernel_gap * factor,
            kernel_floor: self.kernel_floor * factor,
            cluster_gap: self.cluster_gap * factor,
        }
    }

    /// Threshold for the critical residual of a generator with norm `scale`.
    pub fn critical_for(&self, scale: f64) -> f64 {
        self.critical * scale.max(f64::MIN_POSITIVE)
    }

    /// Singularity threshold for a matrix with Frobenius norm `scale`.
    pub fn singular_for(&self, scale: f64) -> f64 {
        self.singular * scale
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Invalid(format!("{ENV_VAR}: `{key}` must be a positive number")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let t = Tolerances::default().with_overrides("1e-7").unwrap();
        assert_eq!(t.membership, 1e-7);
        let t = Tolerances::default()
            .with_overrides("critical=1e-6, cluster_gap=1e-5")
            .unwrap();
        assert_eq!(t.critical, 1e-6);
        assert_eq!(t.cluster_gap, 1e-5);
        assert_eq!(t.membership, 1e-9);
        assert!(Tolerances::default().with_overrides("bogus=1").is_err());
        assert!(Tolerances::default().with_overrides("membership=-1").is_err());
    }
}
