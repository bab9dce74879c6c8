use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cover radius used for `U_n`, the cover of all of `Y` at level `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusSchedule {
    /// `2^{-n-1}`.
    Dyadic,
    /// `radii[n - 1]`.
    Explicit(Vec<f64>),
}

impl RadiusSchedule {
    pub fn radius(&self, n: u32) -> Result<f64> {
        match self {
            RadiusSchedule::Dyadic => Ok(0.5f64.powi(n as i32 + 1)),
            RadiusSchedule::Explicit(radii) => {
                let r = *radii
                    .get(n as usize - 1)
                    .ok_or_else(|| Error::Config(format!("no cover radius given for level {n}")))?;
                if r > 0.0 && r.is_finite() {
                    Ok(r)
                } else {
                    Err(Error::Config(format!(
                        "cover radius at level {n} must be positive, got {r}"
                    )))
                }
            }
        }
    }
}

/// Parameters of the extension pipeline. `None` fields are derived from the
/// data when the operator is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionConfig {
    /// Distinct points `(a, b)` of `X`, as positions in the subset list.
    pub base_points: Option<(usize, usize)>,
    /// Number of levels `N` kept from the series.
    pub truncation: Option<u32>,
    pub tolerance: f64,
    pub radius_schedule: RadiusSchedule,
    /// Ball radius of the cover of `Y \ X` (normalized units).
    pub exterior_radius: Option<f64>,
    /// Rescale the kept weights to sum to one.
    pub normalize_weights: bool,
    /// Require `p` to be a metric and `N` large enough for the positivity
    /// floors to apply to every pair.
    pub require_metric: bool,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        Self {
            base_points: None,
            truncation: None,
            tolerance: 1e-9,
            radius_schedule: RadiusSchedule::Dyadic,
            exterior_radius: None,
            normalize_weights: true,
            require_metric: false,
        }
    }
}

impl ExtensionConfig {
    pub fn with_truncation(mut self, n: u32) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn with_base_points(mut self, a: usize, b: usize) -> Self {
        self.base_points = Some((a, b));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.truncation == Some(0) {
            return Err(Error::Config("truncation N must be at least 1".into()));
        }
        if let Some(r) = self.exterior_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!(
                    "exterior radius must be positive, got {r}"
                )));
            }
        }
        if let Some((a, b)) = self.base_points {
            if a == b {
                return Err(Error::Config(format!(
                    "base points must be distinct, got a = b = {a}"
                )));
            }
        }
        Ok(())
    }
}
