use crate::error::{Error, Result};

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative rank cutoff: an eigenvalue `λ` counts as zero when `λ <= rank_rtol * λ_max`.
    pub rank_rtol: f64,
    /// Slack for PSD and Loewner-order tests, scaled by `1 + norm`.
    pub psd_slack: f64,
    /// Stopping tolerance for the fixed-point iteration and the doubling schedule.
    pub iter_tol: f64,
    pub max_iter: usize,
    /// Reconstruction tolerance for factorizations and identities.
    pub recon_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rtol: 1e-10,
            psd_slack: 1e-10,
            iter_tol: 1e-10,
            max_iter: 1_000_000,
            recon_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("rank_rtol", self.rank_rtol),
            ("psd_slack", self.psd_slack),
            ("iter_tol", self.iter_tol),
            ("recon_tol", self.recon_tol),
        ];
        for (name, value) in named {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerances(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerances("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}
