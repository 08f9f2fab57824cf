use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::Tolerance;

/// Numerical knobs shared by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericConfig {
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    /// Relative slack before a rise or fall counts as a monotonicity violation.
    pub mono_slack: f64,
    pub grid_points: usize,
    pub root_tol: f64,
    pub tail_probe_max_doublings: usize,
    pub tail_agree_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            quad_abs_tol: 1e-10,
            quad_rel_tol: 1e-8,
            mono_slack: 1e-7,
            grid_points: 512,
            root_tol: 1e-10,
            tail_probe_max_doublings: 40,
            tail_agree_tol: 1e-4,
        }
    }
}

impl NumericConfig {
    pub const KEYS: [&'static str; 7] = [
        "quad_abs_tol",
        "quad_rel_tol",
        "mono_slack",
        "grid_points",
        "root_tol",
        "tail_probe_max_doublings",
        "tail_agree_tol",
    ];

    pub fn validate(&self) -> Result<()> {
        let floats = [
            ("quad_abs_tol", self.quad_abs_tol),
            ("quad_rel_tol", self.quad_rel_tol),
            ("mono_slack", self.mono_slack),
            ("root_tol", self.root_tol),
            ("tail_agree_tol", self.tail_agree_tol),
        ];
        for (k, v) in floats {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if self.grid_points < 16 {
            return Err(Error::Config(format!("grid_points must be at least 16, got {}", self.grid_points)));
        }
        if self.tail_probe_max_doublings == 0 {
            return Err(Error::Config("tail_probe_max_doublings must be positive".into()));
        }
        Ok(())
    }

    /// Applies a `key=value` override and revalidates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let float =
            || value.trim().parse::<f64>().map_err(|_| Error::Config(format!("{key}: not a number: {value:?}")));
        let count = || {
            value
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{key}: not a nonnegative integer: {value:?}")))
        };
        let mut next = *self;
        match key {
            "quad_abs_tol" => next.quad_abs_tol = float()?,
            "quad_rel_tol" => next.quad_rel_tol = float()?,
            "mono_slack" => next.mono_slack = float()?,
            "grid_points" => next.grid_points = count()?,
            "root_tol" => next.root_tol = float()?,
            "tail_probe_max_doublings" => next.tail_probe_max_doublings = count()?,
            "tail_agree_tol" => next.tail_agree_tol = float()?,
            other => {
                return Err(Error::Config(format!("unknown key {other:?}; expected one of {}", Self::KEYS.join(", "))))
            }
        }
        next.validate()?;
        *self = next;
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.quad_abs_tol, self.quad_rel_tol)
    }
}
