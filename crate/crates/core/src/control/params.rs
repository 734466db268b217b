use serde::{Deserialize, Serialize};

use crate::error::ControlError;
use crate::scalar::Scalar;

/// Constants shared by every agent's controller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlParams<T> {
    /// Sensing radius.
    pub r: T,
    /// Hysteresis margin for adding edges, `0 < delta < r`.
    pub delta: T,
    /// Goal-attraction design parameter.
    pub eps: T,
    /// Bound on region-center norms.
    pub c_max: T,
    /// Smallest admissible region radius.
    pub r_min: T,
    /// Team size.
    pub n: usize,
}

impl<T: Scalar> ControlParams<T> {
    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |m: &str| Err(ControlError::InvalidParams(m.to_string()));
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !pos(self.r) {
            return bad("r must be positive");
        }
        if !pos(self.delta) || self.delta >= self.r {
            return bad("delta must lie in (0, r)");
        }
        if !pos(self.eps) {
            return bad("eps must be positive");
        }
        if !pos(self.c_max) {
            return bad("c_max must be positive");
        }
        if !pos(self.r_min) {
            return bad("r_min must be positive");
        }
        if self.n == 0 {
            return bad("at least one agent is required");
        }
        Ok(())
    }
}
