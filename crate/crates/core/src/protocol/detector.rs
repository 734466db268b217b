//! Communication-free detection of a neighbor's goal-reach event from its
//! control input: a near-zero sample followed by a jump, within a window.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::control::{goal_pull, ControlParams};
use crate::scalar::{Scalar, Vec2};

/// Jump threshold `Δ_d = |f(r_min) − f(√(0.4ε))|` with `f(p) = d(p²)·p`.
pub fn delta_d<T: Scalar>(p: &ControlParams<T>) -> T {
    let low = (T::lit(0.4) * p.eps).sqrt();
    (goal_pull(p.r_min, p.eps) - goal_pull(low, p.eps)).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Window length `Δ_t` in seconds.
    pub dt_window: f64,
    /// Small-input threshold `Δ_u`.
    pub du: f64,
    /// Jump threshold `Δ_d`.
    pub dd: f64,
}

impl DetectorParams {
    /// `Δ_t = 0.1 s`, `Δ_d` from [`delta_d`], `Δ_u = Δ_d / 10`, each unless
    /// overridden.
    pub fn with_defaults(
        p: &ControlParams<f64>,
        dt_window: Option<f64>,
        du: Option<f64>,
        dd: Option<f64>,
    ) -> Self {
        let dd = dd.unwrap_or_else(|| delta_d(p));
        DetectorParams {
            dt_window: dt_window.unwrap_or(0.1),
            du: du.unwrap_or(dd / 10.0),
            dd,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.dt_window > 0.0 && self.du > 0.0 && self.dd > 0.0 && self.du < self.dd
    }
}

/// Recent input samples of one observed agent, as `(step, u)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DetectorBuffer {
    samples: VecDeque<(u64, Vec2<f64>)>,
}

impl DetectorBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample and drops those older than `window` steps.
    pub fn push(&mut self, step: u64, u: Vec2<f64>, window: u64) {
        self.samples.push_back((step, u));
        while let Some(&(s, _)) = self.samples.front() {
            if s + window < step {
                self.samples.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = &(u64, Vec2<f64>)> {
        self.samples.iter()
    }
}

/// `Ω(j, t)`: some buffered sample `t′` has `‖u(t′)‖ < Δ_u` and
/// `‖u(t) − u(t′)‖ > Δ_d`. Returns the earliest witness step.
pub fn detector_query(buf: &DetectorBuffer, u_now: Vec2<f64>, p: &DetectorParams) -> Option<u64> {
    detector_query_since(buf, u_now, p, 0)
}

/// [`detector_query`] restricted to witnesses at or after step `since`.
/// Observers pass their round start so that the jump caused by everyone
/// turning active at a round boundary is not mistaken for a goal reach.
pub fn detector_query_since(
    buf: &DetectorBuffer,
    u_now: Vec2<f64>,
    p: &DetectorParams,
    since: u64,
) -> Option<u64> {
    buf.samples()
        .find(|(s, u)| *s >= since && u.norm() < p.du && (u_now - *u).norm() > p.dd)
        .map(|(s, _)| *s)
}
