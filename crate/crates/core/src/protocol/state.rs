//! Per-agent protocol state and the hooks that update it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ltl::Letter;
use crate::planner::DiscretePlan;

/// Which switching protocol drives the team.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// Switch to passive for good after the last prefix step.
    Scltl,
    /// Rounds, reach detection and probabilistic activity.
    Fullltl,
}

/// Constants of the probability function `e^{−α Υ[i] (t − χ)}`, applied
/// while `Υ[i]·(t − χ) < χ̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FProb {
    #[serde(default = "default_chi_bar")]
    pub chi_bar: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_chi_bar() -> f64 {
    5.0
}

fn default_alpha() -> f64 {
    1.0
}

impl Default for FProb {
    fn default() -> Self {
        FProb {
            chi_bar: default_chi_bar(),
            alpha: default_alpha(),
        }
    }
}

impl FProb {
    /// `f_cond`: whether the agent may stay active at all.
    pub fn condition(&self, own_count: u32, elapsed: f64) -> bool {
        f64::from(own_count) * elapsed < self.chi_bar
    }

    /// Probability of staying active when the condition holds.
    pub fn probability(&self, own_count: u32, elapsed: f64) -> f64 {
        (-self.alpha * f64::from(own_count) * elapsed).exp()
    }
}

/// A service set provided at a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provided {
    pub step: u64,
    pub region: usize,
    pub services: Letter,
}

/// Why an agent changed mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchReason {
    /// Finished its finite plan.
    PlanComplete,
    /// Lost the activity draw after a reach.
    Draw,
    /// The activity condition no longer holds.
    Condition,
    /// A new round began.
    RoundStart,
}

impl SwitchReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchReason::PlanComplete => "plan_complete",
            SwitchReason::Draw => "draw",
            SwitchReason::Condition => "condition",
            SwitchReason::RoundStart => "round_start",
        }
    }
}

/// What a reach hook did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReachOutcome {
    pub provided: Option<Provided>,
    /// `Some(new_active)` if the mode changed.
    pub switched: Option<(bool, SwitchReason)>,
}

/// Protocol state of agent `agent` out of `n`.
///
/// `kappa` is the 0-based index of the current goal in the plan, so it runs
/// over `0..K` rather than `1..=K`.
#[derive(Clone, Debug)]
pub struct AgentProtocolState {
    pub agent: usize,
    pub kappa: usize,
    pub active: bool,
    /// Set once a finite plan is complete; the agent then stays passive.
    pub finished: bool,
    /// Inside the goal but still waiting for a small input.
    pub waiting: bool,
    pub word: Vec<Provided>,
    pub upsilon: Vec<u32>,
    /// Start of the current round, in steps.
    pub chi: u64,
    /// Rounds this agent has seen complete.
    pub rounds: u32,
    rng: ChaCha8Rng,
}

impl AgentProtocolState {
    /// Fresh state: active, first goal, one RNG stream per agent derived
    /// from the master seed.
    pub fn new(agent: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(agent as u64);
        AgentProtocolState {
            agent,
            kappa: 0,
            active: true,
            finished: false,
            waiting: false,
            word: Vec::new(),
            upsilon: vec![0; n],
            chi: 0,
            rounds: 0,
            rng,
        }
    }

    /// Region of the current goal.
    pub fn goal(&self, plan: &DiscretePlan) -> usize {
        plan.steps[self.kappa].region
    }

    fn provide(&mut self, plan: &DiscretePlan, step: u64) -> Provided {
        let s = plan.steps[self.kappa];
        let p = Provided {
            step,
            region: s.region,
            services: s.services,
        };
        self.word.push(p);
        p
    }

    // Next goal index; `None` past the end of a finite plan. A lasso plan
    // wraps to the first suffix step.
    fn advance(&self, plan: &DiscretePlan) -> Option<usize> {
        if self.kappa + 1 < plan.big_k() {
            Some(self.kappa + 1)
        } else if plan.is_finite() {
            None
        } else {
            Some(plan.k())
        }
    }

    /// Goal reached under the co-safe protocol: provide the services, then
    /// either move to the next goal or turn passive for good.
    pub fn scltl_on_goal_reach(&mut self, plan: &DiscretePlan, step: u64) -> ReachOutcome {
        if !self.active {
            return ReachOutcome {
                provided: None,
                switched: None,
            };
        }
        let provided = Some(self.provide(plan, step));
        match self.advance(plan) {
            Some(k) => {
                self.kappa = k;
                ReachOutcome {
                    provided,
                    switched: None,
                }
            }
            None => {
                self.active = false;
                self.finished = true;
                ReachOutcome {
                    provided,
                    switched: Some((false, SwitchReason::PlanComplete)),
                }
            }
        }
    }

    /// Goal reached (with a small input) under the general protocol: provide
    /// the services, advance with suffix wrap-around, count the reach, and
    /// draw whether to stay active. Exactly one draw per call.
    pub fn fullltl_on_goal_reach(
        &mut self,
        plan: &DiscretePlan,
        step: u64,
        dt: f64,
        f: &FProb,
    ) -> ReachOutcome {
        self.waiting = false;
        let provided = Some(self.provide(plan, step));
        self.upsilon[self.agent] += 1;
        let draw: f64 = self.rng.gen();
        let Some(k) = self.advance(plan) else {
            self.active = false;
            self.finished = true;
            return ReachOutcome {
                provided,
                switched: Some((false, SwitchReason::PlanComplete)),
            };
        };
        self.kappa = k;
        let own = self.upsilon[self.agent];
        let elapsed = (step - self.chi) as f64 * dt;
        let (stay, reason) = if !f.condition(own, elapsed) {
            (false, SwitchReason::Condition)
        } else {
            (draw < f.probability(own, elapsed), SwitchReason::Draw)
        };
        let switched = (self.active != stay).then_some((stay, reason));
        self.active = stay;
        ReachOutcome { provided, switched }
    }

    /// Counts detected reaches of other agents; when every count is
    /// positive the round is over: counts reset, `χ` moves to now and the
    /// agent turns active. The check also runs without detections, since the
    /// agent's own reach may be the last missing count. Returns true when a
    /// round completed.
    pub fn round_update(&mut self, detections: &[usize], step: u64) -> bool {
        for &j in detections {
            if j != self.agent {
                self.upsilon[j] += 1;
            }
        }
        if self.upsilon.iter().any(|&c| c == 0) {
            return false;
        }
        self.upsilon.iter_mut().for_each(|c| *c = 0);
        self.chi = step;
        self.rounds += 1;
        if !self.finished {
            self.active = true;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::PlanStep;

    fn step(region: usize, mask: u64) -> PlanStep {
        PlanStep {
            region,
            services: Letter::from_mask(mask),
        }
    }

    #[test]
    fn scltl_walks_then_stops() {
        let plan = DiscretePlan {
            steps: vec![step(0, 1), step(2, 4)],
            suffix_start: 2,
        };
        let mut s = AgentProtocolState::new(1, 4, 7);
        let o = s.scltl_on_goal_reach(&plan, 10);
        assert_eq!(o.provided.unwrap().services, Letter::from_mask(1));
        assert!(s.active);
        assert_eq!(s.goal(&plan), 2);
        let o = s.scltl_on_goal_reach(&plan, 20);
        assert_eq!(o.switched, Some((false, SwitchReason::PlanComplete)));
        assert!(!s.active);
        let o = s.scltl_on_goal_reach(&plan, 30);
        assert_eq!(o.provided, None);
        assert_eq!(s.word.len(), 2);
    }

    #[test]
    fn scltl_on_lasso_plan_stays_active() {
        let plan = DiscretePlan {
            steps: vec![step(0, 1)],
            suffix_start: 0,
        };
        let mut s = AgentProtocolState::new(1, 4, 7);
        for k in 0..5 {
            s.scltl_on_goal_reach(&plan, k);
        }
        assert!(s.active);
        assert_eq!(s.kappa, 0);
        assert_eq!(s.word.len(), 5);
    }

    #[test]
    fn fullltl_wraps_into_suffix() {
        let plan = DiscretePlan {
            steps: vec![step(2, 1), step(1, 2)],
            suffix_start: 0,
        };
        let mut s = AgentProtocolState::new(3, 4, 1);
        s.kappa = 1;
        s.fullltl_on_goal_reach(&plan, 1000, 1e-3, &FProb::default());
        assert_eq!(s.kappa, 0);
        assert_eq!(s.upsilon[3], 1);
    }

    #[test]
    fn condition_forces_passive() {
        let plan = DiscretePlan {
            steps: vec![step(0, 1)],
            suffix_start: 0,
        };
        let mut s = AgentProtocolState::new(0, 2, 1);
        // Υ[i] becomes 1 and t − χ = 5 s, so the product reaches χ̄ = 5.
        let o = s.fullltl_on_goal_reach(&plan, 5000, 1e-3, &FProb::default());
        assert!(!s.active);
        assert_eq!(o.switched, Some((false, SwitchReason::Condition)));
    }

    #[test]
    fn stay_probability_matches_exponential() {
        let f = FProb::default();
        assert!(f.condition(1, 1.0));
        assert!((f.probability(1, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((f.probability(1, 1.0) - 0.3679).abs() < 1e-4);
        assert!(!f.condition(1, 5.0));
        let plan = DiscretePlan {
            steps: vec![step(0, 1)],
            suffix_start: 0,
        };
        let trials = 20_000;
        let stayed = (0..trials)
            .filter(|&seed| {
                let mut s = AgentProtocolState::new(0, 2, seed);
                s.fullltl_on_goal_reach(&plan, 1000, 1e-3, &f);
                s.active
            })
            .count();
        let rate = stayed as f64 / trials as f64;
        assert!((rate - 0.3679).abs() < 0.015, "{rate}");
    }

    #[test]
    fn round_update_resets_when_all_seen() {
        let mut s = AgentProtocolState::new(0, 4, 1);
        s.upsilon = vec![1, 0, 1, 1];
        s.active = false;
        assert!(s.round_update(&[1], 1234));
        assert_eq!(s.upsilon, vec![0; 4]);
        assert_eq!(s.chi, 1234);
        assert!(s.active);

        let mut t = AgentProtocolState::new(0, 4, 1);
        t.upsilon = vec![1, 0, 1, 0];
        assert!(!t.round_update(&[], 50));
        assert_eq!(t.upsilon, vec![1, 0, 1, 0]);
        // Self-detections are ignored here.
        assert!(!t.round_update(&[0], 60));
        assert_eq!(t.upsilon, vec![1, 0, 1, 0]);

        // Own reach completing the count.
        let mut w = AgentProtocolState::new(2, 3, 1);
        w.upsilon = vec![1, 1, 1];
        assert!(w.round_update(&[], 70));
        assert_eq!(w.rounds, 1);
    }
}
